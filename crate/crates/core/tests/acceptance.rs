//! Acceptance suite: one `[PASS]`/`[FAIL] ACn` line per criterion, run with `cargo test --test acceptance`.

use std::path::PathBuf;
use std::sync::Arc;
use std::time::{Duration, Instant};

use holodiv_core::ba_kernel::{hefer_form, reproduce_check, KernelContext, Quadrature};
use holodiv_core::divided_differences::{cert_sup_infty, leibniz_check, CertConfig};
use holodiv_core::geometry::sampling::{graded_samples, point_on_ray, random_in_disc};
use holodiv_core::geometry::{build_kappa_covering, delta, koranyi_frame, quasi_metric_probe, tau, verify_covering, ConvexDomain, CoveringConfig};
use holodiv_core::gluing::{build_locals, build_partition, collar_samples, glue_global, required_centers};
use holodiv_core::local_division::{local_divide, residual_check, LocalConfig};
use holodiv_core::pipeline::counterexample::log_grid;
use holodiv_core::pipeline::run_counterexample;
use holodiv_core::poly::{HoloPoly, Holomorphic, UniPoly};
use holodiv_core::quadrature::halton_disc;
use holodiv_core::types::c;
use holodiv_core::varieties::complete_intersection_check;
use holodiv_core::{HoloError, C2};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Result<Outcome, HoloError> {
    Ok(Outcome { passed, detail })
}

fn ball10() -> ConvexDomain {
    ConvexDomain::ball(C2::real(1.0, 0.0), 1.0)
}

fn model_pair() -> (HoloPoly, HoloPoly) {
    (HoloPoly::z2(), &HoloPoly::z2() - &HoloPoly::monomial(2, 0, c(1.0, 0.0)))
}

fn random_cofactors(rng: &mut ChaCha8Rng, deg: u32) -> (HoloPoly, HoloPoly) {
    (HoloPoly::random(rng, deg), HoloPoly::random(rng, deg))
}

fn member(a1: &HoloPoly, a2: &HoloPoly, f1: &HoloPoly, f2: &HoloPoly) -> HoloPoly {
    &(a1 * f1) + &(a2 * f2)
}

fn ac1() -> Result<Outcome, HoloError> {
    let grid = log_grid(1e-4, 1e-2, 5);
    let mut ok = true;
    let mut detail = Vec::new();
    for q in [3, 5] {
        let r = run_counterexample(q, &grid, &CertConfig::default())?;
        let rel = ((r.slope - r.expected_slope) / r.expected_slope).abs();
        ok &= rel <= 0.1;
        detail.push(format!("q={q} slope {:.4} (want {:.1}, rel err {:.2e})", r.slope, r.expected_slope, rel));
    }
    outcome(ok, detail.join("; "))
}

fn ac2() -> Result<Outcome, HoloError> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let da = rng.random_range(0..6usize);
        let db = rng.random_range(0..6usize);
        let a = UniPoly::new((0..=da).map(|_| random_in_disc(&mut rng, 1.0)).collect());
        let b = UniPoly::new((0..=db).map(|_| random_in_disc(&mut rng, 1.0)).collect());
        let n = rng.random_range(1..=6usize);
        let nodes: Vec<Complex64> = (0..n).map(|_| random_in_disc(&mut rng, 1.0)).collect();
        let r = leibniz_check(|x| a.eval(x), |x| b.eval(x), &nodes)?;
        worst = worst.max(r.residual / r.scale.max(f64::MIN_POSITIVE));
    }
    outcome(worst < 1e-10, format!("max residual/scale {worst:.2e} over 1000 pairs"))
}

fn ac3() -> Result<Outcome, HoloError> {
    let (f1, f2) = model_pair();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (a1, a2) = random_cofactors(&mut rng, 2);
    let g = member(&a1, &a2, &f1, &f2);
    let div = local_divide(Arc::new(g.clone()), &f1, &f2, &ball10(), C2::real(0.1, 0.0), 0.05, &LocalConfig::default())?;
    let fr = *div.frame();
    let (mut worst, mut nodes): (f64, usize) = (0.0, 0);
    for w in halton_disc(100, div.ball_radius() * 0.99, (2, 3)) {
        let (_, t2) = div.newton_tables(w)?;
        let s2 = div.factorization.splits[1].at(w)?;
        for &a in &t2.nodes {
            let want = g.eval(fr.point(w, a)) / s2.p(a);
            worst = worst.max((t2.eval(a) - want).norm() / want.norm().max(f64::MIN_POSITIVE));
            nodes += 1;
        }
    }
    outcome(worst < 1e-9 && nodes >= 100, format!("max relative error {worst:.2e} at {nodes} nodes on 100 fibers"))
}

fn ac4() -> Result<Outcome, HoloError> {
    let (f1, f2) = model_pair();
    let domain = ball10();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let cfg = LocalConfig { quad_nodes: 256, check_samples: 0, ..Default::default() };
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let (a1, a2) = random_cofactors(&mut rng, 3);
        let g = member(&a1, &a2, &f1, &f2);
        for eps in [0.1, 0.05, 0.025] {
            let div = local_divide(Arc::new(g.clone()), &f1, &f2, &domain, C2::real(eps, 0.0), 0.05, &cfg)?;
            let rep = residual_check(&div, &div.ball_samples(200, 1.0))?;
            worst = worst.max(rep.max_residual / rep.g_scale.max(1.0));
        }
    }
    outcome(worst < 1e-8, format!("max residual/scale {worst:.2e} over 15 balls x 200 samples"))
}

fn ac5() -> Result<Outcome, HoloError> {
    let (f1, f2) = model_pair();
    let domain = ball10();
    let g = member(&HoloPoly::z1(), &HoloPoly::z2(), &f1, &f2);
    let cov = build_kappa_covering(&domain, &CoveringConfig { kappa: 0.05, eps0: 0.1, ..Default::default() })?;
    let partition = Arc::new(build_partition(&cov, &domain, 1)?);
    let samples = collar_samples(&cov, &domain, 1000, 5);
    let need = required_centers(&partition, &samples, 0.05);
    let cfg = LocalConfig { check_samples: 16, ..Default::default() };
    let set = build_locals(&partition, &need, Arc::new(g), &f1, &f2, &domain, &cfg);
    let failures = set.failures.len();
    let sol = glue_global(partition, set.locals, &f1, &f2);
    let (mut violations, mut errors, mut global, mut local) = (0usize, 0usize, 0.0f64, 0.0f64);
    for &z in &samples {
        match sol.eval_full(z) {
            Ok(e) => {
                global = global.max(e.residual);
                local = local.max(e.max_local_residual);
                if e.residual > e.max_local_residual * (1.0 + 1e-9) + 1e-15 {
                    violations += 1;
                }
            }
            Err(_) => errors += 1,
        }
    }
    outcome(
        failures == 0 && errors == 0 && violations == 0,
        format!(
            "{} samples, {} local balls, global {global:.2e} <= local {local:.2e}; {violations} violations, {errors} eval errors, {failures} local failures",
            samples.len(),
            need.len()
        ),
    )
}

fn ac6() -> Result<Outcome, HoloError> {
    let domain = ConvexDomain::unit_ball();
    let mut ctx = KernelContext::new(domain.clone(), 4)?;
    ctx.calibrate(domain.interior_point(), 20)?;
    let gs = [
        ("1", HoloPoly::constant(c(1.0, 0.0))),
        ("z1", HoloPoly::z1()),
        ("z1*z2", HoloPoly::monomial(1, 1, c(1.0, 0.0))),
    ];
    let points = [C2::real(0.0, 0.0), C2::new(c(0.3, 0.0), c(0.0, 0.2)), C2::new(c(-0.2, 0.1), c(0.4, 0.0))];
    let mut ok = true;
    let mut worst: f64 = 0.0;
    for (k, z) in points.iter().enumerate() {
        assert!(domain.rho(*z) <= -0.3);
        for (m, (_, g)) in gs.iter().enumerate() {
            let seed = 600 + (3 * k + m) as u64;
            let r = reproduce_check(&ctx, g, *z, Quadrature::MonteCarlo { samples: 1_000_000, seed })?;
            let tol = 5e-2 * r.reference.norm() + 5e-3;
            ok &= r.abs_error <= tol;
            worst = worst.max(r.abs_error / tol);
        }
    }
    outcome(ok, format!("C = {:.6}, worst error/tolerance {worst:.3} over 9 cases", ctx.c_norm.re))
}

fn ac7() -> Result<Outcome, HoloError> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let deg = rng.random_range(1..=6u32);
        let f = HoloPoly::random(&mut rng, deg);
        let form = hefer_form(&f);
        for _ in 0..100 {
            let zeta = C2::new(random_in_disc(&mut rng, 0.7), random_in_disc(&mut rng, 0.7));
            let z = C2::new(random_in_disc(&mut rng, 0.7), random_in_disc(&mut rng, 0.7));
            let scale = f.eval(z).norm().max(f.eval(zeta).norm()).max(1.0);
            worst = worst.max(form.residual(zeta, z) / scale);
        }
    }
    outcome(worst < 1e-13, format!("max residual/scale {worst:.2e} over 1000 pairs"))
}

fn ac8() -> Result<Outcome, HoloError> {
    let unit = ConvexDomain::unit_ball();
    let mut tau_err: f64 = 0.0;
    for eps in [1e-4, 1e-3, 1e-2, 1e-1] {
        let t = tau(&unit, C2::real(1.0 - eps, 0.0), C2::real(0.0, 1.0), eps);
        tau_err = tau_err.max((t / eps.sqrt() - 1.0).abs());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut pairs, mut bad) = (0usize, 0usize);
    while pairs < 1000 {
        let dir = C2::new(random_in_disc(&mut rng, 1.0), random_in_disc(&mut rng, 1.0));
        if dir.norm() < 0.1 {
            continue;
        }
        let depth = 10f64.powf(rng.random_range(-3.0..-0.6));
        let Some(z) = point_on_ray(&unit, dir.normalized(), -depth) else { continue };
        let f = koranyi_frame(&unit, z)?;
        let zeta = f.point(random_in_disc(&mut rng, 0.05), random_in_disc(&mut rng, 0.2));
        if !unit.in_collar(zeta) {
            continue;
        }
        let d = delta(&unit, z, zeta)?;
        let inside = f.in_ball(d * (1.0 + 1e-9) + 1e-15, zeta);
        let tight = d <= 1e-12 || !f.in_ball(d * (1.0 - 1e-9), zeta);
        if !(inside && tight) {
            bad += 1;
        }
        pairs += 1;
    }
    let a = quasi_metric_probe(&unit, 2000, 81)?;
    let b = quasi_metric_probe(&unit, 2000, 82)?;
    let spread = (a.c1_tri - b.c1_tri).abs() / a.c1_tri.max(b.c1_tri);
    let finite = a.c1_tri.is_finite() && b.c1_tri.is_finite();
    outcome(
        tau_err < 1e-10 && bad == 0 && finite && spread <= 0.2,
        format!(
            "tau rel err {tau_err:.1e}; delta round trip {bad}/{pairs} failures; triangle constant {:.3} vs {:.3} (spread {:.1}%)",
            a.c1_tri,
            b.c1_tri,
            100.0 * spread
        ),
    )
}

fn ac9() -> Result<Outcome, HoloError> {
    let unit = ConvexDomain::unit_ball();
    let cov = build_kappa_covering(&unit, &CoveringConfig { kappa: 0.05, eps0: 0.1, ..Default::default() })?;
    let rep = verify_covering(&cov, &unit, 2000, 9)?;
    outcome(
        rep.violations.is_empty() && rep.overlap_pointwise <= 64,
        format!(
            "{} centers on {} levels, {} violations, overlap M = {}",
            rep.centers,
            rep.levels,
            rep.violations.len(),
            rep.overlap_pointwise
        ),
    )
}

#[derive(Deserialize)]
struct IntersectionFixture {
    name: String,
    f1: HoloPoly,
    f2: HoloPoly,
    complete: bool,
    common_zeros: Vec<C2>,
}

fn ac10() -> Result<Outcome, HoloError> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/intersections.json");
    let text = std::fs::read_to_string(&path).map_err(|e| HoloError::Io(format!("{}: {e}", path.display())))?;
    let fixtures: Vec<IntersectionFixture> = serde_json::from_str(&text).map_err(|e| HoloError::Schema { path: "fixtures".into(), message: e.to_string() })?;
    let mut ok = fixtures.len() == 3;
    let mut detail = Vec::new();
    for fx in &fixtures {
        let r = complete_intersection_check(&fx.f1, &fx.f2);
        let sym = complete_intersection_check(&fx.f2, &fx.f1);
        let zeros_match = r.common_zeros.len() == fx.common_zeros.len()
            && fx.common_zeros.iter().all(|w| r.common_zeros.iter().any(|z| (*z - *w).norm() < 1e-6));
        let case = r.complete == fx.complete && sym.complete == fx.complete && zeros_match;
        ok &= case;
        detail.push(format!("{}: {}", fx.name, if r.complete { "complete" } else { "not complete" }));
    }
    outcome(ok, detail.join("; "))
}

/// Sup of `|a|` on the closed ball by the maximum principle, sampled on the sphere.
fn sup_on_sphere(a: &HoloPoly, rng: &mut ChaCha8Rng, n: usize) -> f64 {
    let center = C2::real(1.0, 0.0);
    (0..n)
        .map(|_| {
            let u = C2::new(random_in_disc(rng, 1.0), random_in_disc(rng, 1.0));
            a.eval(center + u.normalized()).norm()
        })
        .fold(0.0, f64::max)
}

fn ac11() -> Result<Outcome, HoloError> {
    let (f1, f2) = model_pair();
    let domain = ball10();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let centers = graded_samples(&domain, 60, 1e-3, 0.1, &mut rng);
    let k_max = CertConfig::default().k_max;
    let mut c_emp: f64 = 0.0;
    for _ in 0..5 {
        let (a1, a2) = random_cofactors(&mut rng, 2);
        let g = member(&a1, &a2, &f1, &f2);
        let sup_a = sup_on_sphere(&a1, &mut rng, 20_000).max(sup_on_sphere(&a2, &mut rng, 20_000));
        for kappa in [0.05, 0.025] {
            let cfg = CertConfig { kappa, ..Default::default() };
            for l in 1..=2 {
                let cert = cert_sup_infty(&g, &f1, &f2, &domain, &centers, &cfg, l);
                c_emp = c_emp.max(cert.value / sup_a);
            }
        }
    }
    // Cauchy estimate on the disc of radius tau(|rho|) for nodes inside tau(3 kappa |rho|).
    let bound = (1.0 - (3.0f64 * 0.05).sqrt()).powi(-(k_max as i32));
    outcome(c_emp.is_finite() && c_emp <= bound, format!("C = {c_emp:.4} (Cauchy bound {bound:.3}), 5 members x 2 kappas"))
}

fn main() {
    type Check = fn() -> Result<Outcome, HoloError>;
    let suite: [(&str, Check, u64); 11] = [
        ("AC1", ac1, 30),
        ("AC2", ac2, 5),
        ("AC3", ac3, 5),
        ("AC4", ac4, 60),
        ("AC5", ac5, 120),
        ("AC6", ac6, 120),
        ("AC7", ac7, 2),
        ("AC8", ac8, 10),
        ("AC9", ac9, 60),
        ("AC10", ac10, 1),
        ("AC11", ac11, 60),
    ];
    let mut failed = 0;
    for (name, check, budget) in suite {
        let t0 = Instant::now();
        let res = check();
        let dt = t0.elapsed();
        let in_time = dt <= Duration::from_secs(budget);
        let (passed, detail) = match res {
            Ok(o) => (o.passed && in_time, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !passed {
            failed += 1;
        }
        println!(
            "[{}] {name} {detail} ({:.2}s, budget {budget}s)",
            if passed { "PASS" } else { "FAIL" },
            dt.as_secs_f64()
        );
    }
    println!("{} of 11 criteria passed", 11 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
