use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::domain::ConvexDomain;
use super::frame::{koranyi_frame, KoranyiFrame};
use super::sampling::{log_uniform, point_on_ray, random_in_disc, random_unit};
use crate::error::{HoloError, Result};
use crate::types::C2;

/// `max_{|lambda| = r} rho(z + lambda v) - rho(z)`, nondecreasing in `r` for convex rho.
pub fn max_increment(domain: &ConvexDomain, z: C2, v: C2, r: f64) -> f64 {
    if let Some((a, center)) = domain.quadratic() {
        let w = z - center;
        let av = C2::new(a[0][0] * v.z1 + a[0][1] * v.z2, a[1][0] * v.z1 + a[1][1] * v.z2);
        let beta = av.hdot(w).norm();
        let quad = av.hdot(v).re;
        return 2.0 * r * beta + r * r * quad;
    }
    let rho0 = domain.rho(z);
    let phase = |t: f64| domain.rho(z + v * num_complex::Complex64::from_polar(r, t)) - rho0;
    let n = 64;
    let h = std::f64::consts::TAU / n as f64;
    let (mut best_t, mut best) = (0.0, f64::NEG_INFINITY);
    for k in 0..n {
        let t = k as f64 * h;
        let val = phase(t);
        if val > best {
            best = val;
            best_t = t;
        }
    }
    // Golden-section refinement on the bracketing arc.
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (best_t - h, best_t + h);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (phase(x1), phase(x2));
    for _ in 0..60 {
        if f1 > f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = phase(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = phase(x2);
        }
    }
    best.max(f1).max(f2)
}

/// Largest `r` with `rho(z + lambda v) - rho(z) < eps` for all `|lambda| < r`.
pub fn tau(domain: &ConvexDomain, z: C2, v: C2, eps: f64) -> f64 {
    assert!(eps > 0.0, "tau needs eps > 0");
    let mut hi = 1.0;
    while max_increment(domain, z, v, hi) < eps {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        if hi - lo <= 1e-14 * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if max_increment(domain, z, v, mid) < eps {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `max(|zeta1*|, |zeta2*|^2)` in the given frame.
pub fn delta_in_frame(frame: &KoranyiFrame, zeta: C2) -> f64 {
    let (a, b) = frame.coords(zeta);
    a.norm().max(b.norm_sqr())
}

/// Pseudo-distance: smallest `r` with `zeta` in the closed Koranyi ball of radius `r` at `z`.
pub fn delta(domain: &ConvexDomain, z: C2, zeta: C2) -> Result<f64> {
    for p in [z, zeta] {
        if !domain.in_collar(p) {
            return Err(HoloError::OutsideCollar { rho: domain.rho(p) });
        }
    }
    Ok(delta_in_frame(&koranyi_frame(domain, z)?, zeta))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuasiMetricReport {
    /// Max of `delta(z, zeta) / delta(zeta, z)`.
    pub c1_sym: f64,
    /// Max of `delta(z, zeta) / (delta(z, xi) + delta(xi, zeta))`.
    pub c1_tri: f64,
    /// Max of `|rho(z) - rho(zeta)| / eps` over `zeta` in `P_eps(z)`.
    pub c1_rho: f64,
    pub triples: usize,
}

/// Point in `P_eps(z)` drawn uniformly in starred coordinates.
fn koranyi_displace(frame: &KoranyiFrame, eps: f64, rng: &mut ChaCha8Rng) -> C2 {
    let a = random_in_disc(rng, eps);
    let b = random_in_disc(rng, eps.sqrt());
    frame.point(a, b)
}

/// Empirical quasi-symmetry and quasi-triangle constants of `delta` on seeded local triples.
pub fn quasi_metric_probe(domain: &ConvexDomain, samples: usize, seed: u64) -> Result<QuasiMetricReport> {
    if samples < 100 {
        return Err(HoloError::InvalidArgument("quasi_metric_probe needs at least 100 samples".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_depth = (0.5 * domain.collar).min(0.25);
    let mut rep = QuasiMetricReport { c1_sym: 0.0, c1_tri: 0.0, c1_rho: 0.0, triples: 0 };
    let mut guard = 0;
    while rep.triples < samples && guard < 50 * samples {
        guard += 1;
        let depth = log_uniform(&mut rng, 1e-3, max_depth);
        let Some(z) = point_on_ray(domain, random_unit(&mut rng), -depth) else { continue };
        let eps = depth * log_uniform(&mut rng, 1e-2, 0.5);
        let fz = koranyi_frame(domain, z)?;
        let xi = koranyi_displace(&fz, eps, &mut rng);
        if !domain.in_collar(xi) || domain.rho(xi) >= 0.0 {
            continue;
        }
        let fxi = koranyi_frame(domain, xi)?;
        let zeta = koranyi_displace(&fxi, eps, &mut rng);
        if !domain.in_collar(zeta) || domain.rho(zeta) >= 0.0 {
            continue;
        }
        let fzeta = koranyi_frame(domain, zeta)?;
        let d_zz = delta_in_frame(&fz, zeta);
        let d_back = delta_in_frame(&fzeta, z);
        let d_zx = delta_in_frame(&fz, xi);
        let d_xz = delta_in_frame(&fxi, zeta);
        if d_back > 0.0 {
            rep.c1_sym = rep.c1_sym.max(d_zz / d_back);
        }
        if d_zx + d_xz > 0.0 {
            rep.c1_tri = rep.c1_tri.max(d_zz / (d_zx + d_xz));
        }
        rep.c1_rho = rep.c1_rho.max((domain.rho(z) - domain.rho(xi)).abs() / eps);
        rep.triples += 1;
    }
    Ok(rep)
}
