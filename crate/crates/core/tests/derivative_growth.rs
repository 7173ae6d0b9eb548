use std::sync::Arc;

use holodiv_core::geometry::ConvexDomain;
use holodiv_core::local_division::{local_divide, LocalConfig, LocalDivision};
use holodiv_core::poly::HoloPoly;
use holodiv_core::types::c;
use holodiv_core::C2;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Wirtinger derivative along a unit direction by central differences; `conj` selects d/dw-bar.
fn wirtinger<F: Fn(C2) -> Complex64>(f: &F, z: C2, dir: C2, h: f64, conj: bool) -> Complex64 {
    let dx = (f(z + dir * c(h, 0.0)) - f(z - dir * c(h, 0.0))) / (2.0 * h);
    let dy = (f(z + dir * c(0.0, h)) - f(z - dir * c(0.0, h))) / (2.0 * h);
    let i = c(0.0, 1.0);
    if conj {
        (dx + i * dy) * 0.5
    } else {
        (dx - i * dy) * 0.5
    }
}

/// Order-2 derivative word: each letter is (normal?, conjugate?).
fn nested(div: &LocalDivision, l: usize, z: C2, word: &[(bool, bool)]) -> Complex64 {
    let fr = *div.frame();
    let rho = div.rho_abs;
    let pick = move |p: C2| {
        let (a, b) = div.eval(p).unwrap();
        if l == 1 {
            a
        } else {
            b
        }
    };
    let step = |normal: bool| if normal { 1e-3 * rho } else { 1e-3 * rho.sqrt() };
    let dir = |normal: bool| if normal { fr.eta } else { fr.v };
    match word {
        [(n, cj)] => wirtinger(&pick, z, dir(*n), step(*n), *cj),
        [(n1, c1), (n2, c2)] => {
            let inner = |p: C2| wirtinger(&pick, p, dir(*n2), step(*n2), *c2);
            wirtinger(&inner, z, dir(*n1), 2.0 * step(*n1), *c1)
        }
        _ => unreachable!(),
    }
}

fn scaled_sup(div: &LocalDivision, samples: &[C2]) -> f64 {
    let letters = [(true, false), (false, false), (true, true), (false, true)];
    let mut words: Vec<Vec<(bool, bool)>> = letters.iter().map(|&x| vec![x]).collect();
    for &a in &letters {
        for &b in &letters {
            words.push(vec![a, b]);
        }
    }
    let mut sup: f64 = 0.0;
    for w in &words {
        let normals = w.iter().filter(|x| x.0).count() as f64;
        let tangents = w.len() as f64 - normals;
        let weight = div.rho_abs.powf(normals + tangents / 2.0);
        for l in 1..=2 {
            for &z in samples {
                sup = sup.max(weight * nested(div, l, z, w).norm());
            }
        }
    }
    sup
}

#[test]
fn scaled_derivatives_stay_bounded_along_a_shrinking_family() {
    let f1 = HoloPoly::z2();
    let f2 = &HoloPoly::z2() - &HoloPoly::monomial(2, 0, c(1.0, 0.0));
    let domain = ConvexDomain::ball(C2::real(1.0, 0.0), 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..3 {
        let g = &(&HoloPoly::random(&mut rng, 2) * &f1) + &(&HoloPoly::random(&mut rng, 2) * &f2);
        let sups: Vec<f64> = [0.1, 0.05, 0.025]
            .iter()
            .map(|&eps| {
                let div = local_divide(Arc::new(g.clone()), &f1, &f2, &domain, C2::real(eps, 0.0), 0.05, &LocalConfig::default()).unwrap();
                scaled_sup(&div, &div.ball_samples(12, 0.5))
            })
            .collect();
        assert!(sups.iter().all(|s| s.is_finite()));
        assert!(sups[2] <= 4.0 * sups[0].max(1e-12), "{sups:?}");
    }
}
