//! Weierstrass-type splits `f = P Q` with `P` the monic product over retained root curves.

use num_complex::Complex64;

use super::roots::fiber_poly;
use super::tracking::{track_roots, RootCurves, TrackConfig};
use crate::error::{HoloError, Result};
use crate::geometry::KoranyiFrame;
use crate::poly::{HoloPoly, UniPoly};
use crate::types::c;

/// Largest tolerated `max |Q| / min |Q|` over the ball.
pub const DEFLATION_LIMIT: f64 = 1e6;

#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    pub f: HoloPoly,
    pub curves: RootCurves,
    pub index_set: Vec<usize>,
    /// `max |Q| / min |Q|` on the sampled ball.
    pub q_ratio: f64,
    pub q_min: f64,
}

/// `P` and `Q` on one fiber line.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberSplit {
    /// All labeled roots on this fiber.
    pub roots: Vec<Complex64>,
    /// Roots with labels in the index set, in index-set order.
    pub p_roots: Vec<Complex64>,
    /// Fiber polynomial of `f`.
    pub fiber: UniPoly,
    /// Fiber polynomial divided by `prod (x - alpha_i)`, `i` in the index set.
    pub quotient: UniPoly,
}

impl FiberSplit {
    pub fn p(&self, z2s: Complex64) -> Complex64 {
        self.p_roots.iter().fold(c(1.0, 0.0), |acc, a| acc * (z2s - a))
    }

    pub fn q(&self, z2s: Complex64) -> Complex64 {
        self.quotient.eval(z2s)
    }

    pub fn f(&self, z2s: Complex64) -> Complex64 {
        self.fiber.eval(z2s)
    }
}

impl Split {
    pub fn frame(&self) -> &KoranyiFrame {
        &self.curves.frame
    }

    pub fn at(&self, z1s: Complex64) -> Result<FiberSplit> {
        let fiber = fiber_poly(&self.f, &self.curves.frame, z1s)?;
        let roots = if self.index_set.is_empty() {
            Vec::new()
        } else {
            self.curves.labeled_roots(&self.f, z1s)?
        };
        let p_roots: Vec<Complex64> = self.index_set.iter().map(|&i| roots[i]).collect();
        let mut quotient = fiber.trimmed(0.0);
        for &a in &p_roots {
            quotient = quotient.div_linear(a).0;
        }
        Ok(FiberSplit { roots, p_roots, fiber, quotient })
    }

    pub fn p_eval(&self, z1s: Complex64, z2s: Complex64) -> Result<Complex64> {
        Ok(self.at(z1s)?.p(z2s))
    }

    pub fn q_eval(&self, z1s: Complex64, z2s: Complex64) -> Result<Complex64> {
        Ok(self.at(z1s)?.q(z2s))
    }

    pub fn degree(&self) -> usize {
        self.curves.labels()
    }
}

/// Builds `P`, `Q` for the given retained labels and checks that `Q` stays well conditioned on
/// the ball `|zeta1*| < ball_r`, `|zeta2*| < ball_r^(1/2)`.
pub fn weierstrass_split(f: &HoloPoly, curves: RootCurves, index_set: Vec<usize>, ball_r: f64) -> Result<Split> {
    let mut split = Split { f: f.clone(), curves, index_set, q_ratio: 1.0, q_min: 0.0 };
    let (mut qmin, mut qmax) = (f64::INFINITY, 0.0f64);
    let sr = ball_r.sqrt();
    let offsets: Vec<Complex64> = split
        .curves
        .samples
        .iter()
        .cloned()
        .filter(|s| s.norm() < ball_r)
        .collect();
    for z1s in offsets {
        let fs = split.at(z1s)?;
        for rad in [0.0, 0.5, 0.99] {
            for k in 0..8 {
                let z2s = Complex64::from_polar(rad * sr, std::f64::consts::TAU * k as f64 / 8.0);
                let q = fs.q(z2s).norm();
                qmin = qmin.min(q);
                qmax = qmax.max(q);
            }
        }
    }
    split.q_min = qmin;
    split.q_ratio = if qmax == 0.0 { f64::INFINITY } else { qmax / qmin };
    if !(split.q_ratio <= DEFLATION_LIMIT) {
        return Err(HoloError::DeflationUnstable { ratio: split.q_ratio });
    }
    Ok(split)
}

/// Splits of `f1` and `f2` around one center.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberFactorization {
    pub frame: KoranyiFrame,
    pub kappa: f64,
    pub rho_abs: f64,
    pub splits: [Split; 2],
}

impl FiberFactorization {
    /// Tracks on `|zeta1*| < 2 kappa |rho|`, selects index sets and splits both functions.
    pub fn build(f1: &HoloPoly, f2: &HoloPoly, frame: &KoranyiFrame, kappa: f64, rho_abs: f64, cfg: &TrackConfig) -> Result<Self> {
        let radius = 2.0 * kappa * rho_abs;
        let mk = |f: &HoloPoly| -> Result<Split> {
            let curves = track_roots(f, frame, radius, cfg)?;
            let idx = curves.select_index_set(kappa, rho_abs);
            weierstrass_split(f, curves, idx, kappa * rho_abs)
        };
        Ok(FiberFactorization { frame: *frame, kappa, rho_abs, splits: [mk(f1)?, mk(f2)?] })
    }

    pub fn index_sizes(&self) -> (usize, usize) {
        (self.splits[0].index_set.len(), self.splits[1].index_set.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{koranyi_frame, ConvexDomain};
    use crate::poly::Holomorphic;
    use crate::C2;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn setup() -> (ConvexDomain, KoranyiFrame, f64) {
        let d = ConvexDomain::ball(C2::real(1.0, 0.0), 1.0);
        let fr = koranyi_frame(&d, C2::real(0.1, 0.0)).unwrap();
        let rho = d.rho(fr.base).abs();
        (d, fr, rho)
    }

    #[test]
    fn linear_factor_has_unit_quotient() {
        let (_, fr, rho) = setup();
        let ff = FiberFactorization::build(
            &HoloPoly::z2(),
            &(&HoloPoly::z2() - &(&HoloPoly::z1() * &HoloPoly::z1())),
            &fr,
            0.05,
            rho,
            &TrackConfig::default(),
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let r = 0.05 * rho;
        for split in &ff.splits {
            assert_eq!(split.index_set, vec![0]);
            for _ in 0..50 {
                let z1s = crate::geometry::sampling::random_in_disc(&mut rng, r);
                let z2s = crate::geometry::sampling::random_in_disc(&mut rng, r.sqrt());
                let q = split.q_eval(z1s, z2s).unwrap();
                assert!((q - c(1.0, 0.0)).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn empty_index_set_keeps_f() {
        let (_, fr, rho) = setup();
        let f = &HoloPoly::z2() - &HoloPoly::constant(c(0.5, 0.0));
        let curves = track_roots(&f, &fr, 0.1 * rho, &TrackConfig::default()).unwrap();
        let idx = curves.select_index_set(0.05, rho);
        assert!(idx.is_empty());
        let s = weierstrass_split(&f, curves, idx, 0.05 * rho).unwrap();
        let z = C2::new(c(0.1, 0.001), c(0.02, 0.0));
        let (a, b) = fr.coords(z);
        assert_eq!(s.p_eval(a, b).unwrap(), c(1.0, 0.0));
        assert!((s.q_eval(a, b).unwrap() - f.eval(z)).norm() < 1e-14);
    }

    #[test]
    fn factorization_identity_on_random_ball_points() {
        let (_, fr, rho) = setup();
        let f = HoloPoly::from_terms([(0, 2, c(1.0, 0.0)), (1, 1, c(0.3, 0.0)), (2, 0, c(-1.0, 0.2)), (0, 0, c(0.001, 0.0))]);
        let curves = track_roots(&f, &fr, 0.1 * rho, &TrackConfig::default()).unwrap();
        let idx = curves.select_index_set(0.05, rho);
        let s = weierstrass_split(&f, curves, idx, 0.05 * rho).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..1000 {
            let z1s = crate::geometry::sampling::random_in_disc(&mut rng, 0.05 * rho);
            let z2s = crate::geometry::sampling::random_in_disc(&mut rng, (0.05 * rho).sqrt());
            let fs = s.at(z1s).unwrap();
            let direct = f.eval(fr.point(z1s, z2s));
            assert!((direct - fs.p(z2s) * fs.q(z2s)).norm() <= 1e-9 * direct.norm().max(1.0));
            let _ = rng.random::<f64>();
        }
    }
}
