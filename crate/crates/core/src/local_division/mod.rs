//! Local solutions of `g = g1 f1 + g2 f2` on one Koranyi ball.

pub mod contour;
pub mod cutoff;
pub mod interp;

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use contour::{ContourMode, ContourRule};
pub use cutoff::{chi, cutoffs};
pub use interp::{newton_interpolant, node_jitter, NewtonTable};

use crate::error::{HoloError, Result};
use crate::geometry::{koranyi_frame, ConvexDomain, KoranyiFrame};
use crate::poly::{HoloPoly, Holomorphic};
use crate::quadrature::halton_disc;
use crate::types::C2;
use crate::varieties::{FiberFactorization, FiberSplit, TrackConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalConfig {
    pub quad_nodes: usize,
    pub mode: ContourMode,
    pub residual_tol: f64,
    /// Samples used by the residual check inside [`local_divide`].
    pub check_samples: usize,
    pub track: TrackConfig,
}

impl Default for LocalConfig {
    fn default() -> Self {
        LocalConfig { quad_nodes: 256, mode: ContourMode::Circle, residual_tol: 1e-8, check_samples: 48, track: TrackConfig::default() }
    }
}

/// All intermediate quantities at one point of the ball.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LocalEval {
    pub z1s: Complex64,
    pub z2s: Complex64,
    pub g: Complex64,
    pub f1: Complex64,
    pub f2: Complex64,
    pub p1: Complex64,
    pub p2: Complex64,
    pub q1: Complex64,
    pub q2: Complex64,
    pub g1_tilde: Complex64,
    pub g2_tilde: Complex64,
    pub e: Complex64,
    pub chi1: f64,
    pub chi2: f64,
    pub ghat1: Complex64,
    pub ghat2: Complex64,
}

impl LocalEval {
    /// `g - ghat1 f1 - ghat2 f2`.
    pub fn residual(&self) -> Complex64 {
        self.g - self.ghat1 * self.f1 - self.ghat2 * self.f2
    }

    /// `g - P1 g1~ - P2 g2~ - P1 P2 e`.
    pub fn interpolation_identity(&self) -> Complex64 {
        self.g - self.p1 * self.g1_tilde - self.p2 * self.g2_tilde - self.p1 * self.p2 * self.e
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub max_residual: f64,
    pub sup_ghat1: f64,
    pub sup_ghat2: f64,
    /// Largest `|g|` seen; residuals are compared against `residual_tol * max(1, g_scale)`.
    pub g_scale: f64,
    pub samples: usize,
}

pub struct LocalDivision {
    pub center: C2,
    pub kappa: f64,
    pub rho_abs: f64,
    pub factorization: FiberFactorization,
    pub contour: ContourRule,
    pub config: LocalConfig,
    /// `g2~` tables at the tracked offsets inside the ball (nodes on `X1`).
    pub newton_2: Vec<NewtonTable>,
    /// `g1~` tables at the tracked offsets inside the ball (nodes on `X2`).
    pub newton_1: Vec<NewtonTable>,
    pub erratum_flags: Vec<String>,
    /// Disables the error term; only for defect experiments.
    pub drop_error_term: bool,
    /// Residual check run during construction.
    pub check: Option<ResidualReport>,
    g: Arc<dyn Holomorphic>,
}

impl fmt::Debug for LocalDivision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LocalDivision")
            .field("center", &self.center)
            .field("kappa", &self.kappa)
            .field("rho_abs", &self.rho_abs)
            .field("index_sizes", &self.factorization.index_sizes())
            .field("contour", &self.contour)
            .finish_non_exhaustive()
    }
}

impl LocalDivision {
    pub fn frame(&self) -> &KoranyiFrame {
        &self.factorization.frame
    }

    pub fn g(&self) -> &Arc<dyn Holomorphic> {
        &self.g
    }

    /// Radius of the ball `P_{kappa |rho(z)|}(z)`.
    pub fn ball_radius(&self) -> f64 {
        self.kappa * self.rho_abs
    }

    pub fn contains(&self, zeta: C2) -> bool {
        self.frame().in_ball(self.ball_radius(), zeta)
    }

    fn fibers(&self, z1s: Complex64) -> Result<(FiberSplit, FiberSplit)> {
        let s1 = self.factorization.splits[0].at(z1s)?;
        let s2 = self.factorization.splits[1].at(z1s)?;
        let all: Vec<Complex64> = s1.roots.iter().chain(&s2.roots).cloned().collect();
        let inside: Vec<Complex64> = s1.p_roots.iter().chain(&s2.p_roots).cloned().collect();
        self.contour.check_roots(&inside, &all)?;
        Ok((s1, s2))
    }

    fn fiber_g(&self, z1s: Complex64) -> impl Fn(Complex64) -> Complex64 + '_ {
        let fr = *self.frame();
        move |xi| self.g.eval(fr.point(z1s, xi))
    }

    fn p_scale(&self, deg: usize) -> f64 {
        self.contour.radius.powi(deg as i32).max(f64::MIN_POSITIVE)
    }

    /// `(g1~ table, g2~ table)` on the fiber at `z1s`.
    pub fn newton_tables(&self, z1s: Complex64) -> Result<(NewtonTable, NewtonTable)> {
        let (s1, s2) = self.fibers(z1s)?;
        self.tables_for(z1s, &s1, &s2)
    }

    fn tables_for(&self, z1s: Complex64, s1: &FiberSplit, s2: &FiberSplit) -> Result<(NewtonTable, NewtonTable)> {
        let h = self.fiber_g(z1s);
        let r = self.contour.radius;
        let t2 = newton_interpolant(z1s, &h, |x| s2.p(x), &s1.p_roots, r, self.p_scale(s2.p_roots.len()))?;
        let t1 = newton_interpolant(z1s, &h, |x| s1.p(x), &s2.p_roots, r, self.p_scale(s1.p_roots.len()))?;
        Ok((t1, t2))
    }

    /// Error term `e` at frame coordinates.
    pub fn error_term(&self, z1s: Complex64, z2s: Complex64) -> Result<Complex64> {
        let (s1, s2) = self.fibers(z1s)?;
        Ok(self.error_for(z1s, z2s, &s1, &s2))
    }

    fn error_for(&self, z1s: Complex64, z2s: Complex64, s1: &FiberSplit, s2: &FiberSplit) -> Complex64 {
        if self.drop_error_term {
            return Complex64::new(0.0, 0.0);
        }
        self.contour.integrate(self.fiber_g(z1s), |x| s1.p(x) * s2.p(x), z2s)
    }

    pub fn eval_parts(&self, zeta: C2) -> Result<LocalEval> {
        let (z1s, z2s) = self.frame().coords(zeta);
        let (s1, s2) = self.fibers(z1s)?;
        let (t1, t2) = self.tables_for(z1s, &s1, &s2)?;
        let e = self.error_for(z1s, z2s, &s1, &s2);
        let (p1, p2, q1, q2) = (s1.p(z2s), s2.p(z2s), s1.q(z2s), s2.q(z2s));
        let (i1, i2) = (s1.p_roots.len(), s2.p_roots.len());
        let (chi1, chi2) = cutoffs(q1, q2, self.rho_abs, i1, i2)?;
        let (g1_tilde, g2_tilde) = (t1.eval(z2s), t2.eval(z2s));
        Ok(LocalEval {
            z1s,
            z2s,
            g: self.g.eval(zeta),
            f1: s1.f(z2s),
            f2: s2.f(z2s),
            p1,
            p2,
            q1,
            q2,
            g1_tilde,
            g2_tilde,
            e,
            chi1,
            chi2,
            ghat1: (g1_tilde + p2 * e * chi1) / q1,
            ghat2: (g2_tilde + p1 * e * chi2) / q2,
        })
    }

    /// `(ghat1, ghat2)` at `zeta`.
    pub fn eval(&self, zeta: C2) -> Result<(Complex64, Complex64)> {
        let p = self.eval_parts(zeta)?;
        Ok((p.ghat1, p.ghat2))
    }

    /// Low-discrepancy points of the ball, scaled by `shrink` in both coordinates' radii.
    pub fn ball_samples(&self, n: usize, shrink: f64) -> Vec<C2> {
        let r = self.ball_radius() * shrink;
        let a = halton_disc(n, r, (2, 3));
        let b = halton_disc(n, r.sqrt(), (5, 7));
        a.into_iter().zip(b).map(|(x, y)| self.frame().point(x, y)).collect()
    }
}

/// Evaluates `|g - ghat1 f1 - ghat2 f2|` and the sup norms of `ghat_l` on the samples.
pub fn residual_check(div: &LocalDivision, samples: &[C2]) -> Result<ResidualReport> {
    let evals: Vec<LocalEval> = samples.par_iter().map(|&z| div.eval_parts(z)).collect::<Result<_>>()?;
    let mut rep = ResidualReport { max_residual: 0.0, sup_ghat1: 0.0, sup_ghat2: 0.0, g_scale: 0.0, samples: evals.len() };
    for p in evals {
        rep.max_residual = rep.max_residual.max(p.residual().norm());
        rep.sup_ghat1 = rep.sup_ghat1.max(p.ghat1.norm());
        rep.sup_ghat2 = rep.sup_ghat2.max(p.ghat2.norm());
        rep.g_scale = rep.g_scale.max(p.g.norm());
    }
    Ok(rep)
}

/// Builds the local division on `P_{kappa |rho(z)|}(z)` and checks its residual.
pub fn local_divide(
    g: Arc<dyn Holomorphic>,
    f1: &HoloPoly,
    f2: &HoloPoly,
    domain: &ConvexDomain,
    z: C2,
    kappa: f64,
    config: &LocalConfig,
) -> Result<LocalDivision> {
    let frame = koranyi_frame(domain, z)?;
    let rho_abs = domain.rho(z).abs();
    let factorization = FiberFactorization::build(f1, f2, &frame, kappa, rho_abs, &config.track)?;
    let contour = ContourRule::new(config.mode, kappa, rho_abs, config.quad_nodes);
    let mut div = LocalDivision {
        center: z,
        kappa,
        rho_abs,
        factorization,
        contour,
        config: *config,
        newton_1: Vec::new(),
        newton_2: Vec::new(),
        erratum_flags: vec!["g2~ interpolates on the nodes of X1 and sums to i1".to_string()],
        drop_error_term: false,
        check: None,
        g,
    };
    let offsets: Vec<Complex64> = div
        .factorization
        .splits[0]
        .curves
        .samples
        .iter()
        .cloned()
        .filter(|s| s.norm() < div.ball_radius())
        .collect();
    for z1s in offsets {
        let (t1, t2) = div.newton_tables(z1s)?;
        div.newton_1.push(t1);
        div.newton_2.push(t2);
    }
    if div.newton_1.iter().chain(&div.newton_2).any(|t| t.jittered) {
        div.erratum_flags.push("coincident nodes separated by jitter".to_string());
    }
    if config.check_samples > 0 {
        let rep = residual_check(&div, &div.ball_samples(config.check_samples, 0.999))?;
        let tol = config.residual_tol * rep.g_scale.max(1.0);
        if rep.max_residual > 1e3 * tol {
            return Err(HoloError::IncompleteIdeal { residual: rep.max_residual, tolerance: tol });
        }
        div.check = Some(rep);
    }
    Ok(div)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::HalfPowerMonomial;
    use crate::types::c;

    fn ball10() -> ConvexDomain {
        ConvexDomain::ball(C2::real(1.0, 0.0), 1.0)
    }

    fn model() -> (HoloPoly, HoloPoly) {
        (HoloPoly::z2(), &HoloPoly::z2() - &(&HoloPoly::z1() * &HoloPoly::z1()))
    }

    fn divide(g: HoloPoly, z: C2) -> LocalDivision {
        let (f1, f2) = model();
        local_divide(Arc::new(g), &f1, &f2, &ball10(), z, 0.05, &LocalConfig::default()).unwrap()
    }

    #[test]
    fn model_pair_g_equals_f1() {
        let (f1, _) = model();
        let div = divide(f1, C2::real(0.1, 0.0));
        let rep = residual_check(&div, &div.ball_samples(200, 0.999)).unwrap();
        assert!(rep.max_residual < 1e-8, "{rep:?}");
        assert!(rep.sup_ghat1.is_finite() && rep.sup_ghat2.is_finite());
    }

    #[test]
    fn interpolant_of_f2_is_one() {
        let (_, f2) = model();
        let div = divide(f2, C2::real(0.1, 0.0));
        for t in &div.newton_2 {
            assert!((t.eval(t.nodes[0]) - c(1.0, 0.0)).norm() < 1e-9);
        }
        assert!(!div.newton_2.is_empty());
    }

    #[test]
    fn zero_numerator() {
        let div = divide(HoloPoly::zero(), C2::real(0.1, 0.0));
        for z in div.ball_samples(20, 0.9) {
            assert_eq!(div.eval(z).unwrap(), (c(0.0, 0.0), c(0.0, 0.0)));
        }
    }

    #[test]
    fn linear_combination_is_divided() {
        let (f1, f2) = model();
        let g = &(&HoloPoly::z1() * &f1) + &(&HoloPoly::z2() * &f2);
        let div = divide(g, C2::real(0.1, 0.0));
        let rep = residual_check(&div, &div.ball_samples(200, 0.999)).unwrap();
        assert!(rep.max_residual < 1e-8);
        assert!(rep.sup_ghat1 <= 10.0 && rep.sup_ghat2 <= 10.0, "{rep:?}");
    }

    #[test]
    fn identity_holds_with_interpolants() {
        let (f1, f2) = model();
        let g = &(&HoloPoly::z1() * &f1) + &(&(&HoloPoly::z2() * &HoloPoly::z2()) * &f2);
        let div = divide(g, C2::real(0.05, 0.01));
        for z in div.ball_samples(100, 0.999) {
            let p = div.eval_parts(z).unwrap();
            assert!(p.interpolation_identity().norm() < 1e-12, "{}", p.interpolation_identity());
            assert_eq!(p.chi1 + p.chi2, 1.0);
        }
    }

    #[test]
    fn interpolation_at_nodes_on_random_offsets() {
        let (f1, f2) = model();
        let g = &(&HoloPoly::z1() * &f1) + &(&HoloPoly::z2() * &f2);
        let div = divide(g.clone(), C2::real(0.1, 0.0));
        let fr = *div.frame();
        for w in halton_disc(100, div.ball_radius() * 0.99, (2, 3)) {
            let (t1, t2) = div.newton_tables(w).unwrap();
            let s1 = div.factorization.splits[0].at(w).unwrap();
            let s2 = div.factorization.splits[1].at(w).unwrap();
            for &a in &t2.nodes {
                let want = g.eval(fr.point(w, a)) / s2.p(a);
                assert!((t2.eval(a) - want).norm() <= 1e-9 * want.norm().max(1e-300));
            }
            for &a in &t1.nodes {
                let want = g.eval(fr.point(w, a)) / s1.p(a);
                assert!((t1.eval(a) - want).norm() <= 1e-9 * want.norm().max(1e-300));
            }
        }
    }

    #[test]
    fn quadrature_doubling_is_stable() {
        let (f1, f2) = model();
        let g = &(&HoloPoly::z1() * &f1) + &(&HoloPoly::z2() * &f2);
        let a = divide(g.clone(), C2::real(0.1, 0.0));
        let mut cfg = LocalConfig::default();
        cfg.quad_nodes = 128;
        let b = local_divide(Arc::new(g), &f1, &f2, &ball10(), C2::real(0.1, 0.0), 0.05, &cfg).unwrap();
        for z in a.ball_samples(30, 0.9) {
            let (z1s, z2s) = a.frame().coords(z);
            let (ea, eb) = (a.error_term(z1s, z2s).unwrap(), b.error_term(z1s, z2s).unwrap());
            assert!((ea - eb).norm() <= 1e-10 * ea.norm().max(1e-300));
        }
    }

    #[test]
    fn dropping_error_term_leaves_defect() {
        let (f1, f2) = model();
        let g = &(&(&HoloPoly::z2() * &HoloPoly::z2()) * &f1) + &(&(&HoloPoly::z1() * &HoloPoly::z2()) * &f2);
        let mut div = divide(g, C2::real(0.1, 0.0));
        div.drop_error_term = true;
        let samples = div.ball_samples(50, 0.999);
        let rep = residual_check(&div, &samples).unwrap();
        assert!(rep.max_residual > 1e-8);
        div.drop_error_term = false;
        let max_ppe = samples
            .iter()
            .map(|&z| {
                let p = div.eval_parts(z).unwrap();
                (p.p1 * p.p2 * p.e).norm()
            })
            .fold(0.0, f64::max);
        assert!((rep.max_residual / max_ppe - 1.0).abs() < 0.5);
    }

    #[test]
    fn annulus_mode_also_divides() {
        let (f1, f2) = model();
        let cfg = LocalConfig { mode: ContourMode::Annulus, ..Default::default() };
        let div = local_divide(Arc::new(f1.clone()), &f1, &f2, &ball10(), C2::real(0.1, 0.0), 0.05, &cfg).unwrap();
        let rep = residual_check(&div, &div.ball_samples(100, 0.999)).unwrap();
        assert!(rep.max_residual < 1e-8);
    }

    #[test]
    fn unit_is_divisible_away_from_common_zeros() {
        let div = divide(HoloPoly::constant(c(1.0, 0.0)), C2::real(0.1, 0.0));
        let rep = residual_check(&div, &div.ball_samples(100, 0.999)).unwrap();
        assert!(rep.max_residual < 1e-8);
    }

    #[test]
    fn common_zero_inside_ball_is_reported() {
        let f1 = HoloPoly::z2();
        let f2 = &HoloPoly::z2() - &(&HoloPoly::z1() - &HoloPoly::constant(c(0.05, 0.0)));
        let g = HoloPoly::constant(c(1.0, 0.0));
        let r = local_divide(Arc::new(g), &f1, &f2, &ball10(), C2::real(0.05, 0.0), 0.05, &LocalConfig::default());
        assert!(matches!(r, Err(HoloError::SingularNodeValue { .. })), "{r:?}");
    }

    #[test]
    fn counterexample_quotient_grows() {
        let f1 = &HoloPoly::z2() * &HoloPoly::z2();
        let f2 = &f1 - &HoloPoly::monomial(3, 0, c(1.0, 0.0));
        let g: Arc<dyn Holomorphic> = Arc::new(HalfPowerMonomial { q: 3, j: 1, coef: c(1.0, 0.0) });
        let mut prev = 0.0;
        for eps in [1e-1, 1e-2, 1e-3] {
            let div = local_divide(g.clone(), &f1, &f2, &ball10(), C2::real(eps, 0.0), 0.05, &LocalConfig::default()).unwrap();
            let rep = residual_check(&div, &div.ball_samples(64, 0.999)).unwrap();
            assert!(rep.sup_ghat1 > prev, "eps {eps}: {rep:?}");
            prev = rep.sup_ghat1;
        }
    }
}
