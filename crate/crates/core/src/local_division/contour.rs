//! Cauchy-type error term on circles around the retained roots.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{HoloError, Result};
use crate::quadrature::gauss_legendre;

/// Relative clearance required between roots and the contour.
pub const CONTOUR_CLEARANCE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ContourMode {
    #[default]
    Circle,
    Annulus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContourRule {
    pub mode: ContourMode,
    /// Outer radius `(4 kappa |rho|)^(1/2)`.
    pub radius: f64,
    /// Inner radius `(7 kappa |rho| / 2)^(1/2)`; equal to `radius` in circle mode.
    pub inner: f64,
    pub quad_nodes: usize,
    /// Radii and weights (summing to 1) of the circles averaged.
    pub circles: Vec<(f64, f64)>,
}

impl ContourRule {
    pub fn new(mode: ContourMode, kappa: f64, rho_abs: f64, quad_nodes: usize) -> Self {
        let radius = (4.0 * kappa * rho_abs).sqrt();
        match mode {
            ContourMode::Circle => ContourRule { mode, radius, inner: radius, quad_nodes, circles: vec![(radius, 1.0)] },
            ContourMode::Annulus => {
                let inner = (3.5 * kappa * rho_abs).sqrt();
                let circles = gauss_legendre(4, inner, radius)
                    .into_iter()
                    .map(|(r, w)| (r, w / (radius - inner)))
                    .collect();
                ContourRule { mode, radius, inner, quad_nodes, circles }
            }
        }
    }

    /// Checks that `inside` roots lie within the inner circle and no root meets the contour region.
    pub fn check_roots(&self, inside: &[Complex64], all: &[Complex64]) -> Result<()> {
        let lo = self.inner * (1.0 - CONTOUR_CLEARANCE);
        let hi = self.radius * (1.0 + CONTOUR_CLEARANCE);
        for a in all {
            let r = a.norm();
            if r > lo && r < hi {
                return Err(HoloError::RootNearContour { radius: r, contour: self.radius });
            }
        }
        for a in inside {
            if a.norm() >= lo {
                return Err(HoloError::RootNearContour { radius: a.norm(), contour: self.radius });
            }
        }
        Ok(())
    }

    /// `(1 / 2 pi i) * integral of h(xi) / (p(xi) (xi - z2s)) dxi`, trapezoidal on each circle.
    pub fn integrate<H, P>(&self, h: H, p: P, z2s: Complex64) -> Complex64
    where
        H: Fn(Complex64) -> Complex64,
        P: Fn(Complex64) -> Complex64,
    {
        let n = self.quad_nodes;
        let mut total = Complex64::new(0.0, 0.0);
        for &(r, w) in &self.circles {
            let mut s = Complex64::new(0.0, 0.0);
            for k in 0..n {
                let xi = Complex64::from_polar(r, std::f64::consts::TAU * k as f64 / n as f64);
                s += h(xi) * xi / (p(xi) * (xi - z2s));
            }
            total += s * (w / n as f64);
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::c;

    #[test]
    fn constant_over_pole_gives_constant() {
        let rule = ContourRule::new(ContourMode::Circle, 0.05, 0.1, 128);
        let a = [c(0.01, 0.0), c(-0.02, 0.01)];
        let p = |x: Complex64| (x - a[0]) * (x - a[1]);
        let e = rule.integrate(|x| p(x) * c(2.5, -1.0), p, c(0.03, 0.02));
        assert!((e - c(2.5, -1.0)).norm() < 1e-13);
        assert_eq!(rule.integrate(|_| c(0.0, 0.0), p, c(0.0, 0.0)), c(0.0, 0.0));
    }

    #[test]
    fn annulus_agrees_with_circle() {
        let c1 = ContourRule::new(ContourMode::Circle, 0.05, 0.1, 128);
        let c2 = ContourRule::new(ContourMode::Annulus, 0.05, 0.1, 128);
        let h = |x: Complex64| (x * 2.0).exp();
        let p = |x: Complex64| x * x - c(1e-4, 0.0);
        let z = c(0.01, -0.02);
        let (a, b) = (c1.integrate(h, p, z), c2.integrate(h, p, z));
        assert!((a - b).norm() < 1e-12 * a.norm());
        let want = (h(z) - (c(0.01, 0.0) * 2.0).exp() * (z + 0.01) / 0.02 + (c(-0.01, 0.0) * 2.0).exp() * (z - 0.01) / 0.02) / p(z);
        assert!((a - want).norm() < 1e-10 * want.norm(), "{a} {want}");
    }

    #[test]
    fn root_on_contour_is_rejected() {
        let rule = ContourRule::new(ContourMode::Circle, 0.05, 0.1, 64);
        let on = c(rule.radius, 0.0);
        assert!(matches!(rule.check_roots(&[], &[on]), Err(HoloError::RootNearContour { .. })));
        assert!(rule.check_roots(&[c(0.01, 0.0)], &[c(0.01, 0.0), c(1.0, 0.0)]).is_ok());
        assert!(rule.check_roots(&[c(1.0, 0.0)], &[]).is_err());
    }
}
