//! The pair `f1 = z2^2`, `f2 = z2^2 - z1^q` with `g = z1^(q/2) z2` on the ball of center `(1, 0)`.

use serde::{Deserialize, Serialize};

use crate::divided_differences::{cert_sup_infty, CertConfig};
use crate::error::{HoloError, Result};
use crate::geometry::ConvexDomain;
use crate::gluing::fit_slope;
use crate::poly::{HalfPowerMonomial, HoloPoly};
use crate::types::{c, C2};

/// Allowed relative deviation of the fitted slope from `(1 - q) / 2`.
pub const SLOPE_TOL: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleReport {
    pub q: u32,
    pub eps: Vec<f64>,
    pub values: Vec<f64>,
    /// Certificate of `g = f1` on the same centers.
    pub control_values: Vec<f64>,
    pub slope: f64,
    pub expected_slope: f64,
    pub control_slope: f64,
    pub passed: bool,
}

pub fn counterexample_pair(q: u32) -> (HoloPoly, HoloPoly, HalfPowerMonomial) {
    let f1 = &HoloPoly::z2() * &HoloPoly::z2();
    let f2 = &f1 - &HoloPoly::monomial(q, 0, c(1.0, 0.0));
    (f1, f2, HalfPowerMonomial { q, j: 1, coef: c(1.0, 0.0) })
}

pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|k| (lo.ln() + (hi.ln() - lo.ln()) * k as f64 / (n - 1) as f64).exp()).collect()
}

/// Sup certificate at the centers `(eps, 0)` and the log-log slope against `eps`.
pub fn run_counterexample(q: u32, eps_grid: &[f64], cfg: &CertConfig) -> Result<CounterexampleReport> {
    if q < 3 || q % 2 == 0 {
        return Err(HoloError::Range { field: "q".into(), value: q.to_string() });
    }
    if eps_grid.len() < 2 || eps_grid.iter().any(|&e| !(e > 0.0 && e < 0.5)) {
        return Err(HoloError::InvalidArgument("eps grid needs at least two values in (0, 0.5)".into()));
    }
    let domain = ConvexDomain::ball(C2::real(1.0, 0.0), 1.0);
    let (f1, f2, g) = counterexample_pair(q);
    let mut values = Vec::new();
    let mut control_values = Vec::new();
    for &eps in eps_grid {
        let centers = [C2::real(eps, 0.0)];
        values.push(cert_sup_infty(&g, &f1, &f2, &domain, &centers, cfg, 1).value);
        control_values.push(cert_sup_infty(&f1, &f1, &f2, &domain, &centers, cfg, 1).value);
    }
    let slope_of = |v: &[f64]| fit_slope(&eps_grid.iter().zip(v).map(|(e, v)| (e.ln(), v.ln())).collect::<Vec<_>>());
    let slope = slope_of(&values);
    let control_slope = slope_of(&control_values);
    let expected_slope = (1.0 - q as f64) / 2.0;
    Ok(CounterexampleReport {
        q,
        eps: eps_grid.to_vec(),
        values,
        control_values,
        slope,
        expected_slope,
        control_slope,
        passed: ((slope - expected_slope) / expected_slope).abs() <= SLOPE_TOL,
    })
}
