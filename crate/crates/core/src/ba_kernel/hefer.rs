//! Hefer decomposition `f(z) - f(zeta) = sum_i b_i(zeta, z) (z_i - zeta_i)`.

use num_complex::Complex64;

use crate::poly::HoloPoly;
use crate::types::{c, C2};

/// `b_i(zeta, z) = integral_0^1 (d f / d zeta_i)(zeta + t (z - zeta)) dt`, integrated term by term.
#[derive(Debug, Clone, PartialEq)]
pub struct HeferForm {
    pub f: HoloPoly,
    pub partials: [HoloPoly; 2],
}

fn binomial_row(n: u32) -> Vec<f64> {
    let mut row = vec![1.0];
    for k in 0..n {
        let next = row[k as usize] * (n - k) as f64 / (k + 1) as f64;
        row.push(next);
    }
    row
}

/// Coefficients in `t` of `(a + t d)^n`.
fn linear_power(a: Complex64, d: Complex64, n: u32) -> Vec<Complex64> {
    let binom = binomial_row(n);
    (0..=n)
        .map(|k| a.powu(n - k) * d.powu(k) * binom[k as usize])
        .collect()
}

/// `integral_0^1 p(zeta + t (z - zeta)) dt` for a polynomial `p`.
pub fn segment_integral(p: &HoloPoly, zeta: C2, z: C2) -> Complex64 {
    let d = z - zeta;
    let mut total = c(0.0, 0.0);
    for (i, j, coef) in p.terms() {
        let a = linear_power(zeta.z1, d.z1, i);
        let b = linear_power(zeta.z2, d.z2, j);
        let mut s = c(0.0, 0.0);
        for (k, x) in a.iter().enumerate() {
            for (l, y) in b.iter().enumerate() {
                s += x * y / (k + l + 1) as f64;
            }
        }
        total += coef * s;
    }
    total
}

pub fn hefer_form(f: &HoloPoly) -> HeferForm {
    HeferForm { f: f.clone(), partials: [f.d1(), f.d2()] }
}

impl HeferForm {
    pub fn eval(&self, zeta: C2, z: C2) -> [Complex64; 2] {
        [segment_integral(&self.partials[0], zeta, z), segment_integral(&self.partials[1], zeta, z)]
    }

    /// `|f(z) - f(zeta) - sum_i b_i (z_i - zeta_i)|`.
    pub fn residual(&self, zeta: C2, z: C2) -> f64 {
        use crate::poly::Holomorphic;
        let b = self.eval(zeta, z);
        let d = z - zeta;
        (self.f.eval(z) - self.f.eval(zeta) - b[0] * d.z1 - b[1] * d.z2).norm()
    }
}
