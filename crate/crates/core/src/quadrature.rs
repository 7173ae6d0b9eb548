//! Quadrature rules on intervals and discs.

use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;

/// Gauss-Legendre nodes and weights mapped to `[a, b]`.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let rule = GaussLegendre::new(NonZeroUsize::new(n.max(1)).unwrap());
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    rule.as_node_weight_pairs()
        .iter()
        .map(|&(x, w)| (mid + half * x, half * w))
        .collect()
}

/// Product rule on the disc `|w| < radius` for area measure: Gauss-Legendre in the radius
/// (with the Jacobian `r`), trapezoid in the angle.
pub fn disc_rule(radius: f64, n_r: usize, n_theta: usize) -> Vec<(Complex64, f64)> {
    let mut out = Vec::with_capacity(n_r * n_theta);
    let dt = std::f64::consts::TAU / n_theta as f64;
    for (r, w) in gauss_legendre(n_r, 0.0, radius) {
        for k in 0..n_theta {
            out.push((Complex64::from_polar(r, dt * (k as f64 + 0.5)), w * r * dt));
        }
    }
    out
}

/// Radical inverse of `i` in the given base (Halton coordinate).
pub fn halton(mut i: usize, base: usize) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// Low-discrepancy points in the disc `|w| < radius`.
pub fn halton_disc(n: usize, radius: f64, bases: (usize, usize)) -> Vec<Complex64> {
    (1..=n)
        .map(|i| Complex64::from_polar(radius * halton(i, bases.0).sqrt(), std::f64::consts::TAU * halton(i, bases.1)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disc_rule_integrates_polynomial_moments() {
        let rule = disc_rule(0.5, 6, 16);
        let area: f64 = rule.iter().map(|p| p.1).sum();
        assert!((area - std::f64::consts::PI * 0.25).abs() < 1e-14);
        let m2: f64 = rule.iter().map(|(w, a)| w.norm_sqr() * a).sum();
        assert!((m2 - std::f64::consts::PI * 0.5f64.powi(4) / 2.0).abs() < 1e-14);
        let z: Complex64 = rule.iter().map(|(w, a)| w * a).sum();
        assert!(z.norm() < 1e-15);
    }

    #[test]
    fn interval_rule() {
        let s: f64 = gauss_legendre(5, 1.0, 3.0).iter().map(|(x, w)| w * x.powi(9)).sum();
        assert!((s - (3f64.powi(10) - 1.0) / 10.0).abs() < 1e-9);
    }

    #[test]
    fn halton_first_values() {
        assert_eq!(halton(1, 2), 0.5);
        assert_eq!(halton(3, 2), 0.75);
        assert!((halton(2, 3) - 2.0 / 3.0).abs() < 1e-15);
        assert!(halton_disc(100, 0.3, (2, 3)).iter().all(|w| w.norm() < 0.3));
    }
}
