//! Complete-intersection test through resultants, common zeros, and local ideal membership.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::roots::{group_roots, poly_roots};
use crate::poly::{HoloPoly, Holomorphic, UniPoly};
use crate::types::{c, C2};

/// Sylvester matrix of two polynomials given with formal degrees `len - 1`.
fn sylvester(p: &[Complex64], q: &[Complex64]) -> DMatrix<Complex64> {
    let m = p.len() - 1;
    let n = q.len() - 1;
    let size = m + n;
    let mut s = DMatrix::from_element(size, size, c(0.0, 0.0));
    // Rows hold coefficients from the leading one down.
    for r in 0..n {
        for (k, a) in p.iter().rev().enumerate() {
            s[(r, r + k)] = *a;
        }
    }
    for r in 0..m {
        for (k, a) in q.iter().rev().enumerate() {
            s[(n + r, r + k)] = *a;
        }
    }
    s
}

/// Resultant in `z2` of `f`, `g` at fixed `z1`, with the Hadamard bound of the Sylvester matrix.
pub fn resultant_z2_at(f: &HoloPoly, g: &HoloPoly, z1: Complex64) -> (Complex64, f64) {
    let p: Vec<Complex64> = (0..=f.degree_z2()).map(|j| poly_coeff_z2(f, j, z1)).collect();
    let q: Vec<Complex64> = (0..=g.degree_z2()).map(|j| poly_coeff_z2(g, j, z1)).collect();
    if p.len() == 1 && q.len() == 1 {
        // Both constant in z2: no common root unless one vanishes.
        let v = if p[0] == c(0.0, 0.0) || q[0] == c(0.0, 0.0) { c(0.0, 0.0) } else { c(1.0, 0.0) };
        return (v, 1.0);
    }
    let s = sylvester(&p, &q);
    let bound: f64 = s
        .row_iter()
        .map(|r| r.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt())
        .product();
    (s.determinant(), bound.max(f64::MIN_POSITIVE))
}

/// Coefficient of `z2^j` in `f`, evaluated at `z1`.
fn poly_coeff_z2(f: &HoloPoly, j: u32, z1: Complex64) -> Complex64 {
    f.terms()
        .filter(|t| t.1 == j)
        .map(|(i, _, a)| a * z1.powu(i))
        .sum()
}

/// Relative size of the resultant at seeded probe points; near zero means a shared component.
fn resultant_scale(f: &HoloPoly, g: &HoloPoly) -> f64 {
    let probes = [c(0.37, 0.11), c(-0.52, 0.73), c(1.21, -0.4), c(-0.09, -1.3), c(0.8, 0.8)];
    probes
        .iter()
        .map(|&z| {
            let (r, b) = resultant_z2_at(f, g, z);
            r.norm() / b
        })
        .fold(0.0, f64::max)
}

/// Coefficients of the resultant in `z2` as a polynomial in `z1`, by DFT on the unit circle.
pub fn resultant_z2(f: &HoloPoly, g: &HoloPoly) -> UniPoly {
    let bound = (f.total_degree() * g.total_degree()) as usize;
    let n = bound + 1;
    let vals: Vec<Complex64> = (0..n)
        .map(|k| resultant_z2_at(f, g, Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / n as f64)).0)
        .collect();
    let coeffs = (0..n)
        .map(|m| {
            vals.iter()
                .enumerate()
                .map(|(k, v)| v * Complex64::from_polar(1.0, -std::f64::consts::TAU * (k * m) as f64 / n as f64))
                .sum::<Complex64>()
                / n as f64
        })
        .collect();
    let p = UniPoly::new(coeffs);
    let thr = 1e-11 * p.max_abs();
    UniPoly::new(p.coeffs.into_iter().map(|a| if a.norm() < thr { c(0.0, 0.0) } else { a }).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntersectionReport {
    pub complete: bool,
    pub common_zeros: Vec<C2>,
    /// Present when not complete: the variable whose resultant vanishes identically.
    pub witness: Option<String>,
}

/// Decides whether `f1 = f2 = 0` is a finite set and, if so, locates it.
pub fn complete_intersection_check(f1: &HoloPoly, f2: &HoloPoly) -> IntersectionReport {
    let z2_zero = resultant_scale(f1, f2) < 1e-12;
    let z1_zero = resultant_scale(&f1.swap_vars(), &f2.swap_vars()) < 1e-12;
    if z2_zero || z1_zero {
        let var = if z2_zero { "z2" } else { "z1" };
        return IntersectionReport {
            complete: false,
            common_zeros: Vec::new(),
            witness: Some(format!("resultant in {var} vanishes identically; f1 and f2 share a component")),
        };
    }
    let res = resultant_z2(f1, f2);
    let raw = poly_roots(&res);
    let mut cands: Vec<Complex64> = group_roots(&res, &raw).into_iter().map(|(v, _)| v).collect();
    // Tightly clustered roots of a high-multiplicity resultant root: add cluster means.
    let mut extra = Vec::new();
    for i in 0..cands.len() {
        let near: Vec<Complex64> = cands.iter().cloned().filter(|x| (x - cands[i]).norm() < 1e-2 * (1.0 + cands[i].norm())).collect();
        if near.len() > 1 {
            extra.push(near.iter().sum::<Complex64>() / near.len() as f64);
        }
    }
    cands.extend(extra);
    let mut zeros: Vec<C2> = Vec::new();
    for z1 in cands {
        let fib = f1.in_z2(z1);
        let roots = if fib.trimmed(1e-13).degree().unwrap_or(0) == 0 {
            Vec::new()
        } else {
            poly_roots(&fib)
        };
        for z2 in roots {
            let p = C2::new(z1, z2);
            let ok = f1.eval(p).norm() <= 1e-7 * f1.magnitude(p).max(1.0) && f2.eval(p).norm() <= 1e-7 * f2.magnitude(p).max(1.0);
            if ok && !zeros.iter().any(|q| (*q - p).norm() < 1e-5) {
                zeros.push(snap(p));
            }
        }
    }
    zeros.sort_by(|a, b| a.to_reals().partial_cmp(&b.to_reals()).unwrap());
    IntersectionReport { complete: true, common_zeros: zeros, witness: None }
}

/// Rounds components that are zero to within `1e-7` to exact zero.
fn snap(p: C2) -> C2 {
    let s = |x: f64| if x.abs() < 1e-7 { 0.0 } else { x };
    C2::new(c(s(p.z1.re), s(p.z1.im)), c(s(p.z2.re), s(p.z2.im)))
}

/// Relative least-squares residual of `g - a1 f1 - a2 f2` modulo monomials of total degree
/// `>= order` at `p`. Zero (to roundoff) iff `g` lies in `(f1, f2) + m_p^order`.
pub fn local_membership_residual(g: &HoloPoly, f1: &HoloPoly, f2: &HoloPoly, p: C2, order: u32) -> f64 {
    let gs = g.shift(p);
    let fs = [f1.shift(p), f2.shift(p)];
    let monos: Vec<(u32, u32)> = (0..order).flat_map(|d| (0..=d).map(move |i| (i, d - i))).collect();
    let row = |i: u32, j: u32| monos.iter().position(|&m| m == (i, j));
    let ncols = 2 * monos.len();
    let mut a = DMatrix::from_element(monos.len(), ncols, c(0.0, 0.0));
    for (l, f) in fs.iter().enumerate() {
        for (col, &(ui, uj)) in monos.iter().enumerate() {
            for (i, j, coef) in f.terms() {
                if let Some(r) = row(ui + i, uj + j) {
                    a[(r, l * monos.len() + col)] += coef;
                }
            }
        }
    }
    let b = DVector::from_iterator(monos.len(), monos.iter().map(|&(i, j)| gs.coeff(i, j)));
    let bn = b.norm();
    if bn == 0.0 {
        return 0.0;
    }
    let svd = a.clone().svd(true, true);
    let x = svd.solve(&b, 1e-12 * svd.singular_values.max()).unwrap_or_else(|_| DVector::zeros(ncols));
    (&a * x - &b).norm() / bn
}

/// Membership of `g` in the ideal generated by `f1`, `f2` in the local ring at an isolated common zero.
pub fn in_local_ideal(g: &HoloPoly, f1: &HoloPoly, f2: &HoloPoly, p: C2) -> bool {
    let order = (f1.total_degree() * f2.total_degree()).max(1);
    local_membership_residual(g, f1, f2, p, order) < 1e-8
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z1() -> HoloPoly {
        HoloPoly::z1()
    }
    fn z2() -> HoloPoly {
        HoloPoly::z2()
    }

    #[test]
    fn model_pair_meets_at_origin() {
        let f2 = &z2() - &(&z1() * &z1());
        let r = complete_intersection_check(&z2(), &f2);
        assert!(r.complete);
        assert_eq!(r.common_zeros, vec![C2::ZERO]);
        assert_eq!(complete_intersection_check(&f2, &z2()), r);
    }

    #[test]
    fn shared_component_is_not_complete() {
        let f2 = &z2() * &(&HoloPoly::constant(c(1.0, 0.0)) + &z1());
        let r = complete_intersection_check(&z2(), &f2);
        assert!(!r.complete);
        assert!(r.witness.is_some());
        assert_eq!(complete_intersection_check(&f2, &z2()).complete, false);
    }

    #[test]
    fn counterexample_pair_is_complete() {
        for q in [3u32, 5] {
            let f1 = &z2() * &z2();
            let f2 = &f1 - &HoloPoly::monomial(q, 0, c(1.0, 0.0));
            let r = complete_intersection_check(&f1, &f2);
            assert!(r.complete);
            assert_eq!(r.common_zeros, vec![C2::ZERO], "q = {q}");
        }
    }

    #[test]
    fn several_common_zeros() {
        // z2 = z1^2 - 1 and z2 = 0: zeros at z1 = +-1.
        let f1 = z2();
        let f2 = &(&z2() - &(&z1() * &z1())) + &HoloPoly::constant(c(1.0, 0.0));
        let r = complete_intersection_check(&f1, &f2);
        assert!(r.complete);
        assert_eq!(r.common_zeros.len(), 2);
        assert!((r.common_zeros[0] - C2::real(-1.0, 0.0)).norm() < 1e-12);
        assert!((r.common_zeros[1] - C2::real(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn local_membership_at_the_origin() {
        let f1 = z2();
        let f2 = &z2() - &(&z1() * &z1());
        assert!(!in_local_ideal(&HoloPoly::constant(c(1.0, 0.0)), &f1, &f2, C2::ZERO));
        assert!(!in_local_ideal(&z1(), &f1, &f2, C2::ZERO));
        assert!(in_local_ideal(&(&z1() * &z1()), &f1, &f2, C2::ZERO));
        let g = &(&z1() * &f1) + &(&z2() * &f2);
        assert!(in_local_ideal(&g, &f1, &f2, C2::ZERO));
    }
}
