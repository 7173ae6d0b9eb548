//! Univariate and bivariate complex polynomials.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::types::{c, C2};

/// Anything that can be evaluated as a holomorphic function near the closure of the domain.
pub trait Holomorphic: Send + Sync {
    fn eval(&self, z: C2) -> Complex64;
    /// Size of the terms summed at `z`; the natural scale for cancellation tolerances.
    fn magnitude(&self, z: C2) -> f64 {
        self.eval(z).norm()
    }
}

/// Polynomial in one complex variable, coefficients in ascending order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct UniPoly {
    pub coeffs: Vec<Complex64>,
}

impl UniPoly {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        UniPoly { coeffs }
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[Complex64]) -> Self {
        let mut p = UniPoly::new(vec![c(1.0, 0.0)]);
        for &r in roots {
            p = p.mul_linear(r);
        }
        p
    }

    pub fn eval(&self, x: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(c(0.0, 0.0), |acc, &a| acc * x + a)
    }

    /// `sum |a_k| |x|^k`.
    pub fn magnitude(&self, x: Complex64) -> f64 {
        let r = x.norm();
        self.coeffs.iter().rev().fold(0.0, |acc, a| acc * r + a.norm())
    }

    pub fn derivative(&self) -> UniPoly {
        UniPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &a)| a * k as f64)
                .collect(),
        )
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|a| *a == c(0.0, 0.0))
    }

    /// Drops leading coefficients below `rel_tol * max_abs`.
    pub fn trimmed(&self, rel_tol: f64) -> UniPoly {
        let thr = rel_tol * self.max_abs();
        let mut v = self.coeffs.clone();
        while let Some(last) = v.last() {
            if last.norm() <= thr {
                v.pop();
            } else {
                break;
            }
        }
        UniPoly::new(v)
    }

    /// Degree after removing exactly-zero leading coefficients; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|a| *a != c(0.0, 0.0))
    }

    /// Product with `(x - r)`.
    pub fn mul_linear(&self, r: Complex64) -> UniPoly {
        let n = self.coeffs.len();
        let mut out = vec![c(0.0, 0.0); n + 1];
        for (k, &a) in self.coeffs.iter().enumerate() {
            out[k + 1] += a;
            out[k] -= a * r;
        }
        UniPoly::new(out)
    }

    /// Synthetic division by `(x - r)`: quotient and remainder.
    pub fn div_linear(&self, r: Complex64) -> (UniPoly, Complex64) {
        let n = self.coeffs.len();
        if n == 0 {
            return (UniPoly::default(), c(0.0, 0.0));
        }
        let mut q = vec![c(0.0, 0.0); n - 1];
        let mut acc = c(0.0, 0.0);
        for k in (0..n).rev() {
            acc = acc * r + self.coeffs[k];
            if k > 0 {
                q[k - 1] = acc;
            }
        }
        (UniPoly::new(q), acc)
    }
}

/// Bivariate polynomial `sum c_ij z1^i z2^j` with a sparse coefficient map.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "PolyJson", into = "PolyJson")]
pub struct HoloPoly {
    terms: BTreeMap<(u32, u32), Complex64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermJson {
    i: u32,
    j: u32,
    re: f64,
    #[serde(default)]
    im: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolyJson {
    terms: Vec<TermJson>,
}

impl From<PolyJson> for HoloPoly {
    fn from(p: PolyJson) -> Self {
        HoloPoly::from_terms(p.terms.iter().map(|t| (t.i, t.j, c(t.re, t.im))))
    }
}

impl From<HoloPoly> for PolyJson {
    fn from(p: HoloPoly) -> Self {
        PolyJson {
            terms: p
                .terms
                .iter()
                .map(|(&(i, j), a)| TermJson { i, j, re: a.re, im: a.im })
                .collect(),
        }
    }
}

fn powi(x: Complex64, n: u32) -> Complex64 {
    let mut acc = c(1.0, 0.0);
    for _ in 0..n {
        acc *= x;
    }
    acc
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, t| acc * (n - t) as f64 / (t + 1) as f64)
}

impl HoloPoly {
    pub fn zero() -> Self {
        HoloPoly::default()
    }

    pub fn constant(a: Complex64) -> Self {
        HoloPoly::monomial(0, 0, a)
    }

    pub fn monomial(i: u32, j: u32, a: Complex64) -> Self {
        HoloPoly::from_terms([(i, j, a)])
    }

    pub fn z1() -> Self {
        HoloPoly::monomial(1, 0, c(1.0, 0.0))
    }

    pub fn z2() -> Self {
        HoloPoly::monomial(0, 1, c(1.0, 0.0))
    }

    /// Sums repeated exponents and drops exact zeros.
    pub fn from_terms<I: IntoIterator<Item = (u32, u32, Complex64)>>(terms: I) -> Self {
        let mut map = BTreeMap::new();
        for (i, j, a) in terms {
            *map.entry((i, j)).or_insert(c(0.0, 0.0)) += a;
        }
        map.retain(|_, a: &mut Complex64| *a != c(0.0, 0.0));
        HoloPoly { terms: map }
    }

    /// Random polynomial of total degree at most `deg` with coefficients in the unit square.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, deg: u32) -> Self {
        let mut t = Vec::new();
        for i in 0..=deg {
            for j in 0..=(deg - i) {
                t.push((i, j, c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))));
            }
        }
        HoloPoly::from_terms(t)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, u32, Complex64)> + '_ {
        self.terms.iter().map(|(&(i, j), &a)| (i, j, a))
    }

    pub fn coeff(&self, i: u32, j: u32) -> Complex64 {
        self.terms.get(&(i, j)).copied().unwrap_or(c(0.0, 0.0))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|(i, j)| i + j).max().unwrap_or(0)
    }

    pub fn degree_z1(&self) -> u32 {
        self.terms.keys().map(|(i, _)| *i).max().unwrap_or(0)
    }

    pub fn degree_z2(&self) -> u32 {
        self.terms.keys().map(|(_, j)| *j).max().unwrap_or(0)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        HoloPoly::from_terms(self.terms().map(|(i, j, a)| (i, j, a * s)))
    }

    /// `d/dz1`.
    pub fn d1(&self) -> Self {
        HoloPoly::from_terms(
            self.terms()
                .filter(|(i, _, _)| *i > 0)
                .map(|(i, j, a)| (i - 1, j, a * i as f64)),
        )
    }

    /// `d/dz2`.
    pub fn d2(&self) -> Self {
        HoloPoly::from_terms(
            self.terms()
                .filter(|(_, j, _)| *j > 0)
                .map(|(i, j, a)| (i, j - 1, a * j as f64)),
        )
    }

    pub fn gradient(&self, z: C2) -> C2 {
        C2::new(self.d1().eval(z), self.d2().eval(z))
    }

    /// Coefficients of `lambda -> f(base + lambda dir)`, exact by binomial expansion.
    pub fn restrict_to_line(&self, base: C2, dir: C2) -> UniPoly {
        let n = self.total_degree() as usize;
        let mut out = vec![c(0.0, 0.0); n + 1];
        for (i, j, a) in self.terms() {
            // (b1 + l d1)^i (b2 + l d2)^j
            let u: Vec<Complex64> = (0..=i)
                .map(|k| binomial(i, k) * powi(base.z1, i - k) * powi(dir.z1, k))
                .collect();
            let w: Vec<Complex64> = (0..=j)
                .map(|k| binomial(j, k) * powi(base.z2, j - k) * powi(dir.z2, k))
                .collect();
            for (p, up) in u.iter().enumerate() {
                for (q, wq) in w.iter().enumerate() {
                    out[p + q] += a * up * wq;
                }
            }
        }
        UniPoly::new(out)
    }

    /// Polynomial in `z1` obtained by fixing `z2`.
    pub fn in_z1(&self, z2: Complex64) -> UniPoly {
        let mut out = vec![c(0.0, 0.0); self.degree_z1() as usize + 1];
        for (i, j, a) in self.terms() {
            out[i as usize] += a * powi(z2, j);
        }
        UniPoly::new(out)
    }

    /// Polynomial in `z2` obtained by fixing `z1`.
    pub fn in_z2(&self, z1: Complex64) -> UniPoly {
        let mut out = vec![c(0.0, 0.0); self.degree_z2() as usize + 1];
        for (i, j, a) in self.terms() {
            out[j as usize] += a * powi(z1, i);
        }
        UniPoly::new(out)
    }

    /// `(z1, z2) -> f(z2, z1)`.
    pub fn swap_vars(&self) -> Self {
        HoloPoly::from_terms(self.terms().map(|(i, j, a)| (j, i, a)))
    }

    /// Taylor expansion at `p`: the polynomial `w -> f(p + w)`.
    pub fn shift(&self, p: C2) -> Self {
        let mut t = Vec::new();
        for (i, j, a) in self.terms() {
            for k in 0..=i {
                let u = binomial(i, k) * powi(p.z1, i - k);
                for l in 0..=j {
                    t.push((k, l, a * u * binomial(j, l) * powi(p.z2, j - l)));
                }
            }
        }
        HoloPoly::from_terms(t)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(|a| a.norm()).fold(0.0, f64::max)
    }
}

impl Holomorphic for HoloPoly {
    fn eval(&self, z: C2) -> Complex64 {
        let mut s = c(0.0, 0.0);
        for (i, j, a) in self.terms() {
            s += a * powi(z.z1, i) * powi(z.z2, j);
        }
        s
    }

    fn magnitude(&self, z: C2) -> f64 {
        let (r1, r2) = (z.z1.norm(), z.z2.norm());
        self.terms()
            .map(|(i, j, a)| a.norm() * r1.powi(i as i32) * r2.powi(j as i32))
            .sum()
    }
}

impl<T: Holomorphic + ?Sized> Holomorphic for &T {
    fn eval(&self, z: C2) -> Complex64 {
        (**self).eval(z)
    }
    fn magnitude(&self, z: C2) -> f64 {
        (**self).magnitude(z)
    }
}

impl<T: Holomorphic + ?Sized> Holomorphic for Box<T> {
    fn eval(&self, z: C2) -> Complex64 {
        (**self).eval(z)
    }
    fn magnitude(&self, z: C2) -> f64 {
        (**self).magnitude(z)
    }
}

impl<T: Holomorphic + ?Sized> Holomorphic for std::sync::Arc<T> {
    fn eval(&self, z: C2) -> Complex64 {
        (**self).eval(z)
    }
    fn magnitude(&self, z: C2) -> f64 {
        (**self).magnitude(z)
    }
}

/// `coef * z1^(q/2) * z2^j` on the principal branch of the square root.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfPowerMonomial {
    pub q: u32,
    pub j: u32,
    pub coef: Complex64,
}

impl Holomorphic for HalfPowerMonomial {
    fn eval(&self, z: C2) -> Complex64 {
        if z.z1 == c(0.0, 0.0) {
            return if self.q == 0 { self.coef * powi(z.z2, self.j) } else { c(0.0, 0.0) };
        }
        self.coef * (z.z1.ln() * (0.5 * self.q as f64)).exp() * powi(z.z2, self.j)
    }

    fn magnitude(&self, z: C2) -> f64 {
        self.eval(z).norm()
    }
}

impl Add for &HoloPoly {
    type Output = HoloPoly;
    fn add(self, o: &HoloPoly) -> HoloPoly {
        HoloPoly::from_terms(self.terms().chain(o.terms()))
    }
}

impl Sub for &HoloPoly {
    type Output = HoloPoly;
    fn sub(self, o: &HoloPoly) -> HoloPoly {
        HoloPoly::from_terms(self.terms().chain(o.terms().map(|(i, j, a)| (i, j, -a))))
    }
}

impl Neg for &HoloPoly {
    type Output = HoloPoly;
    fn neg(self) -> HoloPoly {
        self.scale(c(-1.0, 0.0))
    }
}

impl Mul for &HoloPoly {
    type Output = HoloPoly;
    fn mul(self, o: &HoloPoly) -> HoloPoly {
        let mut t = Vec::new();
        for (i, j, a) in self.terms() {
            for (k, l, b) in o.terms() {
                t.push((i + k, j + l, a * b));
            }
        }
        HoloPoly::from_terms(t)
    }
}
