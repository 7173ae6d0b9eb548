use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// A point (or vector) of C^2.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[Complex64; 2]", into = "[Complex64; 2]")]
pub struct C2 {
    pub z1: Complex64,
    pub z2: Complex64,
}

impl From<[Complex64; 2]> for C2 {
    fn from(v: [Complex64; 2]) -> Self {
        C2 { z1: v[0], z2: v[1] }
    }
}

impl From<C2> for [Complex64; 2] {
    fn from(v: C2) -> Self {
        [v.z1, v.z2]
    }
}

impl C2 {
    pub const ZERO: C2 = C2 {
        z1: Complex64::new(0.0, 0.0),
        z2: Complex64::new(0.0, 0.0),
    };

    pub fn new(z1: Complex64, z2: Complex64) -> Self {
        C2 { z1, z2 }
    }

    pub fn real(x1: f64, x2: f64) -> Self {
        C2::new(Complex64::new(x1, 0.0), Complex64::new(x2, 0.0))
    }

    pub fn from_reals(v: [f64; 4]) -> Self {
        C2::new(Complex64::new(v[0], v[1]), Complex64::new(v[2], v[3]))
    }

    pub fn to_reals(self) -> [f64; 4] {
        [self.z1.re, self.z1.im, self.z2.re, self.z2.im]
    }

    /// Hermitian inner product `sum a_i conj(b_i)`.
    pub fn hdot(self, other: C2) -> Complex64 {
        self.z1 * other.z1.conj() + self.z2 * other.z2.conj()
    }

    /// Bilinear pairing `sum a_i b_i`, no conjugation.
    pub fn dot(self, other: C2) -> Complex64 {
        self.z1 * other.z1 + self.z2 * other.z2
    }

    pub fn norm_sqr(self) -> f64 {
        self.z1.norm_sqr() + self.z2.norm_sqr()
    }

    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn conj(self) -> C2 {
        C2::new(self.z1.conj(), self.z2.conj())
    }

    pub fn is_finite(self) -> bool {
        self.z1.is_finite() && self.z2.is_finite()
    }

    pub fn scale(self, s: Complex64) -> C2 {
        C2::new(self.z1 * s, self.z2 * s)
    }

    pub fn normalized(self) -> C2 {
        self * (1.0 / self.norm())
    }

    pub fn component(self, i: usize) -> Complex64 {
        match i {
            0 => self.z1,
            1 => self.z2,
            _ => panic!("C2 has two components, got index {i}"),
        }
    }
}

impl Add for C2 {
    type Output = C2;
    fn add(self, o: C2) -> C2 {
        C2::new(self.z1 + o.z1, self.z2 + o.z2)
    }
}

impl AddAssign for C2 {
    fn add_assign(&mut self, o: C2) {
        self.z1 += o.z1;
        self.z2 += o.z2;
    }
}

impl Sub for C2 {
    type Output = C2;
    fn sub(self, o: C2) -> C2 {
        C2::new(self.z1 - o.z1, self.z2 - o.z2)
    }
}

impl Neg for C2 {
    type Output = C2;
    fn neg(self) -> C2 {
        C2::new(-self.z1, -self.z2)
    }
}

impl Mul<f64> for C2 {
    type Output = C2;
    fn mul(self, s: f64) -> C2 {
        C2::new(self.z1 * s, self.z2 * s)
    }
}

impl Mul<Complex64> for C2 {
    type Output = C2;
    fn mul(self, s: Complex64) -> C2 {
        self.scale(s)
    }
}

impl Mul<C2> for Complex64 {
    type Output = C2;
    fn mul(self, v: C2) -> C2 {
        v.scale(self)
    }
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermitian_product_is_conjugate_linear_in_second_slot() {
        let a = C2::new(c(1.0, 2.0), c(-0.5, 0.25));
        let b = C2::new(c(0.3, -1.0), c(2.0, 1.0));
        let s = c(0.0, 1.0);
        let lhs = a.hdot(b * s);
        assert!((lhs - s.conj() * a.hdot(b)).norm() < 1e-15);
        assert!((a.hdot(a).re - a.norm_sqr()).abs() < 1e-15);
    }

    #[test]
    fn json_layout_is_nested_pairs() {
        let p = C2::new(c(1.0, 0.5), c(-2.0, 0.0));
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, "[[1.0,0.5],[-2.0,0.0]]");
        let back: C2 = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }
}
