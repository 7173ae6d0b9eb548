use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::domain::ConvexDomain;
use crate::error::{HoloError, Result};
use crate::types::C2;

/// Orthonormal frame at `base`: outer unit normal `eta` and unit complex tangent `v`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KoranyiFrame {
    pub base: C2,
    pub eta: C2,
    pub v: C2,
}

const MIN_GRADIENT: f64 = 1e-12;

/// Rotates `w` so that its first component above `1e-12` in modulus is real and positive.
fn fix_phase(w: C2) -> C2 {
    let lead = if w.z1.norm() > 1e-12 { w.z1 } else { w.z2 };
    if lead.norm() == 0.0 {
        return w;
    }
    w * (lead.conj() / lead.norm())
}

impl KoranyiFrame {
    /// Frame from explicit parts; `eta` and `v` are normalized but not otherwise checked.
    pub fn from_parts(base: C2, eta: C2, v: C2) -> Self {
        KoranyiFrame {
            base,
            eta: eta.normalized(),
            v: v.normalized(),
        }
    }

    /// Frame determined by a nonzero holomorphic gradient at `base`.
    pub fn from_gradient(base: C2, grad: C2) -> Result<Self> {
        let n = grad.norm();
        if !(n >= MIN_GRADIENT) {
            return Err(HoloError::DegenerateGradient { norm: n });
        }
        let eta = grad.conj() * (1.0 / n);
        let v = fix_phase(C2::new(-eta.z2.conj(), eta.z1.conj()));
        Ok(KoranyiFrame { base, eta, v })
    }

    /// Starred coordinates `(z1*, z2*)` of `z`.
    pub fn coords(&self, z: C2) -> (Complex64, Complex64) {
        let d = z - self.base;
        (d.hdot(self.eta), d.hdot(self.v))
    }

    pub fn point(&self, z1s: Complex64, z2s: Complex64) -> C2 {
        self.base + self.eta * z1s + self.v * z2s
    }

    /// Membership in the polydisc `{|z1*| < r, |z2*| < r^(1/2)}`.
    pub fn in_ball(&self, r: f64, z: C2) -> bool {
        let (a, b) = self.coords(z);
        a.norm() < r && b.norm_sqr() < r
    }

    /// Orthonormality defect `max(| |eta|-1 |, | |v|-1 |, |<eta, v>|)`.
    pub fn defect(&self) -> f64 {
        (self.eta.norm() - 1.0)
            .abs()
            .max((self.v.norm() - 1.0).abs())
            .max(self.eta.hdot(self.v).norm())
    }
}

/// Koranyi frame of `domain` at `zeta`.
pub fn koranyi_frame(domain: &ConvexDomain, zeta: C2) -> Result<KoranyiFrame> {
    KoranyiFrame::from_gradient(zeta, domain.grad(zeta))
}
