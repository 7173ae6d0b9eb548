use std::fmt::Debug;
use std::sync::Arc;

use nalgebra::{Matrix4, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{HoloError, Result};
use crate::types::{c, C2};

/// 2x2 complex matrix stored row-major, `m[k][l]`.
pub type CMat2 = [[Complex64; 2]; 2];

/// User-supplied defining function for a strictly convex domain `{rho < 0}`.
pub trait DefiningFunction: Send + Sync + Debug {
    fn rho(&self, z: C2) -> f64;
    /// Holomorphic gradient `(d rho / d z_1, d rho / d z_2)`.
    fn grad(&self, z: C2) -> C2;
    /// Mixed second derivatives, `levi[k][l] = d^2 rho / d z_k d conj(z_l)`.
    fn levi(&self, z: C2) -> CMat2;
    /// Pure second derivatives, `d^2 rho / d z_k d z_l`.
    fn pure_hessian(&self, z: C2) -> CMat2;
    fn interior_point(&self) -> C2;
    /// Radius of a Euclidean ball around `interior_point` containing the closure of D.
    fn bounding_radius(&self) -> f64;
}

#[derive(Debug, Clone)]
pub enum DomainKind {
    Ball { center: C2, radius: f64 },
    /// `rho(z) = (z - c)^H A (z - c) - 1` with `A` Hermitian positive definite.
    HermitianEllipsoid { matrix: CMat2, center: C2 },
    Custom(Arc<dyn DefiningFunction>),
}

#[derive(Debug, Clone)]
pub struct ConvexDomain {
    pub kind: DomainKind,
    /// Half-width of the collar `{-collar < rho < collar}` on which the gradient is assumed nonzero.
    pub collar: f64,
}

pub const DEFAULT_COLLAR: f64 = 0.5;

fn mat_vec(a: &CMat2, w: C2) -> C2 {
    C2::new(a[0][0] * w.z1 + a[0][1] * w.z2, a[1][0] * w.z1 + a[1][1] * w.z2)
}

fn transpose(a: &CMat2) -> CMat2 {
    [[a[0][0], a[1][0]], [a[0][1], a[1][1]]]
}

impl ConvexDomain {
    pub fn ball(center: C2, radius: f64) -> Self {
        ConvexDomain {
            kind: DomainKind::Ball { center, radius },
            collar: DEFAULT_COLLAR,
        }
    }

    pub fn unit_ball() -> Self {
        Self::ball(C2::ZERO, 1.0)
    }

    /// Ellipsoid `{(z-c)^H A (z-c) < 1}`; rejects non-Hermitian or indefinite `A`.
    pub fn ellipsoid(matrix: CMat2, center: C2) -> Result<Self> {
        let herm = (matrix[0][1] - matrix[1][0].conj()).norm()
            + matrix[0][0].im.abs()
            + matrix[1][1].im.abs();
        let scale = matrix[0][0].norm() + matrix[1][1].norm();
        if herm > 1e-12 * scale.max(1.0) {
            return Err(HoloError::InvalidArgument(
                "ellipsoid matrix is not Hermitian".into(),
            ));
        }
        let det = (matrix[0][0] * matrix[1][1] - matrix[0][1] * matrix[1][0]).re;
        if matrix[0][0].re <= 0.0 || det <= 0.0 {
            return Err(HoloError::InvalidArgument(
                "ellipsoid matrix is not positive definite".into(),
            ));
        }
        Ok(ConvexDomain {
            kind: DomainKind::HermitianEllipsoid { matrix, center },
            collar: DEFAULT_COLLAR,
        })
    }

    pub fn custom(f: Arc<dyn DefiningFunction>, collar: f64) -> Self {
        ConvexDomain {
            kind: DomainKind::Custom(f),
            collar,
        }
    }

    pub fn with_collar(mut self, collar: f64) -> Self {
        self.collar = collar;
        self
    }

    /// Quadratic data `(A, c)` when the domain is a ball or ellipsoid.
    pub fn quadratic(&self) -> Option<(CMat2, C2)> {
        match &self.kind {
            DomainKind::Ball { center, radius } => {
                let s = c(1.0 / (radius * radius), 0.0);
                Some(([[s, c(0.0, 0.0)], [c(0.0, 0.0), s]], *center))
            }
            DomainKind::HermitianEllipsoid { matrix, center } => Some((*matrix, *center)),
            DomainKind::Custom(_) => None,
        }
    }

    pub fn rho(&self, z: C2) -> f64 {
        match &self.kind {
            DomainKind::Ball { center, radius } => (z - *center).norm_sqr() / (radius * radius) - 1.0,
            DomainKind::HermitianEllipsoid { matrix, center } => {
                let w = z - *center;
                mat_vec(matrix, w).hdot(w).re - 1.0
            }
            DomainKind::Custom(f) => f.rho(z),
        }
    }

    pub fn grad(&self, z: C2) -> C2 {
        match &self.kind {
            DomainKind::Custom(f) => f.grad(z),
            _ => {
                let (a, center) = self.quadratic().unwrap();
                mat_vec(&a, z - center).conj()
            }
        }
    }

    pub fn eval_rho_grad(&self, z: C2) -> (f64, C2) {
        (self.rho(z), self.grad(z))
    }

    pub fn levi(&self, z: C2) -> CMat2 {
        match &self.kind {
            DomainKind::Custom(f) => f.levi(z),
            _ => transpose(&self.quadratic().unwrap().0),
        }
    }

    pub fn pure_hessian(&self, z: C2) -> CMat2 {
        match &self.kind {
            DomainKind::Custom(f) => f.pure_hessian(z),
            _ => [[c(0.0, 0.0); 2]; 2],
        }
    }

    pub fn interior_point(&self) -> C2 {
        match &self.kind {
            DomainKind::Ball { center, .. } => *center,
            DomainKind::HermitianEllipsoid { center, .. } => *center,
            DomainKind::Custom(f) => f.interior_point(),
        }
    }

    /// Axis-aligned box `(lo, hi)` in real coordinates `(x1, y1, x2, y2)` containing the closure of D.
    pub fn bounding_box(&self) -> ([f64; 4], [f64; 4]) {
        let (center, half) = match &self.kind {
            DomainKind::Ball { center, radius } => (*center, [*radius; 4]),
            DomainKind::HermitianEllipsoid { matrix, center } => {
                let det = (matrix[0][0] * matrix[1][1] - matrix[0][1] * matrix[1][0]).re;
                let h1 = (matrix[1][1].re / det).sqrt();
                let h2 = (matrix[0][0].re / det).sqrt();
                (*center, [h1, h1, h2, h2])
            }
            DomainKind::Custom(f) => (f.interior_point(), [f.bounding_radius(); 4]),
        };
        let cr = center.to_reals();
        let mut lo = [0.0; 4];
        let mut hi = [0.0; 4];
        for i in 0..4 {
            lo[i] = cr[i] - half[i];
            hi[i] = cr[i] + half[i];
        }
        (lo, hi)
    }

    pub fn contains(&self, z: C2) -> bool {
        self.rho(z) < 0.0
    }

    pub fn in_collar(&self, z: C2) -> bool {
        self.rho(z).abs() < self.collar
    }

    /// Real Hessian of rho at `z` as a 4x4 matrix in coordinates `(x1, y1, x2, y2)`.
    pub fn real_hessian(&self, z: C2) -> Matrix4<f64> {
        let l = self.levi(z);
        let h = self.pure_hessian(z);
        let basis: [C2; 4] = [
            C2::new(c(1.0, 0.0), c(0.0, 0.0)),
            C2::new(c(0.0, 1.0), c(0.0, 0.0)),
            C2::new(c(0.0, 0.0), c(1.0, 0.0)),
            C2::new(c(0.0, 0.0), c(0.0, 1.0)),
        ];
        // Second derivative along real directions u, w:
        // Re(u^T H w) * 2 + 2 Re(sum_kl L_kl u_k conj(w_l)).
        let form = |u: C2, w: C2| -> f64 {
            let mut s = c(0.0, 0.0);
            let mut t = c(0.0, 0.0);
            for k in 0..2 {
                for m in 0..2 {
                    s += h[k][m] * u.component(k) * w.component(m);
                    t += l[k][m] * u.component(k) * w.component(m).conj();
                }
            }
            2.0 * s.re + 2.0 * t.re
        };
        Matrix4::from_fn(|i, j| 0.5 * (form(basis[i], basis[j]) + form(basis[j], basis[i])))
    }

    /// Smallest eigenvalue of the real Hessian; positive where rho is strictly convex.
    pub fn convexity_margin(&self, z: C2) -> f64 {
        SymmetricEigen::new(self.real_hessian(z))
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
    }
}
