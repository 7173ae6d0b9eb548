//! Point generators: rays from an interior point, level-set projection, graded depths.

use rand::Rng;
use rand_distr::StandardNormal;

use super::domain::ConvexDomain;
use crate::types::C2;

pub fn random_unit<R: Rng + ?Sized>(rng: &mut R) -> C2 {
    loop {
        let v: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
        let p = C2::from_reals(v);
        let n = p.norm();
        if n > 1e-8 {
            return p * (1.0 / n);
        }
    }
}

/// Uniform point of the complex unit disc scaled by `r`.
pub fn random_in_disc<R: Rng + ?Sized>(rng: &mut R, r: f64) -> num_complex::Complex64 {
    let t: f64 = rng.random::<f64>() * std::f64::consts::TAU;
    let s = r * rng.random::<f64>().sqrt();
    num_complex::Complex64::from_polar(s, t)
}

pub fn log_uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    (lo.ln() + rng.random::<f64>() * (hi.ln() - lo.ln())).exp()
}

/// Point on the ray from the interior point along `dir` where `rho = level`.
/// Returns `None` when the interior point is not below `level`.
pub fn point_on_ray(domain: &ConvexDomain, dir: C2, level: f64) -> Option<C2> {
    let p0 = domain.interior_point();
    if domain.rho(p0) >= level {
        return None;
    }
    let (lo_box, hi_box) = domain.bounding_box();
    let diam: f64 = (0..4).map(|i| (hi_box[i] - lo_box[i]).powi(2)).sum::<f64>().sqrt();
    let mut hi = diam.max(1e-3);
    while domain.rho(p0 + dir * hi) <= level {
        hi *= 2.0;
        if hi > 1e12 {
            return None;
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if domain.rho(p0 + dir * mid) < level {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-16 * hi {
            break;
        }
    }
    Some(p0 + dir * (0.5 * (lo + hi)))
}

/// Newton projection of `p` onto `{rho = level}` moving along the real line `p + x * dir`.
pub fn project_along(domain: &ConvexDomain, p: C2, dir: C2, level: f64, tol: f64) -> Option<C2> {
    let mut x = 0.0;
    for _ in 0..60 {
        let q = p + dir * x;
        let (r, g) = domain.eval_rho_grad(q);
        let f = r - level;
        if f.abs() <= tol {
            return Some(q);
        }
        let df = 2.0 * g.dot(dir).re;
        if df.abs() < 1e-14 {
            return None;
        }
        x -= f / df;
        if !x.is_finite() {
            return None;
        }
    }
    let q = p + dir * x;
    if (domain.rho(q) - level).abs() <= tol {
        Some(q)
    } else {
        None
    }
}

/// Interior samples whose depths `-rho` are log-uniform in `[depth_min, depth_max]`.
pub fn graded_samples<R: Rng + ?Sized>(
    domain: &ConvexDomain,
    n: usize,
    depth_min: f64,
    depth_max: f64,
    rng: &mut R,
) -> Vec<C2> {
    let mut out = Vec::with_capacity(n);
    let mut guard = 0;
    while out.len() < n && guard < 20 * n + 100 {
        guard += 1;
        let dir = random_unit(rng);
        let s = log_uniform(rng, depth_min, depth_max);
        if let Some(p) = point_on_ray(domain, dir, -s) {
            out.push(p);
        }
    }
    out
}
