//! Berndtsson-Andersson kernel with weight `N` on a convex domain.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{HoloError, Result};
use crate::geometry::{CMat2, ConvexDomain};
use crate::poly::Holomorphic;
use crate::quadrature::gauss_legendre;
use crate::types::{c, C2};

/// `|D|` below which the kernel is not evaluated.
pub const POLE_TOL: f64 = 1e-12;
/// Largest number of integrand evaluations a single check may request.
pub const QUADRATURE_BUDGET: usize = 200_000_000;
/// Smallest `|rho(z)|` accepted by [`reproduce_check`].
pub const MIN_DEPTH: f64 = 0.2;
const SHARDS: u64 = 64;

#[derive(Debug, Clone)]
pub struct KernelContext {
    pub domain: ConvexDomain,
    pub n_weight: u32,
    /// `C_{N,2}`; 1 until [`KernelContext::calibrate`] is called.
    pub c_norm: Complex64,
    pub calibration_point: Option<C2>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Quadrature {
    MonteCarlo { samples: usize, seed: u64 },
    Tensor { nodes: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReproduceResult {
    pub integral: Complex64,
    pub reference: Complex64,
    pub abs_error: f64,
    /// Standard error of the Monte Carlo estimate; 0 for tensor rules.
    pub stderr_estimate: f64,
}

impl KernelContext {
    pub fn new(domain: ConvexDomain, n_weight: u32) -> Result<Self> {
        if n_weight == 0 {
            return Err(HoloError::Range { field: "N".into(), value: "0".into() });
        }
        Ok(KernelContext { domain, n_weight, c_norm: c(1.0, 0.0), calibration_point: None })
    }

    /// `h_i = -d rho / d zeta_i`.
    pub fn h(&self, zeta: C2) -> C2 {
        -self.domain.grad(zeta)
    }

    pub fn h_tilde(&self, zeta: C2) -> C2 {
        self.h(zeta) * (1.0 / self.domain.rho(zeta))
    }

    /// `1 + <h~(zeta), zeta - z>`.
    pub fn denominator(&self, zeta: C2, z: C2) -> Complex64 {
        c(1.0, 0.0) + self.h_tilde(zeta).dot(zeta - z)
    }

    /// `m[i][j] = d h~_i / d conj(zeta_j) = -rho_{i jbar} / rho + rho_i rho_{jbar} / rho^2`.
    pub fn dbar_h_tilde(&self, zeta: C2) -> CMat2 {
        let rho = self.domain.rho(zeta);
        let g = self.domain.grad(zeta);
        let levi = self.domain.levi(zeta);
        let mut m = [[c(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] = -levi[i][j] / rho + g.component(i) * g.component(j).conj() / (rho * rho);
            }
        }
        m
    }

    /// Density of `P^{N,n}(., z)` against Lebesgue measure for `n = 2`; for `n = 0, 1` the scalar
    /// factor `D^{-(N+n)}` times `1` or `tr(dbar h~)`. Zero outside the domain.
    pub fn density(&self, zeta: C2, z: C2, n: u32) -> Result<Complex64> {
        if !self.domain.contains(zeta) {
            return Ok(c(0.0, 0.0));
        }
        let d = self.denominator(zeta, z);
        if d.norm() < POLE_TOL {
            return Err(HoloError::PoleProximity { value: d.norm() });
        }
        let m = self.dbar_h_tilde(zeta);
        let form = match n {
            0 => c(1.0, 0.0),
            1 => m[0][0] + m[1][1],
            2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
            _ => return Err(HoloError::InvalidArgument(format!("kernel order {n} not in 0..=2"))),
        };
        Ok(self.c_norm * form / d.powu(self.n_weight + n))
    }

    /// Fixes `C_{N,2}` so that `P^{N,2}(., z0)` integrates to one under a tensor rule.
    pub fn calibrate(&mut self, z0: C2, nodes: usize) -> Result<Complex64> {
        self.c_norm = c(1.0, 0.0);
        let raw = integrate_tensor(self, &crate::poly::HoloPoly::constant(c(1.0, 0.0)), z0, nodes)?;
        self.c_norm = c(1.0, 0.0) / raw;
        self.calibration_point = Some(z0);
        Ok(self.c_norm)
    }
}

fn check_budget(requested: usize) -> Result<()> {
    if requested > QUADRATURE_BUDGET {
        return Err(HoloError::QuadratureBudgetExceeded { requested, budget: QUADRATURE_BUDGET });
    }
    Ok(())
}

/// `integral_D g(zeta) P^{N,2}(zeta, z)` on the Gauss product grid of the bounding box.
pub fn integrate_tensor<G: Holomorphic + ?Sized>(ctx: &KernelContext, g: &G, z: C2, nodes: usize) -> Result<Complex64> {
    check_budget(nodes.saturating_pow(4))?;
    let (lo, hi) = ctx.domain.bounding_box();
    let rules: Vec<Vec<(f64, f64)>> = (0..4).map(|k| gauss_legendre(nodes, lo[k], hi[k])).collect();
    let parts: Vec<Result<Complex64>> = rules[0]
        .par_iter()
        .map(|&(x0, w0)| {
            let mut s = c(0.0, 0.0);
            for &(x1, w1) in &rules[1] {
                for &(x2, w2) in &rules[2] {
                    for &(x3, w3) in &rules[3] {
                        let zeta = C2::from_reals([x0, x1, x2, x3]);
                        if !ctx.domain.contains(zeta) {
                            continue;
                        }
                        s += g.eval(zeta) * ctx.density(zeta, z, 2)? * (w0 * w1 * w2 * w3);
                    }
                }
            }
            Ok(s)
        })
        .collect();
    parts.into_iter().sum()
}

/// Seeded Monte Carlo estimate with `samples` accepted points, split over fixed shards.
/// Returns the estimate and its standard error.
pub fn integrate_mc<G: Holomorphic + ?Sized>(ctx: &KernelContext, g: &G, z: C2, samples: usize, seed: u64) -> Result<(Complex64, f64)> {
    check_budget(samples)?;
    let (lo, hi) = ctx.domain.bounding_box();
    let vol: f64 = (0..4).map(|k| hi[k] - lo[k]).product();
    let per = samples.div_ceil(SHARDS as usize);
    // (sum, sum of |.|^2, draws)
    let shards: Vec<Result<(Complex64, f64, usize)>> = (0..SHARDS)
        .into_par_iter()
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(s));
            let (mut sum, mut sq, mut draws, mut accepted) = (c(0.0, 0.0), 0.0, 0usize, 0usize);
            while accepted < per {
                let x: [f64; 4] = std::array::from_fn(|k| lo[k] + rng.random::<f64>() * (hi[k] - lo[k]));
                let zeta = C2::from_reals(x);
                draws += 1;
                if !ctx.domain.contains(zeta) {
                    continue;
                }
                accepted += 1;
                let v = g.eval(zeta) * ctx.density(zeta, z, 2)?;
                sum += v;
                sq += v.norm_sqr();
            }
            Ok((sum, sq, draws))
        })
        .collect();
    let (mut sum, mut sq, mut draws) = (c(0.0, 0.0), 0.0, 0usize);
    for r in shards {
        let (a, b, n) = r?;
        sum += a;
        sq += b;
        draws += n;
    }
    let n = draws as f64;
    let mean = sum / n;
    let var = (sq / n - mean.norm_sqr()).max(0.0);
    Ok((mean * vol, vol * (var / n).sqrt()))
}

/// Compares `integral g P^{N,2}(., z)` with `g(z)`.
pub fn reproduce_check<G: Holomorphic + ?Sized>(ctx: &KernelContext, g: &G, z: C2, quadrature: Quadrature) -> Result<ReproduceResult> {
    let rho = ctx.domain.rho(z);
    if !(rho <= -MIN_DEPTH) {
        return Err(HoloError::Range { field: "z".into(), value: format!("rho(z) = {rho}") });
    }
    let (integral, stderr_estimate) = match quadrature {
        Quadrature::MonteCarlo { samples, seed } => integrate_mc(ctx, g, z, samples, seed)?,
        Quadrature::Tensor { nodes } => (integrate_tensor(ctx, g, z, nodes)?, 0.0),
    };
    let reference = g.eval(z);
    Ok(ReproduceResult { integral, reference, abs_error: (integral - reference).norm(), stderr_estimate })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstiRow {
    pub eps: f64,
    pub sup_h1: f64,
    pub sup_h2: f64,
    /// `min |rho(zeta) + <h(zeta), zeta - z>| / (eps + |rho(zeta)| + |rho(z)|)`.
    pub min_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstiReport {
    pub rows: Vec<EstiRow>,
    pub slope_h1: f64,
    pub slope_h2: f64,
    pub min_ratio: f64,
}

/// For each center `zeta` and `eps`, samples `z` on the outer part of `P_eps(zeta)` and records
/// `h(zeta)` in the frame at `z` together with the lower-bound ratio.
pub fn esti_ba_probe(ctx: &KernelContext, centers: &[C2], eps_grid: &[f64]) -> Result<EstiReport> {
    let mut rows = Vec::new();
    for &eps in eps_grid {
        let mut row = EstiRow { eps, sup_h1: 0.0, sup_h2: 0.0, min_ratio: f64::INFINITY };
        for &zeta in centers {
            let fz = crate::geometry::koranyi_frame(&ctx.domain, zeta)?;
            let h = ctx.h(zeta);
            let rz = ctx.domain.rho(zeta);
            for ka in 0..3 {
                for pa in 0..8 {
                    for pb in 0..8 {
                        let a = Complex64::from_polar(0.99 * eps * ka as f64 / 2.0, std::f64::consts::TAU * pa as f64 / 8.0);
                        let b = Complex64::from_polar(0.99 * eps.sqrt(), std::f64::consts::TAU * pb as f64 / 8.0);
                        let z = fz.point(a, b);
                        let Ok(fr) = crate::geometry::koranyi_frame(&ctx.domain, z) else { continue };
                        row.sup_h1 = row.sup_h1.max(h.dot(fr.eta).norm());
                        row.sup_h2 = row.sup_h2.max(h.dot(fr.v).norm());
                        let num = (c(rz, 0.0) + h.dot(zeta - z)).norm();
                        row.min_ratio = row.min_ratio.min(num / (eps + rz.abs() + ctx.domain.rho(z).abs()));
                    }
                }
            }
        }
        rows.push(row);
    }
    let slope = |f: &dyn Fn(&EstiRow) -> f64| crate::gluing::fit_slope(&rows.iter().map(|r| (r.eps.ln(), f(r).ln())).collect::<Vec<_>>());
    Ok(EstiReport {
        slope_h1: slope(&|r| r.sup_h1),
        slope_h2: slope(&|r| r.sup_h2),
        min_ratio: rows.iter().map(|r| r.min_ratio).fold(f64::INFINITY, f64::min),
        rows,
    })
}
