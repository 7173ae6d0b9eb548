//! Partition of unity over a covering and global assembly of the local quotients.

use std::sync::Arc;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{HoloError, Result};
use crate::geometry::covering::center_frames;
use crate::geometry::{koranyi_frame, ConvexDomain, KappaCovering, KoranyiFrame};
use crate::local_division::{local_divide, LocalConfig, LocalDivision};
use crate::poly::{HoloPoly, Holomorphic};
use crate::smooth::transition;
use crate::types::C2;

/// Bumps equal 1 on `P_{kappa |rho_j|}(z_j)` and vanish outside `P_{SUPPORT kappa |rho_j|}(z_j)`.
pub const SUPPORT: f64 = 2.0;
/// Smallest admissible bump sum at a covered point.
pub const MIN_BUMP_SUM: f64 = 1e-6;

fn profile(t: f64) -> f64 {
    1.0 - transition(t, 1.0, SUPPORT)
}

#[derive(Debug, Clone)]
pub struct PartitionOfUnity {
    pub kappa: f64,
    /// `(level index, center)`.
    pub centers: Vec<(usize, C2)>,
    pub frames: Vec<KoranyiFrame>,
    /// `kappa |rho(z_j)|`.
    pub radii: Vec<f64>,
    pub deriv_max: usize,
}

impl PartitionOfUnity {
    pub fn from_centers(domain: &ConvexDomain, kappa: f64, centers: Vec<(usize, C2)>, deriv_max: usize) -> Result<Self> {
        let frames = centers.iter().map(|&(_, p)| koranyi_frame(domain, p)).collect::<Result<Vec<_>>>()?;
        let radii = centers.iter().map(|&(_, p)| kappa * domain.rho(p).abs()).collect();
        Ok(PartitionOfUnity { kappa, centers, frames, radii, deriv_max })
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    /// Unnormalized bump of center `j`.
    pub fn bump(&self, j: usize, z: C2) -> f64 {
        let r = self.radii[j];
        let (a, b) = self.frames[j].coords(z);
        profile(a.norm() / r) * profile(b.norm_sqr() / r)
    }

    /// Centers whose enlarged support `P_{scale SUPPORT kappa |rho_j|}` may contain `z`.
    pub fn candidates(&self, z: C2, scale: f64) -> Vec<usize> {
        (0..self.len())
            .filter(|&j| {
                let r = scale * SUPPORT * self.radii[j];
                (z - self.centers[j].1).norm_sqr() <= r * r + r
            })
            .filter(|&j| {
                let r = scale * SUPPORT * self.radii[j];
                let (a, b) = self.frames[j].coords(z);
                a.norm() < r && b.norm_sqr() < r
            })
            .collect()
    }

    /// Nonzero `(j, chi_j(z))`, normalized to sum to one.
    pub fn weights(&self, z: C2) -> Result<Vec<(usize, f64)>> {
        let raw: Vec<(usize, f64)> = self
            .candidates(z, 1.0)
            .into_iter()
            .map(|j| (j, self.bump(j, z)))
            .filter(|&(_, b)| b > 0.0)
            .collect();
        let sum: f64 = raw.iter().map(|x| x.1).sum();
        if sum < MIN_BUMP_SUM {
            return Err(HoloError::UncoveredPoint);
        }
        Ok(raw.into_iter().map(|(j, b)| (j, b / sum)).collect())
    }

    pub fn chi(&self, j: usize, z: C2) -> Result<f64> {
        Ok(self.weights(z)?.into_iter().find(|x| x.0 == j).map(|x| x.1).unwrap_or(0.0))
    }

    /// Largest `|D chi_j| |rho_j|^w` over samples, active centers, and first-order Wirtinger
    /// derivatives along `eta_j` (`w = 1`) and `v_j` (`w = 1/2`), both holomorphic and anti-holomorphic.
    pub fn derivative_constant(&self, samples: &[C2]) -> f64 {
        samples
            .par_iter()
            .map(|&z| {
                let Ok(w) = self.weights(z) else { return 0.0 };
                let mut best = 0.0f64;
                for (j, _) in w {
                    let rho = self.radii[j] / self.kappa;
                    let f = |p: C2| self.chi(j, p).unwrap_or(0.0);
                    let fr = &self.frames[j];
                    for (dir, weight) in [(fr.eta, 1.0), (fr.v, 0.5)] {
                        let h = 1e-4 * rho.powf(weight);
                        let dx = (f(z + dir * h) - f(z - dir * h)) / (2.0 * h);
                        let dy = (f(z + dir * Complex64::new(0.0, h)) - f(z - dir * Complex64::new(0.0, h))) / (2.0 * h);
                        // chi is real, so |d/dw| = |d/dw-bar| = |(dx, dy)| / 2.
                        let d = 0.5 * (dx * dx + dy * dy).sqrt();
                        best = best.max(d * rho.powf(weight));
                    }
                }
                best
            })
            .reduce(|| 0.0, f64::max)
    }
}

pub fn build_partition(covering: &KappaCovering, domain: &ConvexDomain, deriv_max: usize) -> Result<PartitionOfUnity> {
    let frames = center_frames(covering, domain)?;
    let centers: Vec<(usize, C2)> = covering.centers().collect();
    let radii = centers.iter().map(|&(_, p)| covering.kappa * domain.rho(p).abs()).collect();
    Ok(PartitionOfUnity { kappa: covering.kappa, centers, frames, radii, deriv_max })
}

/// Local divisions attached to partition centers; missing entries failed or were not requested.
#[derive(Debug, Default)]
pub struct LocalSet {
    pub locals: Vec<Option<Arc<LocalDivision>>>,
    pub failures: Vec<(usize, HoloError)>,
}

/// Builds local divisions for `indices` in parallel.
pub fn build_locals(
    partition: &PartitionOfUnity,
    indices: &[usize],
    g: Arc<dyn Holomorphic>,
    f1: &HoloPoly,
    f2: &HoloPoly,
    domain: &ConvexDomain,
    config: &LocalConfig,
) -> LocalSet {
    let built: Vec<(usize, Result<LocalDivision>)> = indices
        .par_iter()
        .map(|&j| (j, local_divide(g.clone(), f1, f2, domain, partition.centers[j].1, partition.kappa, config)))
        .collect();
    let mut set = LocalSet { locals: vec![None; partition.len()], failures: Vec::new() };
    for (j, r) in built {
        match r {
            Ok(d) => set.locals[j] = Some(Arc::new(d)),
            Err(e) => set.failures.push((j, e)),
        }
    }
    set
}

/// Sorted union of the centers whose supports (enlarged by `margin`) meet the sample points.
pub fn required_centers(partition: &PartitionOfUnity, samples: &[C2], margin: f64) -> Vec<usize> {
    let mut all: Vec<usize> = samples.par_iter().flat_map_iter(|&z| partition.candidates(z, 1.0 + margin)).collect();
    all.sort_unstable();
    all.dedup();
    all
}

/// Pointwise values of the glued quotients and the local data behind them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GlobalEval {
    pub g1: Complex64,
    pub g2: Complex64,
    pub residual: f64,
    /// Largest residual of the contributing local solutions at the same point.
    pub max_local_residual: f64,
    pub active: usize,
}

pub struct GlobalSolution {
    pub partition: Arc<PartitionOfUnity>,
    pub locals: Vec<Option<Arc<LocalDivision>>>,
    pub f1: HoloPoly,
    pub f2: HoloPoly,
}

/// `g~_l = sum_j chi_j ghat_l^(j)`.
pub fn glue_global(partition: Arc<PartitionOfUnity>, locals: Vec<Option<Arc<LocalDivision>>>, f1: &HoloPoly, f2: &HoloPoly) -> GlobalSolution {
    GlobalSolution { partition, locals, f1: f1.clone(), f2: f2.clone() }
}

impl GlobalSolution {
    fn local(&self, j: usize) -> Result<&LocalDivision> {
        self.locals
            .get(j)
            .and_then(|x| x.as_deref())
            .ok_or(HoloError::MissingLocal { index: j })
    }

    pub fn eval(&self, z: C2) -> Result<(Complex64, Complex64)> {
        let mut g1 = Complex64::new(0.0, 0.0);
        let mut g2 = Complex64::new(0.0, 0.0);
        for (j, w) in self.partition.weights(z)? {
            let (a, b) = self.local(j)?.eval(z)?;
            g1 += a * w;
            g2 += b * w;
        }
        Ok((g1, g2))
    }

    pub fn eval_full(&self, z: C2) -> Result<GlobalEval> {
        let weights = self.partition.weights(z)?;
        let (f1, f2) = (self.f1.eval(z), self.f2.eval(z));
        let mut g1 = Complex64::new(0.0, 0.0);
        let mut g2 = Complex64::new(0.0, 0.0);
        let mut max_local = 0.0f64;
        let mut g = Complex64::new(0.0, 0.0);
        for &(j, w) in &weights {
            let loc = self.local(j)?;
            let (a, b) = loc.eval(z)?;
            g = loc.g().eval(z);
            max_local = max_local.max((g - a * f1 - b * f2).norm());
            g1 += a * w;
            g2 += b * w;
        }
        Ok(GlobalEval { g1, g2, residual: (g - g1 * f1 - g2 * f2).norm(), max_local_residual: max_local, active: weights.len() })
    }
}

/// `d/d conj(w)` of `f(z + w dir)` at `w = 0` by central differences.
fn dbar<F: Fn(C2) -> Complex64>(f: &F, z: C2, dir: C2, h: f64) -> Complex64 {
    let i = Complex64::new(0.0, 1.0);
    let dx = (f(z + dir * h) - f(z - dir * h)) / (2.0 * h);
    let dy = (f(z + dir * (i * h)) - f(z - dir * (i * h))) / (2.0 * h);
    (dx + i * dy) * 0.5
}

/// `d^(a+b) f / d conj(eta)^a d conj(v)^b` by nested differences with anisotropic steps.
pub fn anti_holomorphic_derivative<F: Fn(C2) -> Complex64 + Sync>(f: &F, z: C2, frame: &KoranyiFrame, rho_abs: f64, a: usize, b: usize) -> Complex64 {
    let step_n = 1e-3 * rho_abs;
    let step_t = 1e-3 * rho_abs.sqrt();
    fn rec<F: Fn(C2) -> Complex64>(f: &F, z: C2, dirs: &[(C2, f64)]) -> Complex64 {
        match dirs.split_first() {
            None => f(z),
            Some((&(d, h), rest)) => dbar(&|p: C2| rec(f, p, rest), z, d, h),
        }
    }
    let mut dirs = vec![(frame.eta, step_n); a];
    dirs.extend(std::iter::repeat_n((frame.v, step_t), b));
    rec(f, z, &dirs)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivativeNorm {
    pub alpha: usize,
    pub beta: usize,
    pub l: usize,
    pub q: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub samples: usize,
    pub skipped: usize,
    pub norms: Vec<DerivativeNorm>,
    /// Log-log slope of the shell maxima of `|rho|^N max(|g~1|, |g~2|)` against `|rho|`.
    pub vanishing_slope: f64,
    pub n_weight: u32,
}

/// Scaled anti-holomorphic frame derivatives of the glued quotients up to total order `k1`.
/// Finite `q` gives the `|rho|`-weighted sample mean of `|.|^q` to the power `1/q`, which
/// reweights log-graded samples towards Lebesgue measure in the normal variable.
pub fn verify_main_hypotheses(
    sol: &GlobalSolution,
    domain: &ConvexDomain,
    q: f64,
    k1: usize,
    n_weight: u32,
    samples: &[C2],
) -> HypothesisReport {
    let orders: Vec<(usize, usize)> = (1..=k1).flat_map(|k| (0..=k).map(move |a| (a, k - a))).collect();
    let rows: Vec<Option<(f64, f64, Vec<[f64; 2]>)>> = samples
        .par_iter()
        .map(|&z| {
            let fr = koranyi_frame(domain, z).ok()?;
            let rho = domain.rho(z).abs();
            let (g1, g2) = sol.eval(z).ok()?;
            let mut vals = Vec::with_capacity(orders.len());
            for &(a, b) in &orders {
                let scale = rho.powf(a as f64 + b as f64 / 2.0);
                let mut pair = [0.0; 2];
                for (l, slot) in pair.iter_mut().enumerate() {
                    let f = |p: C2| sol.eval(p).map(|x| if l == 0 { x.0 } else { x.1 }).unwrap_or(Complex64::new(f64::NAN, 0.0));
                    *slot = anti_holomorphic_derivative(&f, z, &fr, rho, a, b).norm() * scale;
                }
                if pair.iter().any(|x| x.is_nan()) {
                    return None;
                }
                vals.push(pair);
            }
            Some((rho, g1.norm().max(g2.norm()), vals))
        })
        .collect();
    let ok: Vec<&(f64, f64, Vec<[f64; 2]>)> = rows.iter().flatten().collect();
    let mut norms = Vec::new();
    for (k, &(a, b)) in orders.iter().enumerate() {
        for l in 0..2 {
            let value = if q.is_infinite() {
                ok.iter().map(|r| r.2[k][l]).fold(0.0, f64::max)
            } else {
                let wsum: f64 = ok.iter().map(|r| r.0).sum();
                (ok.iter().map(|r| r.0 * r.2[k][l].powf(q)).sum::<f64>() / wsum.max(f64::MIN_POSITIVE)).powf(1.0 / q)
            };
            norms.push(DerivativeNorm { alpha: a, beta: b, l: l + 1, q, value });
        }
    }
    let shells: Vec<(f64, f64)> = ok.iter().map(|r| (r.0, r.0.powi(n_weight as i32) * r.1)).collect();
    HypothesisReport { samples: samples.len(), skipped: samples.len() - ok.len(), norms, vanishing_slope: shell_slope(&shells), n_weight }
}

/// Least-squares slope of `log(max value per decade shell)` against `log(depth)`.
pub fn shell_slope(points: &[(f64, f64)]) -> f64 {
    let mut shells: std::collections::BTreeMap<i64, (f64, f64)> = std::collections::BTreeMap::new();
    for &(d, v) in points {
        if d <= 0.0 || v <= 0.0 {
            continue;
        }
        let key = (d.log10() * 2.0).floor() as i64;
        let e = shells.entry(key).or_insert((d, v));
        if v > e.1 {
            *e = (d, v);
        }
    }
    let pts: Vec<(f64, f64)> = shells.values().map(|&(d, v)| (d.ln(), v.ln())).collect();
    if pts.len() < 2 {
        return f64::NAN;
    }
    fit_slope(&pts)
}

/// Least-squares slope through `(x, y)` points.
pub fn fit_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// Seeded samples of the covered tent region.
pub fn collar_samples(covering: &KappaCovering, domain: &ConvexDomain, n: usize, seed: u64) -> Vec<C2> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    let mut tries = 0;
    while out.len() < n && tries < 20 * n {
        tries += 1;
        if let Some(p) = covering.sample_region(domain, 0.8, &mut rng) {
            out.push(p);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::covering::build_with_anchor;
    use crate::geometry::CoveringConfig;
    use crate::types::c;

    fn ball10() -> ConvexDomain {
        ConvexDomain::ball(C2::real(1.0, 0.0), 1.0)
    }

    fn model() -> (HoloPoly, HoloPoly) {
        (HoloPoly::z2(), &HoloPoly::z2() - &(&HoloPoly::z1() * &HoloPoly::z1()))
    }

    fn small_covering(d: &ConvexDomain) -> KappaCovering {
        let cfg = CoveringConfig { level_floor: 0.02, ..Default::default() };
        let anchor = koranyi_frame(d, C2::ZERO).unwrap();
        build_with_anchor(d, &cfg, anchor).unwrap()
    }

    #[test]
    fn two_balls_sum_to_one() {
        let d = ball10();
        let p = PartitionOfUnity::from_centers(&d, 0.05, vec![(0, C2::new(c(0.1, 0.0), c(0.12, 0.0))), (0, C2::new(c(0.1, 0.0), c(-0.12, 0.0)))], 1).unwrap();
        let mid = C2::real(0.1, 0.0);
        let w = p.weights(mid).unwrap();
        assert_eq!(w.len(), 2);
        assert!((w.iter().map(|x| x.1).sum::<f64>() - 1.0).abs() < 1e-15);
        let core = p.weights(C2::new(c(0.1, 0.0), c(0.12, 0.0))).unwrap();
        assert_eq!(core, vec![(0, 1.0)]);
        assert_eq!(p.weights(C2::real(0.5, 0.5)), Err(HoloError::UncoveredPoint));
    }

    #[test]
    fn partition_sums_to_one_on_covered_samples() {
        let d = ball10();
        let cov = small_covering(&d);
        let p = build_partition(&cov, &d, 1).unwrap();
        for z in collar_samples(&cov, &d, 2000, 3) {
            let s: f64 = p.weights(z).unwrap().iter().map(|x| x.1).sum();
            assert!((s - 1.0).abs() < 1e-9);
        }
        let cst = p.derivative_constant(&collar_samples(&cov, &d, 200, 4));
        assert!(cst.is_finite() && cst > 0.0);
    }

    #[test]
    fn single_ball_glue_is_the_local_solution() {
        let d = ball10();
        let (f1, f2) = model();
        let z0 = C2::real(0.1, 0.0);
        let p = Arc::new(PartitionOfUnity::from_centers(&d, 0.05, vec![(0, z0)], 1).unwrap());
        let g: Arc<dyn Holomorphic> = Arc::new(&(&HoloPoly::z1() * &f1) + &f2);
        let set = build_locals(&p, &[0], g, &f1, &f2, &d, &LocalConfig::default());
        assert!(set.failures.is_empty());
        let local = set.locals[0].clone().unwrap();
        let sol = glue_global(p, set.locals, &f1, &f2);
        for z in local.ball_samples(30, 0.9) {
            assert_eq!(sol.eval(z).unwrap(), local.eval(z).unwrap());
        }
    }

    #[test]
    fn missing_local_is_reported() {
        let d = ball10();
        let (f1, f2) = model();
        let p = Arc::new(PartitionOfUnity::from_centers(&d, 0.05, vec![(0, C2::real(0.1, 0.0))], 1).unwrap());
        let sol = glue_global(p, vec![None], &f1, &f2);
        assert_eq!(sol.eval(C2::real(0.1, 0.0)), Err(HoloError::MissingLocal { index: 0 }));
    }

    #[test]
    fn glued_residual_is_bounded_by_local_ones() {
        let d = ball10();
        let (f1, f2) = model();
        let cov = small_covering(&d);
        let p = Arc::new(build_partition(&cov, &d, 1).unwrap());
        let samples = collar_samples(&cov, &d, 100, 9);
        let need = required_centers(&p, &samples, 0.0);
        let g: Arc<dyn Holomorphic> = Arc::new(&(&HoloPoly::z1() * &f1) + &(&HoloPoly::z2() * &f2));
        let cfg = LocalConfig { check_samples: 0, ..Default::default() };
        let set = build_locals(&p, &need, g, &f1, &f2, &d, &cfg);
        assert!(set.failures.is_empty(), "{:?}", set.failures.first());
        let sol = glue_global(p, set.locals, &f1, &f2);
        for z in samples {
            let e = sol.eval_full(z).unwrap();
            assert!(e.residual <= e.max_local_residual * (1.0 + 1e-9) + 1e-15, "{e:?}");
            assert!(e.max_local_residual < 1e-8);
        }
    }

    #[test]
    fn zero_numerator_glues_to_zero() {
        let d = ball10();
        let (f1, f2) = model();
        let p = Arc::new(PartitionOfUnity::from_centers(&d, 0.05, vec![(0, C2::real(0.1, 0.0))], 1).unwrap());
        let set = build_locals(&p, &[0], Arc::new(HoloPoly::zero()), &f1, &f2, &d, &LocalConfig::default());
        let sol = glue_global(p, set.locals, &f1, &f2);
        assert_eq!(sol.eval(C2::real(0.1, 0.001)).unwrap(), (c(0.0, 0.0), c(0.0, 0.0)));
    }

    #[test]
    fn holomorphic_functions_have_no_antiholomorphic_derivatives() {
        let d = ball10();
        let f = |p: C2| p.z1 * p.z1 * p.z2 + p.z2.exp();
        let z = C2::new(c(0.05, 0.01), c(0.1, -0.02));
        let fr = koranyi_frame(&d, z).unwrap();
        let rho = d.rho(z).abs();
        for (a, b) in [(1, 0), (0, 1), (2, 0), (1, 1), (0, 2)] {
            let v = anti_holomorphic_derivative(&f, z, &fr, rho, a, b).norm() * rho.powf(a as f64 + b as f64 / 2.0);
            assert!(v < 1e-6, "{a} {b} {v}");
        }
        let g = |p: C2| p.z1.conj() * Complex64::new(1.0, 0.0);
        let v = anti_holomorphic_derivative(&g, z, &fr, rho, 1, 0);
        assert!((v - fr.eta.z1.conj()).norm() < 1e-8);
    }

    #[test]
    fn slope_fit() {
        let pts: Vec<(f64, f64)> = (0..20).map(|k| {
            let d = 10f64.powf(-(k as f64) / 5.0);
            (d, 3.0 * d * d)
        }).collect();
        assert!((shell_slope(&pts) - 2.0).abs() < 1e-9);
    }
}
