//! Root curves `zeta1* -> alpha_i(zeta1*)` on a disc of normal offsets, labeled by continuation.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::roots::{fiber_poly, poly_roots, LEADING_TOL};
use crate::error::{HoloError, Result};
use crate::geometry::KoranyiFrame;
use crate::poly::HoloPoly;
use crate::types::c;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrackConfig {
    pub rings: usize,
    pub per_ring: usize,
}

impl Default for TrackConfig {
    fn default() -> Self {
        TrackConfig { rings: 6, per_ring: 16 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootCurves {
    pub frame: KoranyiFrame,
    pub radius: f64,
    /// Normal offsets `zeta1*`; index 0 is the disc center.
    pub samples: Vec<Complex64>,
    /// `values[s][i]` is `alpha_i(samples[s])`.
    pub values: Vec<Vec<Complex64>>,
    pub track_tol: f64,
}

/// Reorders `cur` so that `cur[i]` continues `prev[i]`, minimizing the largest move.
pub fn assign(prev: &[Complex64], cur: &[Complex64]) -> Vec<Complex64> {
    let n = prev.len();
    if n <= 6 {
        let mut perm: Vec<usize> = (0..n).collect();
        let mut best = perm.clone();
        let mut best_cost = (f64::INFINITY, f64::INFINITY);
        permute(&mut perm, 0, &mut |p| {
            let mut mx = 0.0f64;
            let mut sum = 0.0;
            for i in 0..n {
                let d = (prev[i] - cur[p[i]]).norm();
                mx = mx.max(d);
                sum += d;
            }
            if mx < best_cost.0 || (mx == best_cost.0 && sum < best_cost.1) {
                best_cost = (mx, sum);
                best.copy_from_slice(p);
            }
        });
        return best.iter().map(|&k| cur[k]).collect();
    }
    // Greedy closest-pair matching for larger root sets.
    let mut out = vec![c(0.0, 0.0); n];
    let mut used_p = vec![false; n];
    let mut used_c = vec![false; n];
    for _ in 0..n {
        let mut b = (f64::INFINITY, 0, 0);
        for i in (0..n).filter(|&i| !used_p[i]) {
            for k in (0..n).filter(|&k| !used_c[k]) {
                let d = (prev[i] - cur[k]).norm();
                if d < b.0 {
                    b = (d, i, k);
                }
            }
        }
        used_p[b.1] = true;
        used_c[b.2] = true;
        out[b.1] = cur[b.2];
    }
    out
}

fn permute<F: FnMut(&[usize])>(p: &mut Vec<usize>, k: usize, visit: &mut F) {
    if k == p.len() {
        visit(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, visit);
        p.swap(k, i);
    }
}

/// Partition of labels into groups of exactly equal values (multiple roots).
fn pattern(values: &[Complex64]) -> Vec<usize> {
    (0..values.len())
        .map(|i| (0..values.len()).find(|&k| values[k] == values[i]).unwrap())
        .collect()
}

fn fiber_degree(f: &HoloPoly, frame: &KoranyiFrame, z1s: Complex64) -> Result<(usize, Vec<Complex64>)> {
    let p = fiber_poly(f, frame, z1s)?;
    let deg = p.trimmed(LEADING_TOL).degree().unwrap_or(0);
    Ok((deg, poly_roots(&p)))
}

/// Tracks all fiber roots of `f` over the disc `|zeta1*| < radius` on a polar grid.
pub fn track_roots(f: &HoloPoly, frame: &KoranyiFrame, radius: f64, cfg: &TrackConfig) -> Result<RootCurves> {
    let (deg0, roots0) = fiber_degree(f, frame, c(0.0, 0.0))?;
    let pat0 = pattern(&roots0);
    let h = radius / cfg.rings as f64;
    let mut slope = 1.0f64;
    for (i, &a) in roots0.iter().enumerate() {
        if pat0.iter().filter(|&&k| k == pat0[i]).count() > 1 {
            continue;
        }
        let p = frame.point(c(0.0, 0.0), a);
        let g = f.gradient(p);
        let den = g.dot(frame.v);
        if den.norm() > 0.0 {
            slope = slope.max((g.dot(frame.eta) / den).norm());
        }
    }
    let track_tol = 10.0 * h * slope;
    let mut samples = vec![c(0.0, 0.0)];
    let mut values = vec![roots0];
    for ring in 1..=cfg.rings {
        for a in 0..cfg.per_ring {
            let z1s = Complex64::from_polar(h * ring as f64, std::f64::consts::TAU * a as f64 / cfg.per_ring as f64);
            let parent = if ring == 1 { 0 } else { 1 + (ring - 2) * cfg.per_ring + a };
            let (deg, roots) = fiber_degree(f, frame, z1s)?;
            if deg != deg0 || roots.len() != values[parent].len() {
                return Err(HoloError::FiberDegreeDrop { at: z1s });
            }
            let labeled = assign(&values[parent], &roots);
            let pat = pattern(&labeled);
            if pat != pat0 {
                let at = if pat.iter().collect::<std::collections::BTreeSet<_>>().len()
                    < pat0.iter().collect::<std::collections::BTreeSet<_>>().len()
                {
                    z1s
                } else {
                    c(0.0, 0.0)
                };
                return Err(HoloError::BranchCollision { at });
            }
            for (x, y) in labeled.iter().zip(&values[parent]) {
                if (x - y).norm() > track_tol {
                    return Err(HoloError::BranchCollision { at: z1s });
                }
            }
            samples.push(z1s);
            values.push(labeled);
        }
    }
    Ok(RootCurves { frame: *frame, radius, samples, values, track_tol })
}

impl RootCurves {
    pub fn labels(&self) -> usize {
        self.values[0].len()
    }

    /// Labeled roots at an arbitrary offset, matched against the nearest tracked sample.
    pub fn labeled_roots(&self, f: &HoloPoly, z1s: Complex64) -> Result<Vec<Complex64>> {
        let (_, roots) = fiber_degree(f, &self.frame, z1s)?;
        if roots.len() != self.labels() {
            return Err(HoloError::FiberDegreeDrop { at: z1s });
        }
        let k = self
            .samples
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - z1s).norm().partial_cmp(&(b.1 - z1s).norm()).unwrap())
            .map(|(k, _)| k)
            .unwrap();
        Ok(assign(&self.values[k], &roots))
    }

    /// Labels whose curve dips strictly below `(2 kappa |rho|)^(1/2)` on `|zeta1*| < kappa |rho|`.
    pub fn select_index_set(&self, kappa: f64, rho_abs: f64) -> Vec<usize> {
        let disc = kappa * rho_abs;
        let thr = (2.0 * kappa * rho_abs).sqrt();
        (0..self.labels())
            .filter(|&i| {
                self.samples
                    .iter()
                    .zip(&self.values)
                    .any(|(s, v)| s.norm() < disc && v[i].norm() < thr)
            })
            .collect()
    }
}
