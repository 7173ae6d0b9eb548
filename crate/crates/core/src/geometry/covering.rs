//! Graded coverings by Koranyi balls over an approach region of a boundary anchor point.
//!
//! Each level `rho = -(1 - c kappa)^j eps0` is restricted to the tent
//! `{|Im a| < A s, |b|^2 < A s}` where `(a, b)` are starred coordinates at the
//! anchor and `s` is the level depth. Level points come from a grid in `(Im a, b)`
//! projected along the anchor normal.

use std::fmt::Write as _;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::domain::ConvexDomain;
use super::frame::{koranyi_frame, KoranyiFrame};
use super::metric::delta_in_frame;
use super::sampling::{log_uniform, point_on_ray, project_along, random_in_disc};
use crate::error::{HoloError, Result};
use crate::types::{c, C2};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoveringConfig {
    pub kappa: f64,
    pub eps0: f64,
    pub c_sep: f64,
    pub level_floor: f64,
    /// Tent aperture `A`.
    pub aperture: f64,
    /// Grid points per separation radius along each axis.
    pub grid_factor: f64,
}

impl Default for CoveringConfig {
    fn default() -> Self {
        CoveringConfig {
            kappa: 0.05,
            eps0: 0.1,
            c_sep: 1.0,
            level_floor: 1e-3,
            aperture: 0.2,
            grid_factor: 4.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoveringLevel {
    pub j: usize,
    /// Value of rho on this level, `-(1 - c kappa)^j eps0`.
    pub level: f64,
    pub centers: Vec<C2>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KappaCovering {
    pub kappa: f64,
    pub eps0: f64,
    pub c_sep: f64,
    pub level_floor: f64,
    pub aperture: f64,
    pub grid_factor: f64,
    pub anchor: KoranyiFrame,
    pub levels: Vec<CoveringLevel>,
    /// Largest number of balls `P_{kappa |rho_j|}(z_j)` containing a sampled point.
    pub overlap_bound: usize,
}

/// Default boundary anchor: the boundary point reached from the interior point along `-e_1`.
pub fn default_anchor(domain: &ConvexDomain) -> Result<C2> {
    point_on_ray(domain, C2::real(-1.0, 0.0), 0.0)
        .ok_or_else(|| HoloError::InvalidArgument("domain has no interior point".into()))
}

impl KappaCovering {
    pub fn separation(&self, level: f64) -> f64 {
        self.c_sep * self.kappa * level.abs()
    }

    pub fn center_count(&self) -> usize {
        self.levels.iter().map(|l| l.centers.len()).sum()
    }

    /// `(level index, center)` pairs in level order.
    pub fn centers(&self) -> impl Iterator<Item = (usize, C2)> + '_ {
        self.levels
            .iter()
            .enumerate()
            .flat_map(|(i, l)| l.centers.iter().map(move |&p| (i, p)))
    }

    /// Level points of the construction grid at depth `s`.
    pub fn level_grid(&self, domain: &ConvexDomain, s: f64) -> Vec<C2> {
        level_grid(domain, &self.anchor, s, self.c_sep * self.kappa * s, self.aperture, self.grid_factor)
    }

    /// Random point of the tent between the first and last level, away from the lateral edge.
    pub fn sample_region<R: Rng + ?Sized>(&self, domain: &ConvexDomain, shrink: f64, rng: &mut R) -> Option<C2> {
        let s_hi = self.levels.first()?.level.abs();
        let s_lo = self.levels.last()?.level.abs();
        let s = if s_hi > s_lo { log_uniform(rng, s_lo, s_hi) } else { s_hi };
        let t = (2.0 * rng.random::<f64>() - 1.0) * shrink * self.aperture * s;
        let b = random_in_disc(rng, shrink * (self.aperture * s).sqrt());
        let p = self.anchor.point(c(0.0, t), b);
        project_along(domain, p, self.anchor.eta, -s, 1e-13)
    }

    pub fn to_csv(&self, domain: &ConvexDomain) -> String {
        let mut out = String::from("j,k,z1re,z1im,z2re,z2im,rho,level\n");
        for l in &self.levels {
            for (k, p) in l.centers.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "{},{},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
                    l.j,
                    k,
                    p.z1.re,
                    p.z1.im,
                    p.z2.re,
                    p.z2.im,
                    domain.rho(*p),
                    l.level
                );
            }
        }
        out
    }
}

fn level_grid(
    domain: &ConvexDomain,
    anchor: &KoranyiFrame,
    s: f64,
    r: f64,
    aperture: f64,
    grid_factor: f64,
) -> Vec<C2> {
    let ht = r / grid_factor;
    let hb = r.sqrt() / grid_factor;
    let t_max = aperture * s;
    let b_max = (aperture * s).sqrt();
    let nt = (t_max / ht).floor() as i64;
    let nb = (b_max / hb).floor() as i64;
    let mut seeds = Vec::new();
    for it in -nt..=nt {
        for ix in -nb..=nb {
            for iy in -nb..=nb {
                let b = c(ix as f64 * hb, iy as f64 * hb);
                if b.norm_sqr() < aperture * s {
                    seeds.push(anchor.point(c(0.0, it as f64 * ht), b));
                }
            }
        }
    }
    seeds
        .into_par_iter()
        .filter_map(|p| project_along(domain, p, anchor.eta, -s, 1e-13))
        .collect()
}

/// Greedy separated packing of each level of the tent.
pub fn build_kappa_covering(domain: &ConvexDomain, cfg: &CoveringConfig) -> Result<KappaCovering> {
    if !(cfg.kappa > 0.0 && cfg.kappa <= 0.1) {
        return Err(HoloError::Range { field: "kappa".into(), value: cfg.kappa.to_string() });
    }
    if !(cfg.eps0 > 0.0 && cfg.level_floor > 0.0 && cfg.c_sep > 0.0 && cfg.c_sep * cfg.kappa < 1.0) {
        return Err(HoloError::InvalidArgument("covering parameters must be positive".into()));
    }
    let anchor = koranyi_frame(domain, default_anchor(domain)?)?;
    build_with_anchor(domain, cfg, anchor)
}

pub fn build_with_anchor(domain: &ConvexDomain, cfg: &CoveringConfig, anchor: KoranyiFrame) -> Result<KappaCovering> {
    let q = 1.0 - cfg.c_sep * cfg.kappa;
    let mut levels = Vec::new();
    let mut j = 0usize;
    loop {
        let s = cfg.eps0 * q.powi(j as i32);
        if s < cfg.level_floor {
            break;
        }
        if s >= domain.collar || domain.rho(domain.interior_point()) >= -s {
            return Err(HoloError::CollarExhausted { level: -s });
        }
        let r = cfg.c_sep * cfg.kappa * s;
        let grid = level_grid(domain, &anchor, s, r, cfg.aperture, cfg.grid_factor);
        if grid.is_empty() {
            return Err(HoloError::CollarExhausted { level: -s });
        }
        let frames: Vec<KoranyiFrame> = grid
            .par_iter()
            .map(|&p| koranyi_frame(domain, p))
            .collect::<Result<_>>()?;
        let mut accepted: Vec<usize> = Vec::new();
        let reach = r * r + r;
        for (i, &p) in grid.iter().enumerate() {
            let ok = accepted.iter().all(|&k| {
                let cpt = grid[k];
                (p - cpt).norm_sqr() >= reach
                    || (delta_in_frame(&frames[i], cpt) >= r && delta_in_frame(&frames[k], p) >= r)
            });
            if ok {
                accepted.push(i);
            }
        }
        levels.push(CoveringLevel {
            j,
            level: -s,
            centers: accepted.into_iter().map(|i| grid[i]).collect(),
        });
        j += 1;
    }
    let mut cov = KappaCovering {
        kappa: cfg.kappa,
        eps0: cfg.eps0,
        c_sep: cfg.c_sep,
        level_floor: cfg.level_floor,
        aperture: cfg.aperture,
        grid_factor: cfg.grid_factor,
        anchor,
        levels,
        overlap_bound: 0,
    };
    cov.overlap_bound = pointwise_overlap(&cov, domain, 1.0, 2000, 0x6b61707061)?;
    Ok(cov)
}

/// Frames of every center, in the order of [`KappaCovering::centers`].
pub fn center_frames(cov: &KappaCovering, domain: &ConvexDomain) -> Result<Vec<KoranyiFrame>> {
    cov.centers()
        .map(|(_, p)| p)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&p| koranyi_frame(domain, p))
        .collect()
}

/// Max over seeded tent samples of the number of balls `P_{scale kappa |rho_j|}(z_j)` containing the sample.
pub fn pointwise_overlap(cov: &KappaCovering, domain: &ConvexDomain, scale: f64, samples: usize, seed: u64) -> Result<usize> {
    let frames = center_frames(cov, domain)?;
    let radii: Vec<f64> = cov.centers().map(|(i, _)| scale * cov.kappa * cov.levels[i].level.abs()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<C2> = (0..samples).filter_map(|_| cov.sample_region(domain, 0.8, &mut rng)).collect();
    Ok(pts
        .par_iter()
        .map(|&p| frames.iter().zip(&radii).filter(|(f, &r)| f.in_ball(r, p)).count())
        .max()
        .unwrap_or(0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoveringViolation {
    pub kind: String,
    pub j: usize,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoveringReport {
    pub centers: usize,
    pub levels: usize,
    pub level_checks: usize,
    pub separation_checks: usize,
    pub coverage_checks: usize,
    pub inclusion_checks: usize,
    /// Max multiplicity of the balls `P_{kappa |rho_j|}(z_j)` at sampled points.
    pub overlap_pointwise: usize,
    /// Max number of balls `P_{4 kappa |rho_j|}(z_j)` meeting a sampled ball `P_{4 kappa |rho(z)|}(z)`,
    /// detected through points of the sampled ball (a lower estimate).
    pub overlap_intersections: usize,
    pub violations: Vec<CoveringViolation>,
}

impl CoveringReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Max of rho over the distinguished boundary of `P_r(frame.base)`; by convexity this is the max over the ball.
pub fn max_rho_on_ball(domain: &ConvexDomain, frame: &KoranyiFrame, r: f64, n: usize) -> f64 {
    let sr = r.sqrt();
    let mut best = f64::NEG_INFINITY;
    for a in 0..n {
        let ta = std::f64::consts::TAU * a as f64 / n as f64;
        for b in 0..n {
            let tb = std::f64::consts::TAU * b as f64 / n as f64;
            let p = frame.point(Complex64::from_polar(r, ta), Complex64::from_polar(sr, tb));
            best = best.max(domain.rho(p));
        }
    }
    best
}

pub fn verify_covering(cov: &KappaCovering, domain: &ConvexDomain, probe_samples: usize, seed: u64) -> Result<CoveringReport> {
    let mut violations = Vec::new();
    let mut rep = CoveringReport {
        centers: cov.center_count(),
        levels: cov.levels.len(),
        level_checks: 0,
        separation_checks: 0,
        coverage_checks: 0,
        inclusion_checks: 0,
        overlap_pointwise: 0,
        overlap_intersections: 0,
        violations: Vec::new(),
    };
    for lvl in &cov.levels {
        let r = cov.separation(lvl.level);
        let frames: Vec<KoranyiFrame> = lvl.centers.iter().map(|&p| koranyi_frame(domain, p)).collect::<Result<_>>()?;
        for p in &lvl.centers {
            rep.level_checks += 1;
            let err = (domain.rho(*p) - lvl.level).abs();
            if err > 1e-9 {
                violations.push(CoveringViolation { kind: "level".into(), j: lvl.j, detail: format!("|rho - level| = {err:e}") });
            }
        }
        let n = lvl.centers.len();
        for a in 0..n {
            for b in 0..n {
                if a == b {
                    continue;
                }
                rep.separation_checks += 1;
                let d = delta_in_frame(&frames[a], lvl.centers[b]);
                if d < r {
                    violations.push(CoveringViolation {
                        kind: "separation".into(),
                        j: lvl.j,
                        detail: format!("delta(z_{a}, z_{b}) = {d:e} < {r:e}"),
                    });
                }
            }
        }
        let grid = cov.level_grid(domain, lvl.level.abs());
        let uncovered: Vec<C2> = grid
            .par_iter()
            .filter(|&&p| match koranyi_frame(domain, p) {
                Ok(fp) => !lvl.centers.iter().any(|&cpt| delta_in_frame(&fp, cpt) < r),
                Err(_) => true,
            })
            .cloned()
            .collect();
        rep.coverage_checks += grid.len();
        for p in uncovered {
            violations.push(CoveringViolation { kind: "coverage".into(), j: lvl.j, detail: format!("level point {:?} uncovered", p.to_reals()) });
        }
        let inc: Vec<(usize, f64)> = frames
            .par_iter()
            .enumerate()
            .map(|(k, f)| (k, max_rho_on_ball(domain, f, 4.0 * cov.kappa * lvl.level.abs(), 48)))
            .filter(|(_, m)| *m >= 0.0)
            .collect();
        rep.inclusion_checks += frames.len();
        for (k, m) in inc {
            violations.push(CoveringViolation {
                kind: "inclusion".into(),
                j: lvl.j,
                detail: format!("max rho on P_4k(z_{k}) = {m:e}"),
            });
        }
    }
    rep.overlap_pointwise = pointwise_overlap(cov, domain, 1.0, probe_samples, seed)?;
    rep.overlap_intersections = intersection_overlap(cov, domain, probe_samples.min(200), seed ^ 0x5eed)?;
    rep.violations = violations;
    Ok(rep)
}

/// Sampled count of 4-kappa balls meeting the 4-kappa ball at a tent point.
fn intersection_overlap(cov: &KappaCovering, domain: &ConvexDomain, samples: usize, seed: u64) -> Result<usize> {
    let frames = center_frames(cov, domain)?;
    let radii: Vec<f64> = cov.centers().map(|(i, _)| 4.0 * cov.kappa * cov.levels[i].level.abs()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut probes = Vec::new();
    for _ in 0..samples {
        let Some(z) = cov.sample_region(domain, 0.8, &mut rng) else { continue };
        let f = koranyi_frame(domain, z)?;
        let r = 4.0 * cov.kappa * domain.rho(z).abs();
        let pts: Vec<C2> = (0..256).map(|_| f.point(random_in_disc(&mut rng, r), random_in_disc(&mut rng, r.sqrt()))).collect();
        probes.push(pts);
    }
    Ok(probes
        .par_iter()
        .map(|pts| {
            frames
                .iter()
                .zip(&radii)
                .filter(|(f, &r)| pts.iter().any(|&p| f.in_ball(r, p)))
                .count()
        })
        .max()
        .unwrap_or(0))
}
