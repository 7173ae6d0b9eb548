//! Node sets on complex lines and the divided-difference certificates.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::table::DividedDiffTable;
use crate::error::{HoloError, Result};
use crate::geometry::sampling::graded_samples;
use crate::geometry::{koranyi_frame, tau, ConvexDomain};
use crate::poly::{HoloPoly, Holomorphic};
use crate::quadrature::disc_rule;
use crate::types::C2;
use crate::varieties::roots::{line_scale, poly_roots};

/// Relative size of `|f_l|` below which a point counts as lying on `X_l`.
pub const EXCLUSION_TOL: f64 = 1e-10;
/// Node sets larger than this are truncated to the nodes closest to the line's base point.
pub const MAX_NODES: usize = 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    RatioSup,
    SupInfty1,
    SupInfty2,
    Lq1,
    Lq2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub z: C2,
    pub v: C2,
    pub lambdas: Vec<Complex64>,
    pub contribution: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: CertificateKind,
    pub value: f64,
    pub k_max: usize,
    pub kappa: f64,
    pub q: f64,
    pub witnesses: Vec<Witness>,
    pub truncation_flags: Vec<String>,
    /// Points or centers skipped (both functions vanish, or a fiber failed).
    pub skipped: usize,
    /// Same supremum over directions far from the complex tangent, reported separately.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub transverse_value: Option<f64>,
    /// Cumulative sums by covering level (L^q certificates).
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub partial_sums: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertConfig {
    pub kappa: f64,
    pub k_max: usize,
    /// Near-tangent directions per center (the first is the complex tangent itself).
    pub directions: usize,
    /// Also sample directions at angles pi/6 and pi/3 from the tangent.
    pub transverse: bool,
}

impl Default for CertConfig {
    fn default() -> Self {
        CertConfig { kappa: 0.05, k_max: 4, directions: 8, transverse: true }
    }
}

fn other(l: usize) -> usize {
    3 - l
}

/// `Lambda^(l)_{z,v}`: zeros of `f_{3-l}` on the line with `|lambda| < tau(z, v, 3 kappa |rho(z)|)`
/// at which `f_l` does not vanish.
pub fn lambda_set(f: [&HoloPoly; 2], domain: &ConvexDomain, z: C2, v: C2, kappa: f64, l: usize) -> Result<Vec<Complex64>> {
    assert!(l == 1 || l == 2, "l must be 1 or 2");
    let fo = f[other(l) - 1];
    let fl = f[l - 1];
    let p = fo.restrict_to_line(z, v);
    if p.coeffs.iter().all(|a| a.norm() <= 1e-13 * line_scale(fo, z, v)) {
        return Err(HoloError::IdenticallyZeroFiber);
    }
    let window = tau(domain, z, v, 3.0 * kappa * domain.rho(z).abs());
    let mut out: Vec<Complex64> = Vec::new();
    for r in poly_roots(&p) {
        if r.norm() >= window || out.contains(&r) {
            continue;
        }
        let pt = z + v * r;
        if fl.eval(pt).norm() < EXCLUSION_TOL * fl.magnitude(pt).max(f64::MIN_POSITIVE) {
            continue;
        }
        out.push(r);
    }
    Ok(out)
}

/// Best `|g^(l)[subset]| tau(z, v, |rho|)^(k-1)` over subsets of `Lambda^(l)` of size `<= k_max`.
pub fn sup_contribution<G: Holomorphic + ?Sized>(
    g: &G,
    f: [&HoloPoly; 2],
    domain: &ConvexDomain,
    z: C2,
    v: C2,
    kappa: f64,
    k_max: usize,
    l: usize,
) -> Result<(Option<Witness>, bool)> {
    let mut lam = lambda_set(f, domain, z, v, kappa, l)?;
    let truncated = lam.len() > MAX_NODES;
    if truncated {
        lam.sort_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap());
        lam.truncate(MAX_NODES);
    }
    if lam.is_empty() {
        return Ok((None, truncated));
    }
    let fl = f[l - 1];
    let vals: Vec<Complex64> = lam.iter().map(|&x| g.eval(z + v * x) / fl.eval(z + v * x)).collect();
    let t = tau(domain, z, v, domain.rho(z).abs());
    let n = lam.len();
    let mut best: Option<Witness> = None;
    for mask in 1u32..(1u32 << n) {
        let k = mask.count_ones() as usize;
        if k > k_max {
            continue;
        }
        let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let nodes: Vec<Complex64> = idx.iter().map(|&i| lam[i]).collect();
        let values: Vec<Complex64> = idx.iter().map(|&i| vals[i]).collect();
        let dd = match DividedDiffTable::from_values(&nodes, &values) {
            Ok(tb) => tb.top(),
            Err(_) => continue,
        };
        let contrib = dd.norm() * t.powi(k as i32 - 1);
        if best.as_ref().is_none_or(|b| contrib > b.contribution) {
            best = Some(Witness { z, v, lambdas: nodes, contribution: contrib });
        }
    }
    Ok((best, truncated))
}

/// Near-tangent directions `normalize(v + t e^{i psi} eta)` with `t` of order `|rho|^(1/2)`,
/// and optionally transverse ones.
pub fn directions(domain: &ConvexDomain, z: C2, count: usize, transverse: bool) -> Result<(Vec<C2>, Vec<C2>)> {
    let fr = koranyi_frame(domain, z)?;
    let s = domain.rho(z).abs().sqrt();
    let mut near = vec![fr.v];
    for a in 1..count {
        let t = s * [0.5, 1.0, 2.0][a % 3];
        let psi = std::f64::consts::TAU * a as f64 / (count - 1).max(1) as f64;
        near.push((fr.v + fr.eta * Complex64::from_polar(t, psi)).normalized());
    }
    let mut far = Vec::new();
    if transverse {
        for theta in [std::f64::consts::FRAC_PI_6, std::f64::consts::FRAC_PI_3] {
            for k in 0..4 {
                let e = Complex64::from_polar(theta.sin(), std::f64::consts::FRAC_PI_2 * k as f64);
                far.push(fr.v * theta.cos() + fr.eta * e);
            }
        }
    }
    Ok((near, far))
}

fn top_witnesses(mut w: Vec<Witness>, keep: usize) -> Vec<Witness> {
    w.sort_by(|a, b| b.contribution.partial_cmp(&a.contribution).unwrap());
    w.truncate(keep);
    w
}

/// `c^(l)_inf(g)` estimated over the given centers.
pub fn cert_sup_infty<G: Holomorphic + ?Sized>(
    g: &G,
    f1: &HoloPoly,
    f2: &HoloPoly,
    domain: &ConvexDomain,
    centers: &[C2],
    cfg: &CertConfig,
    l: usize,
) -> Certificate {
    let f = [f1, f2];
    let per_center: Vec<(Option<Witness>, Option<f64>, bool, bool)> = centers
        .par_iter()
        .map(|&z| {
            let Ok((near, far)) = directions(domain, z, cfg.directions, cfg.transverse) else {
                return (None, None, false, true);
            };
            let mut best: Option<Witness> = None;
            let mut trunc = false;
            let mut failed = false;
            for v in near {
                match sup_contribution(g, f, domain, z, v, cfg.kappa, cfg.k_max, l) {
                    Ok((w, t)) => {
                        trunc |= t;
                        if let Some(w) = w {
                            if best.as_ref().is_none_or(|b| w.contribution > b.contribution) {
                                best = Some(w);
                            }
                        }
                    }
                    Err(_) => failed = true,
                }
            }
            let mut tv: Option<f64> = None;
            for v in far {
                if let Ok((Some(w), _)) = sup_contribution(g, f, domain, z, v, cfg.kappa, cfg.k_max, l) {
                    tv = Some(tv.unwrap_or(0.0).max(w.contribution));
                }
            }
            (best, tv, trunc, failed)
        })
        .collect();
    let mut witnesses = Vec::new();
    let mut transverse: Option<f64> = None;
    let mut flags = vec![format!("orders truncated at k_max = {}", cfg.k_max)];
    let mut skipped = 0;
    for (w, tv, trunc, failed) in per_center {
        if let Some(w) = w {
            witnesses.push(w);
        }
        if let Some(t) = tv {
            transverse = Some(transverse.unwrap_or(0.0).max(t));
        }
        if trunc && !flags.iter().any(|f| f.starts_with("node sets")) {
            flags.push(format!("node sets truncated to {MAX_NODES} nodes"));
        }
        skipped += failed as usize;
    }
    let value = witnesses.iter().map(|w| w.contribution).fold(0.0, f64::max);
    Certificate {
        kind: if l == 1 { CertificateKind::SupInfty1 } else { CertificateKind::SupInfty2 },
        value,
        k_max: cfg.k_max,
        kappa: cfg.kappa,
        q: f64::INFINITY,
        witnesses: top_witnesses(witnesses, 5),
        truncation_flags: flags,
        skipped,
        transverse_value: if cfg.transverse { Some(transverse.unwrap_or(0.0)) } else { None },
        partial_sums: Vec::new(),
    }
}

/// `sup |g| / max(|f1|, |f2|)` over the given points.
pub fn cert_ratio<G: Holomorphic + ?Sized>(g: &G, f1: &HoloPoly, f2: &HoloPoly, samples: &[C2]) -> Certificate {
    let mut best: Option<Witness> = None;
    let mut skipped = 0;
    for &z in samples {
        let den = f1.eval(z).norm().max(f2.eval(z).norm());
        if den < 1e-14 {
            skipped += 1;
            continue;
        }
        let r = g.eval(z).norm() / den;
        if best.as_ref().is_none_or(|b| r > b.contribution) {
            best = Some(Witness { z, v: C2::ZERO, lambdas: Vec::new(), contribution: r });
        }
    }
    Certificate {
        kind: CertificateKind::RatioSup,
        value: best.as_ref().map(|w| w.contribution).unwrap_or(0.0),
        k_max: 0,
        kappa: 0.0,
        q: f64::INFINITY,
        witnesses: best.into_iter().collect(),
        truncation_flags: Vec::new(),
        skipped,
        transverse_value: None,
        partial_sums: Vec::new(),
    }
}

/// Graded sample grid for [`cert_ratio`]: depths log-uniform in `[1e-6, depth_max]`.
pub fn ratio_samples(domain: &ConvexDomain, n: usize, seed: u64) -> Vec<C2> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let deep = -domain.rho(domain.interior_point());
    graded_samples(domain, n, 1e-6, 0.999 * deep, &mut rng)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LqConfig {
    pub kappa: f64,
    pub k_max: usize,
    pub q: f64,
    pub n_r: usize,
    pub n_theta: usize,
}

/// `c^(l)_{q,kappa}`: quadrature over the normal discs `{z_j + w eta: |w| < 2 kappa |rho(z_j)|}` of
/// `sum_k |rho(z_j)|^(q(k-1)/2 + 1) |g^(l)[lambda_1..lambda_k]|^q` over node subsets, summed over centers.
/// `centers` carries `(level index, point)`; `partial_sums` accumulate by level.
pub fn cert_lq<G: Holomorphic + ?Sized>(
    g: &G,
    f1: &HoloPoly,
    f2: &HoloPoly,
    domain: &ConvexDomain,
    centers: &[(usize, C2)],
    cfg: &LqConfig,
    l: usize,
) -> Certificate {
    let f = [f1, f2];
    let fl = f[l - 1];
    let per_center: Vec<(usize, f64, Option<Witness>, bool)> = centers
        .par_iter()
        .map(|&(j, zc)| {
            let Ok(fr) = koranyi_frame(domain, zc) else { return (j, 0.0, None, true) };
            let rho_c = domain.rho(zc).abs();
            let v = fr.v;
            let mut total = 0.0;
            let mut best: Option<Witness> = None;
            let mut failed = false;
            for (w, area) in disc_rule(2.0 * cfg.kappa * rho_c, cfg.n_r, cfg.n_theta) {
                let zp = zc + fr.eta * w;
                let lam = match lambda_set(f, domain, zp, v, cfg.kappa, l) {
                    Ok(x) => x,
                    Err(_) => {
                        failed = true;
                        continue;
                    }
                };
                let n = lam.len().min(MAX_NODES);
                let vals: Vec<Complex64> = lam.iter().map(|&x| g.eval(zp + v * x) / fl.eval(zp + v * x)).collect();
                let mut s = 0.0;
                for mask in 1u32..(1u32 << n) {
                    let k = mask.count_ones() as usize;
                    if k > cfg.k_max {
                        continue;
                    }
                    let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
                    let nodes: Vec<Complex64> = idx.iter().map(|&i| lam[i]).collect();
                    let values: Vec<Complex64> = idx.iter().map(|&i| vals[i]).collect();
                    if let Ok(tb) = DividedDiffTable::from_values(&nodes, &values) {
                        let term = rho_c.powf(cfg.q * (k as f64 - 1.0) / 2.0 + 1.0) * tb.top().norm().powf(cfg.q);
                        s += term;
                        if best.as_ref().is_none_or(|b| term > b.contribution) {
                            best = Some(Witness { z: zp, v, lambdas: nodes, contribution: term });
                        }
                    }
                }
                total += s * area;
            }
            (j, total, best, failed)
        })
        .collect();
    let max_level = centers.iter().map(|c| c.0).max().map(|m| m + 1).unwrap_or(0);
    let mut by_level = vec![0.0; max_level];
    let mut witnesses = Vec::new();
    let mut skipped = 0;
    for (j, t, w, failed) in per_center {
        by_level[j] += t;
        witnesses.extend(w);
        skipped += failed as usize;
    }
    let mut acc = 0.0;
    let partial_sums: Vec<f64> = by_level
        .iter()
        .map(|x| {
            acc += x;
            acc
        })
        .collect();
    Certificate {
        kind: if l == 1 { CertificateKind::Lq1 } else { CertificateKind::Lq2 },
        value: acc,
        k_max: cfg.k_max,
        kappa: cfg.kappa,
        q: cfg.q,
        witnesses: top_witnesses(witnesses, 5),
        truncation_flags: vec![format!("orders truncated at k_max = {}", cfg.k_max)],
        skipped,
        transverse_value: None,
        partial_sums,
    }
}

/// Zero certificate of the given kind; used for `g = 0` shortcuts in reports.
pub fn zero_certificate(kind: CertificateKind, k_max: usize, kappa: f64) -> Certificate {
    Certificate {
        kind,
        value: 0.0,
        k_max,
        kappa,
        q: f64::INFINITY,
        witnesses: Vec::new(),
        truncation_flags: Vec::new(),
        skipped: 0,
        transverse_value: None,
        partial_sums: Vec::new(),
    }
}
