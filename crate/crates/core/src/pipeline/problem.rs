//! Problem files: domain, polynomials and parameters.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{HoloError, Result};
use crate::geometry::{CMat2, ConvexDomain};
use crate::poly::{HalfPowerMonomial, HoloPoly, Holomorphic};
use crate::types::C2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainSpec {
    Ball { center: C2, radius: f64 },
    Ellipsoid { matrix: CMat2, center: C2 },
}

impl DomainSpec {
    pub fn build(&self) -> Result<ConvexDomain> {
        match self {
            DomainSpec::Ball { center, radius } => {
                if !(*radius > 0.0 && radius.is_finite()) {
                    return Err(HoloError::Range { field: "domain.radius".into(), value: radius.to_string() });
                }
                Ok(ConvexDomain::ball(*center, *radius))
            }
            DomainSpec::Ellipsoid { matrix, center } => ConvexDomain::ellipsoid(*matrix, *center),
        }
    }
}

/// Numerator: a polynomial, an explicit ideal member `a1 f1 + a2 f2`, or `c z1^(q/2) z2^j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum NumeratorSpec {
    Poly(HoloPoly),
    Combination { a1: HoloPoly, a2: HoloPoly },
    HalfPower(HalfPowerMonomial),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub kappa: f64,
    pub eps0: f64,
    pub c_sep: f64,
    pub k_max: usize,
    /// Exponent of the integral certificates; `None` selects the sup certificates.
    pub q: Option<f64>,
    #[serde(rename = "N")]
    pub n_weight: u32,
    pub quad_nodes: usize,
    pub mc_samples: usize,
    pub seed: Option<u64>,
    pub residual_tol: f64,
    pub level_floor: f64,
    pub deriv_max: usize,
    pub k1: usize,
    pub k2: usize,
    pub glue_samples: usize,
    pub hypothesis_samples: usize,
    pub certificate_samples: usize,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            kappa: 0.05,
            eps0: 0.1,
            c_sep: 1.0,
            k_max: 4,
            q: None,
            n_weight: 4,
            quad_nodes: 256,
            mc_samples: 1_000_000,
            seed: None,
            residual_tol: 1e-8,
            level_floor: 1e-3,
            deriv_max: 1,
            k1: 2,
            k2: 2,
            glue_samples: 1000,
            hypothesis_samples: 32,
            certificate_samples: 200,
        }
    }
}

fn range_err(field: &str, value: impl ToString) -> HoloError {
    HoloError::Range { field: format!("params.{field}"), value: value.to_string() }
}

impl Params {
    pub fn validate(&self) -> Result<()> {
        let p = self;
        if !(p.kappa > 0.0 && p.kappa <= 0.1) {
            return Err(range_err("kappa", p.kappa));
        }
        if !(p.eps0 > 0.0 && p.eps0 <= 1.0) {
            return Err(range_err("eps0", p.eps0));
        }
        if !(p.c_sep > 0.0 && p.c_sep * p.kappa < 1.0) {
            return Err(range_err("c_sep", p.c_sep));
        }
        if !(1..=8).contains(&p.k_max) {
            return Err(range_err("k_max", p.k_max));
        }
        if let Some(q) = p.q {
            if !(q >= 1.0 && q.is_finite()) {
                return Err(range_err("q", q));
            }
        }
        if !(1..=16).contains(&p.n_weight) {
            return Err(range_err("N", p.n_weight));
        }
        if !(8..=4096).contains(&p.quad_nodes) {
            return Err(range_err("quad_nodes", p.quad_nodes));
        }
        if !(1..=100_000_000).contains(&p.mc_samples) {
            return Err(range_err("mc_samples", p.mc_samples));
        }
        if !(p.residual_tol > 0.0 && p.residual_tol < 1.0) {
            return Err(range_err("residual_tol", p.residual_tol));
        }
        if !(p.level_floor > 0.0 && p.level_floor < p.eps0) {
            return Err(range_err("level_floor", p.level_floor));
        }
        if p.deriv_max > 3 {
            return Err(range_err("deriv_max", p.deriv_max));
        }
        if !(1..=3).contains(&p.k1) {
            return Err(range_err("k1", p.k1));
        }
        if !(1..=8).contains(&p.k2) {
            return Err(range_err("k2", p.k2));
        }
        for (name, v) in [("glue_samples", p.glue_samples), ("hypothesis_samples", p.hypothesis_samples), ("certificate_samples", p.certificate_samples)] {
            if v == 0 || v > 1_000_000 {
                return Err(range_err(name, v));
            }
        }
        Ok(())
    }

    pub fn require_seed(&self) -> Result<u64> {
        self.seed.ok_or_else(|| HoloError::Schema { path: "params.seed".into(), message: "a seed is required for sampled commands".into() })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub domain: DomainSpec,
    pub f1: HoloPoly,
    pub f2: HoloPoly,
    pub g: NumeratorSpec,
    #[serde(default)]
    pub params: Params,
}

impl ProblemSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let spec: ProblemSpec = serde_path_to_error::deserialize(de).map_err(|e| {
            let mut path = e.path().to_string();
            let message = e.inner().to_string();
            if let Some(field) = message.strip_prefix("missing field `").and_then(|r| r.split('`').next()) {
                path = if path == "." { field.to_string() } else { format!("{path}.{field}") };
            }
            HoloError::Schema { path, message }
        })?;
        spec.params.validate()?;
        spec.domain.build()?;
        Ok(spec)
    }

    pub fn domain(&self) -> Result<ConvexDomain> {
        self.domain.build()
    }

    pub fn numerator(&self) -> Arc<dyn Holomorphic> {
        match &self.g {
            NumeratorSpec::Poly(p) => Arc::new(p.clone()),
            NumeratorSpec::Combination { a1, a2 } => Arc::new(&(a1 * &self.f1) + &(a2 * &self.f2)),
            NumeratorSpec::HalfPower(h) => Arc::new(*h),
        }
    }

    /// The numerator as a polynomial, when it is one.
    pub fn numerator_poly(&self) -> Option<HoloPoly> {
        match &self.g {
            NumeratorSpec::Poly(p) => Some(p.clone()),
            NumeratorSpec::Combination { a1, a2 } => Some(&(a1 * &self.f1) + &(a2 * &self.f2)),
            NumeratorSpec::HalfPower(_) => None,
        }
    }

    /// Known cofactors when the numerator is given as a combination.
    pub fn cofactors(&self) -> Option<(HoloPoly, HoloPoly)> {
        match &self.g {
            NumeratorSpec::Combination { a1, a2 } => Some((a1.clone(), a2.clone())),
            _ => None,
        }
    }
}

pub fn parse_problem(path: &Path) -> Result<ProblemSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| HoloError::Io(format!("{}: {e}", path.display())))?;
    ProblemSpec::from_json(&text)
}
