//! Command orchestration and reports.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::counterexample::{log_grid, run_counterexample, CounterexampleReport};
use super::problem::ProblemSpec;
use crate::ba_kernel::{reproduce_check, KernelContext, Quadrature};
use crate::divided_differences::certificates::ratio_samples;
use crate::divided_differences::{cert_lq, cert_ratio, cert_sup_infty, CertConfig, Certificate, LqConfig};
use crate::error::{HoloError, Result};
use crate::geometry::covering::{build_kappa_covering, verify_covering, CoveringConfig, CoveringReport, KappaCovering};
use crate::geometry::sampling::graded_samples;
use crate::geometry::{koranyi_frame, ConvexDomain};
use crate::gluing::{
    build_locals, build_partition, collar_samples, glue_global, required_centers, verify_main_hypotheses, HypothesisReport,
};
use crate::local_division::{local_divide, residual_check, LocalConfig, LocalDivision};
use crate::poly::{HoloPoly, Holomorphic};
use crate::types::C2;
use crate::varieties::{complete_intersection_check, in_local_ideal, IntersectionReport};

pub const REPORT_VERSION: &str = "1";
/// Largest accepted pointwise overlap of the covering balls.
pub const OVERLAP_LIMIT: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    Certify,
    Divide { at: Vec<C2> },
    Glue,
    Covering,
    KernelCheck {
        z: Option<C2>,
        g: Option<HoloPoly>,
        samples: Option<usize>,
        #[serde(rename = "N")]
        n_weight: Option<u32>,
    },
    Counterexample { q: u32, eps_min: f64, eps_max: f64 },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Certify => "certify",
            Command::Divide { .. } => "divide",
            Command::Glue => "glue",
            Command::Covering => "covering",
            Command::KernelCheck { .. } => "kernel-check",
            Command::Counterexample { .. } => "counterexample",
        }
    }

    fn rank(&self) -> usize {
        match self {
            Command::Covering => 0,
            Command::Divide { .. } => 1,
            Command::Glue => 2,
            Command::Certify => 3,
            Command::KernelCheck { .. } => 4,
            Command::Counterexample { .. } => 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallPayload {
    pub z: C2,
    pub kappa: f64,
    #[serde(rename = "I1")]
    pub i1: usize,
    #[serde(rename = "I2")]
    pub i2: usize,
    pub sup_ghat: [f64; 2],
    pub max_residual: f64,
    pub quad_nodes: usize,
    pub erratum_flags: Vec<String>,
    pub incomplete_ideal: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoveringPayload {
    pub kappa: f64,
    pub eps0: f64,
    pub levels: usize,
    pub centers: usize,
    pub overlap_bound: usize,
    pub report: CoveringReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GluePayload {
    pub centers_used: usize,
    pub local_failures: usize,
    pub per_ball: Vec<BallPayload>,
    pub samples: usize,
    pub uncovered: usize,
    pub global_residual: f64,
    pub max_local_residual: f64,
    pub max_active: usize,
    pub partition_derivative_constant: f64,
    pub hypothesis_iii_norms: HypothesisReport,
    /// Common zeros in the closed domain at which `g` is not in the local ideal.
    pub non_member_zeros: Vec<C2>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertifyPayload {
    pub intersection: IntersectionReport,
    pub ratio: Certificate,
    pub certificates: Vec<Certificate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelPayload {
    #[serde(rename = "N")]
    pub n_weight: u32,
    pub c_norm: [f64; 2],
    pub calibration_point: C2,
    pub z: C2,
    pub samples: usize,
    pub integral: [f64; 2],
    pub reference: [f64; 2],
    pub abs_error: f64,
    pub stderr_estimate: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Payload {
    Covering(CoveringPayload),
    Divide { balls: Vec<BallPayload> },
    Glue(Box<GluePayload>),
    Certify(CertifyPayload),
    KernelCheck(KernelPayload),
    Counterexample(CounterexampleReport),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommandResult {
    pub command: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub payload: Option<Payload>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
    #[serde(default)]
    pub input_error: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub version: String,
    pub problem_hash: String,
    pub results: Vec<CommandResult>,
    pub erratum_flags: Vec<String>,
    pub passed: bool,
}

impl Report {
    /// 0 when every command met its tolerances, 3 on input errors, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else if self.results.iter().any(|r| r.input_error) {
            3
        } else {
            2
        }
    }
}

pub fn problem_hash(spec: &ProblemSpec) -> String {
    let text = serde_json::to_string(spec).expect("problem specs serialize");
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

struct Context<'a> {
    spec: &'a ProblemSpec,
    domain: ConvexDomain,
    covering: Option<Arc<KappaCovering>>,
}

impl Context<'_> {
    fn covering(&mut self) -> Result<Arc<KappaCovering>> {
        if let Some(c) = &self.covering {
            return Ok(c.clone());
        }
        let p = &self.spec.params;
        let cfg = CoveringConfig { kappa: p.kappa, eps0: p.eps0, c_sep: p.c_sep, level_floor: p.level_floor, ..Default::default() };
        let cov = Arc::new(build_kappa_covering(&self.domain, &cfg)?);
        self.covering = Some(cov.clone());
        Ok(cov)
    }

    fn local_config(&self) -> LocalConfig {
        LocalConfig { quad_nodes: self.spec.params.quad_nodes, residual_tol: self.spec.params.residual_tol, ..Default::default() }
    }

    /// Common zeros in the closed domain at which a polynomial numerator is not a local member.
    fn non_member_zeros(&self) -> Vec<C2> {
        let Some(g) = self.spec.numerator_poly() else { return Vec::new() };
        let rep = complete_intersection_check(&self.spec.f1, &self.spec.f2);
        rep.common_zeros
            .into_iter()
            .filter(|&p| self.domain.rho(p) <= 1e-9)
            .filter(|&p| !in_local_ideal(&g, &self.spec.f1, &self.spec.f2, p))
            .collect()
    }

    /// A ball is flagged when a non-member zero lies in the unit-scale shadow `P_{|rho(z)|}(z)`.
    fn flagged(&self, z: C2, zeros: &[C2]) -> bool {
        let Ok(fr) = koranyi_frame(&self.domain, z) else { return false };
        let r = self.domain.rho(z).abs();
        zeros.iter().any(|&p| fr.in_ball(r, p))
    }
}

fn ball_payload(div: &LocalDivision, report: Option<&crate::local_division::ResidualReport>, flagged: bool) -> BallPayload {
    let (i1, i2) = div.factorization.index_sizes();
    let rep = report.or(div.check.as_ref());
    let mut flags = div.erratum_flags.clone();
    if flagged {
        flags.push("numerator not in the local ideal at a nearby common zero".into());
    }
    BallPayload {
        z: div.center,
        kappa: div.kappa,
        i1,
        i2,
        sup_ghat: rep.map(|r| [r.sup_ghat1, r.sup_ghat2]).unwrap_or([f64::NAN; 2]),
        max_residual: rep.map(|r| r.max_residual).unwrap_or(f64::NAN),
        quad_nodes: div.contour.quad_nodes,
        erratum_flags: flags,
        incomplete_ideal: flagged,
        error: None,
    }
}

fn failed_ball(z: C2, kappa: f64, quad_nodes: usize, e: &HoloError) -> BallPayload {
    BallPayload {
        z,
        kappa,
        i1: 0,
        i2: 0,
        sup_ghat: [f64::NAN; 2],
        max_residual: f64::NAN,
        quad_nodes,
        erratum_flags: Vec::new(),
        incomplete_ideal: matches!(e, HoloError::IncompleteIdeal { .. }),
        error: Some(e.to_string()),
    }
}

fn run_covering(ctx: &mut Context) -> Result<(Payload, bool)> {
    let cov = ctx.covering()?;
    let seed = ctx.spec.params.require_seed()?;
    let report = verify_covering(&cov, &ctx.domain, 2000, seed)?;
    let passed = report.passed() && report.overlap_pointwise <= OVERLAP_LIMIT;
    Ok((
        Payload::Covering(CoveringPayload {
            kappa: cov.kappa,
            eps0: cov.eps0,
            levels: cov.levels.len(),
            centers: cov.center_count(),
            overlap_bound: cov.overlap_bound,
            report,
        }),
        passed,
    ))
}

fn run_divide(ctx: &mut Context, at: &[C2]) -> Result<(Payload, bool)> {
    let p = ctx.spec.params;
    let g = ctx.spec.numerator();
    let zeros = ctx.non_member_zeros();
    let cfg = ctx.local_config();
    let mut balls = Vec::new();
    let mut passed = true;
    for &z in at {
        if !(ctx.domain.rho(z) < 0.0) {
            return Err(HoloError::Range { field: "at".into(), value: format!("{:?} is not inside the domain", z.to_reals()) });
        }
        match local_divide(g.clone(), &ctx.spec.f1, &ctx.spec.f2, &ctx.domain, z, p.kappa, &cfg) {
            Ok(div) => {
                let rep = residual_check(&div, &div.ball_samples(200, 0.999))?;
                let flagged = ctx.flagged(z, &zeros);
                let ok = rep.max_residual <= p.residual_tol * rep.g_scale.max(1.0) && !flagged;
                passed &= ok;
                balls.push(ball_payload(&div, Some(&rep), flagged));
            }
            Err(e) => {
                passed = false;
                balls.push(failed_ball(z, p.kappa, p.quad_nodes, &e));
            }
        }
    }
    Ok((Payload::Divide { balls }, passed))
}

fn run_glue(ctx: &mut Context) -> Result<(Payload, bool)> {
    let p = ctx.spec.params;
    let seed = p.require_seed()?;
    let cov = ctx.covering()?;
    let partition = Arc::new(build_partition(&cov, &ctx.domain, p.deriv_max)?);
    let samples = collar_samples(&cov, &ctx.domain, p.glue_samples, seed);
    let need = required_centers(&partition, &samples, 0.05);
    let cfg = LocalConfig { check_samples: 16, ..ctx.local_config() };
    let set = build_locals(&partition, &need, ctx.spec.numerator(), &ctx.spec.f1, &ctx.spec.f2, &ctx.domain, &cfg);
    let zeros = ctx.non_member_zeros();
    let mut per_ball: Vec<BallPayload> = Vec::new();
    for &j in &need {
        let z = partition.centers[j].1;
        match &set.locals[j] {
            Some(div) => per_ball.push(ball_payload(div, None, ctx.flagged(z, &zeros))),
            None => {
                let e = set.failures.iter().find(|f| f.0 == j).map(|f| f.1.clone()).unwrap_or(HoloError::MissingLocal { index: j });
                per_ball.push(failed_ball(z, p.kappa, p.quad_nodes, &e));
            }
        }
    }
    let local_failures = set.failures.len();
    let sol = glue_global(partition.clone(), set.locals, &ctx.spec.f1, &ctx.spec.f2);
    let evals: Vec<Result<crate::gluing::GlobalEval>> = {
        use rayon::prelude::*;
        samples.par_iter().map(|&z| sol.eval_full(z)).collect()
    };
    let (mut global, mut local, mut uncovered, mut max_active, mut bad) = (0.0f64, 0.0f64, 0usize, 0usize, 0usize);
    for e in &evals {
        match e {
            Ok(e) => {
                global = global.max(e.residual);
                local = local.max(e.max_local_residual);
                max_active = max_active.max(e.active);
            }
            Err(HoloError::UncoveredPoint) => uncovered += 1,
            Err(_) => bad += 1,
        }
    }
    let hyp_samples: Vec<C2> = samples.iter().take(p.hypothesis_samples).cloned().collect();
    let q = p.q.unwrap_or(f64::INFINITY);
    let hypothesis = verify_main_hypotheses(&sol, &ctx.domain, q, p.k1, p.n_weight, &hyp_samples);
    let deriv_const = partition.derivative_constant(&hyp_samples);
    let flagged = per_ball.iter().any(|b| b.incomplete_ideal);
    let passed = local_failures == 0 && bad == 0 && uncovered == 0 && !flagged && global <= local * (1.0 + 1e-9) + 1e-15;
    Ok((
        Payload::Glue(Box::new(GluePayload {
            centers_used: need.len(),
            local_failures,
            per_ball,
            samples: samples.len(),
            uncovered,
            global_residual: global,
            max_local_residual: local,
            max_active,
            partition_derivative_constant: deriv_const,
            hypothesis_iii_norms: hypothesis,
            non_member_zeros: zeros,
        })),
        passed,
    ))
}

fn run_certify(ctx: &mut Context) -> Result<(Payload, bool)> {
    let p = ctx.spec.params;
    let seed = p.require_seed()?;
    let g = ctx.spec.numerator();
    let (f1, f2) = (&ctx.spec.f1, &ctx.spec.f2);
    let intersection = complete_intersection_check(f1, f2);
    let ratio = cert_ratio(&g, f1, f2, &ratio_samples(&ctx.domain, 10 * p.certificate_samples, seed));
    let mut certificates = Vec::new();
    match p.q {
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
            let centers = graded_samples(&ctx.domain, p.certificate_samples, 1e-2 * p.level_floor.max(1e-4), p.eps0, &mut rng);
            let cfg = CertConfig { kappa: p.kappa, k_max: p.k_max, ..Default::default() };
            for l in 1..=2 {
                certificates.push(cert_sup_infty(&g, f1, f2, &ctx.domain, &centers, &cfg, l));
            }
        }
        Some(q) => {
            let cov = ctx.covering()?;
            let centers: Vec<(usize, C2)> = cov.centers().collect();
            let cfg = LqConfig { kappa: p.kappa, k_max: p.k_max, q, n_r: 3, n_theta: 8 };
            for l in 1..=2 {
                certificates.push(cert_lq(&g, f1, f2, &ctx.domain, &centers, &cfg, l));
            }
        }
    }
    let passed = ratio.value.is_finite() && certificates.iter().all(|c| c.value.is_finite());
    Ok((Payload::Certify(CertifyPayload { intersection, ratio, certificates }), passed))
}

fn parts(z: num_complex::Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn run_kernel_check(ctx: &mut Context, z: Option<C2>, g: Option<&HoloPoly>, samples: Option<usize>, n: Option<u32>) -> Result<(Payload, bool)> {
    let p = ctx.spec.params;
    let seed = p.require_seed()?;
    let n_weight = n.unwrap_or(p.n_weight);
    let mut kc = KernelContext::new(ctx.domain.clone(), n_weight)?;
    let z0 = ctx.domain.interior_point();
    kc.calibrate(z0, 20)?;
    let z = z.unwrap_or(z0);
    let samples = samples.unwrap_or(p.mc_samples);
    let g: Arc<dyn Holomorphic> = match g {
        Some(g) => Arc::new(g.clone()),
        None => ctx.spec.numerator(),
    };
    let r = reproduce_check(&kc, &g, z, Quadrature::MonteCarlo { samples, seed })?;
    let tolerance = 5e-2 * r.reference.norm() + 5e-3;
    Ok((
        Payload::KernelCheck(KernelPayload {
            n_weight,
            c_norm: parts(kc.c_norm),
            calibration_point: z0,
            z,
            samples,
            integral: parts(r.integral),
            reference: parts(r.reference),
            abs_error: r.abs_error,
            stderr_estimate: r.stderr_estimate,
            tolerance,
        }),
        r.abs_error <= tolerance,
    ))
}

fn run_counterexample_cmd(ctx: &mut Context, q: u32, lo: f64, hi: f64) -> Result<(Payload, bool)> {
    let p = ctx.spec.params;
    let cfg = CertConfig { kappa: p.kappa, k_max: p.k_max, ..Default::default() };
    let rep = run_counterexample(q, &log_grid(lo, hi, 5), &cfg)?;
    let passed = rep.passed;
    Ok((Payload::Counterexample(rep), passed))
}

/// Runs the commands in dependency order and collects their payloads.
pub fn run_pipeline(spec: &ProblemSpec, commands: &[Command]) -> Result<Report> {
    spec.params.validate()?;
    let mut ctx = Context { spec, domain: spec.domain()?, covering: None };
    let mut ordered: Vec<&Command> = commands.iter().collect();
    ordered.sort_by_key(|c| c.rank());
    let mut results = Vec::new();
    for cmd in ordered {
        let out = match cmd {
            Command::Covering => run_covering(&mut ctx),
            Command::Divide { at } => run_divide(&mut ctx, at),
            Command::Glue => run_glue(&mut ctx),
            Command::Certify => run_certify(&mut ctx),
            Command::KernelCheck { z, g, samples, n_weight } => run_kernel_check(&mut ctx, *z, g.as_ref(), *samples, *n_weight),
            Command::Counterexample { q, eps_min, eps_max } => run_counterexample_cmd(&mut ctx, *q, *eps_min, *eps_max),
        };
        results.push(match out {
            Ok((payload, passed)) => CommandResult { command: cmd.name().into(), passed, payload: Some(payload), error: None, input_error: false },
            Err(e) => CommandResult {
                command: cmd.name().into(),
                passed: false,
                payload: None,
                input_error: e.is_input_error(),
                error: Some(format!("{}: {e}", cmd.name())),
            },
        });
    }
    let mut erratum_flags = Vec::new();
    if results.iter().any(|r| matches!(r.command.as_str(), "divide" | "glue")) {
        erratum_flags.push("g2~ interpolates on the nodes of X1 and sums to i1".to_string());
    }
    Ok(Report {
        version: REPORT_VERSION.into(),
        problem_hash: problem_hash(spec),
        passed: results.iter().all(|r| r.passed),
        results,
        erratum_flags,
    })
}
