//! `holodiv`: certificates, local and global division, coverings and kernel checks from problem files.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use holodiv_core::geometry::covering::{build_kappa_covering, CoveringConfig};
use holodiv_core::pipeline::counterexample::counterexample_pair;
use holodiv_core::pipeline::{parse_problem, run_pipeline, Command, DomainSpec, NumeratorSpec, Params, ProblemSpec, Report};
use holodiv_core::poly::HoloPoly;
use holodiv_core::types::c;
use holodiv_core::{HoloError, C2};

#[derive(Parser, Debug)]
#[command(name = "holodiv", version, about = "Holomorphic division on strictly convex domains of C^2")]
struct Cli {
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for every sampled step; overrides params.seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (defaults to HOLODIV_THREADS, then to all cores).
    #[arg(long, global = true, env = "HOLODIV_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args, Debug)]
struct ProblemArg {
    /// Problem file (JSON).
    problem: PathBuf,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Ratio and divided-difference certificates.
    Certify(ProblemArg),
    /// Local division on the Koranyi balls at the given points.
    Divide {
        #[command(flatten)]
        problem: ProblemArg,
        /// Center as `re1,im1,re2,im2`; repeatable.
        #[arg(long = "at", required = true, value_parser = parse_point)]
        at: Vec<C2>,
    },
    /// Global division by gluing local solutions over a covering.
    Glue(ProblemArg),
    /// Build and verify the covering.
    Covering {
        #[command(flatten)]
        problem: ProblemArg,
        /// Also write the centers as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Reproducing-kernel check by Monte Carlo.
    KernelCheck {
        /// Problem file; the ball of center (1, 0) and radius 1 when omitted.
        problem: Option<PathBuf>,
        #[arg(long = "N")]
        n_weight: Option<u32>,
        #[arg(long)]
        samples: Option<usize>,
        /// Evaluation point `re1,im1,re2,im2`.
        #[arg(long, value_parser = parse_point)]
        z: Option<C2>,
        /// Monomial such as `1`, `z1`, `z1*z2`, `z1^2*z2`.
        #[arg(long, value_parser = parse_monomial)]
        g: Option<HoloPoly>,
    },
    /// Divergence rate of the sup certificate for `z1^(q/2) z2`.
    Counterexample {
        #[arg(long)]
        q: u32,
        #[arg(long, default_value_t = 1e-4)]
        eps_min: f64,
        #[arg(long, default_value_t = 1e-2)]
        eps_max: f64,
    },
}

fn parse_point(s: &str) -> Result<C2, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}")))
        .collect::<Result<_, _>>()?;
    let arr: [f64; 4] = v.try_into().map_err(|_| "expected four comma-separated numbers".to_string())?;
    Ok(C2::from_reals(arr))
}

fn parse_monomial(s: &str) -> Result<HoloPoly, String> {
    let s = s.trim();
    if s == "1" {
        return Ok(HoloPoly::constant(c(1.0, 0.0)));
    }
    let (mut i, mut j) = (0u32, 0u32);
    for factor in s.split('*') {
        let (var, pow) = match factor.trim().split_once('^') {
            Some((v, p)) => (v, p.parse::<u32>().map_err(|e| format!("{factor:?}: {e}"))?),
            None => (factor.trim(), 1),
        };
        match var {
            "z1" => i += pow,
            "z2" => j += pow,
            _ => return Err(format!("unknown factor {factor:?}")),
        }
    }
    Ok(HoloPoly::monomial(i, j, c(1.0, 0.0)))
}

fn default_ball_spec(f1: HoloPoly, f2: HoloPoly, g: NumeratorSpec) -> ProblemSpec {
    ProblemSpec { domain: DomainSpec::Ball { center: C2::real(1.0, 0.0), radius: 1.0 }, f1, f2, g, params: Params::default() }
}

fn load(path: &Path, seed: Option<u64>) -> Result<ProblemSpec, HoloError> {
    let mut spec = parse_problem(path)?;
    if seed.is_some() {
        spec.params.seed = seed;
    }
    Ok(spec)
}

fn run(cli: &Cli) -> Result<Report, HoloError> {
    let (spec, cmd) = match &cli.command {
        Cmd::Certify(p) => (load(&p.problem, cli.seed)?, Command::Certify),
        Cmd::Divide { problem, at } => (load(&problem.problem, cli.seed)?, Command::Divide { at: at.clone() }),
        Cmd::Glue(p) => (load(&p.problem, cli.seed)?, Command::Glue),
        Cmd::Covering { problem, csv } => {
            let spec = load(&problem.problem, cli.seed)?;
            if let Some(path) = csv {
                let p = &spec.params;
                let domain = spec.domain()?;
                let cfg = CoveringConfig { kappa: p.kappa, eps0: p.eps0, c_sep: p.c_sep, level_floor: p.level_floor, ..Default::default() };
                let cov = build_kappa_covering(&domain, &cfg)?;
                std::fs::write(path, cov.to_csv(&domain)).map_err(|e| HoloError::Io(format!("{}: {e}", path.display())))?;
            }
            (spec, Command::Covering)
        }
        Cmd::KernelCheck { problem, n_weight, samples, z, g } => {
            let spec = match problem {
                Some(p) => load(p, cli.seed)?,
                None => {
                    let mut s = default_ball_spec(HoloPoly::z2(), HoloPoly::z1(), NumeratorSpec::Poly(HoloPoly::constant(c(1.0, 0.0))));
                    s.params.seed = cli.seed;
                    s
                }
            };
            (spec, Command::KernelCheck { z: *z, g: g.clone(), samples: *samples, n_weight: *n_weight })
        }
        Cmd::Counterexample { q, eps_min, eps_max } => {
            let (f1, f2, g) = counterexample_pair(*q);
            let mut s = default_ball_spec(f1, f2, NumeratorSpec::HalfPower(g));
            s.params.seed = cli.seed;
            (s, Command::Counterexample { q: *q, eps_min: *eps_min, eps_max: *eps_max })
        }
    };
    run_pipeline(&spec, &[cmd])
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), HoloError> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| HoloError::Io(format!("{}: {e}", p.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("holodiv: cannot configure {n} threads: {e}");
            return ExitCode::from(3);
        }
    }
    let report = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("holodiv: {e}");
            return ExitCode::from(if e.is_input_error() { 3 } else { 2 });
        }
    };
    for r in report.results.iter().filter(|r| r.error.is_some()) {
        eprintln!("holodiv: {}", r.error.as_deref().unwrap_or_default());
    }
    let text = serde_json::to_string_pretty(&report).expect("reports serialize");
    if let Err(e) = emit(&text, cli.out.as_deref()) {
        eprintln!("holodiv: {e}");
        return ExitCode::from(3);
    }
    ExitCode::from(report.exit_code() as u8)
}
