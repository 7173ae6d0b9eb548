//! Problem files, command orchestration and reports.

pub mod counterexample;
pub mod problem;
pub mod run;

pub use counterexample::{run_counterexample, CounterexampleReport};
pub use problem::{parse_problem, DomainSpec, NumeratorSpec, Params, ProblemSpec};
pub use run::{run_pipeline, Command, Report};
