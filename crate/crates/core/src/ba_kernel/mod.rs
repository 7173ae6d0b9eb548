//! Weighted reproducing kernel, Hefer forms and sampled kernel estimates.

pub mod hefer;
pub mod kernel;

pub use hefer::{hefer_form, HeferForm};
pub use kernel::{esti_ba_probe, integrate_mc, integrate_tensor, reproduce_check, EstiReport, KernelContext, Quadrature, ReproduceResult};
