//! Numerical construction and certification of holomorphic division `g = g1 f1 + g2 f2`
//! on strictly convex domains of C^2.

pub mod ba_kernel;
pub mod divided_differences;
pub mod error;
pub mod geometry;
pub mod gluing;
pub mod local_division;
pub mod pipeline;
pub mod poly;
pub mod quadrature;
pub mod smooth;
pub mod types;
pub mod varieties;

pub use error::{HoloError, Result};
pub use types::C2;
