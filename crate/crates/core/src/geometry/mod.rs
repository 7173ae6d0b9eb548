//! Strictly convex domains, Koranyi frames and balls, the pseudo-distance and graded coverings.

pub mod covering;
pub mod domain;
pub mod frame;
pub mod metric;
pub mod sampling;

pub use covering::{build_kappa_covering, verify_covering, CoveringConfig, CoveringReport, KappaCovering};
pub use domain::{CMat2, ConvexDomain, DefiningFunction, DomainKind};
pub use frame::{koranyi_frame, KoranyiFrame};
pub use metric::{delta, delta_in_frame, quasi_metric_probe, tau, QuasiMetricReport};
