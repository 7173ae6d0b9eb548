//! Fiber roots of bivariate polynomials, labeled root curves, `P Q` splits and intersections.

pub mod intersection;
pub mod roots;
pub mod split;
pub mod tracking;

pub use intersection::{complete_intersection_check, in_local_ideal, IntersectionReport};
pub use roots::{fiber_roots, poly_roots};
pub use split::{weierstrass_split, FiberFactorization, FiberSplit, Split};
pub use tracking::{track_roots, RootCurves, TrackConfig};
