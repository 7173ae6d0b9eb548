use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, HoloError>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum HoloError {
    #[error("gradient of the defining function vanishes (|grad| = {norm:e})")]
    DegenerateGradient { norm: f64 },
    #[error("point outside the declared collar (rho = {rho})")]
    OutsideCollar { rho: f64 },
    #[error("level set rho = {level} leaves the collar")]
    CollarExhausted { level: f64 },
    #[error("function vanishes identically on the fiber line")]
    IdenticallyZeroFiber,
    #[error("root branches collide near z1* = {at}")]
    BranchCollision { at: Complex64 },
    #[error("fiber polynomial drops degree near z1* = {at}")]
    FiberDegreeDrop { at: Complex64 },
    #[error("quotient Q varies by a factor {ratio:e} across the ball")]
    DeflationUnstable { ratio: f64 },
    #[error("interpolation nodes closer than {gap:e}")]
    DuplicateNodes { gap: f64 },
    #[error("confluent interpolation nodes could not be separated")]
    ConfluentNodes,
    #[error("interpolation node lies on the other variety (|P| = {value:e})")]
    SingularNodeValue { value: f64 },
    #[error("root at |alpha| = {radius} too close to the contour of radius {contour}")]
    RootNearContour { radius: f64, contour: f64 },
    #[error("both cutoff arguments vanish")]
    BothArgumentsZero,
    #[error("local residual {residual:e} exceeds tolerance {tolerance:e} by more than 1e3")]
    IncompleteIdeal { residual: f64, tolerance: f64 },
    #[error("sample point not covered by any bump")]
    UncoveredPoint,
    #[error("no local solution for covering center {index}")]
    MissingLocal { index: usize },
    #[error("kernel denominator too small (|D| = {value:e})")]
    PoleProximity { value: f64 },
    #[error("quadrature budget exceeded ({requested} > {budget})")]
    QuadratureBudgetExceeded { requested: usize, budget: usize },
    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },
    #[error("value out of range for {field}: {value}")]
    Range { field: String, value: String },
    #[error("i/o error: {0}")]
    Io(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl HoloError {
    /// True for errors caused by bad user input rather than numerics.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            HoloError::Schema { .. }
                | HoloError::Range { .. }
                | HoloError::Io(_)
                | HoloError::InvalidArgument(_)
        )
    }
}
