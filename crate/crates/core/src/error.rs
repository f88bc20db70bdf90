use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid window: {0}")]
    InvalidWindow(String),

    #[error("eroding by {radius} leaves an empty window (min side {min_side})")]
    EmptyErosion { radius: f64, min_side: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unknown covariate model `{0}`")]
    UnknownModel(String),

    #[error("point {0:?} cannot be covered by a 3x3 stencil of the sampling grid")]
    OutOfStencil(Vec<f64>),

    #[error("intensity {value} exceeds the thinning bound {bound}; increase the probe resolution")]
    BoundViolation { value: f64, bound: f64 },

    #[error("covariance matrix of the Gaussian field is not positive definite")]
    CholeskyFailure,

    #[error("singular estimating system: {0}")]
    SingularSystem(String),

    #[error("Newton iterations did not converge after {iterations} steps (gradient norm {grad_norm:e})")]
    Nonconvergence { iterations: usize, grad_norm: f64 },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
