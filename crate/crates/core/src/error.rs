use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// The Wigner integrand lost its conjugation symmetry.
    #[error("imaginary residual {residual:.3e} exceeds {limit:.1e}")]
    ImaginaryResidual { residual: f64, limit: f64 },

    #[error("square-root branch tracking failed at u = {u}")]
    BranchTracking { u: f64 },

    #[error("singular linear system: {0}")]
    Singular(String),

    #[error("truncation N = {truncation} insufficient: tail population {tail:.3e} >= {tolerance:.1e}")]
    Truncation {
        truncation: usize,
        tail: f64,
        tolerance: f64,
    },

    #[error("trace drift {drift:.3e} exceeds {limit:.1e}; reduce the step size")]
    StepSize { drift: f64, limit: f64 },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be finite, got {v}")))
    }
}
