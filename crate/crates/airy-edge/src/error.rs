use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("capability exceeded: {0}")]
    Capability(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("singular point: {0}")]
    Singularity(String),
    #[error("degenerate Palm anchor at x = {x}: one-point density {density:e}")]
    SingularAnchor { x: f64, density: f64 },
    #[error("quadrature did not converge: {0}")]
    Accuracy(String),
    #[error("discretisation too coarse: {0}")]
    Discretisation(String),
    #[error("stiff step at t = {time}: {reason}; state = {state:?}")]
    Stiffness {
        time: f64,
        reason: String,
        state: Vec<f64>,
    },
    #[error("wrong coordinate frame: expected {expected}, found {found}")]
    Frame { expected: String, found: String },
    #[error("invalid input: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_finite(x: f64, what: &str) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{what} must be finite, got {x}")))
    }
}
