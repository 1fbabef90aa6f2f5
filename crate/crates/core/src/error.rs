use thiserror::Error;

/// Errors raised by the computations in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("map `{map}` does not preserve the cohomology class (M^T a != a)")]
    ClassNotPreserved { map: String },

    #[error("invalid cohomology class: {0}")]
    InvalidClass(String),

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("point is not periodic with period {period} (return distance {distance:e})")]
    NotPeriodic { period: usize, distance: f64 },

    #[error("fiber displacement {displacement} is not within 1e-9 of an integer")]
    NonIntegralDisplacement { displacement: f64 },

    #[error("measure is not invariant under `{map}` (residual {residual:e})")]
    NonInvariantMeasure { map: String, residual: f64 },

    #[error("map `{0}` has no registered inverse")]
    NoInverse(String),

    #[error("certified bound requested for `{0}` but no Lipschitz data is available")]
    MissingLipschitz(String),

    #[error("translation number did not converge after {iterations} iterations (last windows {last_windows:?})")]
    NotConverged {
        iterations: usize,
        last_windows: (f64, f64),
    },

    #[error("ball size cap of {cap} elements exceeded at radius {radius}")]
    BallCapExceeded { cap: usize, radius: usize },

    #[error("Euler number is {euler}, not zero (sum of beta_j/alpha_j = {sum})")]
    NonzeroEuler { euler: String, sum: String },

    #[error("invalid Seifert data: {0}")]
    InvalidSeifert(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
