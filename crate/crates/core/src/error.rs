use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{field} out of {bound} (got {value})")]
    OutOfRange {
        field: &'static str,
        bound: &'static str,
        value: f64,
    },

    #[error("bin undefined for vacuum amplitude")]
    BinUndefined,

    #[error("quadrature did not converge: error estimate {estimate:e} exceeds tolerance {tolerance:e}")]
    QuadratureNotConverged { estimate: f64, tolerance: f64 },

    #[error("gamma undefined; S=0")]
    GammaUndefined,

    #[error("empty alpha grid")]
    EmptyGrid,

    #[error("no threshold in range")]
    NoThreshold,

    #[error("truncation n_max={given} too small, need n_max >= {required}")]
    Truncation { given: usize, required: usize },

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("stationarity check failed at nu={nu}: residual {residual:e}")]
    Stationarity { nu: f64, residual: f64 },

    #[error("cascade recursion produced t^2 = {0} at splitter {1}")]
    CascadeRecursion(f64, usize),

    #[error("{0}")]
    Invalid(String),
}
