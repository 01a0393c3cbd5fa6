use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("lattice of {sites} sites is too large for dense enumeration (max {max})")]
    OracleTooLarge { sites: usize, max: usize },

    #[error("hermite order {order} out of range 1..={max}")]
    HermiteOrder { order: usize, max: usize },

    #[error("derivative order {0} not supported (max 3)")]
    DerivativeOrder(usize),

    #[error("quadrature did not converge after {levels} refinements (last change {change:e}, tolerance {tol:e})")]
    QuadratureNonConvergent {
        levels: usize,
        change: f64,
        tol: f64,
    },

    #[error("quadrature step {step} exceeds the allowed maximum {max}")]
    QuadratureStep { step: f64, max: f64 },

    #[error("test function does not decay: weighted norm grew from {inner:e} to {outer:e} on a wider grid")]
    NonDecaying { inner: f64, outer: f64 },

    #[error("grid cannot resolve the requested modes: {0}")]
    Resolution(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("insufficient replicas: {got} (need at least {need})")]
    InsufficientReplicas { got: usize, need: usize },

    #[error("Sobolev truncation too coarse: tail holds {fraction:.3} of the total")]
    TruncationTooCoarse { fraction: f64 },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
