use std::path::PathBuf;

/// Errors raised by graph construction, numerical routines and the command layer.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("node index {index} out of range for {n} nodes")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("edge ({i}, {j}) has non-positive weight {weight}")]
    NonPositiveWeight { i: usize, j: usize, weight: f64 },

    #[error("self-loop on node {0} is not allowed")]
    SelfLoop(usize),

    #[error("node {0} is isolated; the normalized Laplacian is undefined")]
    IsolatedNode(usize),

    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("scale must be non-negative, got {0}")]
    NegativeScale(f64),

    #[error("order {order} exceeds the internal cap of {cap}")]
    OrderCap { order: usize, cap: usize },

    #[error("no order up to {cap} reaches tolerance {tol:e} at effective scale {tau}")]
    ToleranceUnreachable { tol: f64, tau: f64, cap: usize },

    #[error("order {order} is too small for scale {tau}: need K > tau/2 - 1")]
    OrderTooSmall { order: usize, tau: f64 },

    #[error("signal statistics are required for the {0} bound")]
    MissingStats(&'static str),

    #[error("signal component sum is zero; the {0} bound is undefined")]
    ZeroComponentSum(&'static str),

    #[error("power iteration did not converge after {0} iterations")]
    NoConvergence(usize),

    #[error("matrix of size {n} exceeds the dense limit of {limit}")]
    TooLarge { n: usize, limit: usize },

    #[error("basis of order {have} cannot serve coefficients of order {need}")]
    OrderMismatch { have: usize, need: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Whether the failure is numerical (as opposed to bad input or configuration).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::OrderCap { .. }
                | Error::ToleranceUnreachable { .. }
                | Error::NoConvergence(_)
                | Error::OrderTooSmall { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
