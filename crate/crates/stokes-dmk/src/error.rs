use thiserror::Error;

/// Errors reported by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("prolate eigen-solve did not converge for c = {c}")]
    EigenSolve { c: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("unsupported combination: {0}")]
    Unsupported(String),
    #[error("evaluation at r = 0 is undefined; self terms are handled separately")]
    ZeroSeparation,
    #[error("sources {a} and {b} coincide")]
    SingularConfiguration { a: usize, b: usize },
    #[error("quadrature did not converge: achieved {achieved:.3e}, requested {requested:.3e}")]
    Quadrature { achieved: f64, requested: f64 },
    #[error("table fit did not converge: tail {achieved:.3e}, requested {requested:.3e}")]
    TableFit { achieved: f64, requested: f64 },
    #[error("malformed binary data: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
