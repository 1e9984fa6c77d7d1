use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("pole of the Gamma function at {0}")]
    Pole(Complex64),
    #[error("zero of the Barnes G-function at {0}")]
    Zero(Complex64),
    #[error("constraint violated: {0}")]
    Constraint(String),
    #[error("parameter outside admissible domain: {0}")]
    Domain(String),
    #[error("symbol evaluated at its singular point")]
    SingularPoint,
    #[error("quadrature failed to reach tolerance: {0}")]
    QuadFailure(String),
    #[error("matrix is numerically singular (pivot magnitude {0:e})")]
    SingularMatrix(f64),
    #[error("truncation refinement changed the result by {change:e} (> {tol:e})")]
    Convergence { change: f64, tol: f64 },
    #[error("non-finite value encountered: {0}")]
    NonFinite(String),
}

pub type Result<T> = std::result::Result<T, Error>;
