//! Determinants of truncated Wiener-Hopf-plus-Hankel operators and
//! Toeplitz-plus-Hankel matrices with a single Fisher-Hartwig singularity.
//!
//! Every determinant is carried as a [`LogDet`]; comparisons against closed
//! forms and asymptotes happen in log space.

// Reference constants keep all their digits; `!(x > y)` forms deliberately reject NaN.
#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod error;
pub mod fredholm;
pub mod quad;
pub mod specfun;
pub mod structured;
pub mod symbols;
pub mod wienerhopf;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use specfun::{BetaContext, BetaParam, ComplexVal};
pub use structured::{DenseMatrix, LogDet, Sign};
