//! Logarithmic norms of matrices and stochastic logarithmic norms of linear
//! Itô systems dX = AX dt + Σⱼ B⁽ʲ⁾X dW⁽ʲ⁾, with Monte Carlo estimators,
//! analytical bounds and an ensemble simulator for checking them.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod eigen;
pub mod error;
pub mod lognorm;
pub mod matrix;
pub mod mc;
pub mod norm;
pub mod sdesim;
pub mod slognorm;
pub mod system;

pub use error::{Error, Result};
pub use lognorm::{mu, mu_limit_check};
pub use matrix::ComplexMatrix;
pub use mc::McConfig;
pub use norm::NormKind;
pub use num_complex::Complex64;
pub use system::SdeSystem;
