//! Numerical laboratory for the KPZ equation and the discrete models converging to it.

pub mod asep_exact;
pub mod asep_sim;
pub mod error;
pub mod fredholm;
pub mod kpz;
pub mod linalg;
pub mod par;
pub mod polymer;
pub mod quadrature;
pub mod special;
pub mod table;

pub use error::{Error, Result};
pub use num_complex::Complex64;
