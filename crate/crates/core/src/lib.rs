//! Numerical toolkit for N*-functions and the quasi-Banach spaces `L_Φ`
//! they generate over finite measure-space models.

// `!(x > 0.0)` is how NaN is rejected along with non-positive inputs
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dual;
pub mod error;
pub mod lphi;
pub mod measure;
pub mod nstar;
pub mod quadrature;
pub mod roots;

pub use error::{Error, Result};
