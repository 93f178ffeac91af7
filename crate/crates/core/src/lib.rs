// `!(x > 0.0)` is used on purpose: it rejects NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod distributions;
pub mod dual;
pub mod dynamics;
pub mod error;
pub mod kahler;
pub mod kernel;
pub mod report;
pub mod suites;

pub use error::{Error, Result};
pub use num_complex::Complex64;
