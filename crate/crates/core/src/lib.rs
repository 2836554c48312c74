// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod area;
pub mod blaschke;
pub mod carleson;
pub mod clark;
pub mod distortion;
pub mod error;
pub mod geometry;
pub mod poly;
pub mod quadrature;

pub use error::{Error, Result};
