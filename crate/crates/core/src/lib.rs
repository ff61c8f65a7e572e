// `!(x >= y)` is used on purpose so that NaN fails the check
#![allow(clippy::neg_cmp_op_on_partial_ord)]
pub mod error;
pub mod grids;
pub mod certificates;
pub mod conjugate;
pub mod entropy;
pub mod profile;
pub mod runio;
pub mod simulate;

pub use error::{Error, Result};
pub use grids::Grid;
