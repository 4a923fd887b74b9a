// `!(a > b)` is used on purpose so that NaN takes the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod conformal;
pub mod error;
pub mod geometry;
pub mod models;
pub mod numeric;
pub mod parallel;
pub mod serde_ext;
pub mod sweep;
pub mod verify;

pub use error::{Error, Result};
pub use parallel::Execution;
