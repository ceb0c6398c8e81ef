//! Margin-based shattering, gamma-VC dimension and re-checkable
//! certificates over finite-dimensional normed spaces and finite metric
//! spaces.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod certify;
pub mod classes;
pub mod constructions;
pub mod error;
pub mod harness;
pub mod number;
pub mod solver;
pub mod spaces;

pub use error::{Error, Result};
