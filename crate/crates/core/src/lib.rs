#![allow(clippy::neg_cmp_op_on_partial_ord)] // negated comparisons also reject NaN

pub mod core1d;
pub mod energy2d;
pub mod error;
pub mod optimizer;
pub mod params;
pub mod poisson;
pub mod stability;

pub use error::{Error, Result};
pub use params::ProblemParams;
