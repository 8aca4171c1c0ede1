#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod io;
mod error;

pub use error::AnalysisError;
