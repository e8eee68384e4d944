//! Drawdown risk toolkit: maximum-drawdown distributions, Conditional
//! Expected Drawdown (CED), risk attribution, CED-minimizing portfolios and
//! AR(1) Monte-Carlo studies.

// `!(x > 0.0)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod attribution;
pub mod cli;
pub mod drawdown;
pub mod error;
pub mod optimizer;
pub mod portfolio;
pub mod riskmeasures;
pub mod simulation;
pub mod timeseries;

pub use error::{CedError, Result};
pub use riskmeasures::ConfidenceLevel;
