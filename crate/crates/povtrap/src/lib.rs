//! Command-line front end for `povtrap-core`: parallel Monte Carlo
//! estimators, parameter files, loss tables and tabular output.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
mod error;
pub mod loss_table;
pub mod output;
pub mod parallel;

pub use error::{AppError, Result};
