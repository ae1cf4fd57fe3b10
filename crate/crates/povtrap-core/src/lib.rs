//! Poverty-trap and extreme-poverty probabilities for a household capital
//! process with exponential growth, capital cash transfers below a barrier and
//! multiplicative losses arriving as a Poisson process.
//!
//! The crate is `no_std` and only needs `alloc`. It provides:
//!
//! * [`special_functions`]: real Gauss hypergeometric function and Γ helpers.
//! * [`capital_model`]: parameters, the three deterministic flows, hitting
//!   times and the loss distribution.
//! * [`closed_form`]: Laplace transform of the trapping time, the trapping
//!   probability and the extreme-poverty probability for constant and
//!   exponential rate functions.
//! * [`monte_carlo`]: exact piecewise path simulation and per-path estimators.
//! * [`policy_solver`]: bisection for the transfer rate that attains a target
//!   probability, and `(B, c_T)` frontiers.
//!
//! ```
//! use povtrap_core::capital_model::ModelParams;
//! use povtrap_core::closed_form::trapping_probability;
//!
//! let p = ModelParams::from_micro(0.1, 4.0, 0.4, 1.0, 0.8, 1.0, 2.0, 0.25).unwrap();
//! let psi = trapping_probability(&p, 1.5).unwrap();
//! assert!(psi > 0.9 && psi < 0.95);
//! ```
#![no_std]
#![warn(missing_docs)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod capital_model;
pub mod closed_form;
mod error;
pub mod monte_carlo;
pub mod policy_solver;
pub mod special_functions;

mod linalg;

pub use error::{Error, Result};
