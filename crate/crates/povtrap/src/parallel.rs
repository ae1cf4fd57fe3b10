//! Multi-threaded Monte Carlo estimators.
//!
//! Path `i` always draws from stream `i` of the seed and outcomes are reduced
//! in index order, so results are bit-identical for any worker count.

use povtrap_core::capital_model::{LossDistribution, ModelParams, OmegaRate};
use povtrap_core::monte_carlo::{ep_outcome, laplace_outcome, trapping_outcome, Estimate, HorizonCheck};
use rayon::prelude::*;

use crate::error::{AppError, Result};

/// Smallest accepted path count.
pub const MIN_PATHS: u64 = 100;

/// Quantity estimated by simulation.
#[derive(Debug, Clone)]
pub enum Target {
    /// Probability of falling below `x*` before the horizon.
    Trapping,
    /// `E[e^{-δτ}]` where `τ` is the trapping time.
    Laplace(f64),
    /// Extreme-poverty probability for the given rate.
    ExtremePoverty(OmegaRate),
}

/// Thread pool with a fixed number of workers.
pub struct Runner {
    pool: rayon::ThreadPool,
}

impl Runner {
    /// Pool with `workers` threads.
    pub fn new(workers: usize) -> Result<Self> {
        if workers == 0 {
            return Err(AppError::usage("invalid `workers` = 0: need at least one worker"));
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| AppError::usage(format!("could not start {workers} workers: {e}")))?;
        Ok(Self { pool })
    }

    /// Number of worker threads.
    pub fn workers(&self) -> usize {
        self.pool.current_num_threads()
    }

    /// Estimate `target` from paths `0..n` started at `x0`.
    #[allow(clippy::too_many_arguments)]
    pub fn estimate(
        &self,
        p: &ModelParams,
        d: &LossDistribution,
        target: &Target,
        x0: f64,
        n: u64,
        horizon: f64,
        seed: u64,
    ) -> Result<Estimate> {
        if n < MIN_PATHS {
            return Err(AppError::usage(format!("invalid `n` = {n}: need at least {MIN_PATHS} paths")));
        }
        let outcome = |i: u64| match target {
            Target::Trapping => trapping_outcome(p, d, x0, horizon, seed, i),
            Target::Laplace(delta) => laplace_outcome(p, d, *delta, x0, horizon, seed, i),
            Target::ExtremePoverty(w) => ep_outcome(p, d, w, x0, horizon, seed, i),
        };
        let samples = self
            .pool
            .install(|| (0..n).into_par_iter().map(outcome).collect::<povtrap_core::Result<Vec<f64>>>())
            .map_err(crate::error::at("x", x0))?;
        Ok(Estimate::from_samples(&samples, seed, horizon))
    }

    /// Estimate at `horizon` and at `2 * horizon` with the same streams.
    #[allow(clippy::too_many_arguments)]
    pub fn estimate_with_check(
        &self,
        p: &ModelParams,
        d: &LossDistribution,
        target: &Target,
        x0: f64,
        n: u64,
        horizon: f64,
        seed: u64,
    ) -> Result<HorizonCheck> {
        let base = self.estimate(p, d, target, x0, n, horizon, seed)?;
        let doubled = self.estimate(p, d, target, x0, n, 2.0 * horizon, seed)?;
        Ok(HorizonCheck { base, doubled })
    }
}

/// Default worker count: the available parallelism, or 1.
pub fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}
