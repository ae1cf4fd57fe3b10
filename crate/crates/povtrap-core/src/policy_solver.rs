//! Bisection for the transfer rate or barrier that attains a target
//! probability, and `(B, c_T)` frontiers.

use alloc::format;
use alloc::vec::Vec;

use crate::capital_model::{invalid, ModelParams};
use crate::closed_form::{ep_probability_constant, ep_probability_exponential, trapping_probability};
use crate::{Error, Result};

/// Maximum bisection iterations.
pub const MAX_ITERATIONS: usize = 200;
/// Required `|probability - target|` at the returned point.
pub const TARGET_TOL: f64 = 1e-8;
/// Bisection stops once the bracket is narrower than this fraction of the
/// initial one.
pub const WIDTH_TOL: f64 = 1e-12;
/// Midpoints closer than this (relative) to `c_T = r` are nudged away.
const RATE_NUDGE: f64 = 1e-7;

/// Probability being targeted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PolicyKind {
    /// Trapping probability.
    Trapping,
    /// Extreme poverty with constant rate `ω_c`.
    EpConstant(f64),
    /// Extreme poverty with rate `β/x`.
    EpExponential(f64),
}

/// Parameter being solved for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveFor {
    /// Transfer rate `c_T`.
    TransferRate,
    /// Capital barrier `B`.
    Barrier,
}

/// A policy inversion problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolicyQuery {
    /// Parameters; the solved one is overwritten during the search.
    pub base: ModelParams,
    /// Initial capital.
    pub x0: f64,
    /// Target probability in `(0, 1)`.
    pub target: f64,
    /// Probability kind.
    pub kind: PolicyKind,
    /// Parameter to solve for.
    pub solve_for: SolveFor,
    /// Search interval lower end.
    pub lo: f64,
    /// Search interval upper end.
    pub hi: f64,
}

impl PolicyQuery {
    /// Parameters with the solved variable set to `v`.
    pub fn params_at(&self, v: f64) -> Result<ModelParams> {
        match self.solve_for {
            SolveFor::TransferRate => self.base.with_c_t(v),
            SolveFor::Barrier => self.base.with_barrier(v),
        }
    }

    /// Probability at `x0` with the solved variable set to `v`.
    pub fn probability(&self, v: f64) -> Result<f64> {
        let p = self.params_at(v)?;
        match self.kind {
            PolicyKind::Trapping => trapping_probability(&p, self.x0),
            PolicyKind::EpConstant(w) => ep_probability_constant(&p, w, 0.0, self.x0),
            PolicyKind::EpExponential(beta) => ep_probability_exponential(&p, beta, self.x0),
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.target > 0.0 && self.target < 1.0) {
            return Err(invalid("target", self.target, "must lie in (0, 1)"));
        }
        if !(self.lo > 0.0 && self.lo.is_finite()) {
            return Err(invalid("lo", self.lo, "must be positive"));
        }
        if !(self.hi > self.lo && self.hi.is_finite()) {
            return Err(invalid("hi", self.hi, "must exceed lo"));
        }
        if self.solve_for == SolveFor::Barrier && self.lo <= self.base.x_star() {
            return Err(invalid("lo", self.lo, "barrier search must start above x_star"));
        }
        Ok(())
    }

    fn nudge(&self, v: f64) -> f64 {
        let r = self.base.r();
        if self.solve_for == SolveFor::TransferRate && (v - r).abs() < RATE_NUDGE * r {
            if v < r {
                r * (1.0 - RATE_NUDGE)
            } else {
                r * (1.0 + RATE_NUDGE)
            }
        } else {
            v
        }
    }
}

/// Solve `probability(v) = target` by bisection on `[lo, hi]`. The
/// probability must be non-increasing in the solved variable: the value at
/// `lo` must be at least the target and the value at `hi` at most.
pub fn solve(q: &PolicyQuery) -> Result<f64> {
    q.validate()?;
    let (mut lo, mut hi) = (q.nudge(q.lo), q.nudge(q.hi));
    let f_lo = q.probability(lo)?;
    let f_hi = q.probability(hi)?;
    if f_lo < f_hi {
        return Err(Error::NonMonotone(format!(
            "probability {f_lo} at {lo} is below {f_hi} at {hi}"
        )));
    }
    if !(f_lo >= q.target && q.target >= f_hi) {
        return Err(Error::NoBracket { target: q.target, at_lo: f_lo, at_hi: f_hi });
    }
    if (f_lo - q.target).abs() <= TARGET_TOL {
        return Ok(lo);
    }
    if (f_hi - q.target).abs() <= TARGET_TOL {
        return Ok(hi);
    }
    let width0 = hi - lo;
    let mut best = (f64::INFINITY, lo);
    for _ in 0..MAX_ITERATIONS {
        let mid = q.nudge(0.5 * (lo + hi));
        let f = q.probability(mid)?;
        let err = (f - q.target).abs();
        if err < best.0 {
            best = (err, mid);
        }
        if f > q.target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < WIDTH_TOL * width0 {
            break;
        }
    }
    if best.0 <= TARGET_TOL {
        Ok(best.1)
    } else {
        Err(Error::NonConvergence { what: "policy bisection" })
    }
}

/// One point of a `(B, c_T)` frontier.
#[derive(Debug, Clone, PartialEq)]
pub struct FrontierPoint {
    /// Barrier level.
    pub barrier: f64,
    /// Solved transfer rate, or why there is none (a
    /// [`Error::NoBracket`] marks an unattainable target).
    pub c_t: Result<f64>,
}

impl FrontierPoint {
    /// True when the target cannot be reached within the search interval.
    pub fn is_unattainable(&self) -> bool {
        matches!(self.c_t, Err(Error::NoBracket { .. }))
    }
}

/// Transfer rate attaining the target at each barrier of `grid`, searching
/// `c_T` on `[q.lo, q.hi]`. `q.solve_for` is ignored.
pub fn frontier(q: &PolicyQuery, grid: &[f64]) -> Result<Vec<FrontierPoint>> {
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(invalid("b_grid", grid.first().copied().unwrap_or(f64::NAN), "must be strictly increasing"));
    }
    if let Some(&b) = grid.iter().find(|&&b| !(b > q.base.x_star())) {
        return Err(invalid("b_grid", b, "barriers must exceed x_star"));
    }
    grid.iter()
        .map(|&barrier| {
            let base = q.base.with_barrier(barrier)?;
            let point = PolicyQuery { base, solve_for: SolveFor::TransferRate, ..*q };
            Ok(FrontierPoint { barrier, c_t: solve(&point) })
        })
        .collect()
}
