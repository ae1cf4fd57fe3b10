//! Exact piecewise simulation of capital paths and per-path estimators.
//!
//! Inter-event times are Exponential(λ); between events the state follows the
//! closed-form flows, chained across `x*` and `B` at the analytic crossing
//! times, so there is no time discretization. The extreme-poverty exponent
//! `Ψ = -∫ ω(X_s) 1{X_s < x*} ds` is accumulated per below-`x*` segment with a
//! closed-form increment for the constant and `β/x` rates and adaptive Simpson
//! quadrature otherwise.
//!
//! Each path `i` draws from its own ChaCha8 stream `(seed, i)`, so results do
//! not depend on how paths are split across threads. [`Estimate::from_samples`]
//! reduces per-path outcomes in index order.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::capital_model::{invalid, LossDistribution, ModelParams, OmegaRate};
use crate::{Error, Result};

/// Path stops once capital passes this level. Returning below `x*` from here
/// has probability of order `(x*/X)^{b_u}`, negligible for any realistic
/// exponent, and the flow would overflow shortly after.
pub const ESCAPE_CAPITAL: f64 = 1e250;
/// Path stops once `Ψ` falls below this: `1 - e^Ψ` is then 1 in `f64`.
pub const PSI_FLOOR: f64 = -40.0;
/// Two-sided 99% normal quantile used for confidence intervals.
pub const Z_99: f64 = 2.81;
/// Absolute tolerance of the numerical `Ψ` increment.
pub const QUADRATURE_TOL: f64 = 1e-10;

/// One loss event.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    /// Event time.
    pub time: f64,
    /// Capital just before the loss.
    pub pre_loss: f64,
    /// Surviving fraction `Z ∈ (0, 1]`.
    pub z: f64,
}

/// Why a path stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// Reached the horizon.
    Horizon,
    /// Capital exceeded [`ESCAPE_CAPITAL`].
    Escaped,
    /// Fell below `x*` and the caller asked to stop there.
    Trapped,
    /// `Ψ` fell below [`PSI_FLOOR`].
    Extinct,
}

/// A simulated trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct PathRecord {
    /// Loss events in time order (empty unless recording was requested).
    pub events: Vec<Event>,
    /// Accumulated exponent `Ψ <= 0`.
    pub psi_exponent: f64,
    /// First time capital was strictly below `x*`.
    pub trapped_at: Option<f64>,
    /// Simulation horizon.
    pub horizon: f64,
    /// Time of the last state.
    pub end_time: f64,
    /// Capital at `end_time`.
    pub final_capital: f64,
    /// Stop condition.
    pub stop: StopReason,
}

/// Options for [`simulate_path`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathOptions {
    /// Stop at the first trapping time.
    pub stop_when_trapped: bool,
    /// Stop when `Ψ < PSI_FLOOR`.
    pub stop_when_extinct: bool,
    /// Keep the event list.
    pub record_events: bool,
}

impl Default for PathOptions {
    fn default() -> Self {
        Self { stop_when_trapped: false, stop_when_extinct: false, record_events: true }
    }
}

/// Per-path random stream derived from `(seed, path index)`.
pub fn path_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Uniform variate in the open interval `(0, 1)`.
fn uniform<R: RngCore>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// `Ψ` increment `-ω_c · dt_below`.
pub fn psi_increment_constant(dt_below: f64, omega_c: f64) -> f64 {
    -omega_c * dt_below
}

/// `Ψ` increment for `ω(x) = β/x` from capital `x < x*` over `dt_below`:
/// `-(β/(c_T B)) [c_T dt + ln(B + (x - B) e^{-c_T dt}) - ln x]`.
pub fn psi_increment_exponential(p: &ModelParams, x: f64, dt_below: f64, beta: f64) -> f64 {
    if dt_below == 0.0 {
        return 0.0;
    }
    let ct = p.c_t();
    if ct == 0.0 {
        return -beta * dt_below / x;
    }
    let end = p.flow_below(dt_below, x);
    -(beta / (ct * p.barrier())) * (ct * dt_below + (end / x).ln())
}

/// `Ψ` increment `-∫₀^dt ω(flow_below(s, x)) ds` by adaptive Simpson
/// quadrature to [`QUADRATURE_TOL`].
pub fn psi_increment_numeric(p: &ModelParams, x: f64, dt_below: f64, omega: &dyn Fn(f64) -> f64) -> Result<f64> {
    if dt_below == 0.0 {
        return Ok(0.0);
    }
    let f = |s: f64| omega(p.flow_below(s, x));
    Ok(-adaptive_simpson(&f, 0.0, dt_below, QUADRATURE_TOL)?)
}

/// Adaptive Simpson quadrature of `f` on `[a, b]`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 48)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let diff = left + right - whole;
    if !diff.is_finite() {
        return Err(Error::NonConvergence { what: "adaptive Simpson (non-finite integrand)" });
    }
    if diff.abs() <= 15.0 * tol {
        return Ok(left + right + diff / 15.0);
    }
    if depth == 0 {
        return Err(Error::NonConvergence { what: "adaptive Simpson" });
    }
    Ok(simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?)
}

fn psi_increment(p: &ModelParams, omega: &OmegaRate, x: f64, dt_below: f64) -> Result<f64> {
    match omega {
        OmegaRate::Constant(w) => Ok(psi_increment_constant(dt_below, *w)),
        OmegaRate::Exponential(beta) => Ok(psi_increment_exponential(p, x, dt_below, *beta)),
        OmegaRate::Custom(f) => psi_increment_numeric(p, x, dt_below, f.as_ref()),
    }
}

/// Simulate one path from `x0` up to `horizon`, accumulating `Ψ` when a rate
/// is given.
#[allow(clippy::too_many_arguments)]
pub fn simulate_path<R: RngCore>(
    p: &ModelParams,
    d: &LossDistribution,
    omega: Option<&OmegaRate>,
    x0: f64,
    horizon: f64,
    options: PathOptions,
    rng: &mut R,
) -> Result<PathRecord> {
    if !(x0 > 0.0 && x0.is_finite()) {
        return Err(invalid("x", x0, "must be positive and finite"));
    }
    if !(horizon > 0.0) {
        return Err(invalid("horizon", horizon, "must be positive"));
    }
    let xs = p.x_star();
    let mut rec = PathRecord {
        events: Vec::new(),
        psi_exponent: 0.0,
        trapped_at: if x0 < xs { Some(0.0) } else { None },
        horizon,
        end_time: 0.0,
        final_capital: x0,
        stop: StopReason::Horizon,
    };
    if rec.trapped_at.is_some() && options.stop_when_trapped {
        rec.stop = StopReason::Trapped;
        return Ok(rec);
    }
    let mut t = 0.0;
    let mut x = x0;
    loop {
        let gap = -uniform(rng).ln() / p.lambda();
        let step = gap.min(horizon - t);
        if x < xs {
            if let Some(w) = omega {
                let dt_below = step.min(p.time_to_critical(x));
                rec.psi_exponent += psi_increment(p, w, x, dt_below)?;
            }
        }
        x = p.evolve(x, step).x;
        if t + gap >= horizon {
            t = horizon;
            break;
        }
        t += gap;
        if options.stop_when_extinct && rec.psi_exponent < PSI_FLOOR {
            rec.stop = StopReason::Extinct;
            break;
        }
        let z = d.sample(uniform(rng));
        if options.record_events {
            rec.events.push(Event { time: t, pre_loss: x, z });
        }
        x *= z;
        if x < xs && rec.trapped_at.is_none() {
            rec.trapped_at = Some(t);
            if options.stop_when_trapped {
                rec.stop = StopReason::Trapped;
                break;
            }
        }
        if x > ESCAPE_CAPITAL {
            rec.stop = StopReason::Escaped;
            break;
        }
    }
    rec.end_time = t;
    rec.final_capital = x;
    if options.stop_when_extinct && rec.stop == StopReason::Horizon && rec.psi_exponent < PSI_FLOOR {
        rec.stop = StopReason::Extinct;
    }
    Ok(rec)
}

const FAST: PathOptions = PathOptions { stop_when_trapped: true, stop_when_extinct: false, record_events: false };

/// 1 if path `index` is trapped before `horizon`, else 0.
pub fn trapping_outcome(p: &ModelParams, d: &LossDistribution, x0: f64, horizon: f64, seed: u64, index: u64) -> Result<f64> {
    let rec = simulate_path(p, d, None, x0, horizon, FAST, &mut path_rng(seed, index))?;
    Ok(if rec.trapped_at.is_some() { 1.0 } else { 0.0 })
}

/// `e^{-δτ}` on trapping before `horizon`, else 0.
pub fn laplace_outcome(
    p: &ModelParams,
    d: &LossDistribution,
    delta: f64,
    x0: f64,
    horizon: f64,
    seed: u64,
    index: u64,
) -> Result<f64> {
    let rec = simulate_path(p, d, None, x0, horizon, FAST, &mut path_rng(seed, index))?;
    Ok(rec.trapped_at.map_or(0.0, |t| (-delta * t).exp()))
}

/// `1 - e^{Ψ}` for path `index`.
pub fn ep_outcome(
    p: &ModelParams,
    d: &LossDistribution,
    omega: &OmegaRate,
    x0: f64,
    horizon: f64,
    seed: u64,
    index: u64,
) -> Result<f64> {
    let opts = PathOptions { stop_when_trapped: false, stop_when_extinct: true, record_events: false };
    let rec = simulate_path(p, d, Some(omega), x0, horizon, opts, &mut path_rng(seed, index))?;
    Ok(-rec.psi_exponent.exp_m1())
}

/// Monte Carlo point estimate with a two-sided 99% confidence interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    /// Sample mean.
    pub value: f64,
    /// Sample standard deviation (`n - 1` denominator).
    pub std_dev: f64,
    /// `max(value - 2.81 σ/√n, 0)`.
    pub ci_low: f64,
    /// `min(value + 2.81 σ/√n, 1)`.
    pub ci_high: f64,
    /// Number of paths.
    pub n: u64,
    /// Seed of the path streams.
    pub seed: u64,
    /// Simulation horizon.
    pub horizon: f64,
}

impl Estimate {
    /// Reduce per-path outcomes in index order.
    pub fn from_samples(samples: &[f64], seed: u64, horizon: f64) -> Self {
        let n = samples.len();
        let nf = n as f64;
        let mean = samples.iter().sum::<f64>() / nf;
        let var = if n > 1 {
            samples.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (nf - 1.0)
        } else {
            0.0
        };
        let std_dev = var.sqrt();
        let half = Z_99 * std_dev / nf.sqrt();
        Self {
            value: mean,
            std_dev,
            ci_low: (mean - half).max(0.0),
            ci_high: (mean + half).min(1.0),
            n: n as u64,
            seed,
            horizon,
        }
    }

    /// Half-width `2.81 σ/√n` before clamping.
    pub fn half_width(&self) -> f64 {
        Z_99 * self.std_dev / (self.n as f64).sqrt()
    }

    /// Whether `v` lies in `[ci_low, ci_high]`.
    pub fn contains(&self, v: f64) -> bool {
        self.ci_low <= v && v <= self.ci_high
    }
}

/// Comparison of an estimate against a rerun at twice the horizon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HorizonCheck {
    /// Estimate at the requested horizon.
    pub base: Estimate,
    /// Estimate at twice the horizon, same seed.
    pub doubled: Estimate,
}

impl HorizonCheck {
    /// `|doubled - base|`.
    pub fn shift(&self) -> f64 {
        (self.doubled.value - self.base.value).abs()
    }

    /// Clean when doubling moves the estimate by less than one half-width.
    pub fn is_clean(&self) -> bool {
        self.shift() < self.base.half_width().max(f64::MIN_POSITIVE)
    }
}

fn check_n(n: u64) -> Result<()> {
    if n < 100 {
        return Err(invalid("n", n as f64, "need at least 100 paths"));
    }
    Ok(())
}

/// Single-threaded trapping estimate over paths `0..n`.
pub fn estimate_trapping(p: &ModelParams, d: &LossDistribution, x0: f64, n: u64, horizon: f64, seed: u64) -> Result<Estimate> {
    check_n(n)?;
    let samples = (0..n)
        .map(|i| trapping_outcome(p, d, x0, horizon, seed, i))
        .collect::<Result<Vec<_>>>()?;
    Ok(Estimate::from_samples(&samples, seed, horizon))
}

/// Single-threaded extreme-poverty estimate `(1/n) Σ (1 - e^{Ψ_k})`.
pub fn estimate_ep(
    p: &ModelParams,
    d: &LossDistribution,
    omega: &OmegaRate,
    x0: f64,
    n: u64,
    horizon: f64,
    seed: u64,
) -> Result<Estimate> {
    check_n(n)?;
    let samples = (0..n)
        .map(|i| ep_outcome(p, d, omega, x0, horizon, seed, i))
        .collect::<Result<Vec<_>>>()?;
    Ok(Estimate::from_samples(&samples, seed, horizon))
}
