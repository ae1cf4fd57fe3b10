//! Structural parameters, the deterministic capital flows and the loss
//! distribution.
//!
//! Between loss events capital follows `dX = r [X - x*]^+ + c_T [B - X]^+`,
//! which splits into three exponential flows:
//!
//! | regime          | flow from `x` over time `t`        |
//! |-----------------|------------------------------------|
//! | `x >= B`        | `(x - x*) e^{rt} + x*`             |
//! | `x* <= x < B`   | `(x + x**) e^{(r - c_T)t} - x**`   |
//! | `x < x*`        | `(x - B) e^{-c_T t} + B`           |
//!
//! with `x** = (c_T B - r x*)/(r - c_T)`. Drift is positive everywhere except
//! below `x*` when `c_T = 0`, where capital stays put.

use alloc::sync::Arc;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

/// Minimum separation between `r` and `c_T`.
pub const RATE_SEPARATION: f64 = 1e-12;

/// Capital growth rate `r = (1 - a) b c_S` from the micro-level inputs: `a` is
/// the consumption share above the critical level, `b` the productivity and
/// `c_S` the savings rate.
pub fn growth_rate(a: f64, b: f64, c_s: f64) -> Result<f64> {
    if !(a > 0.0 && a < 1.0) {
        return Err(invalid("a", a, "must lie in (0, 1)"));
    }
    if !(b > 0.0 && b.is_finite()) {
        return Err(invalid("b", b, "must be positive"));
    }
    if !(c_s > 0.0 && c_s < 1.0) {
        return Err(invalid("c_s", c_s, "must lie in (0, 1)"));
    }
    Ok((1.0 - a) * b * c_s)
}

/// Validated structural parameters of the capital process.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    r: f64,
    lambda: f64,
    alpha: f64,
    x_star: f64,
    barrier: f64,
    c_t: f64,
    micro: Option<[f64; 3]>,
}

impl ModelParams {
    /// Build from the growth rate directly.
    pub fn new(r: f64, lambda: f64, alpha: f64, x_star: f64, barrier: f64, c_t: f64) -> Result<Self> {
        let p = Self { r, lambda, alpha, x_star, barrier, c_t, micro: None };
        p.validate()?;
        Ok(p)
    }

    /// Build from the micro inputs `(a, b, c_S)` that determine `r`.
    #[allow(clippy::too_many_arguments)]
    pub fn from_micro(
        a: f64,
        b: f64,
        c_s: f64,
        lambda: f64,
        alpha: f64,
        x_star: f64,
        barrier: f64,
        c_t: f64,
    ) -> Result<Self> {
        let r = growth_rate(a, b, c_s)?;
        let p = Self { r, lambda, alpha, x_star, barrier, c_t, micro: Some([a, b, c_s]) };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        let positive = [
            ("r", self.r),
            ("lambda", self.lambda),
            ("alpha", self.alpha),
            ("x_star", self.x_star),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(name, v, "must be positive and finite"));
            }
        }
        if !(self.c_t >= 0.0 && self.c_t.is_finite()) {
            return Err(invalid("c_t", self.c_t, "must be non-negative and finite"));
        }
        if !(self.barrier > self.x_star && self.barrier.is_finite()) {
            return Err(invalid("barrier", self.barrier, "must exceed x_star"));
        }
        if (self.r - self.c_t).abs() <= RATE_SEPARATION {
            return Err(invalid("c_t", self.c_t, "must differ from r"));
        }
        Ok(())
    }

    /// Copy with a different transfer rate.
    pub fn with_c_t(&self, c_t: f64) -> Result<Self> {
        let p = Self { c_t, ..*self };
        p.validate()?;
        Ok(p)
    }

    /// Copy with a different capital barrier.
    pub fn with_barrier(&self, barrier: f64) -> Result<Self> {
        let p = Self { barrier, ..*self };
        p.validate()?;
        Ok(p)
    }

    /// Copy with a different loss shape `α`.
    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        let p = Self { alpha, ..*self };
        p.validate()?;
        Ok(p)
    }

    /// Capital growth rate `r`.
    pub fn r(&self) -> f64 {
        self.r
    }
    /// Loss intensity `λ`.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }
    /// Shape `α` of the Beta(α, 1) remaining-capital fraction.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    /// Critical capital `x*`.
    pub fn x_star(&self) -> f64 {
        self.x_star
    }
    /// Capital barrier `B`.
    pub fn barrier(&self) -> f64 {
        self.barrier
    }
    /// Transfer rate `c_T`.
    pub fn c_t(&self) -> f64 {
        self.c_t
    }
    /// Micro inputs `(a, b, c_S)` when the parameters were built from them.
    pub fn micro(&self) -> Option<[f64; 3]> {
        self.micro
    }

    /// `x** = (c_T B - r x*)/(r - c_T)`.
    pub fn x_double_star(&self) -> f64 {
        (self.c_t * self.barrier - self.r * self.x_star) / (self.r - self.c_t)
    }

    /// Net profit condition `α > λ/r`. Without it trapping is certain.
    pub fn net_profit(&self) -> bool {
        self.alpha > self.lambda / self.r
    }

    /// Below `x*` with no transfers capital never moves.
    pub fn is_absorbing_below(&self) -> bool {
        self.c_t == 0.0
    }

    /// Deterministic drift `r [x - x*]^+ + c_T [B - x]^+`.
    pub fn drift(&self, x: f64) -> f64 {
        self.r * (x - self.x_star).max(0.0) + self.c_t * (self.barrier - x).max(0.0)
    }

    /// Flow for `x >= B`: `(x - x*) e^{rt} + x*`.
    pub fn flow_above(&self, t: f64, x: f64) -> f64 {
        x + (x - self.x_star) * (self.r * t).exp_m1()
    }

    /// Flow for `x* <= x <= B`: `(x + x**) e^{(r - c_T)t} - x**`.
    pub fn flow_mid(&self, t: f64, x: f64) -> f64 {
        x + (x + self.x_double_star()) * ((self.r - self.c_t) * t).exp_m1()
    }

    /// Flow for `x < x*`: `(x - B) e^{-c_T t} + B`. Returns `x` unchanged when
    /// `c_T = 0` (see [`Self::is_absorbing_below`]).
    pub fn flow_below(&self, t: f64, x: f64) -> f64 {
        x - (self.barrier - x) * (-self.c_t * t).exp_m1()
    }

    /// Time for the mid flow to carry `x ∈ [x*, B)` up to `B`.
    pub fn time_to_barrier(&self, x: f64) -> f64 {
        if x >= self.barrier {
            return 0.0;
        }
        let xss = self.x_double_star();
        ((self.barrier - x) / (x + xss)).ln_1p() / (self.r - self.c_t)
    }

    /// Time for the lower flow to carry `x < x*` up to `x*`; infinite when
    /// `c_T = 0`.
    pub fn time_to_critical(&self, x: f64) -> f64 {
        if x >= self.x_star {
            return 0.0;
        }
        if self.c_t == 0.0 {
            return f64::INFINITY;
        }
        ((self.x_star - x) / (self.barrier - self.x_star)).ln_1p() / self.c_t
    }

    /// Advance capital `x` by `t` units of time without losses, chaining the
    /// regimes. Also returns the time spent strictly below `x*`.
    pub fn evolve(&self, x: f64, t: f64) -> Evolution {
        let mut x = x;
        let mut t = t;
        let mut below = 0.0;
        if x < self.x_star {
            let tc = self.time_to_critical(x);
            if tc > t {
                return Evolution { x: self.flow_below(t, x), time_below: t };
            }
            below = tc;
            t -= tc;
            x = self.x_star;
        }
        if x < self.barrier {
            let tb = self.time_to_barrier(x);
            if tb > t {
                return Evolution { x: self.flow_mid(t, x), time_below: below };
            }
            t -= tb;
            x = self.barrier;
        }
        Evolution { x: self.flow_above(t, x), time_below: below }
    }
}

/// Result of [`ModelParams::evolve`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evolution {
    /// Capital at the end of the interval.
    pub x: f64,
    /// Time spent strictly below `x*` during the interval.
    pub time_below: f64,
}

/// Distribution of the fraction `Z` of capital that survives a loss.
#[derive(Clone)]
pub enum LossDistribution {
    /// `Z ~ Beta(α, 1)`, CDF `z^α` on `(0, 1]`.
    BetaAlphaOne(f64),
    /// Arbitrary inverse CDF mapping `u ∈ (0, 1)` to `(0, 1]`.
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl LossDistribution {
    /// Beta(α, 1) after checking `α > 0`.
    pub fn beta(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(invalid("alpha", alpha, "must be positive and finite"));
        }
        Ok(Self::BetaAlphaOne(alpha))
    }

    /// Draw by inversion from a uniform variate.
    pub fn sample(&self, u: f64) -> f64 {
        match self {
            Self::BetaAlphaOne(alpha) => u.powf(1.0 / alpha),
            Self::Custom(inv) => inv(u),
        }
    }
}

impl fmt::Debug for LossDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::BetaAlphaOne(a) => f.debug_tuple("BetaAlphaOne").field(a).finish(),
            Self::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// Extreme-poverty rate `ω(x)` on `(0, x*]`: the hazard of becoming extremely
/// poor while capital is below the critical level.
#[derive(Clone)]
pub enum OmegaRate {
    /// `ω(x) = ω_c`.
    Constant(f64),
    /// `ω(x) = β/x`.
    Exponential(f64),
    /// Any locally bounded rate.
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl OmegaRate {
    /// Rate at capital `x`.
    pub fn rate(&self, x: f64) -> f64 {
        match self {
            Self::Constant(w) => *w,
            Self::Exponential(beta) => beta / x,
            Self::Custom(f) => f(x),
        }
    }
}

impl fmt::Debug for OmegaRate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant(w) => f.debug_tuple("Constant").field(w).finish(),
            Self::Exponential(b) => f.debug_tuple("Exponential").field(b).finish(),
            Self::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// Inverse-CDF draw of the surviving fraction; see [`LossDistribution::sample`].
pub fn sample_loss(d: &LossDistribution, u: f64) -> f64 {
    d.sample(u)
}

pub(crate) fn invalid(name: &'static str, value: f64, reason: &'static str) -> Error {
    Error::InvalidParameter { name, value, reason }
}
