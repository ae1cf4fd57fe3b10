//! Closed-form Laplace transform of the trapping time, trapping probability and
//! extreme-poverty probability under Beta(α, 1) losses.
//!
//! In every regime the integro-differential equation reduces to a
//! hypergeometric ODE in a scaled capital variable `y`:
//!
//! * upper (`x >= B`): `y = x/x*`, exponents `a_u <= 0 <= b_u`, only the
//!   solution decaying at infinity, `y^{-b_u} ₂F₁(b_u, b_u-α+1; b_u-a_u+1; 1/y)`;
//! * middle (`x* <= x < B`): `y = -x/x**`, two solutions with exponents
//!   `a_m, b_m` (same formula with `r` replaced by `r - c_T`);
//! * lower (`x < x*`, extreme poverty only): the solution bounded at `0⁺`.
//!
//! The integration constants solve a small linear system built from value and
//! derivative matching at `B` and a condition at `x*`. For trapping that
//! condition is the equation itself evaluated at `x*`, where trapping is
//! immediate below. For extreme poverty the rate `ω` switches off at `x*`, so
//! the derivative jumps there:
//!
//! ```text
//! c_T (B - x*) [m'(x*+) - m'(x*-)] = ω(x*-) [1 - m(x*)]
//! ```
//!
//! The middle regime basis is chosen among the three Kummer pairs (around
//! `y = ∞`, `0`, `1`) according to where `y` lives and how far the relevant
//! parameter difference is from an integer, so that the hypergeometric
//! argument never reaches the branch cut. This matters for `c_T > r`, where
//! `y ∈ (0, 1)` and the `1/y` form would sit on the cut.

use alloc::vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::capital_model::{invalid, ModelParams};
use crate::special_functions::{hyp2f1, hyp2f1_derivative, hyp2f1_ln_positive, Hyp2f1Args};
use crate::{linalg, Error, Result};

/// Probabilities within this distance outside `[0, 1]` are clamped.
pub const CLAMP_TOL: f64 = 1e-10;
/// Systems whose equilibrated condition number exceeds this are singular.
pub const MAX_CONDITION: f64 = 1e14;
/// Parameter differences closer than this to an integer disqualify a basis.
const BASIS_DEGENERATE: f64 = 1e-9;
/// Bases whose parameter difference is at least this far from an integer are
/// preferred regardless of convergence speed.
const BASIS_SEPARATED: f64 = 1e-3;
/// Beyond this value plain ₂F₁ evaluation of the lower solution switches to
/// the log-scaled series.
const LARGE_VALUE: f64 = 1e200;

/// Which pair of Kummer solutions represents the middle regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MidBasis {
    /// `|y|^{-a} ₂F₁(a, a-c+1; a-b+1; 1/y)` and the `b` analogue. Valid for
    /// `y > 1` or `y < 0`; this is the form the constants are usually quoted in.
    Infinity,
    /// `₂F₁(a, b; c; y)` and `|y|^{1-c} ₂F₁(a-c+1, b-c+1; 2-c; y)`, `y < 1`.
    Zero,
    /// `₂F₁(a, b; a+b-c+1; 1-y)` and
    /// `|1-y|^{c-a-b} ₂F₁(c-a, c-b; c-a-b+1; 1-y)`, `y > 0`.
    One,
}

/// Piece of a piecewise solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// `x >= B`.
    Upper,
    /// `x* <= x < B`.
    Mid,
    /// `x < x*`.
    Lower,
}

/// Value and scaled derivative `x·f'(x)` of a basis function.
#[derive(Debug, Clone, Copy)]
struct Val {
    v: f64,
    xd: f64,
}

/// Exponent pair `((-s - q)/(2k), (-s + q)/(2k))` with `s = δ + λ - αk`,
/// `q = √(s² + 4kαδ)`, computed without cancellation.
pub fn exponents(k: f64, lambda: f64, alpha: f64, delta: f64) -> (f64, f64) {
    let s = delta + lambda - alpha * k;
    let q = (s * s + 4.0 * k * alpha * delta).max(0.0).sqrt();
    let prod = -alpha * delta / k;
    if s >= 0.0 {
        let a = (-s - q) / (2.0 * k);
        let b = if a != 0.0 { prod / a } else { 0.0 };
        (a, b)
    } else {
        let b = (-s + q) / (2.0 * k);
        let a = if b != 0.0 { prod / b } else { 0.0 };
        (a, b)
    }
}

fn hyp(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    hyp2f1(Hyp2f1Args::new(a, b, c, z))
}

fn dhyp(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    hyp2f1_derivative(Hyp2f1Args::new(a, b, c, z))
}

/// `|y|^{-e} ₂F₁(e, e-c+1; e-f+1; 1/y)`.
fn infinity_solution(e: f64, f: f64, c: f64, y: f64) -> Result<Val> {
    if e == 0.0 {
        return Ok(Val { v: 1.0, xd: 0.0 });
    }
    let (p, q, s) = (e, e - c + 1.0, e - f + 1.0);
    let w = 1.0 / y;
    let pre = y.abs().powf(-e);
    let h = hyp(p, q, s, w)?;
    let dh = dhyp(p, q, s, w)?;
    Ok(Val { v: pre * h, xd: pre * (-e * h - dh * w) })
}

/// Upper regime solution that decays at infinity.
#[derive(Debug, Clone, Copy)]
struct Upper {
    a: f64,
    b: f64,
    alpha: f64,
    x_star: f64,
}

impl Upper {
    fn new(p: &ModelParams, delta: f64) -> Self {
        let (a, b) = exponents(p.r(), p.lambda(), p.alpha(), delta);
        Self { a, b, alpha: p.alpha(), x_star: p.x_star() }
    }

    fn eval(&self, x: f64) -> Result<Val> {
        infinity_solution(self.b, self.a, self.alpha, x / self.x_star)
    }
}

/// Middle regime pair of solutions.
#[derive(Debug, Clone, Copy)]
struct Mid {
    a: f64,
    b: f64,
    c: f64,
    xss: f64,
    basis: MidBasis,
}

/// Effective ratio of the series actually summed for argument `z` (after the
/// Pfaff map for `z < 0` and the `1 - z` connection above 1/2).
fn series_ratio(z: f64) -> f64 {
    if z < 0.0 {
        -z / (1.0 - z)
    } else if z <= 0.5 {
        z
    } else {
        1.0 - z
    }
}

fn int_distance(t: f64) -> f64 {
    (t - t.round()).abs()
}

impl Mid {
    fn new(p: &ModelParams, delta: f64, forced: Option<MidBasis>) -> Result<Self> {
        let k = p.r() - p.c_t();
        let (a, b) = exponents(k, p.lambda(), p.alpha(), delta);
        let c = p.alpha();
        let xss = p.x_double_star();
        if xss.abs() <= 1e-12 * p.x_star() {
            return Err(Error::Singular { what: "middle regime (x** = 0)", condition: f64::INFINITY });
        }
        let y_lo = -p.x_star() / xss;
        let y_hi = -p.barrier() / xss;
        let (lo, hi) = if y_lo < y_hi { (y_lo, y_hi) } else { (y_hi, y_lo) };
        let applicable = |basis: MidBasis| match basis {
            MidBasis::Infinity => lo > 1.0 || hi < 0.0,
            MidBasis::Zero => hi < 1.0,
            MidBasis::One => lo > 0.0,
        };
        let gap = |basis: MidBasis| match basis {
            MidBasis::Infinity => int_distance(a - b),
            MidBasis::Zero => int_distance(c),
            MidBasis::One => int_distance(c - a - b),
        };
        let argument = |basis: MidBasis| {
            let z = |y: f64| match basis {
                MidBasis::Infinity => 1.0 / y,
                MidBasis::Zero => y,
                MidBasis::One => 1.0 - y,
            };
            series_ratio(z(lo)).max(series_ratio(z(hi)))
        };
        let mut candidates: alloc::vec::Vec<MidBasis> = match forced {
            Some(basis) if !applicable(basis) => return Err(Error::Domain { what: "middle regime basis", at: y_lo }),
            Some(basis) => vec![basis],
            None => [MidBasis::Infinity, MidBasis::Zero, MidBasis::One].into_iter().filter(|&b| applicable(b)).collect(),
        };
        // Well separated parameters first, then the fastest converging series.
        candidates.sort_by(|&l, &r| {
            let key = |b: MidBasis| (gap(b) < BASIS_SEPARATED, argument(b));
            let (kl, kr) = (key(l), key(r));
            kl.0.cmp(&kr.0).then(kl.1.total_cmp(&kr.1))
        });
        let mut last = Error::Domain { what: "middle regime basis", at: y_lo };
        for basis in candidates {
            if gap(basis) < BASIS_DEGENERATE {
                last = Error::Singular { what: "middle regime basis (degenerate exponents)", condition: f64::INFINITY };
                continue;
            }
            let mid = Self { a, b, c, xss, basis };
            match (mid.eval(p.x_star()), mid.eval(p.barrier())) {
                (Ok(_), Ok(_)) => return Ok(mid),
                (Err(e), _) | (_, Err(e)) => last = e,
            }
        }
        Err(last)
    }

    fn eval(&self, x: f64) -> Result<[Val; 2]> {
        let (a, b, c) = (self.a, self.b, self.c);
        let y = -x / self.xss;
        match self.basis {
            MidBasis::Infinity => Ok([infinity_solution(a, b, c, y)?, infinity_solution(b, a, c, y)?]),
            MidBasis::Zero => {
                let f1 = hyp(a, b, c, y)?;
                let d1 = dhyp(a, b, c, y)?;
                let (p, q, s) = (a - c + 1.0, b - c + 1.0, 2.0 - c);
                let pre = y.abs().powf(1.0 - c);
                let f2 = hyp(p, q, s, y)?;
                let d2 = dhyp(p, q, s, y)?;
                Ok([
                    Val { v: f1, xd: y * d1 },
                    Val { v: pre * f2, xd: pre * ((1.0 - c) * f2 + y * d2) },
                ])
            }
            MidBasis::One => {
                let w = 1.0 - y;
                let s = c - a - b;
                let f1 = hyp(a, b, 1.0 - s, w)?;
                let d1 = dhyp(a, b, 1.0 - s, w)?;
                let pre = w.abs().powf(s);
                let f2 = hyp(c - a, c - b, s + 1.0, w)?;
                let d2 = dhyp(c - a, c - b, s + 1.0, w)?;
                Ok([
                    Val { v: f1, xd: -y * d1 },
                    Val { v: pre * f2, xd: -y * pre * (s * f2 / w + d2) },
                ])
            }
        }
    }
}

/// Lower regime solution bounded at `0⁺`, normalized to 1 at `x*`.
#[derive(Debug, Clone, Copy)]
enum Lower {
    /// `₂F₁(a, b; α; x/B)` for a constant rate.
    Constant { a: f64, b: f64, alpha: f64, barrier: f64 },
    /// `(x/B)^κ ₂F₁(κ, λ/c_T + α + κ; α + κ; x/B)` for `ω = β/x`.
    Exponential { kappa: f64, b: f64, c: f64, barrier: f64 },
}

impl Lower {
    /// `(ln f(x), x f'(x)/f(x))`.
    fn ln_eval(&self, x: f64) -> Result<(f64, f64)> {
        let (a, b, c, barrier, shift) = match *self {
            Lower::Constant { a, b, alpha, barrier } => (a, b, alpha, barrier, 0.0),
            Lower::Exponential { kappa, b, c, barrier } => (kappa, b, c, barrier, kappa),
        };
        let z = x / barrier;
        if z == 0.0 {
            return Ok((if shift > 0.0 { f64::NEG_INFINITY } else { 0.0 }, shift));
        }
        let (ln_f, zd) = match (hyp(a, b, c, z), dhyp(a, b, c, z)) {
            (Ok(f), Ok(d)) if f > 0.0 && f < LARGE_VALUE && d.is_finite() => (f.ln(), z * d / f),
            _ => {
                let l0 = hyp2f1_ln_positive(Hyp2f1Args::new(a, b, c, z))?;
                let l1 = hyp2f1_ln_positive(Hyp2f1Args::new(a + 1.0, b + 1.0, c + 1.0, z))?;
                (l0, z * a * b / c * (l1 - l0).exp())
            }
        };
        Ok((shift * z.ln() + ln_f, shift + zd))
    }
}

fn solved(result: Option<(alloc::vec::Vec<f64>, f64)>, what: &'static str) -> Result<(alloc::vec::Vec<f64>, f64)> {
    match result {
        Some((x, cond)) if cond < MAX_CONDITION && x.iter().all(|v| v.is_finite()) => Ok((x, cond)),
        Some((_, cond)) => Err(Error::Singular { what, condition: cond }),
        None => Err(Error::Singular { what, condition: f64::INFINITY }),
    }
}

fn clamp_probability(v: f64, x: f64, what: &'static str) -> Result<f64> {
    if (-CLAMP_TOL..=1.0 + CLAMP_TOL).contains(&v) {
        Ok(v.clamp(0.0, 1.0))
    } else {
        Err(Error::OutOfRange { what, value: v, x })
    }
}

fn require_transfers(p: &ModelParams) -> Result<()> {
    if p.c_t() > 0.0 {
        Ok(())
    } else {
        Err(invalid("c_t", p.c_t(), "closed forms need c_t > 0"))
    }
}

fn require_delta(delta: f64) -> Result<()> {
    if delta >= 0.0 && delta.is_finite() {
        Ok(())
    } else {
        Err(invalid("delta", delta, "must be non-negative and finite"))
    }
}

/// Integration constants of the trapping-time Laplace transform.
///
/// `m(x) = a2_u·U(x)` for `x >= B` and `a1_l·M₁(x) + a2_l·M₂(x)` for
/// `x* <= x < B`, with `U`, `M₁`, `M₂` the unnormalized basis functions.
#[derive(Debug, Clone, Copy)]
pub struct TrappingConstants {
    /// Coefficient of the decaying upper solution.
    pub a2_u: f64,
    /// Coefficient of the first middle solution.
    pub a1_l: f64,
    /// Coefficient of the second middle solution.
    pub a2_l: f64,
    /// Upper exponents `(a_u, b_u)`.
    pub upper_exponents: (f64, f64),
    /// Middle exponents `(a_l, b_l)`.
    pub mid_exponents: (f64, f64),
    /// Basis used in the middle regime.
    pub basis: MidBasis,
    /// Residuals of value matching at `B`, derivative matching at `B`
    /// (scaled by `B`) and the boundary identity at `x*`.
    pub residuals: [f64; 3],
    /// Condition number of the equilibrated system.
    pub condition: f64,
    /// Discount rate `δ`.
    pub delta: f64,
    params: ModelParams,
    upper: Upper,
    mid: Mid,
}

/// Outcome of [`trapping_constants`].
#[derive(Debug, Clone, Copy)]
pub enum TrappingSolution {
    /// `δ = 0` without the net profit condition: trapping is certain.
    Certain,
    /// Constants of the closed form.
    Solved(TrappingConstants),
}

impl TrappingSolution {
    /// Laplace transform (or probability at `δ = 0`) at `x`.
    pub fn value(&self, x: f64) -> Result<f64> {
        match self {
            Self::Certain => Ok(1.0),
            Self::Solved(c) => c.value(x),
        }
    }
}

/// Constants of the trapping-time Laplace transform at discount `δ >= 0`.
pub fn trapping_constants(p: &ModelParams, delta: f64) -> Result<TrappingSolution> {
    trapping_constants_in(p, delta, None)
}

/// As [`trapping_constants`] with a prescribed middle-regime basis.
pub fn trapping_constants_with_basis(p: &ModelParams, delta: f64, basis: MidBasis) -> Result<TrappingSolution> {
    trapping_constants_in(p, delta, Some(basis))
}

fn trapping_constants_in(p: &ModelParams, delta: f64, basis: Option<MidBasis>) -> Result<TrappingSolution> {
    require_transfers(p)?;
    require_delta(delta)?;
    if delta == 0.0 && !p.net_profit() {
        return Ok(TrappingSolution::Certain);
    }
    let upper = Upper::new(p, delta);
    let mid = Mid::new(p, delta, basis)?;
    let (xs, bb) = (p.x_star(), p.barrier());
    let k = p.c_t() * (bb - xs);
    let ld = p.lambda() + delta;
    let ub = upper.eval(bb)?;
    let [m1b, m2b] = mid.eval(bb)?;
    let [m1s, m2s] = mid.eval(xs)?;
    let bc = |m: Val| ld * m.v - k * m.xd / xs;
    let a = vec![
        vec![ub.v, -m1b.v, -m2b.v],
        vec![ub.xd, -m1b.xd, -m2b.xd],
        vec![0.0, bc(m1s), bc(m2s)],
    ];
    let rhs = [0.0, 0.0, p.lambda()];
    let (sol, condition) = solved(linalg::solve(&a, &rhs), "trapping boundary")?;
    let (a2_u, a1_l, a2_l) = (sol[0], sol[1], sol[2]);
    let residuals = [
        a2_u * ub.v - a1_l * m1b.v - a2_l * m2b.v,
        a2_u * ub.xd - a1_l * m1b.xd - a2_l * m2b.xd,
        a1_l * bc(m1s) + a2_l * bc(m2s) - p.lambda(),
    ];
    Ok(TrappingSolution::Solved(TrappingConstants {
        a2_u,
        a1_l,
        a2_l,
        upper_exponents: (upper.a, upper.b),
        mid_exponents: (mid.a, mid.b),
        basis: mid.basis,
        residuals,
        condition,
        delta,
        params: *p,
        upper,
        mid,
    }))
}

impl TrappingConstants {
    /// Value and derivative of one branch of the solution, evaluated at `x`
    /// even outside that branch's own interval (as long as the basis is
    /// defined there). The lower branch is the constant 1.
    pub fn branch(&self, branch: Branch, x: f64) -> Result<(f64, f64)> {
        match branch {
            Branch::Upper => {
                let u = self.upper.eval(x)?;
                Ok((self.a2_u * u.v, self.a2_u * u.xd / x))
            }
            Branch::Mid => {
                let [m1, m2] = self.mid.eval(x)?;
                Ok((self.a1_l * m1.v + self.a2_l * m2.v, (self.a1_l * m1.xd + self.a2_l * m2.xd) / x))
            }
            Branch::Lower => Ok((1.0, 0.0)),
        }
    }

    /// Transform at `x`; 1 below `x*`, where trapping is immediate.
    pub fn value(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(invalid("x", x, "must be positive"));
        }
        let branch = if x >= self.params.barrier() {
            Branch::Upper
        } else if x >= self.params.x_star() {
            Branch::Mid
        } else {
            Branch::Lower
        };
        let (v, _) = self.branch(branch, x)?;
        clamp_probability(v, x, "trapping transform")
    }
}

/// Laplace transform `E[e^{-δτ}; τ < ∞]` of the trapping time from `x`.
pub fn laplace_trapping(p: &ModelParams, delta: f64, x: f64) -> Result<f64> {
    trapping_constants(p, delta)?.value(x)
}

/// Trapping probability `ψ^P(x)`: 1 when `α <= λ/r`.
pub fn trapping_probability(p: &ModelParams, x: f64) -> Result<f64> {
    laplace_trapping(p, 0.0, x)
}

/// Integration constants of the extreme-poverty solution.
///
/// The lower coefficient is stored against the lower solution normalized to
/// 1 at `x*` because the raw function overflows for large rates; see
/// [`EpConstants::a_l`].
#[derive(Debug, Clone, Copy)]
pub struct EpConstants {
    /// Coefficient of the decaying upper solution.
    pub a2_u: f64,
    /// Coefficient of the first middle solution.
    pub a1_m: f64,
    /// Coefficient of the second middle solution.
    pub a2_m: f64,
    /// Coefficient of the lower solution divided by its value at `x*`.
    pub a_l_normalized: f64,
    /// `ln` of the lower solution at `x*`.
    pub ln_lower_scale: f64,
    /// Particular solution below `x*`: `ω_c/(δ + ω_c)`, or 1 for `β/x`.
    pub particular: f64,
    /// Upper exponents `(a_u, b_u)`.
    pub upper_exponents: (f64, f64),
    /// Middle exponents `(a_m, b_m)`.
    pub mid_exponents: (f64, f64),
    /// Lower parameters: `(a_l, b_l, c_l)` of the lower ₂F₁.
    pub lower_parameters: (f64, f64, f64),
    /// Basis used in the middle regime.
    pub basis: MidBasis,
    /// Residuals: value and derivative matching at `B`, value matching and
    /// the derivative jump condition at `x*`.
    pub residuals: [f64; 4],
    /// Condition number of the equilibrated system.
    pub condition: f64,
    /// Rate just below `x*`.
    pub omega_at_x_star: f64,
    params: ModelParams,
    upper: Upper,
    mid: Mid,
    lower: Lower,
}

impl EpConstants {
    /// Coefficient of the unnormalized lower solution (underflows to 0 for
    /// very large rates).
    pub fn a_l(&self) -> f64 {
        self.a_l_normalized * (-self.ln_lower_scale).exp()
    }

    /// Value and derivative of one branch, see [`TrappingConstants::branch`].
    pub fn branch(&self, branch: Branch, x: f64) -> Result<(f64, f64)> {
        match branch {
            Branch::Upper => {
                let u = self.upper.eval(x)?;
                Ok((self.a2_u * u.v, self.a2_u * u.xd / x))
            }
            Branch::Mid => {
                let [m1, m2] = self.mid.eval(x)?;
                Ok((self.a1_m * m1.v + self.a2_m * m2.v, (self.a1_m * m1.xd + self.a2_m * m2.xd) / x))
            }
            Branch::Lower => {
                let (ln_f, xd) = self.lower.ln_eval(x)?;
                let l = (ln_f - self.ln_lower_scale).exp();
                Ok((self.particular + self.a_l_normalized * l, self.a_l_normalized * l * xd / x))
            }
        }
    }

    /// Probability (or discounted transform for `δ > 0`) at `x > 0`.
    pub fn value(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(invalid("x", x, "must be positive"));
        }
        let branch = if x >= self.params.barrier() {
            Branch::Upper
        } else if x >= self.params.x_star() {
            Branch::Mid
        } else {
            Branch::Lower
        };
        let (v, _) = self.branch(branch, x)?;
        clamp_probability(v, x, "extreme-poverty probability")
    }
}

/// Constants for the constant rate `ω(x) = ω_c` at discount `δ >= 0`.
pub fn ep_constants_constant_rate(p: &ModelParams, omega_c: f64, delta: f64) -> Result<EpConstants> {
    if !(omega_c > 0.0 && omega_c.is_finite()) {
        return Err(invalid("omega_c", omega_c, "must be positive and finite"));
    }
    require_delta(delta)?;
    require_transfers(p)?;
    let ct = p.c_t();
    let s = p.alpha() * ct + p.lambda() + delta + omega_c;
    let disc = s * s - 4.0 * p.alpha() * ct * (delta + omega_c);
    let b = (s + disc.max(0.0).sqrt()) / (2.0 * ct);
    let a = p.alpha() * (delta + omega_c) / (ct * b);
    let lower = Lower::Constant { a, b, alpha: p.alpha(), barrier: p.barrier() };
    let particular = omega_c / (delta + omega_c);
    ep_constants(p, delta, lower, particular, omega_c, None)
}

/// Constants for the exponential rate `ω(x) = β/x` (`δ = 0` only).
pub fn ep_constants_exponential_rate(p: &ModelParams, beta: f64) -> Result<EpConstants> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(invalid("beta", beta, "must be positive and finite"));
    }
    require_transfers(p)?;
    let kappa = beta / (p.barrier() * p.c_t());
    let lower = Lower::Exponential {
        kappa,
        b: p.lambda() / p.c_t() + p.alpha() + kappa,
        c: p.alpha() + kappa,
        barrier: p.barrier(),
    };
    ep_constants(p, 0.0, lower, 1.0, beta / p.x_star(), None)
}

fn ep_constants(
    p: &ModelParams,
    delta: f64,
    lower: Lower,
    particular: f64,
    omega_star: f64,
    basis: Option<MidBasis>,
) -> Result<EpConstants> {
    require_transfers(p)?;
    if delta == 0.0 && !p.net_profit() {
        return Err(invalid("alpha", p.alpha(), "needs alpha > lambda/r when delta = 0"));
    }
    let upper = Upper::new(p, delta);
    let mid = Mid::new(p, delta, basis)?;
    let (xs, bb) = (p.x_star(), p.barrier());
    let k = p.c_t() * (bb - xs);
    let ub = upper.eval(bb)?;
    let [m1b, m2b] = mid.eval(bb)?;
    let [m1s, m2s] = mid.eval(xs)?;
    let (ln_scale, l_xd) = lower.ln_eval(xs)?;
    // Jump row: k (m'_mid - m'_low) + ω m(x*) = ω, with m(x*) from the middle side.
    let jump = |m: Val| k * m.xd / xs + omega_star * m.v;
    let a = vec![
        vec![ub.v, -m1b.v, -m2b.v, 0.0],
        vec![ub.xd, -m1b.xd, -m2b.xd, 0.0],
        vec![0.0, m1s.v, m2s.v, -1.0],
        vec![0.0, jump(m1s), jump(m2s), -k * l_xd / xs],
    ];
    let rhs = [0.0, 0.0, particular, omega_star];
    let (sol, condition) = solved(linalg::solve(&a, &rhs), "extreme-poverty boundary")?;
    let (a2_u, a1_m, a2_m, al) = (sol[0], sol[1], sol[2], sol[3]);
    let residuals = [
        a2_u * ub.v - a1_m * m1b.v - a2_m * m2b.v,
        a2_u * ub.xd - a1_m * m1b.xd - a2_m * m2b.xd,
        a1_m * m1s.v + a2_m * m2s.v - al - particular,
        a1_m * jump(m1s) + a2_m * jump(m2s) - k * al * l_xd / xs - omega_star,
    ];
    let lower_parameters = match lower {
        Lower::Constant { a, b, alpha, .. } => (a, b, alpha),
        Lower::Exponential { kappa, b, c, .. } => (kappa, b, c),
    };
    Ok(EpConstants {
        a2_u,
        a1_m,
        a2_m,
        a_l_normalized: al,
        ln_lower_scale: ln_scale,
        particular,
        upper_exponents: (upper.a, upper.b),
        mid_exponents: (mid.a, mid.b),
        lower_parameters,
        basis: mid.basis,
        residuals,
        condition,
        omega_at_x_star: omega_star,
        params: *p,
        upper,
        mid,
        lower,
    })
}

/// Discounted extreme-poverty transform for `ω = ω_c`; the probability
/// `ψ^EP(x)` at `δ = 0`.
pub fn ep_probability_constant(p: &ModelParams, omega_c: f64, delta: f64, x: f64) -> Result<f64> {
    ep_constants_constant_rate(p, omega_c, delta)?.value(x)
}

/// Extreme-poverty probability `ψ^EP(x)` for `ω(x) = β/x`.
pub fn ep_probability_exponential(p: &ModelParams, beta: f64, x: f64) -> Result<f64> {
    ep_constants_exponential_rate(p, beta)?.value(x)
}
