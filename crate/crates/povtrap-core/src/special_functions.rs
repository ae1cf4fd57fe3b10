//! Γ and the real Gauss hypergeometric function ₂F₁(a, b; c; z).
//!
//! Evaluation strategy for ₂F₁ with real parameters:
//!
//! * `|z| <= 0.5`, z >= 0: direct series.
//! * `z < 0`: Pfaff transform to `w = z/(z-1) ∈ (0, 1)`.
//! * `0.5 < z < 1`: the `1 - z` connection formula. When `c - a - b` is within
//!   `1e-4` of an integer the formula cancels catastrophically; the direct
//!   series is used up to `z = 0.95` and beyond that the value is obtained by
//!   cubic interpolation in `c` from four non-degenerate nodes.
//! * `z = 1`: Gauss summation when `c - a - b > 0`.
//!
//! Arguments `z > 1` lie on the branch cut and are rejected.

#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

const SERIES_TOL: f64 = 1e-16;
const MAX_TERMS: usize = 10_000;
const LN_MAX_TERMS: usize = 4_000_000;
const INT_TOL: f64 = 1e-9;
const DEGENERATE_GAP: f64 = 1e-4;
const DIRECT_LIMIT: f64 = 0.95;

/// Arguments of ₂F₁(a, b; c; z).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyp2f1Args {
    /// First numerator parameter.
    pub a: f64,
    /// Second numerator parameter.
    pub b: f64,
    /// Denominator parameter.
    pub c: f64,
    /// Argument.
    pub z: f64,
}

impl Hyp2f1Args {
    /// Bundle the four arguments.
    pub const fn new(a: f64, b: f64, c: f64, z: f64) -> Self {
        Self { a, b, c, z }
    }
}

/// `ln |Γ(x)|` together with the sign of `Γ(x)`.
pub fn ln_gamma(x: f64) -> Result<(f64, f64)> {
    if !x.is_finite() {
        return Err(Error::Domain { what: "ln_gamma", at: x });
    }
    if is_nonpositive_integer(x, 0.0) {
        return Err(Error::Pole { what: "ln_gamma", at: x });
    }
    let (v, s) = libm::lgamma_r(x);
    Ok((v, if s < 0 { -1.0 } else { 1.0 }))
}

/// `Γ(x)`.
pub fn gamma(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain { what: "gamma", at: x });
    }
    if is_nonpositive_integer(x, 0.0) {
        return Err(Error::Pole { what: "gamma", at: x });
    }
    Ok(libm::tgamma(x))
}

/// `1/Γ(x)`, which is entire: zero at the non-positive integers.
pub fn rgamma(x: f64) -> f64 {
    if is_nonpositive_integer(x, 0.0) {
        return 0.0;
    }
    if x > 0.0 && x < 170.0 {
        return 1.0 / libm::tgamma(x);
    }
    let (lg, s) = libm::lgamma_r(x);
    let sign = if s < 0 { -1.0 } else { 1.0 };
    sign * (-lg).exp()
}

/// Rising factorial `(a)_n = Γ(a+n)/Γ(a) = a(a+1)…(a+n-1)`.
pub fn pochhammer(a: f64, n: u32) -> f64 {
    (0..n).fold(1.0, |acc, k| acc * (a + k as f64))
}

/// Gauss hypergeometric function ₂F₁(a, b; c; z) for real arguments, `z <= 1`.
///
/// Symmetric in `a` and `b` bit for bit.
pub fn hyp2f1(args: Hyp2f1Args) -> Result<f64> {
    let Hyp2f1Args { a, b, c, z } = args;
    check_finite(a, b, c, z)?;
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    if a == 0.0 || b == 0.0 || z == 0.0 {
        return Ok(1.0);
    }
    if is_nonpositive_integer(c, INT_TOL) && !terminates_before_pole(a, b, c) {
        return Err(Error::Pole { what: "hyp2f1", at: c });
    }
    finite(eval(a, b, c, z)?, "hyp2f1")
}

/// Regularized function ₂F₁(a, b; c; z)/Γ(c), finite for every real `c`.
pub fn hyp2f1_regularized(args: Hyp2f1Args) -> Result<f64> {
    let Hyp2f1Args { a, b, c, z } = args;
    check_finite(a, b, c, z)?;
    if is_nonpositive_integer(c, INT_TOL) {
        // Limit c -> -m: (a)_{m+1}(b)_{m+1}/(m+1)! z^{m+1} F(a+m+1, b+m+1; m+2; z).
        let n = (1.0 - c.round()) as u32;
        let nf = n as f64;
        let coef = pochhammer(a, n) * pochhammer(b, n) / libm::tgamma(nf + 1.0) * z.powi(n as i32);
        if coef == 0.0 {
            return Ok(0.0);
        }
        return Ok(coef * hyp2f1(Hyp2f1Args::new(a + nf, b + nf, nf + 1.0, z))?);
    }
    Ok(hyp2f1(args)? * rgamma(c))
}

/// Derivative `d/dz ₂F₁(a, b; c; z) = (ab/c) ₂F₁(a+1, b+1; c+1; z)`.
pub fn hyp2f1_derivative(args: Hyp2f1Args) -> Result<f64> {
    let Hyp2f1Args { a, b, c, z } = args;
    check_finite(a, b, c, z)?;
    if c == 0.0 {
        return Err(Error::Pole { what: "hyp2f1_derivative", at: c });
    }
    if a == 0.0 || b == 0.0 {
        return Ok(0.0);
    }
    Ok(a * b / c * hyp2f1(Hyp2f1Args::new(a + 1.0, b + 1.0, c + 1.0, z))?)
}

/// `ln ₂F₁(a, b; c; z)` for `a, b, c > 0` and `0 <= z < 1`.
///
/// All series terms are positive, so the sum is accumulated in log scale and
/// stays finite when the value itself overflows (large `b` with `z` near 1/2
/// arises for very large extreme-poverty rates). The term cap is much larger
/// than for [`hyp2f1`] because the terms peak near `n ≈ bz/(1-z)`.
pub fn hyp2f1_ln_positive(args: Hyp2f1Args) -> Result<f64> {
    let Hyp2f1Args { a, b, c, z } = args;
    check_finite(a, b, c, z)?;
    if !(a > 0.0 && b > 0.0 && c > 0.0) || !(0.0..1.0).contains(&z) {
        return Err(Error::Domain { what: "hyp2f1_ln_positive", at: z });
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    let ln_z = z.ln();
    let mut ln_term = 0.0;
    let mut ln_ref = 0.0;
    let mut acc = 1.0;
    let mut small = 0;
    for n in 0..LN_MAX_TERMS {
        let nf = n as f64;
        let ratio = (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0));
        ln_term += ratio.ln() + ln_z;
        if ln_term > ln_ref {
            acc = acc * (ln_ref - ln_term).exp() + 1.0;
            ln_ref = ln_term;
        } else {
            acc += (ln_term - ln_ref).exp();
        }
        if ratio * z < 1.0 && ln_term - ln_ref - acc.ln() < SERIES_TOL.ln() {
            small += 1;
            if small >= 3 {
                return Ok(ln_ref + acc.ln());
            }
        } else {
            small = 0;
        }
    }
    Err(Error::NonConvergence { what: "hyp2f1_ln_positive series" })
}

fn eval(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    if z == 0.0 {
        return Ok(1.0);
    }
    if is_nonpositive_integer(a, 0.0) || is_nonpositive_integer(b, 0.0) {
        return series(a, b, c, z);
    }
    if z == 1.0 {
        return gauss_sum(a, b, c);
    }
    if z > 1.0 {
        return Err(Error::Domain { what: "hyp2f1", at: z });
    }
    if z < 0.0 {
        // Pfaff: F(a,b;c;z) = (1-z)^{-b} F(b, c-a; c; z/(z-1)); with a <= b the
        // second inner parameter is the larger of the two choices.
        let (p, q) = if a <= b { (b, a) } else { (a, b) };
        let w = z / (z - 1.0);
        return Ok((1.0 - z).powf(-p) * eval(p, c - q, c, w)?);
    }
    if z <= 0.5 {
        return series(a, b, c, z);
    }
    near_one(a, b, c, z)
}

fn near_one(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    let s = c - a - b;
    let d = s - s.round();
    if d.abs() >= DEGENERATE_GAP {
        return connection(a, b, c, z);
    }
    if z <= DIRECT_LIMIT {
        return series(a, b, c, z);
    }
    // F is analytic in c; interpolate through c0 + {-2h, -h, h, 2h} where c0
    // makes c - a - b an exact integer and each node is non-degenerate.
    let h = DEGENERATE_GAP;
    let c0 = c - d;
    let nodes = [-2.0 * h, -h, h, 2.0 * h];
    let mut values = [0.0; 4];
    for (v, t) in values.iter_mut().zip(nodes) {
        *v = connection(a, b, c0 + t, z)?;
    }
    let mut out = 0.0;
    for i in 0..4 {
        let mut w = values[i];
        for j in 0..4 {
            if i != j {
                w *= (d - nodes[j]) / (nodes[i] - nodes[j]);
            }
        }
        out += w;
    }
    Ok(out)
}

fn connection(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    let s = c - a - b;
    let w = 1.0 - z;
    let ca = gamma_ratio(&[c, s], &[c - a, c - b])?;
    let cb = gamma_ratio(&[c, -s], &[a, b])?;
    let mut out = 0.0;
    if ca != 0.0 {
        out += ca * series(a, b, 1.0 - s, w)?;
    }
    if cb != 0.0 {
        out += cb * w.powf(s) * series(c - a, c - b, 1.0 + s, w)?;
    }
    Ok(out)
}

fn gauss_sum(a: f64, b: f64, c: f64) -> Result<f64> {
    let s = c - a - b;
    if s <= 0.0 {
        return Err(Error::Domain { what: "hyp2f1 at z = 1 (c - a - b <= 0)", at: 1.0 });
    }
    gamma_ratio(&[c, s], &[c - a, c - b])
}

/// `Π Γ(num) / Π Γ(den)`; zero if any denominator sits on a pole.
fn gamma_ratio(num: &[f64], den: &[f64]) -> Result<f64> {
    if den.iter().any(|&x| is_nonpositive_integer(x, 0.0)) {
        return Ok(0.0);
    }
    let mut ln = 0.0;
    let mut sign = 1.0;
    for &x in num {
        let (l, s) = ln_gamma(x)?;
        ln += l;
        sign *= s;
    }
    for &x in den {
        let (l, s) = ln_gamma(x)?;
        ln -= l;
        sign *= s;
    }
    Ok(sign * ln.exp())
}

fn series(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut small = 0;
    for n in 0..MAX_TERMS {
        let nf = n as f64;
        term *= (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * z;
        sum += term;
        if term == 0.0 {
            return Ok(sum);
        }
        if term.abs() < SERIES_TOL * sum.abs() {
            small += 1;
            if small >= 3 {
                return Ok(sum);
            }
        } else {
            small = 0;
        }
    }
    Err(Error::NonConvergence { what: "hyp2f1 series" })
}

fn check_finite(a: f64, b: f64, c: f64, z: f64) -> Result<()> {
    for (name, v) in [("a", a), ("b", b), ("c", c), ("z", z)] {
        if !v.is_finite() {
            return Err(Error::InvalidParameter { name, value: v, reason: "must be finite" });
        }
    }
    Ok(())
}

fn finite(v: f64, what: &'static str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonConvergence { what })
    }
}

fn is_nonpositive_integer(x: f64, tol: f64) -> bool {
    x <= tol && (x - x.round()).abs() <= tol
}

/// True when a or b is a non-positive integer `-k` with `k < m` for `c ≈ -m`,
/// so the polynomial ends before the zero denominator appears.
fn terminates_before_pole(a: f64, b: f64, c: f64) -> bool {
    let m = -c.round();
    [a, b].iter().any(|&p| is_nonpositive_integer(p, 0.0) && -p < m)
}
