//! Model parameters from flags or a JSON file, and grid specifications.

use std::path::{Path, PathBuf};

use povtrap_core::capital_model::ModelParams;
use serde::Deserialize;

use crate::error::{AppError, Result};
use crate::output::Format;

/// Reference household: `a = 0.1, b = 4, c_S = 0.4` so `r = 1.44`.
pub const DEFAULT_MICRO: (f64, f64, f64) = (0.1, 4.0, 0.4);
/// Reference `λ`.
pub const DEFAULT_LAMBDA: f64 = 1.0;
/// Reference `α`.
pub const DEFAULT_ALPHA: f64 = 0.8;
/// Reference `x*`.
pub const DEFAULT_X_STAR: f64 = 1.0;
/// Reference `B`.
pub const DEFAULT_BARRIER: f64 = 2.0;
/// Reference `c_T`.
pub const DEFAULT_C_T: f64 = 0.25;

/// Model parameter flags. Unset values fall back to the reference household.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct ParamArgs {
    /// Capital growth rate (excludes --a, --b, --c-s).
    #[arg(long, allow_negative_numbers = true)]
    pub r: Option<f64>,
    /// Consumption share `a`.
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    /// Productivity `b`.
    #[arg(long, allow_negative_numbers = true)]
    pub b: Option<f64>,
    /// Savings rate `c_S`.
    #[arg(long = "c-s", allow_negative_numbers = true)]
    pub c_s: Option<f64>,
    /// Loss arrival rate.
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    /// Loss shape: retained fraction is Beta(alpha, 1).
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// Critical capital.
    #[arg(long = "xstar", allow_negative_numbers = true)]
    pub x_star: Option<f64>,
    /// Transfer barrier.
    #[arg(long, allow_negative_numbers = true)]
    pub barrier: Option<f64>,
    /// Transfer rate.
    #[arg(long = "ct", allow_negative_numbers = true)]
    pub c_t: Option<f64>,
}

/// Contents of a `--config` file: parameters plus command options. Keys are
/// the long flag names with `-` replaced by `_`.
#[allow(missing_docs)]
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub r: Option<f64>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub c_s: Option<f64>,
    pub lambda: Option<f64>,
    pub alpha: Option<f64>,
    pub x_star: Option<f64>,
    pub barrier: Option<f64>,
    pub c_t: Option<f64>,
    pub x: Option<f64>,
    pub x_grid: Option<String>,
    pub delta: Option<f64>,
    pub omega_const: Option<f64>,
    pub omega_exp: Option<f64>,
    pub trapping: Option<bool>,
    pub n: Option<u64>,
    pub seed: Option<u64>,
    pub horizon: Option<f64>,
    pub workers: Option<usize>,
    pub target: Option<f64>,
    pub kind: Option<String>,
    pub b_grid: Option<String>,
    pub ct_lo: Option<f64>,
    pub ct_hi: Option<f64>,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
}

impl ConfigFile {
    /// Parse JSON text.
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| AppError::usage(format!("config: {e}")))
    }

    /// Read and parse a file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| AppError::Io { path: path.to_owned(), source })?;
        Self::parse(&text).map_err(|e| AppError::usage(format!("{}: {e}", path.display())))
    }

    fn params(&self) -> ParamArgs {
        ParamArgs {
            r: self.r,
            a: self.a,
            b: self.b,
            c_s: self.c_s,
            lambda: self.lambda,
            alpha: self.alpha,
            x_star: self.x_star,
            barrier: self.barrier,
            c_t: self.c_t,
        }
    }
}

impl ParamArgs {
    fn given(&self) -> Vec<&'static str> {
        let all = [
            ("r", self.r),
            ("a", self.a),
            ("b", self.b),
            ("c_s", self.c_s),
            ("lambda", self.lambda),
            ("alpha", self.alpha),
            ("x_star", self.x_star),
            ("barrier", self.barrier),
            ("c_t", self.c_t),
        ];
        all.iter().filter(|(_, v)| v.is_some()).map(|(k, _)| *k).collect()
    }

    /// Build validated parameters.
    pub fn build(&self) -> Result<ModelParams> {
        let lambda = self.lambda.unwrap_or(DEFAULT_LAMBDA);
        let alpha = self.alpha.unwrap_or(DEFAULT_ALPHA);
        let x_star = self.x_star.unwrap_or(DEFAULT_X_STAR);
        let barrier = self.barrier.unwrap_or(DEFAULT_BARRIER);
        let c_t = self.c_t.unwrap_or(DEFAULT_C_T);
        let p = match self.r {
            Some(r) => {
                if self.a.is_some() || self.b.is_some() || self.c_s.is_some() {
                    return Err(AppError::usage("`r` cannot be combined with `a`, `b` or `c_s`"));
                }
                ModelParams::new(r, lambda, alpha, x_star, barrier, c_t)
            }
            None => {
                let (a, b, c_s) = DEFAULT_MICRO;
                let (a, b, c_s) = (self.a.unwrap_or(a), self.b.unwrap_or(b), self.c_s.unwrap_or(c_s));
                ModelParams::from_micro(a, b, c_s, lambda, alpha, x_star, barrier, c_t)
            }
        };
        Ok(p?)
    }
}

/// Resolve parameters from exactly one source: flags or a config file.
pub fn resolve_params(flags: &ParamArgs, file: Option<&ConfigFile>) -> Result<ModelParams> {
    match file {
        None => flags.build(),
        Some(cfg) => {
            if let Some(k) = flags.given().first() {
                return Err(AppError::usage(format!(
                    "parameter `{k}` given both on the command line and via --config; use one source"
                )));
            }
            cfg.params().build()
        }
    }
}

/// Points of `lo:hi:step`, both ends included.
pub fn parse_grid(spec: &str, name: &str) -> Result<Vec<f64>> {
    let bad = |why: &str| AppError::usage(format!("invalid `{name}` = {spec:?}: {why}"));
    let parts: Vec<f64> = spec
        .split(':')
        .map(|s| s.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| bad("expected lo:hi:step"))?;
    let [lo, hi, step] = parts[..] else {
        return Err(bad("expected lo:hi:step"));
    };
    if !(lo.is_finite() && hi.is_finite() && step.is_finite()) {
        return Err(bad("values must be finite"));
    }
    if !(step > 0.0) || hi < lo {
        return Err(bad("need step > 0 and hi >= lo"));
    }
    let count = ((hi - lo) / step + 1e-9).floor();
    if count > 1e6 {
        return Err(bad("more than a million points"));
    }
    Ok((0..=count as usize).map(|i| lo + step * i as f64).collect())
}
