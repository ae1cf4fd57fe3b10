//! Empirical loss distributions read from CSV.
//!
//! The file holds the quantile function of the retained fraction `Z` as two
//! columns `u,z`. `u` increases strictly from 0 to 1 and `z` is non-decreasing
//! in `(0, 1]`; values between knots are interpolated linearly.

use std::io::Read;
use std::path::Path;
use std::sync::Arc;

use povtrap_core::capital_model::LossDistribution;

use crate::error::{AppError, Result};

/// Piecewise linear quantile function.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantileTable {
    u: Vec<f64>,
    z: Vec<f64>,
}

impl QuantileTable {
    /// Validate knots.
    pub fn new(u: Vec<f64>, z: Vec<f64>) -> Result<Self> {
        let bad = |msg: String| Err(AppError::usage(format!("loss table: {msg}")));
        if u.len() != z.len() || u.len() < 2 {
            return bad("need at least two rows".into());
        }
        if u[0] != 0.0 || u[u.len() - 1] != 1.0 {
            return bad("u must start at 0 and end at 1".into());
        }
        for i in 0..u.len() {
            if !(z[i] > 0.0 && z[i] <= 1.0) {
                return bad(format!("row {}: z = {} outside (0, 1]", i + 1, z[i]));
            }
            if i > 0 && !(u[i] > u[i - 1]) {
                return bad(format!("row {}: u = {} is not increasing", i + 1, u[i]));
            }
            if i > 0 && z[i] < z[i - 1] {
                return bad(format!("row {}: z = {} decreases", i + 1, z[i]));
            }
        }
        Ok(Self { u, z })
    }

    /// Parse CSV with header `u,z`.
    pub fn from_reader(r: impl Read) -> Result<Self> {
        let mut rd = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
        let header = rd.headers().map_err(|e| AppError::usage(format!("loss table: {e}")))?;
        if header.len() != 2 || &header[0] != "u" || &header[1] != "z" {
            return Err(AppError::usage("loss table: header must be `u,z`"));
        }
        let (mut u, mut z) = (Vec::new(), Vec::new());
        for (i, rec) in rd.records().enumerate() {
            let rec = rec.map_err(|e| AppError::usage(format!("loss table: {e}")))?;
            let num = |j: usize| -> Result<f64> {
                rec.get(j)
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| AppError::usage(format!("loss table: row {}: expected two numbers", i + 1)))
            };
            u.push(num(0)?);
            z.push(num(1)?);
        }
        Self::new(u, z)
    }

    /// Read a table from disk.
    pub fn load(path: &Path) -> Result<Self> {
        let f = std::fs::File::open(path).map_err(|source| AppError::Io { path: path.to_owned(), source })?;
        Self::from_reader(f)
    }

    /// Quantile at `u` in `[0, 1]`.
    pub fn quantile(&self, u: f64) -> f64 {
        let k = self.u.partition_point(|&v| v <= u).clamp(1, self.u.len() - 1);
        let (u0, u1) = (self.u[k - 1], self.u[k]);
        let t = ((u - u0) / (u1 - u0)).clamp(0.0, 1.0);
        self.z[k - 1] + t * (self.z[k] - self.z[k - 1])
    }

    /// Wrap as a loss distribution for the simulator.
    pub fn into_distribution(self) -> LossDistribution {
        LossDistribution::Custom(Arc::new(move |u| self.quantile(u)))
    }
}
