//! Dense Gaussian elimination for the small boundary-condition systems.

use alloc::vec;
use alloc::vec::Vec;

/// Solve `A x = rhs` for a row-major `n × n` matrix with column equilibration
/// and partial pivoting. Returns the solution and an estimate of the 1-norm
/// condition number of the equilibrated matrix.
pub(crate) fn solve(a: &[Vec<f64>], rhs: &[f64]) -> Option<(Vec<f64>, f64)> {
    let n = rhs.len();
    let mut scale = vec![0.0; n];
    for j in 0..n {
        let m = (0..n).map(|i| a[i][j].abs()).fold(0.0, f64::max);
        if m == 0.0 || !m.is_finite() {
            return None;
        }
        scale[j] = m;
    }
    let m: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| a[i][j] / scale[j]).collect())
        .collect();
    let lu = Lu::new(&m)?;
    let y = lu.solve(rhs);
    let x = y.iter().zip(&scale).map(|(v, s)| v / s).collect();
    let norm = |mat: &[Vec<f64>]| {
        (0..n)
            .map(|j| (0..n).map(|i| mat[i][j].abs()).sum::<f64>())
            .fold(0.0, f64::max)
    };
    let mut inv = vec![vec![0.0; n]; n];
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        let col = lu.solve(&e);
        for i in 0..n {
            inv[i][j] = col[i];
        }
    }
    let cond = norm(&m) * norm(&inv);
    Some((x, cond))
}

struct Lu {
    m: Vec<Vec<f64>>,
    perm: Vec<usize>,
}

impl Lu {
    fn new(a: &[Vec<f64>]) -> Option<Self> {
        let n = a.len();
        let mut m: Vec<Vec<f64>> = a.to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let p = (k..n).max_by(|&i, &j| m[i][k].abs().total_cmp(&m[j][k].abs()))?;
            if m[p][k] == 0.0 || !m[p][k].is_finite() {
                return None;
            }
            m.swap(k, p);
            perm.swap(k, p);
            for i in k + 1..n {
                let f = m[i][k] / m[k][k];
                m[i][k] = f;
                for j in k + 1..n {
                    m[i][j] -= f * m[k][j];
                }
            }
        }
        Some(Self { m, perm })
    }

    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = rhs.len();
        let mut x: Vec<f64> = self.perm.iter().map(|&i| rhs[i]).collect();
        for i in 0..n {
            for j in 0..i {
                x[i] -= self.m[i][j] * x[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                x[i] -= self.m[i][j] * x[j];
            }
            x[i] /= self.m[i][i];
        }
        x
    }
}
