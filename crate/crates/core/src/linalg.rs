//! Small dense linear algebra: LU with partial pivoting and a 1-norm
//! condition estimate. Systems here are at most a few dozen unknowns.

use crate::error::{Error, Result};

/// Condition estimates above this are treated as singular.
pub const SINGULAR_CONDITION: f64 = 1e12;

#[derive(Debug, Clone)]
pub struct Lu {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
    norm1: f64,
}

impl Lu {
    /// Factors the row-major `n x n` matrix `a`.
    pub fn factor(a: &[f64], n: usize) -> Result<Self> {
        assert_eq!(a.len(), n * n, "matrix must be n x n");
        let norm1 = (0..n)
            .map(|c| (0..n).map(|r| a[r * n + c].abs()).sum::<f64>())
            .fold(0.0, f64::max);
        let mut lu = a.to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&p, &q| lu[p * n + col].abs().total_cmp(&lu[q * n + col].abs()))
                .unwrap();
            if lu[pivot * n + col] == 0.0 || !lu[pivot * n + col].is_finite() {
                return Err(Error::SingularSystem {
                    condition: f64::INFINITY,
                });
            }
            if pivot != col {
                for c in 0..n {
                    lu.swap(pivot * n + c, col * n + c);
                }
                perm.swap(pivot, col);
            }
            let d = lu[col * n + col];
            for r in col + 1..n {
                let factor = lu[r * n + col] / d;
                lu[r * n + col] = factor;
                for c in col + 1..n {
                    lu[r * n + c] -= factor * lu[col * n + c];
                }
            }
        }
        Ok(Lu { n, lu, perm, norm1 })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for r in 0..n {
            for c in 0..r {
                x[r] -= self.lu[r * n + c] * x[c];
            }
        }
        for r in (0..n).rev() {
            for c in r + 1..n {
                x[r] -= self.lu[r * n + c] * x[c];
            }
            x[r] /= self.lu[r * n + r];
        }
        x
    }

    /// `||A||_1 * ||A^-1||_1`, with the inverse formed column by column.
    pub fn condition(&self) -> f64 {
        let n = self.n;
        let mut inv_norm: f64 = 0.0;
        let mut e = vec![0.0; n];
        for c in 0..n {
            e.iter_mut().for_each(|v| *v = 0.0);
            e[c] = 1.0;
            let col = self.solve(&e);
            inv_norm = inv_norm.max(col.iter().map(|v| v.abs()).sum());
        }
        self.norm1 * inv_norm
    }
}

/// Solves `a x = b`, rejecting systems whose condition estimate exceeds
/// [`SINGULAR_CONDITION`].
pub fn solve(a: &[f64], n: usize, b: &[f64]) -> Result<Vec<f64>> {
    let lu = Lu::factor(a, n)?;
    let condition = lu.condition();
    if !condition.is_finite() || condition > SINGULAR_CONDITION {
        return Err(Error::SingularSystem { condition });
    }
    Ok(lu.solve(b))
}

/// Ordinary least squares via the normal equations. `rows` are the design
/// matrix rows; callers keep the columns well scaled.
pub fn least_squares(rows: &[Vec<f64>], rhs: &[f64]) -> Result<Vec<f64>> {
    let p = rows.first().map_or(0, Vec::len);
    let mut ata = vec![0.0; p * p];
    let mut atb = vec![0.0; p];
    for (row, &y) in rows.iter().zip(rhs) {
        for a in 0..p {
            atb[a] += row[a] * y;
            for b in 0..p {
                ata[a * p + b] += row[a] * row[b];
            }
        }
    }
    solve(&ata, p, &atb)
}
