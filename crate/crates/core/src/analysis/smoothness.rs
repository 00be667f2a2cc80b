//! Grid estimates of the mixed modulus of smoothness and the B-differential.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::functions::Rect;

/// Mixed difference `f(x+h1, y+h2) - f(x+h1, y) - f(x, y+h2) + f(x, y)`.
fn mixed_difference(f: &impl Fn(f64, f64) -> f64, x: f64, y: f64, h1: f64, h2: f64) -> f64 {
    f(x + h1, y + h2) - f(x + h1, y) - f(x, y + h2) + f(x, y)
}

/// Estimates `omega_B(f; d1, d2)`, the sup of the mixed difference over
/// `|h1| <= d1`, `|h2| <= d2` with all four points inside `rect`.
///
/// Both the base point and the offset point run over the same
/// `grid_n x grid_n` node set, so increments are node spacings up to
/// `floor(d / step)`. A larger `d` only adds pairs, which keeps the estimate
/// monotone in each argument.
pub fn mixed_modulus_estimate(
    f: impl Fn(f64, f64) -> f64 + Sync,
    delta1: f64,
    delta2: f64,
    rect: &Rect,
    grid_n: usize,
) -> Result<f64> {
    if !(delta1 >= 0.0 && delta2 >= 0.0) {
        return Err(Error::InvalidParameter("deltas must be nonnegative".into()));
    }
    if grid_n < 2 {
        return Err(Error::InvalidParameter("grid_n must be at least 2".into()));
    }
    let xs = Rect::axis(rect.x0, rect.x1, grid_n);
    let ys = Rect::axis(rect.y0, rect.y1, grid_n);
    let sx = (rect.x1 - rect.x0) / (grid_n - 1) as f64;
    let sy = (rect.y1 - rect.y0) / (grid_n - 1) as f64;
    let reach = |d: f64, s: f64| -> usize {
        if s > 0.0 {
            ((d / s + 1e-9).floor() as usize).min(grid_n - 1)
        } else {
            0
        }
    };
    let (dx, dy) = (reach(delta1, sx), reach(delta2, sy));
    // values[j][i] = f(xs[i], ys[j])
    let values: Vec<Vec<f64>> = ys
        .par_iter()
        .map(|&y| xs.iter().map(|&x| f(x, y)).collect())
        .collect();
    let best = (0..grid_n)
        .into_par_iter()
        .map(|j| {
            let mut m: f64 = 0.0;
            for i in 0..grid_n {
                for a in 0..=dx.min(grid_n - 1 - i) {
                    for b in 0..=dy.min(grid_n - 1 - j) {
                        let d = values[j + b][i + a] - values[j][i + a] - values[j + b][i]
                            + values[j][i];
                        m = m.max(d.abs());
                    }
                }
            }
            m
        })
        .reduce(|| 0.0, f64::max);
    Ok(best)
}

/// `Delta_{h,h} f(x0, y0) / h^2`, which tends to `f_xy(x0, y0)` as `h -> 0`.
pub fn b_differential_estimate(f: impl Fn(f64, f64) -> f64, x0: f64, y0: f64, h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::InvalidParameter("h must be positive".into()));
    }
    Ok(mixed_difference(&f, x0, y0, h, h) / (h * h))
}
