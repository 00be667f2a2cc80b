//! Convergence-rate tables, the inverse-result probe and polynomial
//! reproduction checks.

use crate::error::{Error, Result};
use crate::functions::{Rect, TestFunction};
use crate::io::{csv_string, fmt_f64};
use crate::kernel2d::TensorKernel2D;
use crate::linalg::least_squares;
use crate::operators::{apply_gbs_fn, apply_gw_fn, apply_sw_fn, EvalGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Operator {
    Gw,
    Sw,
    Gbs,
}

impl Operator {
    pub fn label(&self) -> &'static str {
        match self {
            Operator::Gw => "gw",
            Operator::Sw => "sw",
            Operator::Gbs => "gbs",
        }
    }

    /// Applies the operator to `f` at every grid point.
    pub fn apply(
        &self,
        f: impl Fn(f64, f64) -> f64 + Sync,
        kernel: &TensorKernel2D,
        grid: &EvalGrid,
        quad_order: usize,
    ) -> Result<Vec<f64>> {
        match self {
            Operator::Gw => apply_gw_fn(f, kernel, grid),
            Operator::Sw => apply_sw_fn(f, kernel, grid, quad_order),
            Operator::Gbs => apply_gbs_fn(f, kernel, grid, quad_order),
        }
    }
}

/// `max_i |approx_i - exact_i|`
pub fn sup_error(approx: &[f64], exact: &[f64]) -> f64 {
    approx
        .iter()
        .zip(exact)
        .fold(0.0, |m, (a, e)| m.max((a - e).abs()))
}

/// Sup errors per rate and the least-squares slope of `log err` on `log w`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub rows: Vec<(f64, f64)>,
    pub fitted_slope: f64,
    /// RMS residual of the log-log fit.
    pub fit_residual: f64,
}

impl ConvergenceTable {
    /// Builds the table and fits every row. A zero error yields a slope of
    /// `-inf` or `NaN`, which is reported as is.
    pub fn from_rows(rows: Vec<(f64, f64)>) -> Result<Self> {
        if rows.len() < 3 {
            return Err(Error::InvalidParameter(format!(
                "need at least 3 rates, got {}",
                rows.len()
            )));
        }
        if rows.windows(2).any(|p| !(p[1].0 > p[0].0)) || rows[0].0 <= 0.0 {
            return Err(Error::InvalidParameter(
                "rates must be positive and strictly increasing".into(),
            ));
        }
        let xs: Vec<f64> = rows.iter().map(|r| r.0.ln()).collect();
        let ys: Vec<f64> = rows.iter().map(|r| r.1.ln()).collect();
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        let slope = sxy / sxx;
        let icpt = my - slope * mx;
        let rss: f64 = xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| (y - icpt - slope * x).powi(2))
            .sum();
        Ok(Self {
            rows,
            fitted_slope: slope,
            fit_residual: (rss / n).sqrt(),
        })
    }

    /// `w * sup_error` per row.
    pub fn scaled_errors(&self) -> Vec<f64> {
        self.rows.iter().map(|(w, e)| w * e).collect()
    }

    /// `w,sup_error` rows followed by `slope,<value>`.
    pub fn to_csv(&self) -> Result<String> {
        let mut rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|(w, e)| vec![fmt_f64(*w), fmt_f64(*e)])
            .collect();
        rows.push(vec!["slope".into(), fmt_f64(self.fitted_slope)]);
        csv_string(&["w", "sup_error"], &rows)
    }
}

fn study_fn(
    f: impl Fn(f64, f64) -> f64 + Sync,
    kernel: &TensorKernel2D,
    op: Operator,
    w_list: &[f64],
    rect: &Rect,
    grid_n: usize,
    quad_order: usize,
) -> Result<ConvergenceTable> {
    if w_list.len() < 3 {
        return Err(Error::InvalidParameter(format!(
            "need at least 3 rates, got {}",
            w_list.len()
        )));
    }
    let mut rows = Vec::with_capacity(w_list.len());
    for &w in w_list {
        let grid = EvalGrid::on_rect(rect, grid_n, w)?;
        let approx = op.apply(&f, kernel, &grid, quad_order)?;
        let exact: Vec<f64> = grid.points.iter().map(|&(x, y)| f(x, y)).collect();
        rows.push((w, sup_error(&approx, &exact)));
    }
    ConvergenceTable::from_rows(rows)
}

/// Sup error of `op` applied to `f` on a `grid_n x grid_n` grid over
/// `rect`, for each rate in `w_list`.
pub fn convergence_study(
    f: &TestFunction,
    kernel: &TensorKernel2D,
    op: Operator,
    w_list: &[f64],
    rect: &Rect,
    grid_n: usize,
    quad_order: usize,
) -> Result<ConvergenceTable> {
    study_fn(|x, y| f.eval(x, y), kernel, op, w_list, rect, grid_n, quad_order)
}

#[derive(Debug, Clone, PartialEq)]
pub struct InverseProbe {
    pub table: ConvergenceTable,
    pub scaled_errors: Vec<f64>,
    pub strictly_decreasing: bool,
}

/// `S_w` convergence for `f(x, y) = g(y - x)`. Such functions satisfy
/// `f_x + f_y = 0`, so the first-order term of `S_w f - f` cancels and
/// `w * error` should decay.
pub fn inverse_result_probe(
    g: impl Fn(f64) -> f64 + Sync,
    kernel: &TensorKernel2D,
    w_list: &[f64],
    rect: &Rect,
    grid_n: usize,
    quad_order: usize,
) -> Result<InverseProbe> {
    let table = study_fn(
        |x, y| g(y - x),
        kernel,
        Operator::Sw,
        w_list,
        rect,
        grid_n,
        quad_order,
    )?;
    let scaled_errors = table.scaled_errors();
    let strictly_decreasing = scaled_errors.windows(2).all(|p| p[1] < p[0]);
    Ok(InverseProbe {
        table,
        scaled_errors,
        strictly_decreasing,
    })
}

/// Least-squares polynomial of total degree `degree` in two variables.
/// Coordinates are centered and scaled to `[-1, 1]` before fitting.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyFit {
    pub degree: usize,
    /// Coefficients of `s^a t^b` for `a + b <= degree`, ordered by total
    /// degree then by descending `a`.
    pub coefficients: Vec<f64>,
    pub max_residual: f64,
    center: (f64, f64),
    scale: (f64, f64),
}

fn monomial_exponents(degree: usize) -> Vec<(i32, i32)> {
    (0..=degree as i32)
        .flat_map(|t| (0..=t).rev().map(move |a| (a, t - a)))
        .collect()
}

impl PolyFit {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let s = (x - self.center.0) / self.scale.0;
        let t = (y - self.center.1) / self.scale.1;
        monomial_exponents(self.degree)
            .iter()
            .zip(&self.coefficients)
            .map(|(&(a, b), c)| c * s.powi(a) * t.powi(b))
            .sum()
    }
}

pub fn polynomial_fit(points: &[(f64, f64)], values: &[f64], degree: usize) -> Result<PolyFit> {
    if points.len() != values.len() || points.is_empty() {
        return Err(Error::InvalidParameter(
            "points and values must be nonempty and of equal length".into(),
        ));
    }
    let (mut xlo, mut xhi, mut ylo, mut yhi) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for &(x, y) in points {
        (xlo, xhi, ylo, yhi) = (xlo.min(x), xhi.max(x), ylo.min(y), yhi.max(y));
    }
    let center = ((xlo + xhi) / 2.0, (ylo + yhi) / 2.0);
    let scale = (((xhi - xlo) / 2.0).max(1e-300), ((yhi - ylo) / 2.0).max(1e-300));
    let exps = monomial_exponents(degree);
    let rows: Vec<Vec<f64>> = points
        .iter()
        .map(|&(x, y)| {
            let s = (x - center.0) / scale.0;
            let t = (y - center.1) / scale.1;
            exps.iter().map(|&(a, b)| s.powi(a) * t.powi(b)).collect()
        })
        .collect();
    let coefficients = least_squares(&rows, values)?;
    let mut fit = PolyFit {
        degree,
        coefficients,
        max_residual: 0.0,
        center,
        scale,
    };
    fit.max_residual = points
        .iter()
        .zip(values)
        .fold(0.0, |m, (&(x, y), v)| m.max((fit.eval(x, y) - v).abs()));
    Ok(fit)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReproductionMode {
    /// `max |G_w p - p|`
    Gw,
    /// Max residual of a same-degree polynomial fit to `S_w p`.
    Sw,
}

/// Worst case over all monomials `x^a y^b` with `a + b <= r - 1`.
pub fn polynomial_reproduction_check(
    kernel: &TensorKernel2D,
    r: usize,
    w: f64,
    rect: &Rect,
    grid_n: usize,
    mode: ReproductionMode,
    quad_order: usize,
) -> Result<f64> {
    if r == 0 {
        return Err(Error::InvalidOrder(0));
    }
    let degree = r - 1;
    let grid = EvalGrid::on_rect(rect, grid_n, w)?;
    let mut worst: f64 = 0.0;
    for (a, b) in monomial_exponents(degree) {
        let p = move |x: f64, y: f64| x.powi(a) * y.powi(b);
        let err = match mode {
            ReproductionMode::Gw => {
                let g = apply_gw_fn(p, kernel, &grid)?;
                let exact: Vec<f64> = grid.points.iter().map(|&(x, y)| p(x, y)).collect();
                sup_error(&g, &exact)
            }
            ReproductionMode::Sw => {
                let s = apply_sw_fn(p, kernel, &grid, quad_order)?;
                polynomial_fit(&grid.points, &s, degree)?.max_residual
            }
        };
        worst = worst.max(err);
    }
    Ok(worst)
}
