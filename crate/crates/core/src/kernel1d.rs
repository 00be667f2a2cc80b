//! Univariate kernels: central B-splines and finite linear combinations of
//! shifted B-splines whose discrete moments satisfy a moment condition.

use crate::error::{Error, Result};
use crate::linalg;

/// Evaluates the central B-spline `M_n` at `t` with the truncated-power
/// formula
///
/// `M_n(t) = 1/(n-1)! * sum_{j=0}^{n-1} (-1)^j C(n,j) (n/2 + t - j)_+^{n-1}`.
///
/// The result is exactly zero outside `(-n/2, n/2)`. Order 1 is the box on
/// the half-open interval `[-1/2, 1/2)`, so integer translates sum to one
/// everywhere.
///
/// # Panics
///
/// Panics if `n == 0`.
pub fn bspline_eval(n: usize, t: f64) -> f64 {
    assert!(n >= 1, "B-spline order must be at least 1");
    let half = n as f64 / 2.0;
    if n == 1 {
        return if (-half..half).contains(&t) { 1.0 } else { 0.0 };
    }
    if t <= -half || t >= half {
        return 0.0;
    }
    // Use the mirror image for t > 0 so fewer truncated powers are active.
    let t = -t.abs();
    let degree = (n - 1) as i32;
    let mut sum = 0.0;
    let mut binom = 1.0;
    for j in 0..n {
        let x = half + t - j as f64;
        if x <= 0.0 {
            break;
        }
        let term = binom * x.powi(degree);
        sum += if j % 2 == 0 { term } else { -term };
        binom = binom * (n - j) as f64 / (j + 1) as f64;
    }
    let factorial: f64 = (1..n).map(|k| k as f64).product();
    (sum / factorial).max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CentralBSpline {
    order: usize,
}

impl CentralBSpline {
    pub fn new(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidOrder(order));
        }
        Ok(Self { order })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn eval(&self, t: f64) -> f64 {
        bspline_eval(self.order, t)
    }

    pub fn support(&self) -> (f64, f64) {
        let half = self.order as f64 / 2.0;
        (-half, half)
    }
}

/// `chi(t) = sum_mu a_mu * M_r(t - eps_mu)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CombinationKernel {
    base_order: usize,
    shifts: Vec<f64>,
    coefficients: Vec<f64>,
}

impl CombinationKernel {
    /// Solves for the coefficients that make the discrete moments of the
    /// combination equal `delta_{eta,0}` for `eta = 0..r-1`.
    ///
    /// The moments of `M_r` itself are constant in the base point up to
    /// order `r - 1`, so imposing the conditions at `u = 0` fixes them for
    /// every `u`.
    pub fn construct(r: usize, shifts: &[f64]) -> Result<Self> {
        if r < 2 || shifts.len() != r {
            return Err(Error::InvalidCombination {
                r,
                shifts: shifts.len(),
            });
        }
        check_increasing(shifts)?;
        let half = r as f64 / 2.0;
        let mut matrix = vec![0.0; r * r];
        for (mu, &eps) in shifts.iter().enumerate() {
            // M_r(-k - eps) != 0  <=>  -eps - r/2 < k < -eps + r/2
            let k_lo = (-eps - half).ceil() as i64;
            let k_hi = (-eps + half).floor() as i64;
            for k in k_lo..=k_hi {
                let value = bspline_eval(r, -(k as f64) - eps);
                let offset = -(k as f64);
                for eta in 0..r {
                    matrix[eta * r + mu] += value * offset.powi(eta as i32);
                }
            }
        }
        let mut rhs = vec![0.0; r];
        rhs[0] = 1.0;
        let coefficients = linalg::solve(&matrix, r, &rhs)?;
        Ok(Self {
            base_order: r,
            shifts: shifts.to_vec(),
            coefficients,
        })
    }

    /// Builds a combination from explicit coefficients without imposing any
    /// moment condition.
    pub fn from_parts(base_order: usize, shifts: &[f64], coefficients: &[f64]) -> Result<Self> {
        if base_order == 0 {
            return Err(Error::InvalidOrder(base_order));
        }
        if shifts.is_empty() || shifts.len() != coefficients.len() {
            return Err(Error::InvalidParameter(format!(
                "{} shifts but {} coefficients",
                shifts.len(),
                coefficients.len()
            )));
        }
        check_increasing(shifts)?;
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("non-finite coefficient".into()));
        }
        Ok(Self {
            base_order,
            shifts: shifts.to_vec(),
            coefficients: coefficients.to_vec(),
        })
    }

    pub fn base_order(&self) -> usize {
        self.base_order
    }

    pub fn shifts(&self) -> &[f64] {
        &self.shifts
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.shifts
            .iter()
            .zip(&self.coefficients)
            .map(|(&eps, &a)| a * bspline_eval(self.base_order, t - eps))
            .sum()
    }

    /// `[eps_0 - r/2, eps_{r-1} + r/2]`
    pub fn support(&self) -> (f64, f64) {
        let half = self.base_order as f64 / 2.0;
        (self.shifts[0] - half, self.shifts[self.shifts.len() - 1] + half)
    }
}

fn check_increasing(shifts: &[f64]) -> Result<()> {
    let ok = shifts.iter().all(|s| s.is_finite()) && shifts.windows(2).all(|p| p[0] < p[1]);
    if ok {
        Ok(())
    } else {
        Err(Error::ShiftsNotIncreasing(shifts.to_vec()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Kernel1D {
    BSpline(CentralBSpline),
    Combination(CombinationKernel),
}

impl Kernel1D {
    pub fn bspline(order: usize) -> Result<Self> {
        CentralBSpline::new(order).map(Kernel1D::BSpline)
    }

    pub fn combination(r: usize, shifts: &[f64]) -> Result<Self> {
        CombinationKernel::construct(r, shifts).map(Kernel1D::Combination)
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Kernel1D::BSpline(b) => b.eval(t),
            Kernel1D::Combination(c) => c.eval(t),
        }
    }

    /// Closed interval outside of which the kernel vanishes.
    pub fn support(&self) -> (f64, f64) {
        match self {
            Kernel1D::BSpline(b) => b.support(),
            Kernel1D::Combination(c) => c.support(),
        }
    }

    /// Integers `k` for which `kernel(u - k)` can be nonzero.
    pub fn window(&self, u: f64) -> std::ops::RangeInclusive<i64> {
        let (lo, hi) = self.support();
        ((u - hi).ceil() as i64)..=((u - lo).floor() as i64)
    }

    pub fn describe(&self) -> String {
        match self {
            Kernel1D::BSpline(b) => format!("M{}", b.order()),
            Kernel1D::Combination(c) => {
                let shifts: Vec<String> = c.shifts().iter().map(|s| s.to_string()).collect();
                format!("chi{}[{}]", c.base_order(), shifts.join(","))
            }
        }
    }
}
