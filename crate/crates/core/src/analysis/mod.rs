//! Error-bound constants, smoothness estimators and convergence studies.

mod bounds;
mod convergence;
mod smoothness;

use std::collections::BTreeMap;

pub use bounds::{
    audit, direct_error_bound, gbs_differential_bound, gbs_modulus_bound,
    kfunctional_constants, modulus_constants, differential_constants, remainder_bound,
    AuditConfig, BoundReport, DifferentialConstants, KFunctionalConstants, ModulusConstants,
};
pub use convergence::{
    convergence_study, inverse_result_probe, polynomial_fit, polynomial_reproduction_check,
    sup_error, ConvergenceTable, InverseProbe, Operator, PolyFit, ReproductionMode,
};
pub use smoothness::{b_differential_estimate, mixed_modulus_estimate};

use crate::error::{Error, Result};
use crate::functions::{order_supported, sup_norm_estimate, Rect, TestFunction};

/// Grid resolution used for sup-norm estimates in profiles.
pub const SUP_NORM_GRID: usize = 101;

/// Sup norms of partial derivatives of a function over a box.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionProfile {
    rect: Rect,
    sup_norms: BTreeMap<(usize, usize), f64>,
}

impl FunctionProfile {
    /// Estimates every catalog partial of total order `1..=max_order`.
    pub fn estimate(f: &TestFunction, rect: &Rect, max_order: usize, grid_n: usize) -> Result<Self> {
        let mut sup_norms = BTreeMap::new();
        for total in 1..=max_order {
            for i in 0..=total {
                let j = total - i;
                if order_supported(i, j) {
                    sup_norms.insert((i, j), sup_norm_estimate(f, (i, j), rect, grid_n)?);
                }
            }
        }
        Ok(Self {
            rect: *rect,
            sup_norms,
        })
    }

    /// Profile from known sup norms, e.g. closed-form values.
    pub fn from_norms(rect: Rect, norms: impl IntoIterator<Item = ((usize, usize), f64)>) -> Result<Self> {
        let sup_norms: BTreeMap<_, _> = norms.into_iter().collect();
        if sup_norms.values().any(|v| !(*v >= 0.0)) {
            return Err(Error::InvalidParameter("sup norms must be nonnegative".into()));
        }
        Ok(Self { rect, sup_norms })
    }

    pub fn rect(&self) -> &Rect {
        &self.rect
    }

    pub fn sup(&self, i: usize, j: usize) -> Result<f64> {
        self.sup_norms
            .get(&(i, j))
            .copied()
            .ok_or(Error::MissingProfileEntry(i, j))
    }

    /// `A_r = ||d^r f / dx^r||`, with `A_0 = 1`.
    pub fn a(&self, r: usize) -> Result<f64> {
        if r == 0 {
            Ok(1.0)
        } else {
            self.sup(r, 0)
        }
    }

    /// `B_r = ||d^r f / dy^r||`, with `B_0 = 1`.
    pub fn b(&self, r: usize) -> Result<f64> {
        if r == 0 {
            Ok(1.0)
        } else {
            self.sup(0, r)
        }
    }

    /// `M = max(||f_xx||, ||f_xy||, ||f_yy||)`
    pub fn second_order_max(&self) -> Result<f64> {
        Ok(self.sup(2, 0)?.max(self.sup(1, 1)?).max(self.sup(0, 2)?))
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize), &f64)> {
        self.sup_norms.iter()
    }
}
