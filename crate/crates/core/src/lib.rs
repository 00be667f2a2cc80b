//! Reconstruction of bivariate functions from lattice samples or cell
//! averages with generalized and Kantorovich-type sampling series, plus
//! evaluators for their error bounds.
//!
//! The usual entry points are [`kernel2d::TensorKernel2D`] for the kernel,
//! [`operators`] for `G_w`, `S_w` and the GBS operator, and [`analysis`]
//! for bound constants and convergence studies.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod functions;
pub mod io;
pub mod kernel1d;
pub mod kernel2d;
pub mod linalg;
pub mod operators;
pub mod quadrature;

pub use error::{Error, Result};
pub use functions::{fn_lookup, Rect, TestFunction};
pub use kernel1d::{CentralBSpline, CombinationKernel, Kernel1D};
pub use kernel2d::{MomentTable, TensorKernel2D};
pub use operators::{EvalGrid, FieldKind, GridField, SourceField};
