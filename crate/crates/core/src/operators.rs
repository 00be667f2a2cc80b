//! Generalized sampling series `G_w`, the Kantorovich series `S_w`, the
//! GBS operator `K_w`, and the representation-formula residual.
//!
//! All series are finite sums because the kernels are compactly supported.
//! Evaluation points are processed in parallel, each into its own output
//! slot, and every per-point sum runs over `k` ascending then `j`
//! ascending, so results do not depend on the thread count.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::functions::{Rect, TestFunction};
use crate::kernel2d::TensorKernel2D;
use crate::quadrature::GaussLegendre;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    /// `f(k/w, j/w)`
    Samples,
    /// `w^2 * integral of f over [k/w,(k+1)/w] x [j/w,(j+1)/w]`
    CellAverages,
}

impl FieldKind {
    pub fn label(&self) -> &'static str {
        match self {
            FieldKind::Samples => "samples",
            FieldKind::CellAverages => "cell_averages",
        }
    }
}

/// Finite family of lattice data indexed by `(k, j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    w: f64,
    kind: FieldKind,
    kmin: i64,
    kmax: i64,
    jmin: i64,
    jmax: i64,
    values: Vec<Option<f64>>,
}

impl GridField {
    /// An empty field; every index inside the bounds starts out missing.
    pub fn new(w: f64, kind: FieldKind, bounds: (i64, i64, i64, i64)) -> Result<Self> {
        let (kmin, kmax, jmin, jmax) = bounds;
        if !(w.is_finite() && w > 0.0) {
            return Err(Error::InvalidParameter(format!("w must be positive, got {w}")));
        }
        if kmin > kmax || jmin > jmax {
            return Err(Error::InvalidParameter(format!(
                "empty index bounds {bounds:?}"
            )));
        }
        let len = ((kmax - kmin + 1) * (jmax - jmin + 1)) as usize;
        Ok(Self {
            w,
            kind,
            kmin,
            kmax,
            jmin,
            jmax,
            values: vec![None; len],
        })
    }

    /// Samples `f(k/w, j/w)` over the bounds.
    pub fn samples_of(
        f: impl Fn(f64, f64) -> f64,
        w: f64,
        bounds: (i64, i64, i64, i64),
    ) -> Result<Self> {
        let mut g = Self::new(w, FieldKind::Samples, bounds)?;
        for k in g.kmin..=g.kmax {
            for j in g.jmin..=g.jmax {
                g.set(k, j, f(k as f64 / w, j as f64 / w))?;
            }
        }
        Ok(g)
    }

    /// Cell averages of `f` over the bounds, computed with the same rule
    /// [`apply_sw`] uses for analytic sources.
    pub fn cell_averages_of(
        f: impl Fn(f64, f64) -> f64,
        w: f64,
        bounds: (i64, i64, i64, i64),
        quad_order: usize,
    ) -> Result<Self> {
        let rule = rule(quad_order)?;
        let mut g = Self::new(w, FieldKind::CellAverages, bounds)?;
        for k in g.kmin..=g.kmax {
            for j in g.jmin..=g.jmax {
                g.set(k, j, cell_average_with(&rule, &f, k, j, w))?;
            }
        }
        Ok(g)
    }

    fn slot(&self, k: i64, j: i64) -> Option<usize> {
        if k < self.kmin || k > self.kmax || j < self.jmin || j > self.jmax {
            return None;
        }
        Some(((k - self.kmin) * (self.jmax - self.jmin + 1) + (j - self.jmin)) as usize)
    }

    pub fn set(&mut self, k: i64, j: i64, value: f64) -> Result<()> {
        let slot = self.slot(k, j).ok_or_else(|| {
            Error::InvalidParameter(format!("index ({k}, {j}) outside field bounds"))
        })?;
        self.values[slot] = Some(value);
        Ok(())
    }

    pub fn get(&self, k: i64, j: i64) -> Result<f64> {
        self.slot(k, j)
            .and_then(|s| self.values[s])
            .ok_or(Error::MissingData { k, j })
    }

    pub fn w(&self) -> f64 {
        self.w
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn bounds(&self) -> (i64, i64, i64, i64) {
        (self.kmin, self.kmax, self.jmin, self.jmax)
    }

    /// Rescales the lattice spacing; the stored values are unchanged.
    pub fn with_rate(mut self, w: f64) -> Result<Self> {
        if !(w.is_finite() && w > 0.0) {
            return Err(Error::InvalidParameter(format!("w must be positive, got {w}")));
        }
        self.w = w;
        Ok(self)
    }

    /// Largest rectangle of evaluation points whose kernel windows stay
    /// inside the index bounds. `None` when the data is too small.
    pub fn admissible_rect(&self, kernel: &TensorKernel2D) -> Option<Rect> {
        let (xlo, xhi, ylo, yhi) = kernel.support();
        // k in [w x - hi, w x - lo] must lie in [kmin, kmax]
        let x0 = (self.kmin as f64 + xhi) / self.w;
        let x1 = (self.kmax as f64 + xlo) / self.w;
        let y0 = (self.jmin as f64 + yhi) / self.w;
        let y1 = (self.jmax as f64 + ylo) / self.w;
        Rect::new(x0, y0, x1, y1).ok()
    }
}

/// Where an operator reads its lattice data from.
#[derive(Debug, Clone, Copy)]
pub enum SourceField<'a> {
    Analytic(&'a TestFunction),
    Grid(&'a GridField),
}

/// Evaluation points together with the sampling rate `w`.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalGrid {
    pub points: Vec<(f64, f64)>,
    pub w: f64,
}

impl EvalGrid {
    pub fn new(points: Vec<(f64, f64)>, w: f64) -> Result<Self> {
        if !(w.is_finite() && w > 0.0) {
            return Err(Error::InvalidParameter(format!("w must be positive, got {w}")));
        }
        Ok(Self { points, w })
    }

    /// Row-major `n x n` grid over `rect`.
    pub fn on_rect(rect: &Rect, n: usize, w: f64) -> Result<Self> {
        Self::new(rect.grid(n), w)
    }
}

fn rule(quad_order: usize) -> Result<GaussLegendre> {
    if quad_order == 0 {
        return Err(Error::InvalidParameter("quadrature order must be >= 1".into()));
    }
    Ok(GaussLegendre::new(quad_order))
}

fn cell_average_with(
    rule: &GaussLegendre,
    f: impl Fn(f64, f64) -> f64,
    k: i64,
    j: i64,
    w: f64,
) -> f64 {
    rule.average2(k as f64 / w, j as f64 / w, 1.0 / w, f)
}

/// Tensor Gauss-Legendre approximation of the cell average
/// `w^2 * int_{k/w}^{(k+1)/w} int_{j/w}^{(j+1)/w} f(u,v) du dv`.
pub fn cell_average(
    f: impl Fn(f64, f64) -> f64,
    k: i64,
    j: i64,
    w: f64,
    quad_order: usize,
) -> Result<f64> {
    Ok(cell_average_with(&rule(quad_order)?, f, k, j, w))
}

/// `sum_k sum_j chi(w x - k, w y - j) * value(k, j)` over the support
/// window. Indices with zero kernel weight are not read.
pub fn lattice_sum(
    kernel: &TensorKernel2D,
    w: f64,
    (x, y): (f64, f64),
    mut value: impl FnMut(i64, i64) -> Result<f64>,
) -> Result<f64> {
    let (u, v) = (w * x, w * y);
    let mut sum = 0.0;
    for k in kernel.kx().window(u) {
        let cx = kernel.kx().eval(u - k as f64);
        if cx == 0.0 {
            continue;
        }
        for j in kernel.ky().window(v) {
            let cy = kernel.ky().eval(v - j as f64);
            if cy == 0.0 {
                continue;
            }
            sum += cx * cy * value(k, j)?;
        }
    }
    Ok(sum)
}

fn map_points(
    points: &[(f64, f64)],
    eval: impl Fn((f64, f64)) -> Result<f64> + Sync,
) -> Result<Vec<f64>> {
    let results: Vec<Result<f64>> = points.par_iter().map(|&p| eval(p)).collect();
    results.into_iter().collect()
}

fn check_field(field: &GridField, expected: FieldKind, grid: &EvalGrid) -> Result<()> {
    if field.kind() != expected {
        return Err(Error::WrongFieldKind {
            expected: expected.label(),
            found: field.kind().label(),
        });
    }
    if field.w() != grid.w {
        return Err(Error::RateMismatch {
            field: field.w(),
            grid: grid.w,
        });
    }
    Ok(())
}

/// `G_w` applied to an arbitrary function.
pub fn apply_gw_fn(
    f: impl Fn(f64, f64) -> f64 + Sync,
    kernel: &TensorKernel2D,
    grid: &EvalGrid,
) -> Result<Vec<f64>> {
    let w = grid.w;
    map_points(&grid.points, |p| {
        lattice_sum(kernel, w, p, |k, j| Ok(f(k as f64 / w, j as f64 / w)))
    })
}

/// `(G_w f)(x, y) = sum sum chi(w x - k, w y - j) f(k/w, j/w)`.
pub fn apply_gw(
    field: SourceField<'_>,
    kernel: &TensorKernel2D,
    grid: &EvalGrid,
) -> Result<Vec<f64>> {
    match field {
        SourceField::Analytic(f) => apply_gw_fn(|x, y| f.eval(x, y), kernel, grid),
        SourceField::Grid(g) => {
            check_field(g, FieldKind::Samples, grid)?;
            map_points(&grid.points, |p| lattice_sum(kernel, grid.w, p, |k, j| g.get(k, j)))
        }
    }
}

/// `S_w` applied to an arbitrary function, cell averages computed on demand.
pub fn apply_sw_fn(
    f: impl Fn(f64, f64) -> f64 + Sync,
    kernel: &TensorKernel2D,
    grid: &EvalGrid,
    quad_order: usize,
) -> Result<Vec<f64>> {
    let rule = rule(quad_order)?;
    let w = grid.w;
    map_points(&grid.points, |p| {
        lattice_sum(kernel, w, p, |k, j| Ok(cell_average_with(&rule, &f, k, j, w)))
    })
}

/// `(S_w f)(x, y) = sum sum chi(w x - k, w y - j) * (cell average of f)`.
pub fn apply_sw(
    field: SourceField<'_>,
    kernel: &TensorKernel2D,
    grid: &EvalGrid,
    quad_order: usize,
) -> Result<Vec<f64>> {
    match field {
        SourceField::Analytic(f) => apply_sw_fn(|x, y| f.eval(x, y), kernel, grid, quad_order),
        SourceField::Grid(g) => {
            check_field(g, FieldKind::CellAverages, grid)?;
            map_points(&grid.points, |p| lattice_sum(kernel, grid.w, p, |k, j| g.get(k, j)))
        }
    }
}

/// `S_w` of an integrand that depends on the evaluation point, e.g.
/// `(u, v) -> (u - x)^2`. The closure receives `(x, y, u, v)`.
pub fn kantorovich_local(
    kernel: &TensorKernel2D,
    w: f64,
    point: (f64, f64),
    quad_order: usize,
    integrand: impl Fn(f64, f64, f64, f64) -> f64,
) -> Result<f64> {
    let rule = rule(quad_order)?;
    let (x, y) = point;
    lattice_sum(kernel, w, point, |k, j| {
        Ok(cell_average_with(&rule, |u, v| integrand(x, y, u, v), k, j, w))
    })
}

/// GBS operator `K_w f = S_w(f(x, v) + f(u, y) - f(u, v))`.
///
/// Per cell, the two single-variable terms are averaged with the 1-D rule
/// and the full term with the tensor rule.
pub fn apply_gbs_fn(
    f: impl Fn(f64, f64) -> f64 + Sync,
    kernel: &TensorKernel2D,
    grid: &EvalGrid,
    quad_order: usize,
) -> Result<Vec<f64>> {
    let rule = rule(quad_order)?;
    let w = grid.w;
    let h = 1.0 / w;
    map_points(&grid.points, |(x, y)| {
        lattice_sum(kernel, w, (x, y), |k, j| {
            let (a, b) = (k as f64 / w, j as f64 / w);
            let along_v = rule.average(b, h, |v| f(x, v));
            let along_u = rule.average(a, h, |u| f(u, y));
            let full = rule.average2(a, b, h, &f);
            Ok(along_v + along_u - full)
        })
    })
}

pub fn apply_gbs(
    f: &TestFunction,
    kernel: &TensorKernel2D,
    grid: &EvalGrid,
    quad_order: usize,
) -> Result<Vec<f64>> {
    apply_gbs_fn(|x, y| f.eval(x, y), kernel, grid, quad_order)
}

/// `S_w f - G_w f - (1/2w) (G_w f_x + G_w f_y)` at each point.
pub fn representation_residual(
    f: &TestFunction,
    kernel: &TensorKernel2D,
    grid: &EvalGrid,
    quad_order: usize,
) -> Result<Vec<f64>> {
    let fx = f.partial_fn(1, 0)?;
    let fy = f.partial_fn(0, 1)?;
    let s = apply_sw(SourceField::Analytic(f), kernel, grid, quad_order)?;
    let g = apply_gw(SourceField::Analytic(f), kernel, grid)?;
    let gx = apply_gw_fn(fx, kernel, grid)?;
    let gy = apply_gw_fn(fy, kernel, grid)?;
    let half_step = 0.5 / grid.w;
    Ok((0..s.len())
        .map(|i| s[i] - g[i] - half_step * gx[i] - half_step * gy[i])
        .collect())
}
