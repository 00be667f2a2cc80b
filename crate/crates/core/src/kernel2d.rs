//! Tensor-product bivariate kernels and their discrete moments.
//!
//! All lattice sums are finite: for a base point `(u, v)` only the indices
//! in the 1-D support windows of each factor contribute, so the sums below
//! are exact up to rounding.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::kernel1d::Kernel1D;

/// Tolerance below which an algebraic moment counts as vanishing.
pub const VANISHING_TOL: f64 = 1e-9;
/// Spread below which a moment counts as independent of the base point.
pub const CONSTANCY_TOL: f64 = 1e-10;
/// Default resolution of the `[0,1)^2` base-point grid.
pub const DEFAULT_MOMENT_GRID: usize = 64;

/// `chi(x, y) = kx(x) * ky(y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorKernel2D {
    kx: Kernel1D,
    ky: Kernel1D,
}

impl TensorKernel2D {
    pub fn new(kx: Kernel1D, ky: Kernel1D) -> Self {
        Self { kx, ky }
    }

    /// The same 1-D kernel on both axes.
    pub fn symmetric(k: Kernel1D) -> Self {
        Self {
            kx: k.clone(),
            ky: k,
        }
    }

    /// The kernel `chi_3 (x) chi_3` built from shifts `(2, 3, 4)`.
    pub fn default_order3() -> Self {
        Self::symmetric(
            Kernel1D::combination(3, &[2.0, 3.0, 4.0]).expect("shifts (2,3,4) are well posed"),
        )
    }

    pub fn kx(&self) -> &Kernel1D {
        &self.kx
    }

    pub fn ky(&self) -> &Kernel1D {
        &self.ky
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.kx.eval(x) * self.ky.eval(y)
    }

    /// `(x_lo, x_hi, y_lo, y_hi)`
    pub fn support(&self) -> (f64, f64, f64, f64) {
        let (a, b) = self.kx.support();
        let (c, d) = self.ky.support();
        (a, b, c, d)
    }

    /// Largest distance from the origin to a support endpoint along either
    /// axis.
    pub fn reach(&self) -> f64 {
        let (a, b, c, d) = self.support();
        a.abs().max(b.abs()).max(c.abs()).max(d.abs())
    }

    pub fn describe(&self) -> String {
        if self.kx == self.ky {
            format!("{0}x{0}", self.kx.describe())
        } else {
            format!("{}x{}", self.kx.describe(), self.ky.describe())
        }
    }

    /// Calls `visit(dx, dy, chi(dx, dy))` for every lattice offset
    /// `(dx, dy) = (u - k, v - j)` in the support window.
    fn for_each_offset(&self, u: f64, v: f64, mut visit: impl FnMut(f64, f64, f64)) {
        for k in self.kx.window(u) {
            let dx = u - k as f64;
            let cx = self.kx.eval(dx);
            if cx == 0.0 {
                continue;
            }
            for j in self.ky.window(v) {
                let dy = v - j as f64;
                visit(dx, dy, cx * self.ky.eval(dy));
            }
        }
    }
}

/// `m_(p1,p2)(u, v) = sum_k sum_j chi(u-k, v-j) (u-k)^p1 (v-j)^p2`.
pub fn algebraic_moment(k: &TensorKernel2D, p1: u32, p2: u32, u: f64, v: f64) -> f64 {
    let mut sum = 0.0;
    k.for_each_offset(u, v, |dx, dy, c| {
        sum += c * dx.powi(p1 as i32) * dy.powi(p2 as i32);
    });
    sum
}

fn absolute_sum(k: &TensorKernel2D, p1: u32, p2: u32, u: f64, v: f64) -> f64 {
    let mut sum = 0.0;
    k.for_each_offset(u, v, |dx, dy, c| {
        sum += c.abs() * dx.abs().powi(p1 as i32) * dy.abs().powi(p2 as i32);
    });
    sum
}

fn unit_grid(grid_n: usize) -> impl Iterator<Item = (f64, f64)> + Clone {
    let n = grid_n;
    (0..n).flat_map(move |a| (0..n).map(move |b| (a as f64 / n as f64, b as f64 / n as f64)))
}

fn check_grid(grid_n: usize) -> Result<()> {
    if grid_n < 2 {
        return Err(Error::InvalidParameter(format!(
            "moment grid needs at least 2 points per axis, got {grid_n}"
        )));
    }
    Ok(())
}

/// Grid approximation of the absolute moment
/// `M_(p1,p2) = sup_(u,v) sum sum |chi(u-k, v-j)| |u-k|^p1 |v-j|^p2`.
///
/// The summand is 1-periodic in both arguments, so the sup is taken over a
/// `grid_n x grid_n` grid on `[0,1)^2`.
pub fn absolute_moment(k: &TensorKernel2D, p1: u32, p2: u32, grid_n: usize) -> Result<f64> {
    check_grid(grid_n)?;
    Ok(unit_grid(grid_n)
        .map(|(u, v)| absolute_sum(k, p1, p2, u, v))
        .fold(0.0, f64::max))
}

/// `M_eta(chi) = max_{p1 + p2 = eta} M_(p1,p2)(chi)`.
pub fn max_moment(k: &TensorKernel2D, eta: u32, grid_n: usize) -> Result<f64> {
    (0..=eta)
        .map(|p1| absolute_moment(k, p1, eta - p1, grid_n))
        .try_fold(0.0f64, |acc, m| m.map(|m| acc.max(m)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constancy {
    pub constant: bool,
    pub value: f64,
    pub spread: f64,
}

/// Checks whether `m_(p1,p2)(u, v)` is independent of the base point.
pub fn moment_constancy_check(
    k: &TensorKernel2D,
    p1: u32,
    p2: u32,
    grid_n: usize,
) -> Result<Constancy> {
    check_grid(grid_n)?;
    let stats = Stats::collect(unit_grid(grid_n).map(|(u, v)| algebraic_moment(k, p1, p2, u, v)));
    Ok(Constancy {
        constant: stats.spread() <= CONSTANCY_TOL,
        value: stats.mean(),
        spread: stats.spread(),
    })
}

/// Max over the grid of `|m_(0,0) - 1|`.
pub fn partition_of_unity_check(k: &TensorKernel2D, grid_n: usize) -> Result<f64> {
    check_grid(grid_n)?;
    Ok(unit_grid(grid_n)
        .map(|(u, v)| (algebraic_moment(k, 0, 0, u, v) - 1.0).abs())
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy)]
struct Stats {
    min: f64,
    max: f64,
    sum: f64,
    max_abs: f64,
    count: usize,
}

impl Stats {
    fn collect(values: impl Iterator<Item = f64>) -> Self {
        let mut s = Stats {
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
            sum: 0.0,
            max_abs: 0.0,
            count: 0,
        };
        for v in values {
            s.push(v);
        }
        s
    }

    fn push(&mut self, v: f64) {
        self.min = self.min.min(v);
        self.max = self.max.max(v);
        self.max_abs = self.max_abs.max(v.abs());
        self.sum += v;
        self.count += 1;
    }

    fn mean(&self) -> f64 {
        self.sum / self.count as f64
    }

    fn spread(&self) -> f64 {
        self.max - self.min
    }
}

/// Grid summary of one moment index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentEntry {
    pub algebraic_mean: f64,
    pub algebraic_spread: f64,
    /// `max |m_(p1,p2)(u,v)|` over the grid.
    pub algebraic_max_abs: f64,
    pub absolute_sup: f64,
}

/// All moments of total order up to `eta_max`, summarised on a
/// `grid_n x grid_n` base-point grid.
#[derive(Debug, Clone)]
pub struct MomentTable {
    kernel: TensorKernel2D,
    eta_max: u32,
    grid_n: usize,
    entries: BTreeMap<(u32, u32), MomentEntry>,
}

impl MomentTable {
    pub fn compute(kernel: &TensorKernel2D, eta_max: u32, grid_n: usize) -> Result<Self> {
        check_grid(grid_n)?;
        let indices: Vec<(u32, u32)> = (0..=eta_max)
            .flat_map(|eta| (0..=eta).map(move |p1| (p1, eta - p1)))
            .collect();
        let mut alg: Vec<Stats> = vec![Stats::collect(std::iter::empty()); indices.len()];
        let mut abs_sup = vec![0.0f64; indices.len()];
        let mut alg_point = vec![0.0; indices.len()];
        let mut abs_point = vec![0.0; indices.len()];
        for (u, v) in unit_grid(grid_n) {
            alg_point.iter_mut().for_each(|s| *s = 0.0);
            abs_point.iter_mut().for_each(|s| *s = 0.0);
            kernel.for_each_offset(u, v, |dx, dy, c| {
                for (i, &(p1, p2)) in indices.iter().enumerate() {
                    let mono = dx.powi(p1 as i32) * dy.powi(p2 as i32);
                    alg_point[i] += c * mono;
                    abs_point[i] += c.abs() * mono.abs();
                }
            });
            for i in 0..indices.len() {
                alg[i].push(alg_point[i]);
                abs_sup[i] = abs_sup[i].max(abs_point[i]);
            }
        }
        let entries = indices
            .iter()
            .enumerate()
            .map(|(i, &p)| {
                (
                    p,
                    MomentEntry {
                        algebraic_mean: alg[i].mean(),
                        algebraic_spread: alg[i].spread(),
                        algebraic_max_abs: alg[i].max_abs,
                        absolute_sup: abs_sup[i],
                    },
                )
            })
            .collect();
        Ok(Self {
            kernel: kernel.clone(),
            eta_max,
            grid_n,
            entries,
        })
    }

    pub fn kernel(&self) -> &TensorKernel2D {
        &self.kernel
    }

    pub fn eta_max(&self) -> u32 {
        self.eta_max
    }

    pub fn grid_n(&self) -> usize {
        self.grid_n
    }

    pub fn entry(&self, p1: u32, p2: u32) -> Result<&MomentEntry> {
        self.entries
            .get(&(p1, p2))
            .ok_or(Error::MomentOrderOutOfRange((p1 + p2) as usize))
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(u32, u32), &MomentEntry)> {
        self.entries.iter()
    }

    /// `M^(p1+p2)_(p1,p2)(chi)`
    pub fn absolute(&self, p1: u32, p2: u32) -> Result<f64> {
        self.entry(p1, p2).map(|e| e.absolute_sup)
    }

    /// Mean of `m_(p1,p2)` over the grid; the moment's value when constant.
    pub fn algebraic(&self, p1: u32, p2: u32) -> Result<f64> {
        self.entry(p1, p2).map(|e| e.algebraic_mean)
    }

    /// `M_eta(chi)`
    pub fn max_by_order(&self, eta: u32) -> Result<f64> {
        (0..=eta)
            .map(|p1| self.absolute(p1, eta - p1))
            .try_fold(0.0f64, |acc, m| m.map(|m| acc.max(m)))
    }

    /// The order-`r` moment value entering the direct error estimate:
    /// `max_{|p| = r} max_(u,v) |m_p(u, v)|`. Equals `|c|` when the order-`r`
    /// moments are constant.
    pub fn moment_constant(&self, r: u32) -> Result<f64> {
        (0..=r)
            .map(|p1| self.entry(p1, r - p1).map(|e| e.algebraic_max_abs))
            .try_fold(0.0f64, |acc, m| m.map(|m| acc.max(m)))
    }

    /// Largest `r` such that every algebraic moment of total order
    /// `1..r-1` vanishes on the grid. A result of `eta_max + 1` means the
    /// table is too shallow to see the first non-vanishing order.
    pub fn moment_order(&self) -> u32 {
        let mut r = 1;
        while r <= self.eta_max {
            let vanishes = (0..=r).all(|p1| {
                let e = &self.entries[&(p1, r - p1)];
                e.algebraic_max_abs <= VANISHING_TOL
            });
            if !vanishes {
                break;
            }
            r += 1;
        }
        r
    }
}
