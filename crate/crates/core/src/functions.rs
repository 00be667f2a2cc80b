//! Catalog of bivariate test functions with closed-form partial derivatives.
//!
//! Every entry is built from univariate pieces (sums, products or ridge
//! functions `g(a x + b y)`), so partials of any supported order come out
//! in closed form.

use crate::error::{Error, Result};

/// Axis-aligned rectangle `[x0, x1] x [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self> {
        let ok = [x0, y0, x1, y1].iter().all(|v| v.is_finite()) && x0 <= x1 && y0 <= y1;
        if !ok {
            return Err(Error::InvalidParameter(format!(
                "box must satisfy x0 <= x1, y0 <= y1: ({x0}, {y0}, {x1}, {y1})"
            )));
        }
        Ok(Self { x0, y0, x1, y1 })
    }

    pub fn square(lo: f64, hi: f64) -> Self {
        Self {
            x0: lo,
            y0: lo,
            x1: hi,
            y1: hi,
        }
    }

    pub fn expand(&self, margin: f64) -> Self {
        Self {
            x0: self.x0 - margin,
            y0: self.y0 - margin,
            x1: self.x1 + margin,
            y1: self.y1 + margin,
        }
    }

    /// `n` equispaced coordinates from `lo` to `hi` inclusive.
    pub fn axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        if n == 1 {
            return vec![0.5 * (lo + hi)];
        }
        (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect()
    }

    /// Row-major `n x n` grid: `y` is the outer index, `x` the inner one.
    pub fn grid(&self, n: usize) -> Vec<(f64, f64)> {
        let xs = Self::axis(self.x0, self.x1, n);
        let ys = Self::axis(self.y0, self.y1, n);
        ys.iter()
            .flat_map(|&y| xs.iter().map(move |&x| (x, y)))
            .collect()
    }
}

/// Default evaluation box.
pub const DEFAULT_BOX: Rect = Rect {
    x0: -1.0,
    y0: -1.0,
    x1: 2.0,
    y1: 2.0,
};

#[derive(Debug, Clone, Copy, PartialEq)]
enum Univariate {
    /// Polynomial with ascending coefficients.
    Poly(&'static [f64]),
    Sin,
    Cos,
    /// `exp(-t^2)`
    Gauss,
}

impl Univariate {
    fn derivative(&self, order: usize, t: f64) -> f64 {
        match *self {
            Univariate::Poly(c) => c
                .iter()
                .enumerate()
                .skip(order)
                .map(|(k, &a)| {
                    let falling: f64 = (k + 1 - order..=k).map(|m| m as f64).product();
                    a * falling * t.powi((k - order) as i32)
                })
                .sum(),
            Univariate::Sin => match order % 4 {
                0 => t.sin(),
                1 => t.cos(),
                2 => -t.sin(),
                _ => -t.cos(),
            },
            Univariate::Cos => match order % 4 {
                0 => t.cos(),
                1 => -t.sin(),
                2 => -t.cos(),
                _ => t.sin(),
            },
            Univariate::Gauss => {
                // d^n/dt^n exp(-t^2) = (-1)^n H_n(t) exp(-t^2)
                let (mut h0, mut h1) = (1.0, 2.0 * t);
                let h = match order {
                    0 => 1.0,
                    _ => {
                        for n in 1..order {
                            let h2 = 2.0 * t * h1 - 2.0 * n as f64 * h0;
                            h0 = h1;
                            h1 = h2;
                        }
                        h1
                    }
                };
                let sign = if order.is_multiple_of(2) { 1.0 } else { -1.0 };
                sign * h * (-t * t).exp()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Form {
    /// `g(x) + h(y)`
    Sum(Univariate, Univariate),
    /// `g(x) * h(y)`
    Product(Univariate, Univariate),
    /// `g(a x + b y)`
    Ridge(Univariate, f64, f64),
}

/// A catalog entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestFunction {
    name: &'static str,
    formula: &'static str,
    form: Form,
    default_box: Rect,
}

/// Partials are available for total order <= 3 and for the mixed orders
/// (2,1), (1,2), (2,2).
pub fn order_supported(i: usize, j: usize) -> bool {
    i + j <= 3 || (i == 2 && j == 2)
}

impl TestFunction {
    pub fn name(&self) -> &'static str {
        self.name
    }

    pub fn formula(&self) -> &'static str {
        self.formula
    }

    pub fn default_box(&self) -> Rect {
        self.default_box
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.partial_unchecked(0, 0, x, y)
    }

    /// `d^(i+j) f / dx^i dy^j` at `(x, y)`.
    pub fn partial(&self, i: usize, j: usize, x: f64, y: f64) -> Result<f64> {
        if !order_supported(i, j) {
            return Err(Error::UnsupportedOrder(i, j));
        }
        Ok(self.partial_unchecked(i, j, x, y))
    }

    /// The partial as a standalone function, for feeding into operators.
    pub fn partial_fn(&self, i: usize, j: usize) -> Result<impl Fn(f64, f64) -> f64 + Sync + '_> {
        if !order_supported(i, j) {
            return Err(Error::CatalogMissingDerivative {
                function: self.name.to_string(),
                i,
                j,
            });
        }
        Ok(move |x: f64, y: f64| self.partial_unchecked(i, j, x, y))
    }

    fn partial_unchecked(&self, i: usize, j: usize, x: f64, y: f64) -> f64 {
        match self.form {
            Form::Sum(g, h) => match (i, j) {
                (0, 0) => g.derivative(0, x) + h.derivative(0, y),
                (i, 0) => g.derivative(i, x),
                (0, j) => h.derivative(j, y),
                _ => 0.0,
            },
            Form::Product(g, h) => g.derivative(i, x) * h.derivative(j, y),
            Form::Ridge(g, a, b) => {
                a.powi(i as i32) * b.powi(j as i32) * g.derivative(i + j, a * x + b * y)
            }
        }
    }

    /// True when the mixed difference of `f` vanishes identically.
    pub fn is_additive(&self) -> bool {
        match self.form {
            Form::Sum(..) => true,
            Form::Product(g, h) => is_constant(g) || is_constant(h),
            Form::Ridge(g, a, b) => a == 0.0 || b == 0.0 || is_affine(g),
        }
    }
}

fn is_constant(g: Univariate) -> bool {
    matches!(g, Univariate::Poly(c) if c.iter().skip(1).all(|&a| a == 0.0))
}

fn is_affine(g: Univariate) -> bool {
    matches!(g, Univariate::Poly(c) if c.iter().skip(2).all(|&a| a == 0.0))
}

use Univariate::{Cos, Gauss, Poly, Sin};

const ZERO: Univariate = Poly(&[0.0]);
const ONE: Univariate = Poly(&[1.0]);
const T: Univariate = Poly(&[0.0, 1.0]);
const T2: Univariate = Poly(&[0.0, 0.0, 1.0]);

const fn entry(name: &'static str, formula: &'static str, form: Form) -> TestFunction {
    TestFunction {
        name,
        formula,
        form,
        default_box: DEFAULT_BOX,
    }
}

static CATALOG: &[TestFunction] = &[
    entry("const1", "1", Form::Sum(ONE, ZERO)),
    entry("x", "x", Form::Sum(T, ZERO)),
    entry("y", "y", Form::Sum(ZERO, T)),
    entry("x_plus_y", "x + y", Form::Sum(T, T)),
    entry("y_minus_x", "y - x", Form::Ridge(T, -1.0, 1.0)),
    entry("x_plus_2y", "x + 2y", Form::Sum(T, Poly(&[0.0, 2.0]))),
    entry("x2", "x^2", Form::Sum(T2, ZERO)),
    entry("xy", "x y", Form::Product(T, T)),
    entry("y2", "y^2", Form::Sum(ZERO, T2)),
    entry("x2y2", "x^2 y^2", Form::Product(T2, T2)),
    entry("sin_x_cos_y", "sin(x) cos(y)", Form::Product(Sin, Cos)),
    entry("sin_x_sin_y", "sin(x) sin(y)", Form::Product(Sin, Sin)),
    entry("sin_y_minus_x", "sin(y - x)", Form::Ridge(Sin, -1.0, 1.0)),
    entry("gauss", "exp(-x^2 - y^2)", Form::Product(Gauss, Gauss)),
    entry("sin_x_plus_cos_y", "sin(x) + cos(y)", Form::Sum(Sin, Cos)),
];

pub fn catalog() -> &'static [TestFunction] {
    CATALOG
}

pub fn fn_lookup(name: &str) -> Result<&'static TestFunction> {
    CATALOG
        .iter()
        .find(|f| f.name == name)
        .ok_or_else(|| Error::UnknownFunction {
            name: name.to_string(),
            valid: CATALOG.iter().map(|f| f.name.to_string()).collect(),
        })
}

/// Steps for the central-difference fallback.
pub const FD_STEP_FIRST: f64 = 1e-4;
pub const FD_STEP_SECOND: f64 = 1e-3;

/// Central finite difference of `f` for partial orders with `i, j <= 2`
/// and `i + j <= 2`.
pub fn finite_difference(
    f: impl Fn(f64, f64) -> f64,
    i: usize,
    j: usize,
    x: f64,
    y: f64,
) -> Result<f64> {
    let h1 = FD_STEP_FIRST;
    let h2 = FD_STEP_SECOND;
    Ok(match (i, j) {
        (0, 0) => f(x, y),
        (1, 0) => (f(x + h1, y) - f(x - h1, y)) / (2.0 * h1),
        (0, 1) => (f(x, y + h1) - f(x, y - h1)) / (2.0 * h1),
        (2, 0) => (f(x + h2, y) - 2.0 * f(x, y) + f(x - h2, y)) / (h2 * h2),
        (0, 2) => (f(x, y + h2) - 2.0 * f(x, y) + f(x, y - h2)) / (h2 * h2),
        (1, 1) => {
            (f(x + h2, y + h2) - f(x + h2, y - h2) - f(x - h2, y + h2) + f(x - h2, y - h2))
                / (4.0 * h2 * h2)
        }
        _ => return Err(Error::UnsupportedOrder(i, j)),
    })
}

/// Grid maximum of `|d^(i+j) f / dx^i dy^j|` over `rect`, refined by local
/// step halving around the arg-max.
pub fn sup_norm_estimate(
    f: &TestFunction,
    (i, j): (usize, usize),
    rect: &Rect,
    grid_n: usize,
) -> Result<f64> {
    if !order_supported(i, j) {
        return Err(Error::UnsupportedOrder(i, j));
    }
    let g = |x: f64, y: f64| f.partial_unchecked(i, j, x, y).abs();
    let n = grid_n.max(2);
    let (mut bx, mut by, mut best) = (rect.x0, rect.y0, f64::NEG_INFINITY);
    for (x, y) in rect.grid(n) {
        let v = g(x, y);
        if v > best {
            (bx, by, best) = (x, y, v);
        }
    }
    let mut hx = (rect.x1 - rect.x0) / (n - 1) as f64 / 2.0;
    let mut hy = (rect.y1 - rect.y0) / (n - 1) as f64 / 2.0;
    for _ in 0..30 {
        let (cx, cy) = (bx, by);
        for dx in [-1.0, 0.0, 1.0] {
            for dy in [-1.0, 0.0, 1.0] {
                let x = (cx + dx * hx).clamp(rect.x0, rect.x1);
                let y = (cy + dy * hy).clamp(rect.y0, rect.y1);
                let v = g(x, y);
                if v > best {
                    (bx, by, best) = (x, y, v);
                }
            }
        }
        hx *= 0.5;
        hy *= 0.5;
    }
    Ok(best)
}
