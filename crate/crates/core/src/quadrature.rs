//! Gauss-Legendre rules mapped to the unit interval.

/// Default number of nodes per axis; exact for per-axis degree <= 9.
pub const DEFAULT_QUAD_ORDER: usize = 5;

/// An `n`-point Gauss-Legendre rule on `[0, 1]`: `sum_i w_i g(t_i)`
/// integrates polynomials of degree `<= 2n - 1` exactly. Weights sum to 1,
/// so the rule directly yields averages over the interval.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// # Panics
    ///
    /// Panics if `n == 0`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "quadrature order must be at least 1");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            // map [-1, 1] -> [0, 1]; halve weights so they sum to one
            nodes[i] = 0.5 * (1.0 - x);
            nodes[n - 1 - i] = 0.5 * (1.0 + x);
            weights[i] = 0.5 * w;
            weights[n - 1 - i] = 0.5 * w;
        }
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Nodes in increasing order on `[0, 1]`.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Average of `g` over `[a, a + h]`.
    pub fn average(&self, a: f64, h: f64, g: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * g(a + h * t))
            .sum()
    }

    /// Average of `g` over `[a, a + h] x [b, b + h]` with the tensor rule.
    pub fn average2(&self, a: f64, b: f64, h: f64, g: impl Fn(f64, f64) -> f64) -> f64 {
        let mut total = 0.0;
        for (&s, &ws) in self.nodes.iter().zip(&self.weights) {
            let u = a + h * s;
            let mut inner = 0.0;
            for (&t, &wt) in self.nodes.iter().zip(&self.weights) {
                inner += wt * g(u, b + h * t);
            }
            total += ws * inner;
        }
        total
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn weights_sum_to_one_and_nodes_sorted() {
        for n in 1..=12 {
            let q = GaussLegendre::new(n);
            assert_abs_diff_eq!(q.weights().iter().sum::<f64>(), 1.0, epsilon = 1e-14);
            assert!(q.nodes().windows(2).all(|p| p[0] < p[1]));
            assert!(q.nodes().iter().all(|&t| t > 0.0 && t < 1.0));
        }
    }

    #[test]
    fn known_two_point_rule() {
        let q = GaussLegendre::new(2);
        let d = 0.5 / 3f64.sqrt();
        assert_abs_diff_eq!(q.nodes()[0], 0.5 - d, epsilon = 1e-15);
        assert_abs_diff_eq!(q.nodes()[1], 0.5 + d, epsilon = 1e-15);
    }

    #[test]
    fn exact_for_degree_2n_minus_1() {
        for n in 1..=8 {
            let q = GaussLegendre::new(n);
            for deg in 0..2 * n {
                // average of t^deg over [0,1] is 1/(deg+1)
                let got = q.average(0.0, 1.0, |t| t.powi(deg as i32));
                assert_abs_diff_eq!(got, 1.0 / (deg as f64 + 1.0), epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn two_dimensional_average() {
        let q = GaussLegendre::new(3);
        assert_abs_diff_eq!(q.average2(0.0, 0.0, 1.0, |u, v| u * v), 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(q.average2(2.0, -1.0, 0.5, |_, _| 3.0), 3.0, epsilon = 1e-14);
    }
}
