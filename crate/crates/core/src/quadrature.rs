//! Composite Gauss-Legendre quadrature on [0, 1] (and [a, b]).
//!
//! Used to verify drive-potential matrix elements explicitly in the
//! position basis. Nodes and weights are computed once per rule by
//! Newton iteration on the Legendre polynomial.

use crate::error::{Error, Result};

/// Composite Gauss-Legendre rule: `panels` equal subintervals, each
/// integrated with a `points`-node Gauss-Legendre formula.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    panels: usize,
    points: usize,
    tolerance: f64,
    /// Reference nodes/weights on [-1, 1].
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn new(panels: usize, points: usize, tolerance: f64) -> Result<Self> {
        if panels == 0 || points == 0 {
            return Err(Error::InvalidConfig {
                reason: "quadrature needs at least one panel and one point".into(),
            });
        }
        if !(tolerance > 0.0) {
            return Err(Error::InvalidConfig {
                reason: "quadrature tolerance must be positive".into(),
            });
        }
        let (nodes, weights) = gauss_legendre(points);
        Ok(Self { panels, points, tolerance, nodes, weights })
    }

    /// Default rule: accurate to well below 1e-12 for the smooth
    /// trigonometric integrands of the two-mode well.
    pub fn default_rule() -> Self {
        Self::new(16, 12, 1e-10).expect("default rule parameters are valid")
    }

    pub fn panels(&self) -> usize {
        self.panels
    }

    pub fn points_per_panel(&self) -> usize {
        self.points
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let h = (b - a) / self.panels as f64;
        let mut total = 0.0;
        for p in 0..self.panels {
            let left = a + p as f64 * h;
            let mid = left + 0.5 * h;
            let half = 0.5 * h;
            let mut acc = 0.0;
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                acc += w * f(mid + half * x);
            }
            total += acc * half;
        }
        total
    }

    /// Tensor-product rule over [0,1] x [0,1].
    pub fn integrate_2d<F: FnMut(f64, f64) -> f64>(&self, mut f: F) -> f64 {
        let h = 1.0 / self.panels as f64;
        let half = 0.5 * h;
        let mut total = 0.0;
        for px in 0..self.panels {
            let midx = px as f64 * h + half;
            for py in 0..self.panels {
                let midy = py as f64 * h + half;
                let mut acc = 0.0;
                for (x, wx) in self.nodes.iter().zip(&self.weights) {
                    let fx = midx + half * x;
                    for (y, wy) in self.nodes.iter().zip(&self.weights) {
                        acc += wx * wy * f(fx, midy + half * y);
                    }
                }
                total += acc * half * half;
            }
        }
        total
    }

    /// Self-test residual: the mode normalization `∫₀¹ 2 sin²(πx) dx = 1`
    /// plus the off-diagonal drive moment
    /// `∫₀¹ 2 sin(πx) sin(2πx) (x - 1/2) dx = -16/(9π²)`. The second
    /// probe is there because panel errors of the first cancel exactly
    /// on symmetric composite rules, hiding coarseness.
    pub fn self_test_residual(&self) -> f64 {
        use std::f64::consts::PI;
        let norm = self.integrate(0.0, 1.0, |x| 2.0 * (PI * x).sin().powi(2));
        let moment = self
            .integrate(0.0, 1.0, |x| 2.0 * (PI * x).sin() * (2.0 * PI * x).sin() * (x - 0.5));
        (norm - 1.0).abs().max((moment + 16.0 / (9.0 * PI * PI)).abs())
    }

    /// Errors when the self-test residual exceeds the rule's stated tolerance.
    pub fn validate(&self) -> Result<()> {
        let residual = self.self_test_residual();
        if residual > self.tolerance {
            return Err(Error::QuadratureNonConvergence { residual, tolerance: self.tolerance });
        }
        Ok(())
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess for the i-th positive root.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                let (_, d2) = legendre_with_derivative(n, x);
                dp = d2;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        let (_, d) = legendre_with_derivative(n, 0.0);
        nodes[n / 2] = 0.0;
        weights[n / 2] = 2.0 / (d * d);
    }
    (nodes, weights)
}

/// Value and derivative of the Legendre polynomial P_n via the
/// three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}
