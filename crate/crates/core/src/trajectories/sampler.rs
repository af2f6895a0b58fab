//! Initial-condition samplers: quantum-equilibrium draws from |ψ₀|²
//! and custom histogram densities for non-equilibrium runs.
//!
//! Equilibrium sampling is stratified inverse-CDF: coordinate `c` uses
//! uniforms `(i + u_i)/N` mapped through the marginal CDF, with the
//! streams of different coordinates decorrelated by a seeded shuffle.
//! An ensemble of N points then carries at most O(1/N) coarse-grained
//! density error, which the equivariance bounds rely on.

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::trajectories::Point;

/// Grid points used for CDF interpolation.
const CDF_GRID: usize = 10_000;

/// One-dimensional marginal density of an initial wavefunction factor.
#[derive(Debug, Clone)]
pub enum Marginal1D {
    /// `|c₁ φ₁(x) + c₂ φ₂(x)|²` on [0, 1] (infinite-well factor).
    TwoMode { coeffs: [Complex64; 2] },
    /// Normalized Gaussian `|φ₀|²` (pointer packet).
    Gaussian { center: f64, sigma: f64 },
}

impl Marginal1D {
    pub fn density(&self, x: f64) -> f64 {
        match self {
            Marginal1D::TwoMode { coeffs } => {
                let pi = std::f64::consts::PI;
                let phi1 = (2.0f64).sqrt() * (pi * x).sin();
                let phi2 = (2.0f64).sqrt() * (2.0 * pi * x).sin();
                (coeffs[0] * phi1 + coeffs[1] * phi2).norm_sqr()
            }
            Marginal1D::Gaussian { center, sigma } => {
                let z = (x - center) / sigma;
                (-0.5 * z * z).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt())
            }
        }
    }

    pub fn range(&self) -> (f64, f64) {
        match self {
            Marginal1D::TwoMode { .. } => (0.0, 1.0),
            Marginal1D::Gaussian { center, sigma } => (center - 8.0 * sigma, center + 8.0 * sigma),
        }
    }

    fn grid_cdf(&self) -> GridCdf {
        let (a, b) = self.range();
        GridCdf::from_density(|x| self.density(x), a, b, CDF_GRID)
    }
}

/// Piecewise-linear monotone interpolant of a cumulative distribution.
#[derive(Debug, Clone)]
pub struct GridCdf {
    xs: Vec<f64>,
    cdf: Vec<f64>,
}

impl GridCdf {
    /// Trapezoid-integrated CDF of `density` over [a, b] on `n` intervals,
    /// normalized to end at exactly 1.
    pub fn from_density<F: Fn(f64) -> f64>(density: F, a: f64, b: f64, n: usize) -> Self {
        let h = (b - a) / n as f64;
        let mut xs = Vec::with_capacity(n + 1);
        let mut cdf = Vec::with_capacity(n + 1);
        let mut acc = 0.0;
        let mut prev = density(a);
        xs.push(a);
        cdf.push(0.0);
        for i in 1..=n {
            let x = a + i as f64 * h;
            let d = density(x);
            acc += 0.5 * (prev + d) * h;
            prev = d;
            xs.push(x);
            cdf.push(acc);
        }
        let total = acc;
        if total > 0.0 {
            for v in cdf.iter_mut() {
                *v /= total;
            }
        }
        Self { xs, cdf }
    }

    /// Inverse CDF lookup with linear interpolation.
    pub fn invert(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        let idx = match self.cdf.binary_search_by(|v| v.partial_cmp(&u).unwrap()) {
            Ok(i) => return self.xs[i],
            Err(i) => i.clamp(1, self.cdf.len() - 1),
        };
        let (c0, c1) = (self.cdf[idx - 1], self.cdf[idx]);
        let (x0, x1) = (self.xs[idx - 1], self.xs[idx]);
        if c1 > c0 { x0 + (x1 - x0) * (u - c0) / (c1 - c0) } else { x0 }
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        if x <= self.xs[0] {
            return 0.0;
        }
        if x >= *self.xs.last().unwrap() {
            return 1.0;
        }
        let idx = match self.xs.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
            Ok(i) => return self.cdf[i],
            Err(i) => i,
        };
        let (x0, x1) = (self.xs[idx - 1], self.xs[idx]);
        let (c0, c1) = (self.cdf[idx - 1], self.cdf[idx]);
        c0 + (c1 - c0) * (x - x0) / (x1 - x0)
    }
}

/// Piecewise-constant joint density over the leading coordinates.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityHistogram {
    /// Bin edges per covered coordinate (length = dims, each ≥ 2 edges).
    pub edges: Vec<Vec<f64>>,
    /// Row-major joint bin masses; must be non-negative and sum to 1.
    pub probs: Vec<f64>,
}

impl DensityHistogram {
    pub fn dims(&self) -> usize {
        self.edges.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.edges.is_empty() || self.dims() > 3 {
            return Err(Error::InvalidSampler { reason: "histogram must cover 1..=3 coordinates".into() });
        }
        let mut expected = 1usize;
        for (c, e) in self.edges.iter().enumerate() {
            if e.len() < 2 || e.windows(2).any(|w| !(w[1] > w[0])) {
                return Err(Error::InvalidSampler {
                    reason: format!("coordinate {c} edges must be strictly increasing"),
                });
            }
            expected *= e.len() - 1;
        }
        if self.probs.len() != expected {
            return Err(Error::InvalidSampler {
                reason: format!("expected {expected} bin masses, got {}", self.probs.len()),
            });
        }
        if self.probs.iter().any(|p| *p < 0.0) {
            return Err(Error::InvalidSampler { reason: "bin masses must be non-negative".into() });
        }
        let sum: f64 = self.probs.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidSampler {
                reason: format!("bin masses sum to {sum}, expected 1 within 1e-9"),
            });
        }
        Ok(())
    }

    /// Uniform histogram over a box, expressed on a per-coordinate grid.
    pub fn uniform_box(ranges: &[(f64, f64)], bins: usize) -> Self {
        let dims = ranges.len();
        let edges = ranges
            .iter()
            .map(|(a, b)| (0..=bins).map(|i| a + (b - a) * i as f64 / bins as f64).collect())
            .collect();
        let total = bins.pow(dims as u32);
        Self { edges, probs: vec![1.0 / total as f64; total] }
    }
}

/// How initial configurations are drawn.
#[derive(Debug, Clone)]
pub enum SamplerSpec {
    /// ρ₀ = |ψ₀|², coordinate by coordinate.
    Equilibrium,
    /// Custom histogram over the leading coordinates; any remaining
    /// coordinates fall back to equilibrium.
    Custom(DensityHistogram),
}

/// Draw `n` configuration points.
///
/// `marginals` describe |ψ₀|² per coordinate (the supported initial
/// states factorize). `support_density` evaluates the full |ψ₀|² and
/// guards custom densities: a sampled point where it falls at or below
/// `support_eps` rejects the run, per the requirement that ρ₀ only has
/// support where the pilot wave is non-zero.
pub fn sample_initial(
    spec: &SamplerSpec,
    marginals: &[Marginal1D],
    support_density: Option<&dyn Fn(&Point) -> f64>,
    n: usize,
    seed: u64,
    support_eps: f64,
) -> Result<Vec<Point>> {
    if n == 0 {
        return Err(Error::InvalidSampler { reason: "need at least one sample".into() });
    }
    if marginals.is_empty() || marginals.len() > 3 {
        return Err(Error::InvalidSampler { reason: "need 1..=3 coordinates".into() });
    }
    let dims = marginals.len();
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); dims];

    let custom = match spec {
        SamplerSpec::Equilibrium => None,
        SamplerSpec::Custom(hist) => {
            hist.validate()?;
            if hist.dims() > dims {
                return Err(Error::InvalidSampler {
                    reason: "histogram covers more coordinates than the model has".into(),
                });
            }
            Some(hist)
        }
    };

    let custom_dims = custom.map_or(0, |h| h.dims());
    if let Some(hist) = custom {
        // Stratified draw over the joint bin masses, uniform inside a bin.
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(1000);
        let mut cdf = Vec::with_capacity(hist.probs.len());
        let mut acc = 0.0;
        for p in &hist.probs {
            acc += p;
            cdf.push(acc);
        }
        let bins_per: Vec<usize> = hist.edges.iter().map(|e| e.len() - 1).collect();
        for i in 0..n {
            let u = (i as f64 + rng.gen::<f64>()) / n as f64;
            let mut bin = cdf.partition_point(|c| *c < u).min(hist.probs.len() - 1);
            // unravel the row-major joint index
            for c in (0..custom_dims).rev() {
                let b = bin % bins_per[c];
                bin /= bins_per[c];
                let lo = hist.edges[c][b];
                let hi = hist.edges[c][b + 1];
                columns[c].push(lo + (hi - lo) * rng.gen::<f64>());
            }
        }
        // the unravel loop pushed coordinates in reverse order per point;
        // per-column order across points is still sequential, nothing to fix
        for col in columns.iter_mut().take(custom_dims) {
            debug_assert_eq!(col.len(), n);
        }
        // decorrelate the within-bin jitter from the bin sequence is not
        // required; bins already encode the joint density
    }

    for (c, marginal) in marginals.iter().enumerate().skip(custom_dims) {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(c as u64);
        let mut us: Vec<f64> =
            (0..n).map(|i| (i as f64 + rng.gen::<f64>()) / n as f64).collect();
        if c > 0 {
            let mut shuffle_rng = ChaCha12Rng::seed_from_u64(seed);
            shuffle_rng.set_stream(100 + c as u64);
            us.shuffle(&mut shuffle_rng);
        }
        let cdf = marginal.grid_cdf();
        columns[c] = us.into_iter().map(|u| cdf.invert(u)).collect();
    }

    let mut points = Vec::with_capacity(n);
    for i in 0..n {
        let mut p: Point = [0.0; 3];
        for (c, col) in columns.iter().enumerate() {
            p[c] = col[i];
        }
        if custom.is_some() {
            if let Some(density) = support_density {
                let rho = density(&p);
                if rho <= support_eps {
                    return Err(Error::SupportViolation { density: rho });
                }
            }
        }
        points.push(p);
    }
    Ok(points)
}
