//! Ensemble machinery shared by both physical models: initial-condition
//! samplers, the trajectory integration driver, and statistical checks.

mod integrate;
mod sampler;
mod stats;

pub use integrate::{integrate_ensemble, FieldError, Flow};
pub use sampler::{sample_initial, DensityHistogram, GridCdf, Marginal1D, SamplerSpec};
pub use stats::{equivariance_distance, ks_statistic, verify_ordering, OrderingReport};

use crate::error::{Error, Result};

/// Configuration point; only the first `dims` coordinates of a model
/// are meaningful.
pub type Point = [f64; 3];

/// One corpuscle's sampled path. Sample times are shared across the
/// ensemble and stored there.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub id: usize,
    pub points: Vec<Point>,
}

/// A set of trajectories over one common sample-time grid.
#[derive(Debug, Clone)]
pub struct Ensemble {
    pub coord_names: Vec<&'static str>,
    pub times: Vec<f64>,
    pub trajectories: Vec<Trajectory>,
}

impl Ensemble {
    pub fn dims(&self) -> usize {
        self.coord_names.len()
    }

    pub fn len(&self) -> usize {
        self.trajectories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trajectories.is_empty()
    }

    /// Column of coordinate values across trajectories at one sample time.
    pub fn coordinate_at(&self, time_index: usize, coord: usize) -> Vec<f64> {
        self.trajectories.iter().map(|tr| tr.points[time_index][coord]).collect()
    }

    pub fn validate(&self) -> Result<()> {
        for w in self.times.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::InvalidConfig {
                    reason: format!("sample times not strictly increasing at {} -> {}", w[0], w[1]),
                });
            }
        }
        for tr in &self.trajectories {
            if tr.points.len() != self.times.len() {
                return Err(Error::InvalidConfig {
                    reason: format!(
                        "trajectory {} has {} points for {} sample times",
                        tr.id,
                        tr.points.len(),
                        self.times.len()
                    ),
                });
            }
        }
        Ok(())
    }
}

/// Fixed-step RK4 settings with node-refinement bounds.
#[derive(Debug, Clone, Copy)]
pub struct IntegratorConfig {
    /// Target step size.
    pub dt: f64,
    /// Smallest step the node refinement may reach before giving up.
    pub dt_min: f64,
    /// |ψ|² below this flags a node region.
    pub node_eps: f64,
    /// Record every k-th step; `None` picks ~128 samples per segment.
    pub sample_stride: Option<usize>,
    /// Cap on steps per schedule segment. Long free-evolution waits
    /// (duration ∝ mass) stay integrable; the velocity field varies on
    /// the 1/|ω| timescale, far slower than the capped step.
    pub max_steps_per_segment: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            dt_min: 1e-8,
            node_eps: 1e-12,
            sample_stride: None,
            max_steps_per_segment: 100_000,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !(self.dt_min > 0.0) || self.dt_min >= self.dt {
            return Err(Error::InvalidConfig {
                reason: format!("need 0 < dt_min < dt, got dt={} dt_min={}", self.dt, self.dt_min),
            });
        }
        if !(self.node_eps > 0.0) {
            return Err(Error::InvalidConfig { reason: "node tolerance must be positive".into() });
        }
        if self.max_steps_per_segment == 0 {
            return Err(Error::InvalidConfig { reason: "step cap must be nonzero".into() });
        }
        Ok(())
    }
}
