//! Run configuration: JSON config file merged under command-line
//! flags, with documented defaults filling the rest.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::CliError;

/// Keys accepted in a `--config` JSON file. Unknown keys are rejected.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub model: Option<String>,
    pub oracle: Option<String>,
    pub gate: Option<String>,
    pub from: Option<String>,
    pub n: Option<usize>,
    pub seed: Option<u64>,
    pub dt: Option<f64>,
    pub mass: Option<f64>,
    pub g: Option<f64>,
    pub sigma: Option<f64>,
    pub delta_t: Option<f64>,
    pub a: Option<f64>,
    pub meter_dt: Option<f64>,
    pub sigma_z: Option<f64>,
    pub duration: Option<f64>,
    pub bins: Option<usize>,
    pub max_steps: Option<usize>,
    pub include_free_evolution: Option<bool>,
    pub sampler: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
    }
}

/// Fully resolved settings shared by the run commands.
#[derive(Debug, Clone, Serialize)]
pub struct RunSettings {
    pub model: String,
    pub n: usize,
    pub seed: u64,
    pub dt: f64,
    pub mass: f64,
    pub g: f64,
    pub sigma: f64,
    pub delta_t: f64,
    pub a: f64,
    pub meter_dt: f64,
    pub sigma_z: f64,
    pub bins: usize,
    /// Per-segment step cap; long free-evolution waits (duration ∝ mass)
    /// are integrated with at most this many RK4 steps.
    pub max_steps: usize,
    pub include_free_evolution: bool,
    pub sampler: Option<PathBuf>,
    pub out: PathBuf,
}

/// Flag value if given, else config-file value, else default.
pub fn pick<T: Clone>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

/// Output directory resolution: flag, config, `PILOTWAVE_OUTPUT_DIR`,
/// then `./out`.
pub fn resolve_out(flag: Option<PathBuf>, file: Option<PathBuf>) -> PathBuf {
    flag.or(file)
        .or_else(|| std::env::var_os("PILOTWAVE_OUTPUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}

impl RunSettings {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.model != "bell" && self.model != "well" {
            return Err(CliError::Usage(format!("unknown model `{}`", self.model)));
        }
        if self.n == 0 {
            return Err(CliError::Usage("n must be at least 1".into()));
        }
        for (v, name) in [
            (self.dt, "dt"),
            (self.mass, "mass"),
            (self.sigma, "sigma"),
            (self.delta_t, "delta-t"),
            (self.meter_dt, "meter-dt"),
            (self.sigma_z, "sigma-z"),
        ] {
            if v <= 0.0 || v.is_nan() {
                return Err(CliError::Usage(format!("{name} must be positive, got {v}")));
            }
        }
        if self.g == 0.0 || self.a == 0.0 {
            return Err(CliError::Usage("couplings g and a must be nonzero".into()));
        }
        if self.bins < 10 {
            return Err(CliError::Usage("bins must be at least 10".into()));
        }
        if self.max_steps == 0 {
            return Err(CliError::Usage("max-steps must be at least 1".into()));
        }
        Ok(())
    }
}
