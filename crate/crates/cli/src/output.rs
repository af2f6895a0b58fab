//! Deterministic output writers: CSV bodies are byte-identical across
//! reruns with the same inputs, and every summary carries the config
//! echo, seed and schedule hash.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use pilotwave::trajectories::Ensemble;

use crate::CliError;

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", dir.display())))
}

pub fn write_text(path: &Path, body: &str) -> Result<(), CliError> {
    std::fs::write(path, body)
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}

/// Trajectory rows `(t, trajectory_id, coords...)`, trajectory-major.
pub fn ensemble_csv(ensemble: &Ensemble) -> String {
    let mut body = String::from("t,trajectory_id");
    for name in &ensemble.coord_names {
        let _ = write!(body, ",{name}");
    }
    body.push('\n');
    for tr in &ensemble.trajectories {
        for (k, t) in ensemble.times.iter().enumerate() {
            let _ = write!(body, "{t},{}", tr.id);
            for c in 0..ensemble.dims() {
                let _ = write!(body, ",{}", tr.points[k][c]);
            }
            body.push('\n');
        }
    }
    body
}

/// One histogram block: empirical counts against |ψ|² bin masses.
pub struct DensityBlock<'a> {
    pub coord: &'static str,
    pub label: &'a str,
    pub range: (f64, f64),
    pub counts: Vec<usize>,
    pub masses: Vec<f64>,
}

pub fn density_csv(blocks: &[DensityBlock<'_>]) -> String {
    let mut body = String::from("coord,era,bin_left,bin_right,count,psi2_mass\n");
    for block in blocks {
        let bins = block.counts.len();
        let width = (block.range.1 - block.range.0) / bins as f64;
        for k in 0..bins {
            let left = block.range.0 + k as f64 * width;
            let right = left + width;
            let _ = writeln!(
                body,
                "{},{},{left},{right},{},{}",
                block.coord, block.label, block.counts[k], block.masses[k]
            );
        }
    }
    body
}

pub fn histogram_counts(values: &[f64], range: (f64, f64), bins: usize) -> Vec<usize> {
    let mut counts = vec![0usize; bins];
    let width = (range.1 - range.0) / bins as f64;
    for v in values {
        let idx = (((v - range.0) / width).floor() as isize).clamp(0, bins as isize - 1) as usize;
        counts[idx] += 1;
    }
    counts
}

/// Short content hash for provenance records.
pub fn schedule_hash(serialized: &str) -> String {
    let digest = Sha256::digest(serialized.as_bytes());
    let mut out = String::with_capacity(16);
    for byte in digest.iter().take(8) {
        let _ = write!(out, "{byte:02x}");
    }
    out
}

/// Validate-by-construction summary writer: the value is serialized
/// through its typed schema before touching the filesystem.
pub fn write_summary<T: Serialize>(path: &Path, summary: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(summary)
        .map_err(|e| CliError::Runtime(format!("summary serialization failed: {e}")))?;
    write_text(path, &(text + "\n"))
}
