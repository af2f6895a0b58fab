//! Statistical verification over ensembles: Born-rule (equivariance)
//! distance, trajectory ordering, and a Kolmogorov-Smirnov helper.

use crate::error::{Error, Result};
use crate::trajectories::Ensemble;

/// L1 distance between the binned empirical marginal of one coordinate
/// and the binned |ψ|² marginal mass provided by `expected_mass(a, b)`.
///
/// Preconditions follow the coarse-graining contract: at least 100
/// trajectories and at least 10 bins.
pub fn equivariance_distance(
    ensemble: &Ensemble,
    time_index: usize,
    coord: usize,
    range: (f64, f64),
    bins: usize,
    expected_mass: &dyn Fn(f64, f64) -> f64,
) -> Result<f64> {
    if bins < 10 {
        return Err(Error::InvalidConfig { reason: format!("need ≥ 10 bins, got {bins}") });
    }
    if ensemble.len() < 100 {
        return Err(Error::InvalidConfig {
            reason: format!("need ≥ 100 trajectories, got {}", ensemble.len()),
        });
    }
    if coord >= ensemble.dims() {
        return Err(Error::InvalidConfig { reason: format!("coordinate {coord} out of range") });
    }
    let (lo, hi) = range;
    if !(hi > lo) {
        return Err(Error::InvalidConfig { reason: "empty bin range".into() });
    }
    let n = ensemble.len() as f64;
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for value in ensemble.coordinate_at(time_index, coord) {
        let idx = (((value - lo) / width).floor() as isize).clamp(0, bins as isize - 1) as usize;
        counts[idx] += 1;
    }
    let mut l1 = 0.0;
    for (k, c) in counts.iter().enumerate() {
        let a = lo + k as f64 * width;
        let b = a + width;
        l1 += (*c as f64 / n - expected_mass(a, b)).abs();
    }
    Ok(l1)
}

/// Result of the trajectory-ordering check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrderingReport {
    pub ok: bool,
    /// `(time_index, sorted_position)` of the first violated pair.
    pub violation: Option<(usize, usize)>,
}

/// True iff the sorted order of `coord` across trajectories is the same
/// at every sample time. First-order 1-D flows cannot cross, so a
/// violation exposes either an integration artifact or shuffled data.
pub fn verify_ordering(ensemble: &Ensemble, coord: usize) -> Result<OrderingReport> {
    if coord >= ensemble.dims() {
        return Err(Error::InvalidConfig { reason: format!("coordinate {coord} out of range") });
    }
    if ensemble.is_empty() || ensemble.times.is_empty() {
        return Ok(OrderingReport { ok: true, violation: None });
    }
    let mut reference: Vec<usize> = (0..ensemble.len()).collect();
    let at0 = ensemble.coordinate_at(0, coord);
    reference.sort_by(|&i, &j| at0[i].partial_cmp(&at0[j]).unwrap().then(i.cmp(&j)));

    for t_idx in 1..ensemble.times.len() {
        let values = ensemble.coordinate_at(t_idx, coord);
        for pos in 0..reference.len() - 1 {
            let (i, j) = (reference[pos], reference[pos + 1]);
            if values[i] > values[j] {
                return Ok(OrderingReport { ok: false, violation: Some((t_idx, pos)) });
            }
        }
    }
    Ok(OrderingReport { ok: true, violation: None })
}

/// Kolmogorov-Smirnov statistic of sorted samples against a CDF.
pub fn ks_statistic(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    let mut worst: f64 = 0.0;
    for (i, x) in sorted.iter().enumerate() {
        let f = cdf(*x);
        worst = worst.max((f - i as f64 / n).abs());
        worst = worst.max(((i as f64 + 1.0) / n - f).abs());
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trajectories::Trajectory;

    fn static_ensemble(values: &[f64]) -> Ensemble {
        Ensemble {
            coord_names: vec!["x"],
            times: vec![0.0, 1.0],
            trajectories: values
                .iter()
                .enumerate()
                .map(|(id, v)| Trajectory { id, points: vec![[*v, 0.0, 0.0]; 2] })
                .collect(),
        }
    }

    #[test]
    fn static_ensemble_keeps_ordering() {
        let ens = static_ensemble(&[0.5, 0.1, 0.9, 0.3]);
        let rep = verify_ordering(&ens, 0).unwrap();
        assert!(rep.ok);
        assert!(rep.violation.is_none());
    }

    #[test]
    fn shuffled_data_is_detected() {
        let mut ens = static_ensemble(&[0.1, 0.2, 0.3, 0.4]);
        // swap two trajectories' final points
        let p = ens.trajectories[0].points[1];
        ens.trajectories[0].points[1] = ens.trajectories[3].points[1];
        ens.trajectories[3].points[1] = p;
        let rep = verify_ordering(&ens, 0).unwrap();
        assert!(!rep.ok);
        assert_eq!(rep.violation.unwrap().0, 1);
    }

    #[test]
    fn delta_ensemble_l1_is_near_maximum() {
        let ens = static_ensemble(&[0.5; 200]);
        let l1 = equivariance_distance(&ens, 0, 0, (0.0, 1.0), 50, &|a, b| b - a).unwrap();
        assert!(l1 >= 1.5, "L1 = {l1}");
    }

    #[test]
    fn preconditions_enforced() {
        let ens = static_ensemble(&[0.5; 200]);
        assert!(equivariance_distance(&ens, 0, 0, (0.0, 1.0), 5, &|a, b| b - a).is_err());
        let small = static_ensemble(&[0.5; 10]);
        assert!(equivariance_distance(&small, 0, 0, (0.0, 1.0), 50, &|a, b| b - a).is_err());
    }

    #[test]
    fn ks_of_exact_grid_is_small() {
        let n = 1000;
        let xs: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        assert!(ks_statistic(&xs, |x| x) <= 0.5 / n as f64 + 1e-12);
    }
}
