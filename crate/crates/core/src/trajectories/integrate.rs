//! Classical fixed-step RK4 trajectory driver with node refinement.
//!
//! Velocity fields are piecewise-defined over schedule segments and may
//! be discontinuous at segment boundaries, so each segment is stepped
//! separately and a stage never crosses a boundary. All trajectories
//! advance in lockstep, which lets field implementations memoize the
//! per-stage wavefunction data behind `velocity`.

use crate::error::{Error, Result};
use crate::trajectories::{Ensemble, IntegratorConfig, Point, Trajectory};

/// Velocity evaluation failure inside a field.
#[derive(Debug, Clone, Copy)]
pub enum FieldError {
    /// |ψ|² at the query point fell below the node tolerance; the
    /// caller refines the step.
    NodeProximity,
}

/// A guidance field defined over an ordered list of time segments.
pub trait Flow {
    /// Number of meaningful coordinates (1..=3).
    fn dims(&self) -> usize;

    /// Coordinate names for serialization, `dims()` entries.
    fn coord_names(&self) -> Vec<&'static str>;

    /// Segment boundaries, strictly increasing, starting at the initial
    /// time; `boundaries().len() - 1` segments.
    fn boundaries(&self) -> Vec<f64>;

    /// Velocity at `(t, p)` using the field of segment `segment`
    /// (stages evaluated exactly at a boundary take the segment they
    /// were issued from, so fields stay single-valued per step).
    fn velocity(
        &self,
        segment: usize,
        t: f64,
        p: &Point,
        node_eps: f64,
    ) -> std::result::Result<Point, FieldError>;
}

/// Integrate an ensemble of initial points through `flow`.
///
/// Deterministic: a fixed `(points, flow, config)` triple always yields
/// bitwise-identical output.
pub fn integrate_ensemble(
    points: &[Point],
    flow: &dyn Flow,
    config: &IntegratorConfig,
) -> Result<Ensemble> {
    config.validate()?;
    let boundaries = flow.boundaries();
    if boundaries.len() < 2 {
        return Err(Error::InvalidConfig { reason: "flow has no time segments".into() });
    }
    let n = points.len();
    let mut current: Vec<Point> = points.to_vec();
    let mut times = vec![boundaries[0]];
    let mut samples: Vec<Vec<Point>> = (0..n).map(|i| vec![points[i]]).collect();

    for seg in 0..boundaries.len() - 1 {
        let (t0, t1) = (boundaries[seg], boundaries[seg + 1]);
        let duration = t1 - t0;
        if duration <= 0.0 {
            continue;
        }
        let steps =
            ((duration / config.dt).ceil() as usize).clamp(1, config.max_steps_per_segment);
        let h = duration / steps as f64;
        let stride = config
            .sample_stride
            .unwrap_or_else(|| (steps / 128).max(1));

        for step in 0..steps {
            let t = t0 + step as f64 * h;
            for (id, p) in current.iter_mut().enumerate() {
                *p = advance(flow, config, StepCtx { seg, t, h, id, depth: 0 }, *p)?;
            }
            let at_end = step + 1 == steps;
            if at_end || (step + 1) % stride == 0 {
                let t_next = if at_end { t1 } else { t + h };
                times.push(t_next);
                for (id, p) in current.iter().enumerate() {
                    samples[id].push(*p);
                }
                let _ = t_next;
            }
        }
    }

    let ensemble = Ensemble {
        coord_names: flow.coord_names(),
        times,
        trajectories: samples
            .into_iter()
            .enumerate()
            .map(|(id, points)| Trajectory { id, points })
            .collect(),
    };
    ensemble.validate()?;
    Ok(ensemble)
}

#[derive(Clone, Copy)]
struct StepCtx {
    seg: usize,
    t: f64,
    h: f64,
    id: usize,
    depth: usize,
}

/// One RK4 step with recursive halving on node encounters.
fn advance(flow: &dyn Flow, config: &IntegratorConfig, ctx: StepCtx, p: Point) -> Result<Point> {
    match rk4_step(flow, ctx.seg, ctx.t, ctx.h, p, config.node_eps) {
        Ok(next) => Ok(next),
        Err(FieldError::NodeProximity) => {
            let half = ctx.h / 2.0;
            if half < config.dt_min || ctx.depth > 60 {
                return Err(Error::NodeEncounter { trajectory: ctx.id, t: ctx.t });
            }
            let deeper = StepCtx { h: half, depth: ctx.depth + 1, ..ctx };
            let mid = advance(flow, config, deeper, p)?;
            advance(flow, config, StepCtx { t: ctx.t + half, ..deeper }, mid)
        }
    }
}

fn rk4_step(
    flow: &dyn Flow,
    seg: usize,
    t: f64,
    h: f64,
    p: Point,
    node_eps: f64,
) -> std::result::Result<Point, FieldError> {
    let k1 = flow.velocity(seg, t, &p, node_eps)?;
    let k2 = flow.velocity(seg, t + h / 2.0, &shift(p, k1, h / 2.0), node_eps)?;
    let k3 = flow.velocity(seg, t + h / 2.0, &shift(p, k2, h / 2.0), node_eps)?;
    let k4 = flow.velocity(seg, t + h, &shift(p, k3, h), node_eps)?;
    let mut out = p;
    for c in 0..3 {
        out[c] += h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
    }
    Ok(out)
}

fn shift(p: Point, v: Point, s: f64) -> Point {
    [p[0] + s * v[0], p[1] + s * v[1], p[2] + s * v[2]]
}

#[cfg(test)]
mod tests {
    use super::*;

    struct ConstantFlow {
        v: f64,
        t_end: f64,
    }

    impl Flow for ConstantFlow {
        fn dims(&self) -> usize {
            1
        }
        fn coord_names(&self) -> Vec<&'static str> {
            vec!["y"]
        }
        fn boundaries(&self) -> Vec<f64> {
            vec![0.0, self.t_end]
        }
        fn velocity(
            &self,
            _segment: usize,
            _t: f64,
            _p: &Point,
            _eps: f64,
        ) -> std::result::Result<Point, FieldError> {
            Ok([self.v, 0.0, 0.0])
        }
    }

    #[test]
    fn zero_field_is_static() {
        let flow = ConstantFlow { v: 0.0, t_end: 2.0 };
        let pts = vec![[0.1, 0.0, 0.0], [-0.4, 0.0, 0.0]];
        let ens = integrate_ensemble(&pts, &flow, &IntegratorConfig::default()).unwrap();
        for tr in &ens.trajectories {
            for p in &tr.points {
                assert_eq!(p[0], tr.points[0][0]);
            }
        }
    }

    #[test]
    fn constant_field_gives_straight_lines() {
        let flow = ConstantFlow { v: 1.5, t_end: 1.0 };
        let pts = vec![[0.0, 0.0, 0.0], [0.2, 0.0, 0.0]];
        let ens = integrate_ensemble(&pts, &flow, &IntegratorConfig::default()).unwrap();
        let last = ens.times.len() - 1;
        assert!((ens.trajectories[0].points[last][0] - 1.5).abs() < 1e-12);
        assert!((ens.trajectories[1].points[last][0] - 1.7).abs() < 1e-12);
        // pairwise separations unchanged
        for k in 0..ens.times.len() {
            let d = ens.trajectories[1].points[k][0] - ens.trajectories[0].points[k][0];
            assert!((d - 0.2).abs() < 1e-12);
        }
    }

    #[test]
    fn forward_then_backward_zero_field_returns_exactly() {
        // time reversal of a static field is the identity
        struct TwoWay;
        impl Flow for TwoWay {
            fn dims(&self) -> usize {
                1
            }
            fn coord_names(&self) -> Vec<&'static str> {
                vec!["y"]
            }
            fn boundaries(&self) -> Vec<f64> {
                vec![0.0, 1.0, 2.0]
            }
            fn velocity(
                &self,
                _s: usize,
                _t: f64,
                _p: &Point,
                _eps: f64,
            ) -> std::result::Result<Point, FieldError> {
                Ok([0.0; 3])
            }
        }
        let pts = vec![[0.33, 0.0, 0.0]];
        let ens = integrate_ensemble(&pts, &TwoWay, &IntegratorConfig::default()).unwrap();
        let last = ens.times.len() - 1;
        assert_eq!(ens.trajectories[0].points[last][0], 0.33);
    }

    #[test]
    fn node_refinement_gives_up_at_dt_min() {
        struct NodeField;
        impl Flow for NodeField {
            fn dims(&self) -> usize {
                1
            }
            fn coord_names(&self) -> Vec<&'static str> {
                vec!["x"]
            }
            fn boundaries(&self) -> Vec<f64> {
                vec![0.0, 1.0]
            }
            fn velocity(
                &self,
                _s: usize,
                _t: f64,
                _p: &Point,
                _eps: f64,
            ) -> std::result::Result<Point, FieldError> {
                Err(FieldError::NodeProximity)
            }
        }
        let err = integrate_ensemble(&[[0.5, 0.0, 0.0]], &NodeField, &IntegratorConfig::default())
            .unwrap_err();
        assert!(matches!(err, Error::NodeEncounter { trajectory: 0, .. }));
    }
}
