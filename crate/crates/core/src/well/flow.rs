//! Guidance flow for well-model trajectories.
//!
//! Per segment, each coordinate moves with the velocity that transports
//! density consistently with the model's own coefficient dynamics:
//!
//! * waits (free evolution): the guidance law `(1/m) Im(∂ψ/ψ)` — exact,
//!   since free evolution is generated by the physical Hamiltonian;
//! * drive pulses: the truncated-basis dynamics `i ċ = V c` change
//!   |ψ(x)|² through a nonlocal (projected) potential, so the velocity
//!   is the continuity solution `j(x) = -∫₀ˣ ∂ₜρ`, which has the closed
//!   spectral form `-2 Σ G_mk(x) Im(c_m* (Vc)_k)`; the guidance term is
//!   added on top only when the free Hamiltonian is kept in the pulse;
//! * untargeted coordinates: their factor is frozen by the sequential
//!   gate model, so they do not move;
//! * the meter era: packet-weighted translation rates in `z`, with the
//!   (x, y) coefficients frozen (impulsive approximation).
//!
//! All trajectories step in lockstep, so the per-time wavefunction data
//! is memoized behind the `Flow` trait.

use num_complex::Complex64;
use std::cell::RefCell;
use std::rc::Rc;

use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::qubit::{pauli_x, QubitId};
use crate::trajectories::{FieldError, Flow, Point};
use crate::well::meter::{apply_energy_meter, attach_meter, EnergyMeter};
use crate::well::schedule::{SegmentKind, WellSchedule};
use crate::well::{mode_overlap_integral, WellBasis, WellWavefunction};

#[derive(Debug, Clone, Copy)]
struct FluxTerm {
    factor: [Complex64; 2],
    /// `I[m][k] = Im(c_m* (Vc)_k)` of the active drive.
    i: [[f64; 2]; 2],
}

#[derive(Debug, Clone)]
struct MeterSnap {
    coeffs: Vec<Complex64>,
    packets: [crate::bell::PointerPacket; 2],
}

#[derive(Debug, Clone)]
struct Snapshot {
    kin: [Option<[Complex64; 2]>; 2],
    flux: [Option<FluxTerm>; 2],
    meter: Option<MeterSnap>,
}

/// Memoized per-stage-time snapshot, keyed by (segment, t bits).
type SnapshotMemo = RefCell<Option<((usize, u64), Rc<Snapshot>)>>;

/// Trajectory field over a drive schedule plus an optional meter era.
pub struct WellFlow {
    basis: WellBasis,
    schedule: WellSchedule,
    include_free: bool,
    meter: Option<EnergyMeter>,
    boundaries: Vec<f64>,
    /// State at the start of each segment, plus the gate-era end state;
    /// one partial propagator then reaches any stage time.
    segment_starts: Vec<WellWavefunction>,
    memo: SnapshotMemo,
}

impl WellFlow {
    pub fn new(
        basis: WellBasis,
        initial: WellWavefunction,
        schedule: WellSchedule,
        include_free: bool,
        meter: Option<EnergyMeter>,
    ) -> Result<Self> {
        let dim = 1 << schedule.n_qubits;
        if initial.coefficients().len() != dim {
            return Err(Error::BadDimension { dim: initial.coefficients().len() });
        }
        let mut boundaries = vec![0.0];
        let mut acc = 0.0;
        let mut segment_starts = vec![initial.clone()];
        for seg in &schedule.segments {
            acc += seg.duration;
            boundaries.push(acc);
            let prev = segment_starts.last().expect("seeded with the initial state");
            segment_starts.push(crate::well::schedule::propagate_segment(
                prev,
                &schedule,
                seg,
                &basis,
                seg.duration,
                include_free,
            ));
        }
        if let Some(m) = &meter {
            boundaries.push(acc + m.duration);
        }
        if boundaries.len() < 2 {
            return Err(Error::InvalidConfig { reason: "schedule has no segments and no meter".into() });
        }

        // Fail fast on configurations the factorized machinery cannot
        // transport: the coupling needs the auxiliary in an X eigenstate
        // (the Deutsch circuit guarantees |−⟩ there) and supports only
        // the impulsive (free-excluded) form.
        for (idx, seg) in schedule.segments.iter().enumerate() {
            if matches!(seg.kind, SegmentKind::OracleCoupling) {
                if include_free {
                    return Err(Error::UnsupportedState {
                        reason: "free evolution inside the oracle coupling entangles the register; \
                                 trajectory transport supports the impulsive coupling only"
                            .into(),
                    });
                }
                aux_x_eigenvalue(&segment_starts[idx])?;
            }
        }

        Ok(Self {
            basis,
            schedule,
            include_free,
            meter,
            boundaries,
            segment_starts,
            memo: RefCell::new(None),
        })
    }

    pub fn schedule(&self) -> &WellSchedule {
        &self.schedule
    }

    pub fn gate_era_end(&self) -> f64 {
        self.schedule.total_duration()
    }

    fn n_qubits(&self) -> usize {
        self.schedule.n_qubits
    }

    fn segment_of(&self, t: f64) -> usize {
        let last = self.boundaries.len() - 2;
        let mut seg = 0;
        while seg < last && t >= self.boundaries[seg + 1] {
            seg += 1;
        }
        seg
    }

    /// Velocity lookup by absolute time (used by verification code).
    pub fn velocity_at(&self, t: f64, p: &Point, node_eps: f64) -> Result<Point> {
        self.velocity(self.segment_of(t), t, p, node_eps)
            .map_err(|_| Error::NodeEncounter { trajectory: usize::MAX, t })
    }

    fn coord_of(&self, target: QubitId) -> usize {
        match target {
            QubitId::Data => 0,
            QubitId::Aux => 1,
        }
    }

    fn build_snapshot(&self, segment: usize, t: f64) -> Result<Snapshot> {
        let n_segments = self.schedule.segments.len();
        let mut snap = Snapshot { kin: [None, None], flux: [None, None], meter: None };
        if segment < n_segments {
            let seg = &self.schedule.segments[segment];
            let tau = (t - self.boundaries[segment]).clamp(0.0, seg.duration);
            let wf = crate::well::schedule::propagate_segment(
                &self.segment_starts[segment],
                &self.schedule,
                seg,
                &self.basis,
                tau,
                self.include_free,
            );
            match self.schedule.segments[segment].kind {
                SegmentKind::Wait { target } => {
                    let coord = if self.n_qubits() == 1 { 0 } else { self.coord_of(target) };
                    snap.kin[coord] = Some(wf.factor(coord)?);
                }
                SegmentKind::XDrive { target } => {
                    let coord = if self.n_qubits() == 1 { 0 } else { self.coord_of(target) };
                    let factor = wf.factor(coord)?;
                    snap.flux[coord] = Some(flux_term(&factor, &pauli_x()));
                    if self.include_free {
                        snap.kin[coord] = Some(factor);
                    }
                }
                SegmentKind::OracleCoupling => {
                    let lambda = aux_x_eigenvalue(&wf)?;
                    let d = wf.factor(0)?;
                    // effective data drive: (λ - 1) on mode 1
                    let mut v = CMat::zeros(2, 2);
                    v[(0, 0)] = Complex64::from(lambda - 1.0);
                    snap.flux[0] = Some(flux_term(&d, &v));
                }
            }
        } else {
            let meter = self.meter.as_ref().expect("meter era exists");
            let t_meter = self.schedule.total_duration();
            let base = self.segment_starts.last().expect("nonempty");
            let attached = attach_meter(base, meter)?;
            let tau = (t - t_meter).clamp(0.0, meter.duration);
            let advanced = apply_energy_meter(&attached, meter, tau)?;
            snap.meter = Some(MeterSnap {
                coeffs: advanced.coefficients().iter().copied().collect(),
                packets: *advanced.pointer().expect("pointer attached"),
            });
        }
        Ok(snap)
    }

    fn snapshot(&self, segment: usize, t: f64) -> Result<Rc<Snapshot>> {
        let key = (segment, t.to_bits());
        if let Some((k, s)) = self.memo.borrow().as_ref() {
            if *k == key {
                return Ok(Rc::clone(s));
            }
        }
        let snap = Rc::new(self.build_snapshot(segment, t)?);
        *self.memo.borrow_mut() = Some((key, Rc::clone(&snap)));
        Ok(snap)
    }
}

/// `I[m][k] = Im(c_m* (Vc)_k)` for a 2x2 Hermitian drive matrix.
fn flux_term(factor: &[Complex64; 2], v: &CMat) -> FluxTerm {
    let vc = [
        v[(0, 0)] * factor[0] + v[(0, 1)] * factor[1],
        v[(1, 0)] * factor[0] + v[(1, 1)] * factor[1],
    ];
    let mut i = [[0.0; 2]; 2];
    for m in 0..2 {
        for k in 0..2 {
            i[m][k] = (factor[m].conj() * vc[k]).im;
        }
    }
    FluxTerm { factor: *factor, i }
}

/// X eigenvalue (+1 or -1) of the auxiliary factor, or an error when it
/// is not an eigenstate within 1e-9.
fn aux_x_eigenvalue(wf: &WellWavefunction) -> Result<f64> {
    let a = wf.factor(1)?;
    let p_plus = (a[0] + a[1]).norm_sqr() / 2.0;
    let p_minus = (a[0] - a[1]).norm_sqr() / 2.0;
    if p_plus > 1.0 - 1e-9 {
        Ok(1.0)
    } else if p_minus > 1.0 - 1e-9 {
        Ok(-1.0)
    } else {
        Err(Error::UnsupportedState {
            reason: format!(
                "oracle coupling from an auxiliary state that is no X eigenstate \
                 (populations +: {p_plus:.6}, -: {p_minus:.6})"
            ),
        })
    }
}

impl Flow for WellFlow {
    fn dims(&self) -> usize {
        self.n_qubits() + usize::from(self.meter.is_some())
    }

    fn coord_names(&self) -> Vec<&'static str> {
        let mut names = vec!["x"];
        if self.n_qubits() == 2 {
            names.push("y");
        }
        if self.meter.is_some() {
            names.push("z");
        }
        names
    }

    fn boundaries(&self) -> Vec<f64> {
        self.boundaries.clone()
    }

    fn velocity(
        &self,
        segment: usize,
        t: f64,
        p: &Point,
        node_eps: f64,
    ) -> std::result::Result<Point, FieldError> {
        let snap = self.snapshot(segment, t).map_err(|_| FieldError::NodeProximity)?;
        let mass = self.basis.mass();
        let mut v = [0.0; 3];
        for coord in 0..self.n_qubits() {
            let (kin, flux) = (snap.kin[coord], snap.flux[coord]);
            if kin.is_none() && flux.is_none() {
                continue;
            }
            let factor = kin.unwrap_or_else(|| flux.expect("one is present").factor);
            let q = p[coord];
            let phi = [self.basis.mode(1, q), self.basis.mode(2, q)];
            let xi = factor[0] * phi[0] + factor[1] * phi[1];
            let rho = xi.norm_sqr();
            if rho < node_eps {
                return Err(FieldError::NodeProximity);
            }
            let mut vel = 0.0;
            if kin.is_some() {
                let dphi = [self.basis.mode_deriv(1, q), self.basis.mode_deriv(2, q)];
                let dxi = factor[0] * dphi[0] + factor[1] * dphi[1];
                vel += (dxi * xi.conj()).im / rho / mass;
            }
            if let Some(ft) = flux {
                let g = |m: u8, k: u8| mode_overlap_integral(m, k, q);
                let j = -2.0
                    * (g(1, 1) * ft.i[0][0]
                        + g(2, 2) * ft.i[1][1]
                        + g(1, 2) * (ft.i[0][1] + ft.i[1][0]));
                vel += j / rho;
            }
            v[coord] = vel;
        }

        if let Some(ms) = &snap.meter {
            let z_index = self.n_qubits();
            let z = p[z_index];
            // mode weights |⟨mode m at (x, y)|ψ⟩|²
            let w = match self.n_qubits() {
                1 => {
                    let x = p[0];
                    [
                        ms.coeffs[0].norm_sqr() * self.basis.mode(1, x).powi(2),
                        ms.coeffs[1].norm_sqr() * self.basis.mode(2, x).powi(2),
                    ]
                }
                _ => {
                    let (x, y) = (p[0], p[1]);
                    let mut w = [0.0; 2];
                    for (m, wm) in w.iter_mut().enumerate() {
                        let amp = ms.coeffs[2 * m] * self.basis.mode(1, y)
                            + ms.coeffs[2 * m + 1] * self.basis.mode(2, y);
                        *wm = amp.norm_sqr() * self.basis.mode(m as u8 + 1, x).powi(2);
                    }
                    w
                }
            };
            let mut num = 0.0;
            let mut den = 0.0;
            for (wm, packet) in w.iter().zip(&ms.packets) {
                let weight = wm * packet.density(z);
                num += weight * packet.shift_rate;
                den += weight;
            }
            if den < node_eps {
                // far tails: amplitude-only weights decide, exact for a
                // definite data mode
                let (w1, w2) = (w[0], w[1]);
                if w1 < 1e-15 || w2 < 1e-15 {
                    v[z_index] =
                        if w1 >= w2 { ms.packets[0].shift_rate } else { ms.packets[1].shift_rate };
                } else {
                    return Err(FieldError::NodeProximity);
                }
            } else {
                v[z_index] = num / den;
            }
        }
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::well::schedule::evolve_well;
    use crate::trajectories::{integrate_ensemble, IntegratorConfig};
    use crate::well::schedule::{schedule_for_gate, schedule_for_oracle, WellSegment};
    use crate::qubit::{OracleFunction, UnitaryGate};

    fn basis() -> WellBasis {
        WellBasis::new(1.0).unwrap()
    }

    fn free_schedule(duration: f64) -> WellSchedule {
        WellSchedule {
            segments: vec![WellSegment {
                kind: SegmentKind::Wait { target: QubitId::Data },
                duration,
                label: "free".into(),
            }],
            phase_correction: 0.0,
            n_qubits: 1,
        }
    }

    #[test]
    fn eigenstate_trajectories_are_static() {
        let b = basis();
        let wf = WellWavefunction::product("0").unwrap();
        let flow = WellFlow::new(b, wf, free_schedule(10.0), false, None).unwrap();
        let pts = vec![[0.3, 0.0, 0.0], [0.62, 0.0, 0.0]];
        let ens = integrate_ensemble(&pts, &flow, &IntegratorConfig::default()).unwrap();
        let last = ens.times.len() - 1;
        for tr in &ens.trajectories {
            assert!((tr.points[last][0] - tr.points[0][0]).abs() < 1e-10);
        }
    }

    #[test]
    fn beat_periodicity_of_two_mode_free_flow() {
        let b = basis();
        let wf = WellWavefunction::product("+").unwrap();
        let period = b.beat_period();
        // two equal segments: every sample time of the first recurs,
        // shifted by one period, in the second
        let schedule = WellSchedule {
            segments: vec![
                WellSegment {
                    kind: SegmentKind::Wait { target: QubitId::Data },
                    duration: period,
                    label: "free 1".into(),
                },
                WellSegment {
                    kind: SegmentKind::Wait { target: QubitId::Data },
                    duration: period,
                    label: "free 2".into(),
                },
            ],
            phase_correction: 0.0,
            n_qubits: 1,
        };
        let flow = WellFlow::new(b, wf, schedule, false, None).unwrap();
        let config = IntegratorConfig { dt: 1e-4, ..Default::default() };
        let pts = vec![[0.2, 0.0, 0.0], [0.45, 0.0, 0.0], [0.8, 0.0, 0.0]];
        let ens = integrate_ensemble(&pts, &flow, &config).unwrap();
        let half = ens
            .times
            .iter()
            .position(|t| (*t - period).abs() < 1e-9)
            .expect("segment boundary is always sampled");
        let per_segment = half;
        for k in 0..=per_segment {
            let (t0, t1) = (ens.times[k], ens.times[k + per_segment]);
            assert!((t1 - t0 - period).abs() < 1e-9, "grids misaligned at {k}");
            for tr in &ens.trajectories {
                let drift = (tr.points[k + per_segment][0] - tr.points[k][0]).abs();
                assert!(drift < 1e-6, "trajectory {} drifted {drift:.3e} over one period", tr.id);
            }
        }
    }

    #[test]
    fn oracle_flow_keeps_y_static() {
        let b = basis();
        let wf = WellWavefunction::product("+-").unwrap();
        let schedule = schedule_for_oracle(OracleFunction::F2, &b).unwrap();
        let flow = WellFlow::new(b, wf, schedule, false, None).unwrap();
        for t in [0.0, 0.3, 0.7, 1.2] {
            for p in [[0.3, 0.4, 0.0], [0.7, 0.2, 0.0], [0.55, 0.81, 0.0]] {
                let v = flow.velocity_at(t, &p, 1e-12).unwrap();
                assert_eq!(v[1], 0.0, "v_y at t={t}");
            }
        }
    }

    #[test]
    fn oracle_flow_requires_aux_eigenstate() {
        let b = basis();
        let wf = WellWavefunction::product("+0").unwrap();
        let schedule = schedule_for_oracle(OracleFunction::F2, &b).unwrap();
        assert!(matches!(
            WellFlow::new(b, wf, schedule, false, None),
            Err(Error::UnsupportedState { .. })
        ));
    }

    #[test]
    fn oracle_flow_rejects_free_evolution_flag() {
        let b = basis();
        let wf = WellWavefunction::product("+-").unwrap();
        let schedule = schedule_for_oracle(OracleFunction::F2, &b).unwrap();
        assert!(matches!(
            WellFlow::new(b, wf, schedule, true, None),
            Err(Error::UnsupportedState { .. })
        ));
    }

    #[test]
    fn hadamard_pulse_transports_density() {
        // equivariance through the full Hadamard schedule from |1⟩
        let b = basis();
        let wf = WellWavefunction::product("1").unwrap();
        let schedule = schedule_for_gate(&UnitaryGate::hadamard(), &b, QubitId::Data, 1).unwrap();
        let total = schedule.total_duration();
        let final_wf = evolve_well(&wf, &schedule, &b, total, false).unwrap();
        let flow = WellFlow::new(b, wf, schedule, false, None).unwrap();

        let marginals = [crate::trajectories::Marginal1D::TwoMode {
            coeffs: [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        }];
        let pts = crate::trajectories::sample_initial(
            &crate::trajectories::SamplerSpec::Equilibrium,
            &marginals,
            None,
            400,
            21,
            1e-12,
        )
        .unwrap();
        let ens = integrate_ensemble(&pts, &flow, &IntegratorConfig::default()).unwrap();
        let last = ens.times.len() - 1;
        let l1 = crate::trajectories::equivariance_distance(
            &ens,
            last,
            0,
            (0.0, 1.0),
            50,
            &|a, bb| final_wf.marginal_mass(0, a, bb).unwrap(),
        )
        .unwrap();
        assert!(l1 < 0.08, "L1 = {l1}");
        // final density is |sin(πx) - sin(2πx)|²: mass piles left of 1/3
        let left: usize = ens
            .trajectories
            .iter()
            .filter(|tr| tr.points[last][0] < 1.0 / 3.0)
            .count();
        let expected = final_wf.marginal_mass(0, 0.0, 1.0 / 3.0).unwrap();
        assert!((left as f64 / 400.0 - expected).abs() < 0.05);
    }

    #[test]
    fn meter_era_moves_z_at_mode_rate() {
        let b = basis();
        let meter = EnergyMeter::new(0.05, 1.0, 0.05).unwrap();
        // state |1⟩: rate must be 4 a π²
        let wf = WellWavefunction::product("1").unwrap();
        let schedule = free_schedule(0.5);
        let flow = WellFlow::new(b, wf, schedule, false, Some(meter)).unwrap();
        let pts = [[0.3, 0.02, 0.0], [0.7, -0.03, 0.0]];
        // single-qubit + meter: coords are (x, z)
        let pts: Vec<_> = pts.iter().map(|p| [p[0], p[1], 0.0]).collect();
        let ens = integrate_ensemble(&pts, &flow, &IntegratorConfig::default()).unwrap();
        assert_eq!(ens.coord_names, vec!["x", "z"]);
        let last = ens.times.len() - 1;
        let rate = meter.shift_rate(2);
        for tr in &ens.trajectories {
            let dz = tr.points[last][1] - tr.points[0][1];
            assert!((dz - rate * meter.duration).abs() < 1e-9, "dz = {dz}");
        }
    }
}
