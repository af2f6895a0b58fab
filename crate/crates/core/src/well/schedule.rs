//! Compilation of gates into drive-potential segments and exact
//! closed-form propagation of the spectral coefficients through them.
//!
//! A single-qubit gate `U = e^{iα} R_z(β) R_x(γ) R_z(δ)` becomes
//! [wait(δ), x-pulse(γ/2), wait(β)]: waits realize z-rotations through
//! free evolution (principal positive duration solving 2ωt ≡ θ mod 2π,
//! with ω < 0), pulses switch on the δV drive whose matrix element is
//! X. The free phase `e^{-i(E₁+E₂)t/2}` is tracked exactly and the
//! residual against the gate's α is recorded on the schedule as its
//! `phase_correction` — physically fixed by preparing states at the
//! right time, here applied to the tracked global phase at segment end.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{identity, kron, max_abs_diff, CMat, I};
use crate::qubit::{pauli_x, pauli_z, zxz_decompose, OracleFunction, QubitId, UnitaryGate};
use crate::well::{WellBasis, WellWavefunction};

/// What is switched on during a schedule segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SegmentKind {
    /// Free evolution; realizes `R_z(2ωt)` on the target qubit.
    Wait { target: QubitId },
    /// δV drive on the target qubit; realizes `R_x(2t)`.
    XDrive { target: QubitId },
    /// The two-qubit `U(x,y)` coupling implementing the f₂ generator.
    OracleCoupling,
}

impl SegmentKind {
    pub fn target(&self) -> Option<QubitId> {
        match self {
            SegmentKind::Wait { target } | SegmentKind::XDrive { target } => Some(*target),
            SegmentKind::OracleCoupling => None,
        }
    }
}

/// One drive segment.
#[derive(Debug, Clone)]
pub struct WellSegment {
    pub kind: SegmentKind,
    pub duration: f64,
    pub label: String,
}

/// Ordered drive program for one or two well qubits.
#[derive(Debug, Clone)]
pub struct WellSchedule {
    pub segments: Vec<WellSegment>,
    /// Residual phase fixed by state preparation; applied at schedule end.
    pub phase_correction: f64,
    pub n_qubits: usize,
}

impl WellSchedule {
    pub fn empty(n_qubits: usize) -> Self {
        Self { segments: Vec::new(), phase_correction: 0.0, n_qubits }
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    /// Concatenate another schedule; phase corrections add.
    pub fn extend(&mut self, other: WellSchedule) -> Result<()> {
        if other.n_qubits != self.n_qubits {
            return Err(Error::BadDimension { dim: 1 << other.n_qubits });
        }
        self.segments.extend(other.segments);
        self.phase_correction =
            wrap_angle(self.phase_correction + other.phase_correction);
        Ok(())
    }

    fn lift(mut self, n_qubits: usize) -> Self {
        self.n_qubits = n_qubits;
        self
    }

    /// Embedded Hermitian generator matrix of one segment (the drive's
    /// matrix elements; the free term `ωZ` enters waits always and
    /// pulses only when `include_free` is set).
    pub fn generator_matrix(
        &self,
        segment: &WellSegment,
        basis: &WellBasis,
        include_free: bool,
    ) -> CMat {
        let dim = 1 << self.n_qubits;
        let embed = |m: &CMat, target: QubitId| -> CMat {
            if dim == 2 {
                m.clone()
            } else {
                match target {
                    QubitId::Data => kron(m, &identity(2)),
                    QubitId::Aux => kron(&identity(2), m),
                }
            }
        };
        match segment.kind {
            SegmentKind::Wait { target } => embed(&pauli_z().scale(basis.omega()), target),
            SegmentKind::XDrive { target } => {
                let mut m = pauli_x();
                if include_free {
                    m += pauli_z().scale(basis.omega());
                }
                embed(&m, target)
            }
            SegmentKind::OracleCoupling => {
                let mut m = crate::well::drive::oracle_coupling_target();
                if include_free {
                    m += kron(&pauli_z().scale(basis.omega()), &identity(2))
                        + kron(&identity(2), &pauli_z().scale(basis.omega()));
                }
                m
            }
        }
    }

    /// Unitary of one segment after time `tau` (plus the ledger phase
    /// it contributes).
    pub fn segment_unitary(
        &self,
        segment: &WellSegment,
        basis: &WellBasis,
        tau: f64,
        include_free: bool,
    ) -> (CMat, f64) {
        let dim = 1 << self.n_qubits;
        let embed = |m: CMat, target: QubitId| -> CMat {
            if dim == 2 {
                m
            } else {
                match target {
                    QubitId::Data => kron(&m, &identity(2)),
                    QubitId::Aux => kron(&identity(2), &m),
                }
            }
        };
        match segment.kind {
            SegmentKind::Wait { target } => {
                (embed(wait_propagator(basis, tau), target), basis.phase_rate() * tau)
            }
            SegmentKind::XDrive { target } => {
                let phase = if include_free { basis.phase_rate() * tau } else { 0.0 };
                (embed(xdrive_propagator(basis, tau, include_free), target), phase)
            }
            SegmentKind::OracleCoupling => {
                let phase = if include_free { 2.0 * basis.phase_rate() * tau } else { 0.0 };
                (oracle_propagator(basis, tau, include_free), phase)
            }
        }
    }

    /// Ordered product of all segment unitaries including the tracked
    /// free phase and the final phase correction.
    pub fn total_unitary(&self, basis: &WellBasis, include_free: bool) -> CMat {
        let mut u = identity(1 << self.n_qubits);
        let mut phase = self.phase_correction;
        for seg in &self.segments {
            let (m, dp) = self.segment_unitary(seg, basis, seg.duration, include_free);
            u = m * u;
            phase += dp;
        }
        u * Complex64::from_polar(1.0, phase)
    }
}

/// `diag(e^{-iωτ}, e^{iωτ})`: the R_z(2ωτ) part of free evolution.
fn wait_propagator(basis: &WellBasis, tau: f64) -> CMat {
    let w = basis.omega();
    CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![
        Complex64::from_polar(1.0, -w * tau),
        Complex64::from_polar(1.0, w * tau),
    ]))
}

/// `exp(-i X τ)` (or `exp(-i (X + ωZ) τ)` with the free term kept).
fn xdrive_propagator(basis: &WellBasis, tau: f64, include_free: bool) -> CMat {
    if !include_free {
        return identity(2).scale(tau.cos()) - pauli_x() * I * Complex64::from(tau.sin());
    }
    let w = basis.omega();
    let r = (1.0 + w * w).sqrt();
    let axis = (pauli_x() + pauli_z().scale(w)).scale(1.0 / r);
    identity(2).scale((r * tau).cos()) - axis * I * Complex64::from((r * tau).sin())
}

/// Coupling propagator: `e^{-i(X-1)τ} = e^{iτ}(cos τ - i sin τ X)` on
/// the auxiliary within the data-mode-1 block, identity elsewhere.
fn oracle_propagator(basis: &WellBasis, tau: f64, include_free: bool) -> CMat {
    if !include_free {
        let mut u = identity(4);
        let block = (identity(2).scale(tau.cos()) - pauli_x() * I * Complex64::from(tau.sin()))
            * Complex64::from_polar(1.0, tau);
        for r in 0..2 {
            for c in 0..2 {
                u[(r, c)] = block[(r, c)];
            }
        }
        u
    } else {
        let w = basis.omega();
        let h = crate::well::drive::oracle_coupling_target()
            + kron(&pauli_z().scale(w), &identity(2))
            + kron(&identity(2), &pauli_z().scale(w));
        crate::linalg::expm_hermitian(&h, tau).expect("Hermitian by construction")
    }
}

/// Principal positive wait realizing `R_z(θ)`: smallest `t ≥ 0` with
/// `2ωt ≡ θ (mod 2π)`. With ω < 0 a positive angle needs most of a
/// revolution, e.g. θ = π/2 takes `t = 3π/(4|ω|)`.
pub fn wait_duration(theta: f64, basis: &WellBasis) -> f64 {
    let two_pi = 2.0 * PI;
    let theta_norm = theta.rem_euclid(two_pi);
    if theta_norm == 0.0 {
        return 0.0;
    }
    (two_pi - theta_norm) / (2.0 * basis.omega().abs())
}

/// The free Hamiltonian in the truncated basis: `ωZ` per qubit (summed
/// embeddings for two), with the `-(E₁+E₂)/2` rate carried separately.
#[derive(Debug, Clone)]
pub struct FreeGenerator {
    pub matrix: CMat,
    /// Global phase rate, `n_qubits · (-(E₁+E₂)/2)`.
    pub phase_rate: f64,
}

pub fn free_generator(basis: &WellBasis, n_qubits: usize) -> Result<FreeGenerator> {
    let wz = pauli_z().scale(basis.omega());
    match n_qubits {
        1 => Ok(FreeGenerator { matrix: wz, phase_rate: basis.phase_rate() }),
        2 => Ok(FreeGenerator {
            matrix: kron(&wz, &identity(2)) + kron(&identity(2), &wz),
            phase_rate: 2.0 * basis.phase_rate(),
        }),
        n => Err(Error::BadDimension { dim: 1 << n }),
    }
}

const PHASE_MATCH_TOL: f64 = 1e-9;

/// Compile a single-qubit gate into wait/pulse segments acting on
/// `target`, via its ZXZ decomposition.
pub fn schedule_for_gate(
    gate: &UnitaryGate,
    basis: &WellBasis,
    target: QubitId,
    n_qubits: usize,
) -> Result<WellSchedule> {
    let d = zxz_decompose(gate)?;
    let mut segments = Vec::new();
    let t_delta = wait_duration(d.delta, basis);
    if t_delta > 0.0 {
        segments.push(WellSegment {
            kind: SegmentKind::Wait { target },
            duration: t_delta,
            label: format!("wait Rz({:.6}) [{}]", d.delta, gate.label()),
        });
    }
    if d.gamma != 0.0 {
        segments.push(WellSegment {
            kind: SegmentKind::XDrive { target },
            duration: d.gamma / 2.0,
            label: format!("xdrive Rx({:.6}) [{}]", d.gamma, gate.label()),
        });
    }
    let t_beta = wait_duration(d.beta, basis);
    if t_beta > 0.0 {
        segments.push(WellSegment {
            kind: SegmentKind::Wait { target },
            duration: t_beta,
            label: format!("wait Rz({:.6}) [{}]", d.beta, gate.label()),
        });
    }

    let mut schedule = WellSchedule { segments, phase_correction: 0.0, n_qubits: 1 };
    schedule.phase_correction = reconcile_phase(&schedule, basis, gate.matrix())?;
    Ok(schedule.lift(n_qubits))
}

/// Oracle schedules: f₀ is empty, f₃ an X pulse on the auxiliary, f₂
/// the coupling for `T_or = π/2`, and f₁ the f₂ evolution conjugated by
/// NOT pulses on the data qubit.
pub fn schedule_for_oracle(f: OracleFunction, basis: &WellBasis) -> Result<WellSchedule> {
    let t_or = PI / 2.0;
    let mut schedule = WellSchedule::empty(2);
    match f {
        OracleFunction::F0 => {}
        OracleFunction::F3 => {
            let x = schedule_for_gate(&UnitaryGate::pauli_x(), basis, QubitId::Aux, 2)?;
            schedule.extend(x)?;
        }
        OracleFunction::F2 => {
            schedule.segments.push(WellSegment {
                kind: SegmentKind::OracleCoupling,
                duration: t_or,
                label: "oracle coupling U(x,y) [f2]".into(),
            });
        }
        OracleFunction::F1 => {
            let x = schedule_for_gate(&UnitaryGate::pauli_x(), basis, QubitId::Data, 2)?;
            schedule.extend(x.clone())?;
            schedule.segments.push(WellSegment {
                kind: SegmentKind::OracleCoupling,
                duration: t_or,
                label: "oracle coupling U(x,y) [f1 core]".into(),
            });
            schedule.extend(x)?;
        }
    }
    // reconcile the whole program against the abstract oracle unitary
    let target = crate::qubit::oracle_unitary(f);
    schedule.phase_correction = reconcile_phase(&schedule, basis, target.matrix())?;
    Ok(schedule)
}

/// The full Deutsch drive program: H(d), H(a), oracle, H(d).
pub fn schedule_deutsch(f: OracleFunction, basis: &WellBasis) -> Result<WellSchedule> {
    let h = UnitaryGate::hadamard();
    let mut schedule = WellSchedule::empty(2);
    schedule.extend(schedule_for_gate(&h, basis, QubitId::Data, 2)?)?;
    schedule.extend(schedule_for_gate(&h, basis, QubitId::Aux, 2)?)?;
    schedule.extend(schedule_for_oracle(f, basis)?)?;
    schedule.extend(schedule_for_gate(&h, basis, QubitId::Data, 2)?)?;
    Ok(schedule)
}

/// Compile an arbitrary circuit into well drive segments, gate by gate.
pub fn schedule_for_circuit(
    ir: &crate::qubit::CircuitIr,
    basis: &WellBasis,
) -> Result<WellSchedule> {
    ir.validate()?;
    let n_qubits = ir.n_qubits();
    let mut schedule = WellSchedule::empty(n_qubits);
    for gate in &ir.gates {
        let part = match gate {
            crate::qubit::CircuitGate::Oracle(f) => schedule_for_oracle(*f, basis)?,
            single => {
                let target = match single {
                    crate::qubit::CircuitGate::Hadamard(q)
                    | crate::qubit::CircuitGate::PauliX(q)
                    | crate::qubit::CircuitGate::PauliZ(q)
                    | crate::qubit::CircuitGate::TGate(q) => *q,
                    crate::qubit::CircuitGate::Oracle(_) => unreachable!(),
                };
                let u = UnitaryGate::new(single.base_matrix(), single.name())?;
                schedule_for_gate(&u, basis, target, n_qubits)?
            }
        };
        schedule.extend(part)?;
    }
    Ok(schedule)
}

/// Phase aligning the physical product with the target:
/// `e^{iχ} P = T`. Errors if no phase can align them.
fn reconcile_phase(schedule: &WellSchedule, basis: &WellBasis, target: &CMat) -> Result<f64> {
    let mut schedule = schedule.clone();
    schedule.phase_correction = 0.0;
    let p = schedule.total_unitary(basis, false);
    let m = target * p.adjoint();
    // m should be e^{iχ}·1
    let mut anchor = m[(0, 0)];
    for i in 1..m.nrows() {
        if m[(i, i)].norm() > anchor.norm() {
            anchor = m[(i, i)];
        }
    }
    if anchor.norm() < 0.5 {
        return Err(Error::UnschedulablePhase { residual: f64::NAN });
    }
    let chi = anchor.arg();
    let aligned = &p * Complex64::from_polar(1.0, chi);
    let residual = max_abs_diff(&aligned, target);
    if residual > PHASE_MATCH_TOL {
        return Err(Error::UnschedulablePhase { residual });
    }
    Ok(chi)
}

pub(crate) fn wrap_angle(a: f64) -> f64 {
    let w = a.rem_euclid(2.0 * PI);
    if w > PI {
        w - 2.0 * PI
    } else {
        w
    }
}

/// Advance a state through `tau` of one segment.
pub(crate) fn propagate_segment(
    state: &WellWavefunction,
    schedule: &WellSchedule,
    segment: &WellSegment,
    basis: &WellBasis,
    tau: f64,
    include_free: bool,
) -> WellWavefunction {
    let (u, dp) = schedule.segment_unitary(segment, basis, tau, include_free);
    WellWavefunction::with_parts(
        &u * state.coefficients(),
        wrap_angle(state.global_phase() + dp),
        state.pointer().cloned(),
    )
}

/// Propagate a wavefunction through the schedule to time `t`, tracking
/// the global phase exactly; the schedule's phase correction is applied
/// once the final segment completes.
pub fn evolve_well(
    initial: &WellWavefunction,
    schedule: &WellSchedule,
    basis: &WellBasis,
    t: f64,
    include_free: bool,
) -> Result<WellWavefunction> {
    let total = schedule.total_duration();
    if t < 0.0 || t > total + 1e-9 {
        return Err(Error::TimeOutOfRange { t, total });
    }
    let dim = 1 << schedule.n_qubits;
    if initial.coefficients().len() != dim {
        return Err(Error::BadDimension { dim: initial.coefficients().len() });
    }
    let mut state = initial.clone();
    let mut remaining = t;
    for seg in &schedule.segments {
        if remaining <= 0.0 {
            break;
        }
        let tau = remaining.min(seg.duration);
        state = propagate_segment(&state, schedule, seg, basis, tau, include_free);
        remaining -= tau;
    }
    if t >= total - 1e-15 {
        state = WellWavefunction::with_parts(
            state.coefficients().clone(),
            wrap_angle(state.global_phase() + schedule.phase_correction),
            state.pointer().cloned(),
        );
    }
    Ok(state)
}
