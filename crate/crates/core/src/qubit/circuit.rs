//! Circuit intermediate representation and its compilation into a
//! piecewise-constant Hamiltonian schedule.

use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::linalg::{identity, kron, CMat};
use crate::qubit::{
    hadamard_generator, hadamard_matrix, oracle_generator, oracle_unitary, pauli_x, pauli_z,
    pi8_generator, t_gate_matrix, HermitianGenerator, OracleFunction, RegisterState,
};

/// Register wire names: `d` is the data qubit, `a` the auxiliary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum QubitId {
    #[serde(rename = "d")]
    Data,
    #[serde(rename = "a")]
    Aux,
}

impl QubitId {
    pub fn as_str(self) -> &'static str {
        match self {
            QubitId::Data => "d",
            QubitId::Aux => "a",
        }
    }
}

/// One gate application in program order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CircuitGate {
    Hadamard(QubitId),
    PauliX(QubitId),
    PauliZ(QubitId),
    TGate(QubitId),
    Oracle(OracleFunction),
}

impl CircuitGate {
    pub fn name(&self) -> String {
        match self {
            CircuitGate::Hadamard(_) => "H".into(),
            CircuitGate::PauliX(_) => "X".into(),
            CircuitGate::PauliZ(_) => "Z".into(),
            CircuitGate::TGate(_) => "T".into(),
            CircuitGate::Oracle(f) => f.id().into(),
        }
    }

    pub fn target_str(&self) -> &'static str {
        match self {
            CircuitGate::Hadamard(q)
            | CircuitGate::PauliX(q)
            | CircuitGate::PauliZ(q)
            | CircuitGate::TGate(q) => q.as_str(),
            CircuitGate::Oracle(_) => "da",
        }
    }

    /// 2x2 matrix for single-qubit gates, 4x4 for the oracle.
    pub fn base_matrix(&self) -> CMat {
        match self {
            CircuitGate::Hadamard(_) => hadamard_matrix(),
            CircuitGate::PauliX(_) => pauli_x(),
            CircuitGate::PauliZ(_) => pauli_z(),
            CircuitGate::TGate(_) => t_gate_matrix(),
            CircuitGate::Oracle(f) => oracle_unitary(*f).matrix().clone(),
        }
    }

    /// Matrix embedded into the register dimension.
    pub fn embedded_matrix(&self, dim: usize) -> Result<CMat> {
        let base = self.base_matrix();
        match (self, dim) {
            (CircuitGate::Oracle(_), 4) => Ok(base),
            (CircuitGate::Oracle(_), d) => Err(Error::BadDimension { dim: d }),
            (_, 2) => Ok(base),
            (gate, 4) => {
                let target = match gate {
                    CircuitGate::Hadamard(q)
                    | CircuitGate::PauliX(q)
                    | CircuitGate::PauliZ(q)
                    | CircuitGate::TGate(q) => *q,
                    CircuitGate::Oracle(_) => unreachable!(),
                };
                Ok(match target {
                    QubitId::Data => kron(&base, &identity(2)),
                    QubitId::Aux => kron(&identity(2), &base),
                })
            }
            (_, d) => Err(Error::BadDimension { dim: d }),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct GateRecord {
    name: String,
    target: String,
}

impl Serialize for CircuitGate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GateRecord { name: self.name(), target: self.target_str().into() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CircuitGate {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rec = GateRecord::deserialize(d)?;
        let qubit = |t: &str| match t {
            "d" => Ok(QubitId::Data),
            "a" => Ok(QubitId::Aux),
            other => Err(serde::de::Error::custom(format!("unknown target `{other}`"))),
        };
        match rec.name.as_str() {
            "H" => Ok(CircuitGate::Hadamard(qubit(&rec.target)?)),
            "X" => Ok(CircuitGate::PauliX(qubit(&rec.target)?)),
            "Z" => Ok(CircuitGate::PauliZ(qubit(&rec.target)?)),
            "T" => Ok(CircuitGate::TGate(qubit(&rec.target)?)),
            f @ ("f0" | "f1" | "f2" | "f3") => {
                if rec.target != "da" {
                    return Err(serde::de::Error::custom("oracle target must be `da`"));
                }
                Ok(CircuitGate::Oracle(OracleFunction::parse(f).expect("checked")))
            }
            other => Err(serde::de::Error::custom(format!("unknown gate `{other}`"))),
        }
    }
}

/// Terminal measurement request.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementSpec {
    pub qubit: QubitId,
}

/// Ordered gate program with an optional terminal measurement.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitIr {
    /// Initial computational-basis label: one char per qubit, e.g. "01".
    pub initial: String,
    pub gates: Vec<CircuitGate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<MeasurementSpec>,
}

impl CircuitIr {
    pub fn new(initial: &str, gates: Vec<CircuitGate>, measure: Option<MeasurementSpec>) -> Result<Self> {
        let ir = Self { initial: initial.to_string(), gates, measure };
        ir.validate()?;
        Ok(ir)
    }

    pub fn n_qubits(&self) -> usize {
        self.initial.len()
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits()
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_qubits() == 0 || self.n_qubits() > 2 {
            return Err(Error::InvalidCircuit {
                reason: format!("initial state `{}` must name 1 or 2 qubits", self.initial),
            });
        }
        if !self.initial.chars().all(|c| c == '0' || c == '1') {
            return Err(Error::InvalidCircuit {
                reason: format!("initial state `{}` must be a bit string", self.initial),
            });
        }
        for g in &self.gates {
            let needs_two = matches!(g, CircuitGate::Oracle(_))
                || matches!(
                    g,
                    CircuitGate::Hadamard(QubitId::Aux)
                        | CircuitGate::PauliX(QubitId::Aux)
                        | CircuitGate::PauliZ(QubitId::Aux)
                        | CircuitGate::TGate(QubitId::Aux)
                );
            if needs_two && self.n_qubits() != 2 {
                return Err(Error::InvalidCircuit {
                    reason: format!("gate {} targets a qubit outside the register", g.name()),
                });
            }
        }
        if let Some(m) = &self.measure {
            if m.qubit == QubitId::Aux && self.n_qubits() != 2 {
                return Err(Error::InvalidCircuit {
                    reason: "measurement targets a qubit outside the register".into(),
                });
            }
        }
        Ok(())
    }

    pub fn initial_state(&self) -> RegisterState {
        let idx = usize::from_str_radix(&self.initial, 2).expect("validated bit string");
        RegisterState::basis(self.dim(), idx).expect("validated dimension")
    }
}

/// Deutsch circuit: `|0⟩_d |1⟩_a`, Hadamard both qubits, oracle,
/// Hadamard on the data qubit, then measure the data qubit.
pub fn deutsch_circuit(f: OracleFunction) -> CircuitIr {
    CircuitIr::new(
        "01",
        vec![
            CircuitGate::Hadamard(QubitId::Data),
            CircuitGate::Hadamard(QubitId::Aux),
            CircuitGate::Oracle(f),
            CircuitGate::Hadamard(QubitId::Data),
        ],
        Some(MeasurementSpec { qubit: QubitId::Data }),
    )
    .expect("deutsch circuit is valid")
}

/// Per-gate default durations; only `T_or = π/2` is physically
/// distinguished (it makes the coupling matrix elements land on X-1).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GateTimings {
    pub t_hadamard: f64,
    pub t_oracle: f64,
    pub t_x: f64,
    pub t_z: f64,
    pub t_pi8: f64,
}

impl Default for GateTimings {
    fn default() -> Self {
        Self { t_hadamard: 1.0, t_oracle: FRAC_PI_2, t_x: 1.0, t_z: 1.0, t_pi8: 1.0 }
    }
}

impl GateTimings {
    fn validate(&self) -> Result<()> {
        for (v, name) in [
            (self.t_hadamard, "t_hadamard"),
            (self.t_oracle, "t_oracle"),
            (self.t_x, "t_x"),
            (self.t_z, "t_z"),
            (self.t_pi8, "t_pi8"),
        ] {
            if !(v > 0.0) {
                return Err(Error::InvalidConfig { reason: format!("{name} must be positive, got {v}") });
            }
        }
        Ok(())
    }
}

/// One schedule entry: a generator switched on for its duration.
#[derive(Debug, Clone)]
pub struct ScheduleSegment {
    pub generator: HermitianGenerator,
    pub label: String,
}

/// Ordered piecewise-constant generator program. The product of the
/// segment unitaries (in time order) reproduces the compiled circuit
/// exactly, global phase included: the `-1` shifts inside each
/// generator carry the phase, so no separate ledger is needed here.
#[derive(Debug, Clone)]
pub struct HamiltonianSchedule {
    segments: Vec<ScheduleSegment>,
    dim: usize,
}

impl HamiltonianSchedule {
    pub fn new(dim: usize, segments: Vec<ScheduleSegment>) -> Result<Self> {
        if dim != 2 && dim != 4 {
            return Err(Error::BadDimension { dim });
        }
        for seg in &segments {
            if seg.generator.dim() != dim {
                return Err(Error::BadDimension { dim: seg.generator.dim() });
            }
        }
        Ok(Self { segments, dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn segments(&self) -> &[ScheduleSegment] {
        &self.segments
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(|s| s.generator.duration()).sum()
    }

    /// Ordered product of all segment unitaries.
    pub fn total_unitary(&self) -> CMat {
        let mut u = identity(self.dim);
        for seg in &self.segments {
            u = seg.generator.unitary().matrix() * u;
        }
        u
    }

    /// JSON-friendly dump of every segment.
    pub fn dump(&self) -> Vec<SegmentDump> {
        self.segments.iter().map(SegmentDump::from_segment).collect()
    }
}

/// Serializable segment: matrix stored row-major as (re, im) pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SegmentDump {
    pub label: String,
    pub duration: f64,
    pub matrix: Vec<[f64; 2]>,
}

impl SegmentDump {
    pub fn from_segment(seg: &ScheduleSegment) -> Self {
        let m = seg.generator.matrix();
        let mut matrix = Vec::with_capacity(m.len());
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                matrix.push([m[(r, c)].re, m[(r, c)].im]);
            }
        }
        Self { label: seg.label.clone(), duration: seg.generator.duration(), matrix }
    }
}

/// Serialize gate applications into time segments; single-qubit
/// generators are embedded into the register dimension.
pub fn compile_circuit(ir: &CircuitIr, timings: &GateTimings) -> Result<HamiltonianSchedule> {
    ir.validate()?;
    timings.validate()?;
    let dim = ir.dim();
    let mut segments = Vec::with_capacity(ir.gates.len());
    for gate in &ir.gates {
        let (gen2, label) = match gate {
            CircuitGate::Hadamard(q) => {
                (hadamard_generator(timings.t_hadamard)?, format!("H({})", q.as_str()))
            }
            CircuitGate::PauliX(q) => {
                let m = (pauli_x() - identity(2)).scale(FRAC_PI_2 / timings.t_x);
                (HermitianGenerator::new(m, timings.t_x)?, format!("X({})", q.as_str()))
            }
            CircuitGate::PauliZ(q) => {
                let m = (pauli_z() - identity(2)).scale(FRAC_PI_2 / timings.t_z);
                (HermitianGenerator::new(m, timings.t_z)?, format!("Z({})", q.as_str()))
            }
            CircuitGate::TGate(q) => {
                (pi8_generator(timings.t_pi8)?, format!("T({})", q.as_str()))
            }
            CircuitGate::Oracle(f) => {
                let gen = oracle_generator(*f, timings.t_oracle)?;
                segments.push(ScheduleSegment { generator: gen, label: format!("U_{}", f.id()) });
                continue;
            }
        };
        let target = match gate {
            CircuitGate::Hadamard(q)
            | CircuitGate::PauliX(q)
            | CircuitGate::PauliZ(q)
            | CircuitGate::TGate(q) => *q,
            CircuitGate::Oracle(_) => unreachable!(),
        };
        let generator = if dim == 4 { gen2.embed(target)? } else { gen2 };
        segments.push(ScheduleSegment { generator, label });
    }
    HamiltonianSchedule::new(dim, segments)
}

/// Direct matrix product of the circuit's gates (no generators).
/// This is the reference the schedule is checked against.
pub fn circuit_unitary(ir: &CircuitIr) -> Result<CMat> {
    ir.validate()?;
    let dim = ir.dim();
    let mut u = identity(dim);
    for gate in &ir.gates {
        u = gate.embedded_matrix(dim)? * u;
    }
    Ok(u)
}

/// Propagate a register through the schedule up to time `t`:
/// completed segments in full, the active segment partially.
pub fn evolve_register(
    state: &RegisterState,
    schedule: &HamiltonianSchedule,
    t: f64,
) -> Result<RegisterState> {
    let total = schedule.total_duration();
    if t < 0.0 || t > total + 1e-12 {
        return Err(Error::TimeOutOfRange { t, total });
    }
    if state.dim() != schedule.dim() {
        return Err(Error::BadDimension { dim: state.dim() });
    }
    let mut remaining = t;
    let mut current = state.clone();
    for seg in schedule.segments() {
        if remaining <= 0.0 {
            break;
        }
        let dur = seg.generator.duration();
        let step = remaining.min(dur);
        let u = seg.generator.unitary_at(step)?;
        current = current.apply(&u)?;
        remaining -= step;
    }
    Ok(current)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs_diff, max_abs_diff_up_to_phase};
    use crate::qubit::partial_gate_unitary;

    /// Hand-built product for the Deutsch circuit; independent of the
    /// compile/exponential path.
    fn deutsch_reference_unitary(f: OracleFunction) -> CMat {
        let h2 = kron(&hadamard_matrix(), &identity(2));
        let ha = kron(&identity(2), &hadamard_matrix());
        let or = oracle_unitary(f).matrix().clone();
        // time order: H(d), H(a), oracle, H(d)
        h2.clone() * or * ha * h2
    }

    #[test]
    fn deutsch_final_data_state_is_outcome_bit() {
        for f in OracleFunction::ALL {
            let ir = deutsch_circuit(f);
            let u = circuit_unitary(&ir).unwrap();
            assert!(max_abs_diff(&u, &deutsch_reference_unitary(f)) < 1e-14);
            let final_state =
                RegisterState::new(&u * ir.initial_state().amplitudes().clone()).unwrap();
            let outcome = f.eval(0) ^ f.eval(1);
            let overlap = final_state.data_population(outcome);
            assert!((overlap - 1.0).abs() < 1e-10, "oracle {}: overlap {overlap}", f.id());
        }
    }

    #[test]
    fn deutsch_f0_maps_to_zero_minus() {
        // |01⟩ -> |0⟩_d |−⟩_a up to global phase
        let ir = deutsch_circuit(OracleFunction::F0);
        let u = circuit_unitary(&ir).unwrap();
        let out = &u * ir.initial_state().amplitudes().clone();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let expect = CMat::from_row_slice(
            4,
            1,
            &[
                num_complex::Complex64::from(s),
                num_complex::Complex64::from(-s),
                num_complex::Complex64::from(0.0),
                num_complex::Complex64::from(0.0),
            ],
        );
        let out_m = CMat::from_column_slice(4, 1, out.as_slice());
        assert!(max_abs_diff_up_to_phase(&out_m, &expect) < 1e-12);
    }

    #[test]
    fn compile_empty_circuit() {
        let ir = CircuitIr::new("01", vec![], None).unwrap();
        let sched = compile_circuit(&ir, &GateTimings::default()).unwrap();
        assert_eq!(sched.segments().len(), 0);
        assert!(max_abs_diff(&sched.total_unitary(), &identity(4)) < 1e-15);
    }

    #[test]
    fn compiled_schedule_matches_circuit_unitary() {
        for f in OracleFunction::ALL {
            let ir = deutsch_circuit(f);
            let sched = compile_circuit(&ir, &GateTimings::default()).unwrap();
            let diff = max_abs_diff(&sched.total_unitary(), &circuit_unitary(&ir).unwrap());
            assert!(diff < 1e-10, "oracle {}: diff {diff:.3e}", f.id());
            assert!(
                (sched.total_duration() - (3.0 + FRAC_PI_2)).abs() < 1e-12,
                "3 Hadamards and one oracle"
            );
        }
    }

    #[test]
    fn evolve_register_endpoints_and_partial() {
        let ir = CircuitIr::new("0", vec![CircuitGate::Hadamard(QubitId::Data)], None).unwrap();
        let sched = compile_circuit(&ir, &GateTimings::default()).unwrap();
        let init = ir.initial_state();
        let at0 = evolve_register(&init, &sched, 0.0).unwrap();
        assert!(max_abs_diff(
            &CMat::from_column_slice(2, 1, at0.amplitudes().as_slice()),
            &CMat::from_column_slice(2, 1, init.amplitudes().as_slice())
        ) < 1e-15);

        // partial Hadamard matches the closed-form interpolation
        for a in [0.25, 0.5, 0.9] {
            let evolved = evolve_register(&init, &sched, a).unwrap();
            let reference = init.apply(&partial_gate_unitary(a).unwrap()).unwrap();
            let d = (evolved.amplitudes() - reference.amplitudes()).norm();
            assert!(d < 1e-12, "a = {a}: {d:.3e}");
        }
        assert!((evolve_register(&init, &sched, 1.0).unwrap().norm() - 1.0).abs() < 1e-12);
        assert!(evolve_register(&init, &sched, 1.5).is_err());
    }

    #[test]
    fn full_deutsch_f1_gives_data_one() {
        let ir = deutsch_circuit(OracleFunction::F1);
        let sched = compile_circuit(&ir, &GateTimings::default()).unwrap();
        let fin = evolve_register(&ir.initial_state(), &sched, sched.total_duration()).unwrap();
        assert!((fin.data_population(1) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn ir_json_round_trip() {
        let ir = deutsch_circuit(OracleFunction::F2);
        let json = serde_json::to_string(&ir).unwrap();
        assert!(json.contains("\"name\":\"H\""));
        assert!(json.contains("\"target\":\"d\""));
        assert!(json.contains("\"name\":\"f2\""));
        let back: CircuitIr = serde_json::from_str(&json).unwrap();
        assert_eq!(back.gates, ir.gates);
        assert_eq!(back.initial, "01");

        let bad = r#"{"initial":"01","gates":[{"name":"Q","target":"d"}]}"#;
        assert!(serde_json::from_str::<CircuitIr>(bad).is_err());
        let unknown_key = r#"{"initial":"01","gates":[],"extra":1}"#;
        assert!(serde_json::from_str::<CircuitIr>(unknown_key).is_err());
    }

    #[test]
    fn circuit_validation_rejects_bad_targets() {
        let ir = CircuitIr::new("0", vec![CircuitGate::Hadamard(QubitId::Aux)], None);
        assert!(ir.is_err());
        let ir = CircuitIr::new("0", vec![CircuitGate::Oracle(OracleFunction::F1)], None);
        assert!(ir.is_err());
    }

    #[test]
    fn schedule_dump_shape() {
        let ir = deutsch_circuit(OracleFunction::F2);
        let sched = compile_circuit(&ir, &GateTimings::default()).unwrap();
        let dump = sched.dump();
        assert_eq!(dump.len(), 4);
        assert_eq!(dump[0].matrix.len(), 16);
        assert_eq!(dump[2].label, "U_f2");
    }
}
