//! Abstract qubit algebra: register states, gates, generating
//! Hamiltonians and the Deutsch-circuit compilation pipeline.

mod circuit;
mod zxz;

pub use circuit::{
    circuit_unitary, compile_circuit, deutsch_circuit, evolve_register, CircuitGate, CircuitIr,
    GateTimings, HamiltonianSchedule, MeasurementSpec, QubitId, ScheduleSegment, SegmentDump,
};
pub use zxz::{rx, rz, zxz_decompose, ZxzDecomposition};

use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::linalg::{
    self, expm_hermitian, hermiticity_defect, identity, kron, unitarity_defect, CMat, CVec, I, ONE,
    ZERO,
};

pub fn pauli_x() -> CMat {
    CMat::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}

pub fn pauli_z() -> CMat {
    CMat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
}

pub fn hadamard_matrix() -> CMat {
    let h = Complex64::from(std::f64::consts::FRAC_1_SQRT_2);
    CMat::from_row_slice(2, 2, &[h, h, h, -h])
}

pub fn t_gate_matrix() -> CMat {
    CMat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, Complex64::from_polar(1.0, PI / 4.0)])
}

/// Complex amplitude vector of the register; dimension 2 (one qubit)
/// or 4 (data ⊗ auxiliary, pair index `(mn)` with the data index major).
#[derive(Debug, Clone, PartialEq)]
pub struct RegisterState {
    amplitudes: CVec,
}

impl RegisterState {
    pub fn new(amplitudes: CVec) -> Result<Self> {
        let dim = amplitudes.len();
        if dim != 2 && dim != 4 {
            return Err(Error::BadDimension { dim });
        }
        let deviation = (amplitudes.norm() - 1.0).abs();
        if deviation > 1e-12 {
            return Err(Error::NotNormalized { deviation });
        }
        Ok(Self { amplitudes })
    }

    /// Computational-basis state `|index⟩` of the given dimension.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if dim != 2 && dim != 4 {
            return Err(Error::BadDimension { dim });
        }
        let mut v = CVec::zeros(dim);
        v[index] = ONE;
        Self::new(v)
    }

    /// Two-qubit product basis state `|d⟩|a⟩`.
    pub fn pair(data: u8, aux: u8) -> Self {
        let idx = 2 * (data as usize & 1) + (aux as usize & 1);
        Self::basis(4, idx).expect("valid basis index")
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVec {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amplitudes[index]
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn apply(&self, gate: &UnitaryGate) -> Result<Self> {
        if gate.matrix.nrows() != self.dim() {
            return Err(Error::BadDimension { dim: gate.matrix.nrows() });
        }
        Ok(Self { amplitudes: &gate.matrix * &self.amplitudes })
    }

    /// Overlap magnitude with the data-qubit basis state `|bit⟩`,
    /// i.e. the root of the data-qubit population. Register must be 4-dim.
    pub fn data_population(&self, bit: u8) -> f64 {
        let base = 2 * (bit as usize & 1);
        (self.amplitudes[base].norm_sqr() + self.amplitudes[base + 1].norm_sqr()).sqrt()
    }
}

/// A gate as an explicit unitary matrix with a human-readable label.
#[derive(Debug, Clone)]
pub struct UnitaryGate {
    matrix: CMat,
    label: String,
}

impl UnitaryGate {
    pub fn new(matrix: CMat, label: impl Into<String>) -> Result<Self> {
        let deviation = unitarity_defect(&matrix);
        if deviation > linalg::UNITARITY_TOL {
            return Err(Error::NonUnitary { deviation });
        }
        Ok(Self { matrix, label: label.into() })
    }

    pub fn hadamard() -> Self {
        Self { matrix: hadamard_matrix(), label: "H".into() }
    }

    pub fn pauli_x() -> Self {
        Self { matrix: pauli_x(), label: "X".into() }
    }

    pub fn pauli_z() -> Self {
        Self { matrix: pauli_z(), label: "Z".into() }
    }

    pub fn t_gate() -> Self {
        Self { matrix: t_gate_matrix(), label: "T".into() }
    }

    pub fn identity(dim: usize) -> Self {
        Self { matrix: identity(dim), label: "1".into() }
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

/// Hermitian generator `H` acting for a fixed duration; the realized
/// unitary is `exp(-i H T)`. Units are inverse time with ħ = 1.
#[derive(Debug, Clone)]
pub struct HermitianGenerator {
    matrix: CMat,
    duration: f64,
}

impl HermitianGenerator {
    pub fn new(matrix: CMat, duration: f64) -> Result<Self> {
        let asymmetry = hermiticity_defect(&matrix);
        if asymmetry > 1e-12 {
            return Err(Error::NonHermitian { asymmetry });
        }
        // duration 0 is allowed only for the trivial (zero) generator
        let zero = matrix.iter().all(|c| c.norm() == 0.0);
        if duration < 0.0 || (duration == 0.0 && !zero) {
            return Err(Error::NonPositiveDuration { value: duration });
        }
        Ok(Self { matrix, duration })
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Unitary realized after the full duration.
    pub fn unitary(&self) -> UnitaryGate {
        self.unitary_at(self.duration).expect("duration is in range")
    }

    /// Unitary realized after `t ≤ duration`.
    pub fn unitary_at(&self, t: f64) -> Result<UnitaryGate> {
        if t < 0.0 || t > self.duration + 1e-12 {
            return Err(Error::TimeOutOfRange { t, total: self.duration });
        }
        let u = expm_hermitian(&self.matrix, t)?;
        Ok(UnitaryGate { matrix: u, label: format!("exp(-iHt), t={t}") })
    }

    /// Embed a single-qubit generator into the two-qubit space.
    pub fn embed(&self, target: QubitId) -> Result<Self> {
        if self.dim() != 2 {
            return Err(Error::BadDimension { dim: self.dim() });
        }
        let m = match target {
            QubitId::Data => kron(&self.matrix, &identity(2)),
            QubitId::Aux => kron(&identity(2), &self.matrix),
        };
        Ok(Self { matrix: m, duration: self.duration })
    }
}

/// The four oracle truth tables of the Deutsch problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OracleFunction {
    F0,
    F1,
    F2,
    F3,
}

impl OracleFunction {
    pub const ALL: [OracleFunction; 4] =
        [OracleFunction::F0, OracleFunction::F1, OracleFunction::F2, OracleFunction::F3];

    pub fn eval(self, input: u8) -> u8 {
        let p = input & 1;
        match self {
            OracleFunction::F0 => 0,
            OracleFunction::F1 => p,
            OracleFunction::F2 => 1 - p,
            OracleFunction::F3 => 1,
        }
    }

    pub fn is_constant(self) -> bool {
        self.eval(0) == self.eval(1)
    }

    pub fn id(self) -> &'static str {
        match self {
            OracleFunction::F0 => "f0",
            OracleFunction::F1 => "f1",
            OracleFunction::F2 => "f2",
            OracleFunction::F3 => "f3",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "f0" => Ok(OracleFunction::F0),
            "f1" => Ok(OracleFunction::F1),
            "f2" => Ok(OracleFunction::F2),
            "f3" => Ok(OracleFunction::F3),
            other => Err(Error::UnknownGate { name: other.to_string() }),
        }
    }
}

/// `exp(-i H t)` with a Hermiticity check on the input.
pub fn matrix_exponential(h: &CMat, t: f64) -> Result<UnitaryGate> {
    let u = expm_hermitian(h, t)?;
    Ok(UnitaryGate { matrix: u, label: "exp(-iHt)".into() })
}

/// Hadamard generator `H_Had = (π/2)(H - 1) / T_Had`.
pub fn hadamard_generator(t_had: f64) -> Result<HermitianGenerator> {
    if !(t_had > 0.0) {
        return Err(Error::NonPositiveDuration { value: t_had });
    }
    let m = (hadamard_matrix() - identity(2)).scale(FRAC_PI_2 / t_had);
    HermitianGenerator::new(m, t_had)
}

/// State of the Hadamard action at fraction `a` of its duration:
/// `[cos(aπ/2) 1 - i sin(aπ/2) H] e^{i aπ/2}`.
pub fn partial_gate_unitary(a: f64) -> Result<UnitaryGate> {
    if !(0.0..=1.0).contains(&a) {
        return Err(Error::FractionOutOfRange { value: a });
    }
    let half = a * FRAC_PI_2;
    let m = (identity(2).scale(half.cos()) - hadamard_matrix() * I * Complex64::from(half.sin()))
        * Complex64::from_polar(1.0, half);
    Ok(UnitaryGate { matrix: m, label: format!("H^{a}") })
}

/// Oracle unitary in compact block form: block `(p,p)` is `1` when
/// `f(p) = 0` and `X` when `f(p) = 1`.
pub fn oracle_unitary(f: OracleFunction) -> UnitaryGate {
    let mut m = CMat::zeros(4, 4);
    for p in 0..2usize {
        let block = if f.eval(p as u8) == 0 { identity(2) } else { pauli_x() };
        for r in 0..2 {
            for c in 0..2 {
                m[(2 * p + r, 2 * p + c)] = block[(r, c)];
            }
        }
    }
    UnitaryGate { matrix: m, label: format!("U_{}", f.id()) }
}

/// Generating Hamiltonian of the oracle: block `(p,p)` is
/// `δ_{1,f(p)} (π/2)(X - 1) / T_or`.
pub fn oracle_generator(f: OracleFunction, t_or: f64) -> Result<HermitianGenerator> {
    if !(t_or > 0.0) {
        return Err(Error::NonPositiveDuration { value: t_or });
    }
    let mut m = CMat::zeros(4, 4);
    let block = (pauli_x() - identity(2)).scale(FRAC_PI_2 / t_or);
    for p in 0..2usize {
        if f.eval(p as u8) == 1 {
            for r in 0..2 {
                for c in 0..2 {
                    m[(2 * p + r, 2 * p + c)] = block[(r, c)];
                }
            }
        }
    }
    HermitianGenerator::new(m, t_or)
}

/// π/8-gate generator `(π/8)(Z - 1) / T`; exponentiation over `T`
/// yields `diag(1, e^{iπ/4})`.
pub fn pi8_generator(t: f64) -> Result<HermitianGenerator> {
    if !(t > 0.0) {
        return Err(Error::NonPositiveDuration { value: t });
    }
    let m = (pauli_z() - identity(2)).scale(PI / 8.0 / t);
    HermitianGenerator::new(m, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;

    fn assert_close(a: &CMat, b: &CMat, tol: f64) {
        let d = max_abs_diff(a, b);
        assert!(d < tol, "matrices differ by {d:.3e}\n{a}\n{b}");
    }

    #[test]
    fn expm_zero_generator_is_identity() {
        let u = matrix_exponential(&CMat::zeros(2, 2), 5.0).unwrap();
        assert_close(u.matrix(), &identity(2), 1e-15);
    }

    #[test]
    fn expm_reconstructs_hadamard() {
        // H has eigenvalues ±1, so exp(-i (π/2)(H-1)) = H
        let h = (hadamard_matrix() - identity(2)).scale(FRAC_PI_2);
        let u = matrix_exponential(&h, 1.0).unwrap();
        assert_close(u.matrix(), &hadamard_matrix(), 1e-13);
    }

    #[test]
    fn expm_reconstructs_pauli_x() {
        let h = (pauli_x() - identity(2)).scale(FRAC_PI_2);
        let u = matrix_exponential(&h, 1.0).unwrap();
        assert_close(u.matrix(), &pauli_x(), 1e-13);
    }

    #[test]
    fn hadamard_generator_matrix() {
        let g = hadamard_generator(1.0).unwrap();
        let expected = (hadamard_matrix() - identity(2)).scale(FRAC_PI_2);
        assert_close(g.matrix(), &expected, 1e-15);
        assert_close(g.unitary().matrix(), &hadamard_matrix(), 1e-13);
        assert_close(g.unitary_at(0.0).unwrap().matrix(), &identity(2), 1e-15);
        assert!(hadamard_generator(0.0).is_err());
    }

    #[test]
    fn partial_gate_endpoints() {
        assert_close(partial_gate_unitary(0.0).unwrap().matrix(), &identity(2), 1e-15);
        assert_close(partial_gate_unitary(1.0).unwrap().matrix(), &hadamard_matrix(), 1e-14);
        assert!(partial_gate_unitary(1.2).is_err());
        assert!(partial_gate_unitary(-0.1).is_err());
    }

    #[test]
    fn partial_gate_matches_exponential_midway() {
        let g = hadamard_generator(1.0).unwrap();
        for k in 0..=50 {
            let a = k as f64 / 50.0;
            let u = g.unitary_at(a).unwrap();
            let p = partial_gate_unitary(a).unwrap();
            assert!(max_abs_diff(u.matrix(), p.matrix()) < 1e-12, "a = {a}");
        }
    }

    #[test]
    fn oracle_unitaries() {
        assert_close(oracle_unitary(OracleFunction::F0).matrix(), &identity(4), 1e-15);
        // f2: X on the auxiliary when the data qubit is |0⟩
        let f2 = oracle_unitary(OracleFunction::F2);
        let expected = {
            let mut m = CMat::zeros(4, 4);
            m[(0, 1)] = ONE;
            m[(1, 0)] = ONE;
            m[(2, 2)] = ONE;
            m[(3, 3)] = ONE;
            m
        };
        assert_close(f2.matrix(), &expected, 1e-15);
        // f3 = NOT on the auxiliary regardless of the data qubit
        let f3 = oracle_unitary(OracleFunction::F3);
        assert_close(f3.matrix(), &kron(&identity(2), &pauli_x()), 1e-15);
    }

    #[test]
    fn oracle_f2_is_cnot_up_to_data_conjugation() {
        // X_d U_f2 X_d equals the standard CNOT (= U_f1)
        let x_d = kron(&pauli_x(), &identity(2));
        let conj = &x_d * oracle_unitary(OracleFunction::F2).matrix() * &x_d;
        assert_close(&conj, oracle_unitary(OracleFunction::F1).matrix(), 1e-15);
    }

    #[test]
    fn oracle_generators_exponentiate_to_unitaries() {
        let t_or = FRAC_PI_2;
        for f in OracleFunction::ALL {
            let g = oracle_generator(f, t_or).unwrap();
            let u = g.unitary();
            assert!(
                max_abs_diff(u.matrix(), oracle_unitary(f).matrix()) < 1e-12,
                "oracle {}",
                f.id()
            );
        }
        // f0 generator is exactly zero
        let g0 = oracle_generator(OracleFunction::F0, t_or).unwrap();
        assert!(g0.matrix().iter().all(|c| c.norm() == 0.0));
        // f3 after T_or is a NOT on the auxiliary for both data blocks
        let g3 = oracle_generator(OracleFunction::F3, t_or).unwrap();
        let mut expected = CMat::zeros(4, 4);
        expected[(0, 1)] = ONE;
        expected[(1, 0)] = ONE;
        expected[(2, 3)] = ONE;
        expected[(3, 2)] = ONE;
        assert_close(g3.unitary().matrix(), &expected, 1e-13);
    }

    #[test]
    fn pi8_generator_gives_t_gate() {
        let g = pi8_generator(2.0).unwrap();
        assert_close(g.unitary().matrix(), &t_gate_matrix(), 1e-13);
        assert!(pi8_generator(-1.0).is_err());

        // eigenstate |0⟩ is untouched
        let zero = RegisterState::basis(2, 0).unwrap();
        let out = zero.apply(&g.unitary()).unwrap();
        assert!((out.amplitude(0) - ONE).norm() < 1e-13);

        // (|0⟩+|1⟩)/√2 picks up a relative phase of π/4
        let plus = RegisterState::new(CVec::from_vec(vec![
            Complex64::from(std::f64::consts::FRAC_1_SQRT_2),
            Complex64::from(std::f64::consts::FRAC_1_SQRT_2),
        ]))
        .unwrap();
        let out = plus.apply(&g.unitary()).unwrap();
        let rel = out.amplitude(1) / out.amplitude(0);
        assert!((rel.arg() - PI / 4.0).abs() < 1e-13);
    }

    #[test]
    fn oracle_truth_tables() {
        let table: [(OracleFunction, u8, u8); 4] = [
            (OracleFunction::F0, 0, 0),
            (OracleFunction::F1, 0, 1),
            (OracleFunction::F2, 1, 0),
            (OracleFunction::F3, 1, 1),
        ];
        for (f, at0, at1) in table {
            assert_eq!(f.eval(0), at0, "{}", f.id());
            assert_eq!(f.eval(1), at1, "{}", f.id());
            assert_eq!(f.is_constant(), at0 == at1);
            assert_eq!(OracleFunction::parse(f.id()).unwrap(), f);
        }
        assert!(OracleFunction::parse("f4").is_err());
    }

    #[test]
    fn register_validation() {
        assert!(RegisterState::basis(3, 0).is_err());
        let unnormalized = CVec::from_vec(vec![ONE, ONE]);
        assert!(RegisterState::new(unnormalized).is_err());
        let pair = RegisterState::pair(0, 1);
        assert_eq!(pair.dim(), 4);
        assert!((pair.amplitude(1) - ONE).norm() < 1e-15);
    }

    #[test]
    fn generator_duration_rules() {
        // zero matrix may carry zero duration (trivial f0 segment)
        assert!(HermitianGenerator::new(CMat::zeros(4, 4), 0.0).is_ok());
        assert!(HermitianGenerator::new(pauli_x(), 0.0).is_err());
        assert!(HermitianGenerator::new(pauli_x(), -1.0).is_err());
    }
}
