//! Infinite-square-well realization of qubits: the ground and first
//! excited modes of a unit-length well carry |0⟩ and |1⟩, gates are
//! implemented by perturbing the potential, and configuration-space
//! trajectories follow the guidance law.

mod drive;
mod flow;
mod meter;
mod run;
mod schedule;

pub use drive::{
    delta_v_matrix, delta_v_potential, oracle_constants, oracle_coupling_matrix,
    oracle_coupling_matrix_with_constants, oracle_coupling_potential, solve_oracle_constants,
    CouplingConstants, DriveKind, DrivePotential,
};
pub use flow::WellFlow;
pub use meter::{apply_energy_meter, attach_meter, EnergyMeter};
pub use run::{run_deutsch_well, WellRunParams, WellRunReport};
pub use schedule::{
    evolve_well, free_generator, schedule_deutsch, schedule_for_circuit, schedule_for_gate,
    schedule_for_oracle, wait_duration, FreeGenerator, SegmentKind, WellSchedule, WellSegment,
};

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::bell::PointerPacket;
use crate::error::{Error, Result};
use crate::linalg::{CVec, ONE};

/// Two-mode basis of a unit well: `φ_n(x) = √2 sin(nπx)`, energies
/// `E_n = n²π²/(2m)`, and the free-rotation rate `ω = (E₁ - E₂)/2 < 0`.
#[derive(Debug, Clone, Copy)]
pub struct WellBasis {
    mass: f64,
}

impl WellBasis {
    pub const LENGTH: f64 = 1.0;

    pub fn new(mass: f64) -> Result<Self> {
        if !(mass > 0.0) {
            return Err(Error::InvalidConfig { reason: format!("mass must be positive, got {mass}") });
        }
        Ok(Self { mass })
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn energy(&self, n: u8) -> f64 {
        let nf = n as f64;
        nf * nf * PI * PI / (2.0 * self.mass)
    }

    /// `ω = (E₁ - E₂)/2 = -3π²/(4m)`.
    pub fn omega(&self) -> f64 {
        (self.energy(1) - self.energy(2)) / 2.0
    }

    /// Global-phase rate of one free qubit: `-(E₁ + E₂)/2`.
    pub fn phase_rate(&self) -> f64 {
        -(self.energy(1) + self.energy(2)) / 2.0
    }

    pub fn mode(&self, n: u8, x: f64) -> f64 {
        (2.0f64).sqrt() * (n as f64 * PI * x).sin()
    }

    pub fn mode_deriv(&self, n: u8, x: f64) -> f64 {
        let k = n as f64 * PI;
        (2.0f64).sqrt() * k * (k * x).cos()
    }

    /// Density period of a two-mode beat: `π/|ω|`.
    pub fn beat_period(&self) -> f64 {
        PI / self.omega().abs()
    }
}

/// Antiderivatives `G_mk(x) = ∫₀ˣ φ_m φ_k dx'`; `G_mk(1) = δ_mk`.
pub(crate) fn mode_overlap_integral(m: u8, k: u8, x: f64) -> f64 {
    match (m.min(k), m.max(k)) {
        (1, 1) => x - (2.0 * PI * x).sin() / (2.0 * PI),
        (2, 2) => x - (4.0 * PI * x).sin() / (4.0 * PI),
        (1, 2) => (PI * x).sin() / PI - (3.0 * PI * x).sin() / (3.0 * PI),
        _ => unreachable!("modes are 1 or 2"),
    }
}

/// Spectral wavefunction over the two-mode basis: 2 coefficients for a
/// single qubit, 4 (`c_mn` over `φ_m(x) φ_n(y)`, data index major) for
/// the register, plus an explicitly tracked global phase and optional
/// per-data-mode pointer packets over the meter coordinate `z`.
#[derive(Debug, Clone)]
pub struct WellWavefunction {
    coeffs: CVec,
    global_phase: f64,
    pointer: Option<[PointerPacket; 2]>,
}

impl WellWavefunction {
    pub fn new(coeffs: CVec) -> Result<Self> {
        let dim = coeffs.len();
        if dim != 2 && dim != 4 {
            return Err(Error::BadDimension { dim });
        }
        let deviation = (coeffs.norm() - 1.0).abs();
        if deviation > 1e-12 {
            return Err(Error::NotNormalized { deviation });
        }
        Ok(Self { coeffs, global_phase: 0.0, pointer: None })
    }

    /// Product state from per-qubit labels drawn from {0, 1, +, -}.
    pub fn product(labels: &str) -> Result<Self> {
        let factors: Vec<[Complex64; 2]> =
            labels.chars().map(qubit_coeffs).collect::<Result<_>>()?;
        match factors.len() {
            1 => Self::new(CVec::from_vec(factors[0].to_vec())),
            2 => {
                let mut v = CVec::zeros(4);
                for m in 0..2 {
                    for n in 0..2 {
                        v[2 * m + n] = factors[0][m] * factors[1][n];
                    }
                }
                Self::new(v)
            }
            n => Err(Error::InvalidConfig { reason: format!("{n} qubits unsupported") }),
        }
    }

    pub fn n_qubits(&self) -> usize {
        if self.coeffs.len() == 2 {
            1
        } else {
            2
        }
    }

    pub fn coefficients(&self) -> &CVec {
        &self.coeffs
    }

    pub fn global_phase(&self) -> f64 {
        self.global_phase
    }

    pub fn pointer(&self) -> Option<&[PointerPacket; 2]> {
        self.pointer.as_ref()
    }

    pub(crate) fn with_parts(
        coeffs: CVec,
        global_phase: f64,
        pointer: Option<[PointerPacket; 2]>,
    ) -> Self {
        Self { coeffs, global_phase, pointer }
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.norm()
    }

    /// ψ at a configuration point (1 or 2 coordinates), including the
    /// global phase factor.
    pub fn amplitude(&self, basis: &WellBasis, point: &[f64]) -> Result<Complex64> {
        if point.len() != self.n_qubits() {
            return Err(Error::InvalidConfig {
                reason: format!("expected {} coordinates, got {}", self.n_qubits(), point.len()),
            });
        }
        for &c in point {
            if !(0.0..=1.0).contains(&c) {
                return Err(Error::OutOfDomain { x: point[0], y: *point.last().unwrap() });
            }
        }
        let phase = Complex64::from_polar(1.0, self.global_phase);
        Ok(match self.n_qubits() {
            1 => {
                let x = point[0];
                (self.coeffs[0] * basis.mode(1, x) + self.coeffs[1] * basis.mode(2, x)) * phase
            }
            _ => {
                let (x, y) = (point[0], point[1]);
                let mut acc = Complex64::new(0.0, 0.0);
                for m in 0..2u8 {
                    for n in 0..2u8 {
                        acc += self.coeffs[(2 * m + n) as usize]
                            * basis.mode(m + 1, x)
                            * basis.mode(n + 1, y);
                    }
                }
                acc * phase
            }
        })
    }

    /// Extract the 2-vector factor of one coordinate; errors if the
    /// state is entangled beyond 1e-9.
    pub fn factor(&self, coord: usize) -> Result<[Complex64; 2]> {
        if self.n_qubits() == 1 {
            if coord != 0 {
                return Err(Error::InvalidConfig { reason: "single-qubit state has one coordinate".into() });
            }
            return Ok([self.coeffs[0], self.coeffs[1]]);
        }
        let c = &self.coeffs;
        let tangle = (c[0] * c[3] - c[1] * c[2]).norm();
        if tangle > 1e-9 {
            return Err(Error::UnsupportedState {
                reason: format!("state is entangled (concurrence {tangle:.3e}); factor extraction undefined"),
            });
        }
        // anchor at the largest component
        let mut anchor = 0;
        for i in 1..4 {
            if c[i].norm() > c[anchor].norm() {
                anchor = i;
            }
        }
        let (am, an) = (anchor / 2, anchor % 2);
        let raw = match coord {
            0 => [c[an], c[2 + an]],
            1 => [c[2 * am], c[2 * am + 1]],
            _ => return Err(Error::InvalidConfig { reason: "coordinate out of range".into() }),
        };
        let norm = (raw[0].norm_sqr() + raw[1].norm_sqr()).sqrt();
        if norm == 0.0 {
            return Err(Error::UnsupportedState { reason: "zero factor".into() });
        }
        Ok([raw[0] / norm, raw[1] / norm])
    }

    /// Probability mass of coordinate `coord` on `[a, b]` (closed form).
    pub fn marginal_mass(&self, coord: usize, a: f64, b: f64) -> Result<f64> {
        let f = self.factor(coord)?;
        Ok(two_mode_mass(&f, a, b))
    }

    /// Populations of the data-coordinate modes (1, 2).
    pub fn data_mode_populations(&self) -> [f64; 2] {
        match self.n_qubits() {
            1 => [self.coeffs[0].norm_sqr(), self.coeffs[1].norm_sqr()],
            _ => [
                self.coeffs[0].norm_sqr() + self.coeffs[1].norm_sqr(),
                self.coeffs[2].norm_sqr() + self.coeffs[3].norm_sqr(),
            ],
        }
    }
}

/// Mass of `|c₁ φ₁ + c₂ φ₂|²` on `[a, b]`.
pub fn two_mode_mass(coeffs: &[Complex64; 2], a: f64, b: f64) -> f64 {
    let w11 = coeffs[0].norm_sqr();
    let w22 = coeffs[1].norm_sqr();
    let w12 = 2.0 * (coeffs[0].conj() * coeffs[1]).re;
    let g = |m: u8, k: u8| mode_overlap_integral(m, k, b) - mode_overlap_integral(m, k, a);
    w11 * g(1, 1) + w22 * g(2, 2) + w12 * g(1, 2)
}

fn qubit_coeffs(label: char) -> Result<[Complex64; 2]> {
    let s = Complex64::from(std::f64::consts::FRAC_1_SQRT_2);
    Ok(match label {
        '0' => [ONE, Complex64::new(0.0, 0.0)],
        '1' => [Complex64::new(0.0, 0.0), ONE],
        '+' => [s, s],
        '-' => [s, -s],
        other => {
            return Err(Error::InvalidConfig { reason: format!("unknown qubit label `{other}`") })
        }
    })
}

/// Guidance velocity `(1/m) Im(∇ψ/ψ)` from the spectral form with
/// analytic mode derivatives. Valid whenever the state's evolution is
/// generated by the physical well Hamiltonian (free evolution); drive
/// segments add their own transport term, see [`WellFlow`].
pub fn velocity_field(
    state: &WellWavefunction,
    basis: &WellBasis,
    x: f64,
    y: f64,
) -> Result<(f64, f64)> {
    let node_eps = 1e-12;
    match state.n_qubits() {
        1 => {
            let psi = state.amplitude(basis, &[x])?;
            if psi.norm_sqr() < node_eps {
                return Err(Error::NodeEncounter { trajectory: usize::MAX, t: f64::NAN });
            }
            let dpsi = state.coeffs[0] * basis.mode_deriv(1, x)
                + state.coeffs[1] * basis.mode_deriv(2, x);
            let phase = Complex64::from_polar(1.0, state.global_phase);
            Ok(((dpsi * phase / psi).im / basis.mass(), 0.0))
        }
        _ => {
            let psi = state.amplitude(basis, &[x, y])?;
            if psi.norm_sqr() < node_eps {
                return Err(Error::NodeEncounter { trajectory: usize::MAX, t: f64::NAN });
            }
            let phase = Complex64::from_polar(1.0, state.global_phase);
            let mut dx = Complex64::new(0.0, 0.0);
            let mut dy = Complex64::new(0.0, 0.0);
            for m in 0..2u8 {
                for n in 0..2u8 {
                    let c = state.coeffs[(2 * m + n) as usize];
                    dx += c * basis.mode_deriv(m + 1, x) * basis.mode(n + 1, y);
                    dy += c * basis.mode(m + 1, x) * basis.mode_deriv(n + 1, y);
                }
            }
            Ok(((dx * phase / psi).im / basis.mass(), (dy * phase / psi).im / basis.mass()))
        }
    }
}

/// Quantum potential `-(1/2m) ∇²|ψ|/|ψ|`, evaluated via
/// `∇²R/R = Re(∇²ψ/ψ) + |∇S|²`. Diagnostic only; the first-order
/// guidance law drives all propagation.
pub fn quantum_potential(
    state: &WellWavefunction,
    basis: &WellBasis,
    x: f64,
    y: f64,
) -> Result<f64> {
    let node_eps = 1e-12;
    let m = basis.mass();
    match state.n_qubits() {
        1 => {
            let psi = state.amplitude(basis, &[x])?;
            if psi.norm_sqr() < node_eps {
                return Err(Error::NodeEncounter { trajectory: usize::MAX, t: f64::NAN });
            }
            let phase = Complex64::from_polar(1.0, state.global_phase);
            let dpsi = (state.coeffs[0] * basis.mode_deriv(1, x)
                + state.coeffs[1] * basis.mode_deriv(2, x))
                * phase;
            let lap = -(state.coeffs[0] * PI * PI * basis.mode(1, x)
                + state.coeffs[1] * 4.0 * PI * PI * basis.mode(2, x))
                * phase;
            let grad_s = (dpsi / psi).im;
            Ok(-((lap / psi).re + grad_s * grad_s) / (2.0 * m))
        }
        _ => {
            let psi = state.amplitude(basis, &[x, y])?;
            if psi.norm_sqr() < node_eps {
                return Err(Error::NodeEncounter { trajectory: usize::MAX, t: f64::NAN });
            }
            let phase = Complex64::from_polar(1.0, state.global_phase);
            let mut dx = Complex64::new(0.0, 0.0);
            let mut dy = Complex64::new(0.0, 0.0);
            let mut lap = Complex64::new(0.0, 0.0);
            for mm in 0..2u8 {
                for nn in 0..2u8 {
                    let c = state.coeffs[(2 * mm + nn) as usize] * phase;
                    let km2 = ((mm + 1) as f64 * PI).powi(2);
                    let kn2 = ((nn + 1) as f64 * PI).powi(2);
                    dx += c * basis.mode_deriv(mm + 1, x) * basis.mode(nn + 1, y);
                    dy += c * basis.mode(mm + 1, x) * basis.mode_deriv(nn + 1, y);
                    lap -= c * (km2 + kn2) * basis.mode(mm + 1, x) * basis.mode(nn + 1, y);
                }
            }
            let gx = (dx / psi).im;
            let gy = (dy / psi).im;
            Ok(-((lap / psi).re + gx * gx + gy * gy) / (2.0 * m))
        }
    }
}

/// Convenience form of [`WellWavefunction::amplitude`] for the
/// two-qubit register.
pub fn wavefunction_at(
    state: &WellWavefunction,
    basis: &WellBasis,
    x: f64,
    y: f64,
) -> Result<Complex64> {
    state.amplitude(basis, &[x, y])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis() -> WellBasis {
        WellBasis::new(1.0).unwrap()
    }

    #[test]
    fn basis_invariants() {
        let b = basis();
        assert!(b.omega() < 0.0);
        assert!((b.omega() + 3.0 * PI * PI / 4.0).abs() < 1e-14);
        assert!((b.energy(2) - 4.0 * b.energy(1)).abs() < 1e-12);
        assert!(WellBasis::new(-1.0).is_err());
    }

    #[test]
    fn initial_register_amplitude() {
        // |0⟩_d |1⟩_a at (x, y) is 2 sin(πx) sin(2πy)
        let wf = WellWavefunction::product("01").unwrap();
        let b = basis();
        let (x, y) = (0.3, 0.7);
        let psi = wavefunction_at(&wf, &b, x, y).unwrap();
        let expected = 2.0 * (PI * x).sin() * (2.0 * PI * y).sin();
        assert!((psi.re - expected).abs() < 1e-14);
        assert!(psi.im.abs() < 1e-14);
        // boundary annihilation
        let edge = wavefunction_at(&wf, &b, 0.0, y).unwrap();
        assert!(edge.norm() < 1e-14);
        assert!(wavefunction_at(&wf, &b, -0.1, y).is_err());
    }

    #[test]
    fn plus_marginal_peak_value() {
        // |⟨x|+⟩|² at x = 1/2 is |sin(π/2) + sin(π)|² = 1
        let wf = WellWavefunction::product("+").unwrap();
        let b = basis();
        let psi = wf.amplitude(&b, &[0.5]).unwrap();
        assert!((psi.norm_sqr() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn eigenstate_velocity_vanishes() {
        let b = basis();
        let wf = WellWavefunction::product("01").unwrap();
        for (x, y) in [(0.21, 0.4), (0.5, 0.31), (0.83, 0.66)] {
            let (vx, vy) = velocity_field(&wf, &b, x, y).unwrap();
            assert_eq!(vx, 0.0);
            assert_eq!(vy, 0.0);
        }
    }

    #[test]
    fn quantum_potential_for_pure_modes() {
        let b = basis();
        // φ₁(x) φ₁(y): Q = E₁ + E₁ = π²/m, constant in (x, y)
        let wf = WellWavefunction::product("00").unwrap();
        for (x, y) in [(0.2, 0.3), (0.5, 0.5), (0.7, 0.9)] {
            let q = quantum_potential(&wf, &b, x, y).unwrap();
            assert!((q - PI * PI).abs() < 1e-9, "Q = {q}");
        }
        // φ₂ in x, φ₁ in y: Q = (4π² + π²)/(2m) = 5π²/2m
        let wf = WellWavefunction::product("10").unwrap();
        let q = quantum_potential(&wf, &b, 0.2, 0.3).unwrap();
        assert!((q - 2.5 * PI * PI).abs() < 1e-9);
        // doubling the mass halves the value
        let heavy = WellBasis::new(2.0).unwrap();
        let q2 = quantum_potential(&wf, &heavy, 0.2, 0.3).unwrap();
        assert!((q2 - q / 2.0).abs() < 1e-9);
    }

    #[test]
    fn factor_extraction_and_entanglement_guard() {
        let wf = WellWavefunction::product("+-").unwrap();
        let fx = wf.factor(0).unwrap();
        assert!((fx[0].norm_sqr() - 0.5).abs() < 1e-12);
        let fy = wf.factor(1).unwrap();
        assert!((fy[0] + fy[1]).norm() < 1e-12);

        // Bell-like entangled state has no factors
        let s = Complex64::from(std::f64::consts::FRAC_1_SQRT_2);
        let ent = WellWavefunction::new(CVec::from_vec(vec![
            s,
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            s,
        ]))
        .unwrap();
        assert!(ent.factor(0).is_err());
    }

    #[test]
    fn marginal_masses_sum_to_one() {
        let wf = WellWavefunction::product("+-").unwrap();
        for coord in 0..2 {
            let total = wf.marginal_mass(coord, 0.0, 1.0).unwrap();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }
}
