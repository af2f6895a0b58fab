//! Drive potentials perturbing the well, and their matrix elements in
//! the truncated two-mode basis verified by explicit position-basis
//! quadrature.
//!
//! The two-qubit coupling uses the x-profile `A + B cos(πx) + C x cos(πx)`
//! with A = 52/27, B = -225π²/432, C = 225π²/216. Only the cos(πx)
//! reading lets these constants solve the three matrix-element
//! constraints exactly (a literal cos(x) does not), so the π is taken
//! as implied by the unit-length well.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{identity, CMat, ONE};
use crate::qubit::{pauli_x, pauli_z, QubitId};
use crate::quadrature::QuadratureRule;
use crate::well::WellBasis;

/// `δV(x) = -(9π²/16)(x - 1/2)`, the X-rotation drive.
pub fn delta_v_potential(x: f64) -> f64 {
    -(9.0 * PI * PI / 16.0) * (x - 0.5)
}

/// Constants of the oracle coupling's x-profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingConstants {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl CouplingConstants {
    /// A = 52/27, B = -225π²/432, C = 225π²/216: the unique solution
    /// of the three matrix-element constraints under cos(πx).
    pub fn reference() -> Self {
        Self { a: 52.0 / 27.0, b: -225.0 * PI * PI / 432.0, c: 225.0 * PI * PI / 216.0 }
    }

    fn profile(&self, x: f64) -> f64 {
        self.a + self.b * (PI * x).cos() + self.c * x * (PI * x).cos()
    }
}

/// `U(x, y) = (A + B cos πx + C x cos πx) [-(9π²/16)(y - 1/2) - 1]`.
pub fn oracle_coupling_potential(constants: &CouplingConstants, x: f64, y: f64) -> f64 {
    constants.profile(x) * (delta_v_potential(y) - 1.0)
}

/// The reference constants, ready-made.
pub fn oracle_constants() -> CouplingConstants {
    CouplingConstants::reference()
}

/// `⟨φ_n| δV |φ_m⟩` by composite Gauss-Legendre quadrature; equals the
/// Pauli X matrix.
pub fn delta_v_matrix(rule: &QuadratureRule) -> Result<CMat> {
    rule.validate()?;
    let mut m = CMat::zeros(2, 2);
    for r in 0..2u8 {
        for c in 0..2u8 {
            let v = rule.integrate(0.0, 1.0, |x| {
                2.0 * ((r + 1) as f64 * PI * x).sin()
                    * ((c + 1) as f64 * PI * x).sin()
                    * delta_v_potential(x)
            });
            m[(r as usize, c as usize)] = ONE * v;
        }
    }
    Ok(m)
}

/// Tolerance on the oracle coupling's matrix-element targets.
const COUPLING_TOL: f64 = 1e-6;

/// `⟨φ_k φ_m| U(x,y) |φ_l φ_n⟩` over the product basis (data index
/// major), using the reference constants. The result equals `(X-1)` on
/// the auxiliary within the data-mode-1 block and vanishes elsewhere;
/// exponentiated over `T_or = π/2` it reproduces the `f₂` oracle.
pub fn oracle_coupling_matrix(rule: &QuadratureRule) -> Result<CMat> {
    oracle_coupling_matrix_with_constants(rule, &CouplingConstants::reference())
}

/// Same computation with caller-supplied constants. If the elements
/// miss their targets beyond 1e-6, the error reports the constants that
/// the quadrature's own moment system would require (a diagnostic, not
/// a silent substitution).
pub fn oracle_coupling_matrix_with_constants(
    rule: &QuadratureRule,
    constants: &CouplingConstants,
) -> Result<CMat> {
    rule.validate()?;
    let mut matrix = CMat::zeros(4, 4);
    for k in 0..2u8 {
        for m in 0..2u8 {
            for l in 0..2u8 {
                for n in 0..2u8 {
                    let v = rule.integrate_2d(|x, y| {
                        (2.0 * ((k + 1) as f64 * PI * x).sin() * ((l + 1) as f64 * PI * x).sin())
                            * (2.0
                                * ((m + 1) as f64 * PI * y).sin()
                                * ((n + 1) as f64 * PI * y).sin())
                            * oracle_coupling_potential(constants, x, y)
                    });
                    matrix[((2 * k + m) as usize, (2 * l + n) as usize)] = ONE * v;
                }
            }
        }
    }

    let target = oracle_coupling_target();
    let residual = crate::linalg::max_abs_diff(&matrix, &target);
    if residual > COUPLING_TOL {
        let fitted = solve_oracle_constants(rule);
        return Err(Error::OracleConstantsMismatch {
            residual,
            a: fitted.a,
            b: fitted.b,
            c: fitted.c,
        });
    }
    Ok(matrix)
}

/// The required element pattern: `(X - 1)` on the auxiliary for data
/// modes k = l = 1, zero otherwise.
pub fn oracle_coupling_target() -> CMat {
    let mut t = CMat::zeros(4, 4);
    let block = pauli_x() - identity(2);
    for r in 0..2 {
        for c in 0..2 {
            t[(r, c)] = block[(r, c)];
        }
    }
    t
}

/// Solve the 3x3 moment system for (A, B, C) from quadrature moments:
///   A + B c₁₁ + C d₁₁ = 1
///       B c₁₂ + C d₁₂ = 0
///   A + B c₂₂ + C d₂₂ = 0
/// where `c` are cos(πx) moments and `d` are x·cos(πx) moments.
pub fn solve_oracle_constants(rule: &QuadratureRule) -> CouplingConstants {
    let moment = |k: u8, l: u8, with_x: bool| {
        rule.integrate(0.0, 1.0, |x| {
            let base = 2.0 * (k as f64 * PI * x).sin() * (l as f64 * PI * x).sin() * (PI * x).cos();
            if with_x {
                base * x
            } else {
                base
            }
        })
    };
    let (c11, c12, c22) = (moment(1, 1, false), moment(1, 2, false), moment(2, 2, false));
    let (d11, d12, d22) = (moment(1, 1, true), moment(1, 2, true), moment(2, 2, true));
    let m = nalgebra::Matrix3::new(1.0, c11, d11, 0.0, c12, d12, 1.0, c22, d22);
    let rhs = nalgebra::Vector3::new(1.0, 0.0, 0.0);
    let sol = m.lu().solve(&rhs).unwrap_or_else(|| nalgebra::Vector3::new(f64::NAN, f64::NAN, f64::NAN));
    CouplingConstants { a: sol[0], b: sol[1], c: sol[2] }
}

/// What a drive segment physically switches on inside the well.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DriveKind {
    /// Unperturbed well: the free Hamiltonian `ω Z` per qubit.
    FreeWell,
    /// `δV` applied to one qubit's well.
    XDrive(QubitId),
    /// The two-qubit `U(x, y)` coupling.
    OracleCoupling,
}

/// A drive with both its truncated-basis matrix elements and its
/// position-space form; `validate` re-derives the former from the
/// latter by quadrature.
#[derive(Debug, Clone)]
pub struct DrivePotential {
    pub kind: DriveKind,
    matrix: CMat,
}

impl DrivePotential {
    pub fn free_well(basis: &WellBasis) -> Self {
        Self { kind: DriveKind::FreeWell, matrix: pauli_z().scale(basis.omega()) }
    }

    pub fn x_drive(target: QubitId) -> Self {
        Self { kind: DriveKind::XDrive(target), matrix: pauli_x() }
    }

    pub fn oracle_coupling() -> Self {
        Self { kind: DriveKind::OracleCoupling, matrix: oracle_coupling_target() }
    }

    /// Matrix elements in the truncated basis (2x2 per qubit, 4x4 for
    /// the coupling).
    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    /// Position-space value of the perturbation (0 for the free well).
    pub fn position_form(&self, x: f64, y: f64) -> f64 {
        match self.kind {
            DriveKind::FreeWell => 0.0,
            DriveKind::XDrive(_) => delta_v_potential(x),
            DriveKind::OracleCoupling => {
                oracle_coupling_potential(&CouplingConstants::reference(), x, y)
            }
        }
    }

    /// Check the declared matrix elements against explicit quadrature.
    pub fn validate(&self, rule: &QuadratureRule) -> Result<()> {
        let computed = match self.kind {
            DriveKind::FreeWell => return Ok(()),
            DriveKind::XDrive(_) => delta_v_matrix(rule)?,
            DriveKind::OracleCoupling => oracle_coupling_matrix(rule)?,
        };
        let residual = crate::linalg::max_abs_diff(&computed, &self.matrix);
        if residual > 1e-8 {
            return Err(Error::QuadratureNonConvergence { residual, tolerance: 1e-8 });
        }
        Ok(())
    }
}
