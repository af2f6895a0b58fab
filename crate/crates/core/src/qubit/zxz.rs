//! ZXZ Euler decomposition of single-qubit unitaries:
//! `U = e^{iα} R_z(β) R_x(γ) R_z(δ)`.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{self, unitarity_defect, CMat, I};
use crate::qubit::UnitaryGate;

/// Euler angles with the canonical form: γ ∈ [0, π], and δ = 0 when
/// γ is 0 or π (the remaining z-rotation is folded into β).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZxzDecomposition {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

/// `R_z(θ) = exp(-i θ Z / 2)`.
pub fn rz(theta: f64) -> CMat {
    CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![
        Complex64::from_polar(1.0, -theta / 2.0),
        Complex64::from_polar(1.0, theta / 2.0),
    ]))
}

/// `R_x(θ) = exp(-i θ X / 2)`.
pub fn rx(theta: f64) -> CMat {
    let c = Complex64::from((theta / 2.0).cos());
    let s = -I * Complex64::from((theta / 2.0).sin());
    CMat::from_row_slice(2, 2, &[c, s, s, c])
}

impl ZxzDecomposition {
    /// Rebuild `e^{iα} R_z(β) R_x(γ) R_z(δ)`.
    pub fn reconstruct(&self) -> CMat {
        (rz(self.beta) * rx(self.gamma) * rz(self.delta))
            * Complex64::from_polar(1.0, self.alpha)
    }
}

/// Decompose a 2x2 unitary into canonical ZXZ Euler angles.
pub fn zxz_decompose(u: &UnitaryGate) -> Result<ZxzDecomposition> {
    let m = u.matrix();
    if m.nrows() != 2 {
        return Err(Error::BadDimension { dim: m.nrows() });
    }
    let deviation = unitarity_defect(m);
    if deviation > linalg::UNITARITY_TOL.max(1e-12) {
        return Err(Error::NonUnitary { deviation });
    }

    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    let mut alpha = det.arg() / 2.0;
    let v = m * Complex64::from_polar(1.0, -alpha);

    // For the special unitary V:
    //   V = [[ cos(γ/2) e^{-i(β+δ)/2},  -i sin(γ/2) e^{-i(β-δ)/2} ],
    //        [ -i sin(γ/2) e^{ i(β-δ)/2},   cos(γ/2) e^{ i(β+δ)/2} ]]
    let c = v[(0, 0)].norm();
    let s = v[(0, 1)].norm();
    let gamma = 2.0 * s.atan2(c);

    const LOCK: f64 = 1e-12;
    let (beta_raw, delta_raw) = if s <= LOCK {
        (-2.0 * v[(0, 0)].arg(), 0.0)
    } else if c <= LOCK {
        (-2.0 * v[(0, 1)].arg() - PI, 0.0)
    } else {
        let p = v[(0, 0)].arg();
        let q = v[(0, 1)].arg();
        (-p - q - PI / 2.0, -p + q + PI / 2.0)
    };

    // Wrap β and δ into (-π, π]; each odd 2π wrap flips the sign of
    // its rotation matrix, which is absorbed into α.
    let (beta, kb) = wrap_with_count(beta_raw);
    let (delta, kd) = wrap_with_count(delta_raw);
    if (kb + kd).rem_euclid(2) == 1 {
        alpha += PI;
    }
    let (alpha, _) = wrap_with_count(alpha);

    Ok(ZxzDecomposition { alpha, beta, gamma, delta })
}

/// Wrap into (-π, π], returning the number of 2π turns removed.
fn wrap_with_count(angle: f64) -> (f64, i64) {
    let k = ((angle + PI) / (2.0 * PI)).floor();
    let wrapped = angle - 2.0 * PI * k;
    // map the open boundary -π to π (keeps 𝐇's angles at +π/2 exactly)
    if wrapped <= -PI { (wrapped + 2.0 * PI, k as i64 - 1) } else { (wrapped, k as i64) }
}
