//! Small dense complex linear algebra helpers.
//!
//! Everything in this crate lives in dimension 2 or 4, so dynamic
//! matrices are cheap and keep single-qubit and register code uniform.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Hermiticity threshold for generator inputs.
pub const HERMITICITY_TOL: f64 = 1e-9;
/// Unitarity threshold used by gate constructors and checks.
pub const UNITARITY_TOL: f64 = 1e-12;

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// Largest entry magnitude of `a - b`.
pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    debug_assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Largest entry magnitude of `m - m†`.
pub fn hermiticity_defect(m: &CMat) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

/// Largest entry magnitude of `u†u - 1`.
pub fn unitarity_defect(u: &CMat) -> f64 {
    max_abs_diff(&(u.adjoint() * u), &identity(u.nrows()))
}

/// Kronecker product, row-major convention: `(a ⊗ b)[(i k),(j l)] = a[i,j] b[k,l]`.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// `exp(-i h t)` for Hermitian `h`, via eigendecomposition.
///
/// Rejects inputs whose asymmetry exceeds [`HERMITICITY_TOL`]; the
/// accepted matrix is symmetrized before decomposition so the result
/// is unitary to machine precision regardless of the last few bits of
/// the input.
pub fn expm_hermitian(h: &CMat, t: f64) -> Result<CMat> {
    let asymmetry = hermiticity_defect(h);
    if asymmetry > HERMITICITY_TOL {
        return Err(Error::NonHermitian { asymmetry });
    }
    let n = h.nrows();
    let sym = (h + h.adjoint()).scale(0.5);
    let eig = sym.symmetric_eigen();
    let mut diag = CMat::zeros(n, n);
    for (k, lambda) in eig.eigenvalues.iter().enumerate() {
        diag[(k, k)] = (-I * Complex64::from(lambda * t)).exp();
    }
    let v = eig.eigenvectors;
    Ok(&v * diag * v.adjoint())
}

/// Global-phase-insensitive distance: min over φ of max |a - e^{iφ} b|.
pub fn max_abs_diff_up_to_phase(a: &CMat, b: &CMat) -> f64 {
    // Align on the largest entry of b.
    let mut best = (0usize, 0.0f64);
    for (idx, v) in b.iter().enumerate() {
        if v.norm() > best.1 {
            best = (idx, v.norm());
        }
    }
    if best.1 == 0.0 {
        return max_abs_diff(a, b);
    }
    let (r, c) = (best.0 % b.nrows(), best.0 / b.nrows());
    let ratio = a[(r, c)] / b[(r, c)];
    let phase = ratio / Complex64::from(ratio.norm().max(f64::MIN_POSITIVE));
    max_abs_diff(a, &(b * phase))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pauli_x() -> CMat {
        CMat::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
    }

    #[test]
    fn expm_zero_is_identity() {
        let h = CMat::zeros(4, 4);
        let u = expm_hermitian(&h, 3.7).unwrap();
        assert!(max_abs_diff(&u, &identity(4)) < 1e-15);
    }

    #[test]
    fn expm_is_unitary() {
        let h = CMat::from_row_slice(
            2,
            2,
            &[Complex64::new(0.3, 0.0), Complex64::new(0.1, -0.4), Complex64::new(0.1, 0.4), Complex64::new(-1.2, 0.0)],
        );
        let u = expm_hermitian(&h, 2.0).unwrap();
        assert!(unitarity_defect(&u) < 1e-13);
    }

    #[test]
    fn expm_pauli_x_rotation() {
        // exp(-i X t) = cos t - i sin t X
        let t = 0.77;
        let u = expm_hermitian(&pauli_x(), t).unwrap();
        let expected = identity(2).scale(t.cos()) - pauli_x() * I * Complex64::from(t.sin());
        assert!(max_abs_diff(&u, &expected) < 1e-14);
    }

    #[test]
    fn expm_rejects_non_hermitian() {
        let m = CMat::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO]);
        assert!(matches!(expm_hermitian(&m, 1.0), Err(Error::NonHermitian { .. })));
    }

    #[test]
    fn kron_ordering_is_first_factor_major() {
        let a = CMat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, ZERO]);
        let b = pauli_x();
        let k = kron(&a, &b);
        assert_eq!(k.nrows(), 4);
        assert_eq!(k[(0, 1)], ONE);
        assert_eq!(k[(1, 0)], ONE);
        assert_eq!(k[(2, 3)], ZERO);
    }
}
