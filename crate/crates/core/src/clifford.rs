//! Gamma matrices for 1+1 dimensional Minkowski space, the fundamental
//! symmetry `J = iγ⁰`, the grading `γ_M = γ⁰γ¹`, and the pointwise Hermitian
//! symbols whose negative semidefiniteness encodes the causal and steep
//! conditions on functions.
//!
//! Signature convention is η = diag(−1, +1), so γ⁰ squares to −1 and is
//! anti-Hermitian while γ¹ squares to +1 and is Hermitian.

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;
use thiserror::Error;

use crate::eigen;

/// Largest anti-Hermitian part tolerated before a matrix is rejected.
pub const HERMITIAN_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CliffordError {
    #[error("matrix is not Hermitian (anti-Hermitian part {0:e} exceeds {HERMITIAN_TOL:e})")]
    NotHermitian(f64),
}

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

/// The fixed 2D gamma-matrix representation used throughout the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CliffordBasis {
    pub gamma0: Matrix2<Complex64>,
    pub gamma1: Matrix2<Complex64>,
    /// Grading `γ_M = γ⁰γ¹`.
    pub gamma_m: Matrix2<Complex64>,
    /// Fundamental symmetry `J = iγ⁰`.
    pub j: Matrix2<Complex64>,
}

/// γ⁰ = diag(i, −i), γ¹ = σ_x.
pub fn standard_basis() -> CliffordBasis {
    let gamma0 = Matrix2::new(I, ZERO, ZERO, -I);
    let gamma1 = Matrix2::new(ZERO, ONE, ONE, ZERO);
    CliffordBasis {
        gamma0,
        gamma1,
        gamma_m: gamma0 * gamma1,
        j: gamma0 * I,
    }
}

impl CliffordBasis {
    /// Gamma matrix for index 0 (time) or 1 (space).
    pub fn gamma(&self, mu: usize) -> &Matrix2<Complex64> {
        match mu {
            0 => &self.gamma0,
            1 => &self.gamma1,
            _ => panic!("2D Clifford basis has no gamma^{mu}"),
        }
    }

    /// Minkowski metric component η^{ab}.
    pub fn eta(a: usize, b: usize) -> f64 {
        match (a, b) {
            (0, 0) => -1.0,
            (1, 1) => 1.0,
            _ => 0.0,
        }
    }

    /// Pointwise symbol of the commutator `[D, f] = −i c(df)` for a scalar
    /// function with partial derivatives `(dft, dfx)`.
    pub fn commutator_symbol(&self, dft: f64, dfx: f64) -> Matrix2<Complex64> {
        (self.gamma0 * Complex64::new(0.0, -dft)) + (self.gamma1 * Complex64::new(0.0, -dfx))
    }
}

/// A 2×2 Hermitian matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Herm2(Matrix2<Complex64>);

/// A 4×4 Hermitian matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Herm4(Matrix4<Complex64>);

macro_rules! hermitian_newtype {
    ($name:ident, $mat:ty) => {
        impl $name {
            /// Symmetrizes `(m + m*)/2`, rejecting inputs whose anti-Hermitian
            /// part exceeds [`HERMITIAN_TOL`] in max-entry norm.
            pub fn new(m: $mat) -> Result<Self, CliffordError> {
                let adjoint = m.adjoint();
                let skew = (m - adjoint).iter().map(|z| z.norm()).fold(0.0, f64::max) * 0.5;
                if !skew.is_finite() || skew > HERMITIAN_TOL {
                    return Err(CliffordError::NotHermitian(skew));
                }
                Ok(Self((m + adjoint) * Complex64::new(0.5, 0.0)))
            }

            pub fn zeros() -> Self {
                Self(<$mat>::zeros())
            }

            pub fn identity() -> Self {
                Self(<$mat>::identity())
            }

            pub fn matrix(&self) -> &$mat {
                &self.0
            }

            pub fn into_inner(self) -> $mat {
                self.0
            }

            pub fn scale(&self, factor: f64) -> Self {
                Self(self.0 * Complex64::new(factor, 0.0))
            }

            /// Largest entry modulus.
            pub fn max_abs(&self) -> f64 {
                self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
            }
        }

        impl std::ops::Add for $name {
            type Output = Self;
            fn add(self, rhs: Self) -> Self {
                Self(self.0 + rhs.0)
            }
        }

        impl std::ops::Sub for $name {
            type Output = Self;
            fn sub(self, rhs: Self) -> Self {
                Self(self.0 - rhs.0)
            }
        }
    };
}

hermitian_newtype!(Herm2, Matrix2<Complex64>);
hermitian_newtype!(Herm4, Matrix4<Complex64>);

impl Herm2 {
    /// Real-diagonal constructor; never fails.
    pub fn diag(a: f64, b: f64) -> Self {
        Self(Matrix2::new(
            Complex64::new(a, 0.0),
            ZERO,
            ZERO,
            Complex64::new(b, 0.0),
        ))
    }

    /// Builds `[[a11, a12], [conj(a12), a22]]`.
    pub fn from_parts(a11: f64, a22: f64, a12: Complex64) -> Self {
        Self(Matrix2::new(
            Complex64::new(a11, 0.0),
            a12,
            a12.conj(),
            Complex64::new(a22, 0.0),
        ))
    }

    pub fn pauli_x() -> Self {
        Self::from_parts(0.0, 0.0, ONE)
    }

    pub fn pauli_y() -> Self {
        Self::from_parts(0.0, 0.0, -I)
    }

    pub fn pauli_z() -> Self {
        Self::diag(1.0, -1.0)
    }
}

/// Eigenvalues in ascending order, plus the largest one.
pub trait HermitianSpectrum {
    fn eigenvalues(&self) -> Vec<f64>;

    fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues().into_iter().fold(f64::NEG_INFINITY, f64::max)
    }
}

impl HermitianSpectrum for Herm2 {
    fn eigenvalues(&self) -> Vec<f64> {
        eigen::eigvals2(&self.0).to_vec()
    }

    fn max_eigenvalue(&self) -> f64 {
        eigen::eigvals2(&self.0)[1]
    }
}

impl HermitianSpectrum for Herm4 {
    fn eigenvalues(&self) -> Vec<f64> {
        eigen::jacobi_eigh(&self.0).0.as_slice().to_vec()
    }
}

/// Negative semidefiniteness up to `tol`: true iff the largest eigenvalue is
/// at most `tol`.
pub fn is_nsd<H: HermitianSpectrum>(m: &H, tol: f64) -> bool {
    m.max_eigenvalue() <= tol
}

/// Validates and tests a raw 2×2 matrix.
pub fn is_nsd2(m: &Matrix2<Complex64>, tol: f64) -> Result<bool, CliffordError> {
    Ok(is_nsd(&Herm2::new(*m)?, tol))
}

/// Validates and tests a raw 4×4 matrix.
pub fn is_nsd4(m: &Matrix4<Complex64>, tol: f64) -> Result<bool, CliffordError> {
    Ok(is_nsd(&Herm4::new(*m)?, tol))
}

/// `J[D, f]` at one event, given `(∂_t f, ∂_x f)`. Eigenvalues are
/// `−∂_t f ± |∂_x f|`.
pub fn causal_symbol(dft: f64, dfx: f64) -> Herm2 {
    let basis = standard_basis();
    let m = basis.j * basis.commutator_symbol(dft, dfx);
    Herm2::new(m).expect("J[D,f] is Hermitian for real gradients")
}

/// `J([D, f] + iγ_M)` at one event. Eigenvalues are `−∂_t f ± sqrt(1 + (∂_x f)²)`.
pub fn steep_symbol(dft: f64, dfx: f64) -> Herm2 {
    let basis = standard_basis();
    let m = basis.j * (basis.commutator_symbol(dft, dfx) + basis.gamma_m * I);
    Herm2::new(m).expect("J([D,f] + iγ) is Hermitian for real gradients")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn max_entry(m: &Matrix2<Complex64>) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn fundamental_symmetry_is_diag_minus_one_one() {
        let b = standard_basis();
        let expected = Matrix2::new(-ONE, ZERO, ZERO, ONE);
        assert_eq!(b.j, expected);
        assert_eq!(b.j * b.j, Matrix2::identity());
    }

    #[test]
    fn clifford_relations_hold() {
        let b = standard_basis();
        for a in 0..2 {
            for c in 0..2 {
                let anti = b.gamma(a) * b.gamma(c) + b.gamma(c) * b.gamma(a);
                let target = Matrix2::identity() * Complex64::new(2.0 * CliffordBasis::eta(a, c), 0.0);
                assert!(max_entry(&(anti - target)) <= 1e-14, "a={a} b={c}");
            }
        }
        assert!(max_entry(&(b.gamma0 * b.gamma1 + b.gamma1 * b.gamma0)) <= 1e-14);
    }

    #[test]
    fn krein_adjoint_identity() {
        // Entry-by-entry check of (γ¹)* = −Jγ¹J using hand-expanded products.
        let b = standard_basis();
        let g1 = b.gamma1;
        let j = b.j;
        let mut rhs = Matrix2::<Complex64>::zeros();
        for r in 0..2 {
            for c in 0..2 {
                let mut acc = ZERO;
                for k in 0..2 {
                    for l in 0..2 {
                        acc += j[(r, k)] * g1[(k, l)] * j[(l, c)];
                    }
                }
                rhs[(r, c)] = -acc;
            }
        }
        assert!(max_entry(&(g1.adjoint() - rhs)) <= 1e-14);
        assert!(max_entry(&(b.gamma0.adjoint() + j * b.gamma0 * j)) <= 1e-14);
        assert!(max_entry(&(j * b.gamma_m + b.gamma_m * j)) <= 1e-14);
        assert!(max_entry(&(j.adjoint() - j)) <= 1e-14);
    }

    #[test]
    fn causal_symbol_examples() {
        assert_eq!(causal_symbol(0.0, 0.0), Herm2::zeros());
        let m = causal_symbol(1.0, 0.0);
        assert_eq!(m.eigenvalues(), vec![-1.0, -1.0]);
        assert!(max_entry(&(m.into_inner() + Matrix2::identity())) <= 1e-15);
        assert_eq!(causal_symbol(0.0, 1.0).eigenvalues(), vec![-1.0, 1.0]);
    }

    #[test]
    fn steep_symbol_examples() {
        let e = steep_symbol(1.0, 0.0).eigenvalues();
        assert!((e[0] + 2.0).abs() < 1e-15 && e[1].abs() < 1e-15);
        assert_eq!(steep_symbol(0.0, 0.0).eigenvalues(), vec![-1.0, 1.0]);
        for k in -4..=4 {
            let beta = 0.5 * f64::from(k);
            let top = steep_symbol(beta.cosh(), beta.sinh()).max_eigenvalue();
            assert!(top.abs() < 1e-12, "beta={beta} top={top}");
        }
    }

    #[test]
    fn nsd_examples() {
        assert!(is_nsd(&Herm2::zeros(), 1e-9));
        assert!(is_nsd(&Herm2::identity().scale(-1.0), 1e-9));
        assert!(!is_nsd(&Herm2::diag(1.0, -1.0), 1e-9));
        assert!(is_nsd(&Herm4::identity().scale(-1.0), 1e-9));
    }

    #[test]
    fn non_hermitian_input_is_rejected() {
        let m = Matrix2::new(ZERO, ONE, ZERO, ZERO);
        assert!(matches!(is_nsd2(&m, 1e-9), Err(CliffordError::NotHermitian(_))));
        let tiny = Matrix2::new(ONE, Complex64::new(1.0, 1e-12), ONE, ONE);
        assert!(Herm2::new(tiny).is_ok());
        let mut m4 = Matrix4::<Complex64>::zeros();
        m4[(0, 3)] = I;
        assert!(is_nsd4(&m4, 1e-9).is_err());
    }

    proptest! {
        #[test]
        fn causal_symbol_spectrum(a in -50.0f64..50.0, b in -50.0f64..50.0) {
            let e = causal_symbol(a, b).eigenvalues();
            prop_assert!((e[0] - (-a - b.abs())).abs() <= 1e-12 * (1.0 + a.abs() + b.abs()));
            prop_assert!((e[1] - (-a + b.abs())).abs() <= 1e-12 * (1.0 + a.abs() + b.abs()));
        }

        #[test]
        fn steep_symbol_spectrum(a in -50.0f64..50.0, b in -50.0f64..50.0) {
            let e = steep_symbol(a, b).eigenvalues();
            let r = (1.0 + b * b).sqrt();
            prop_assert!((e[0] - (-a - r)).abs() <= 1e-12 * (1.0 + a.abs() + r));
            prop_assert!((e[1] - (-a + r)).abs() <= 1e-12 * (1.0 + a.abs() + r));
        }

        #[test]
        fn causal_symbol_is_linear(
            lambda in -5.0f64..5.0,
            a1 in -5.0f64..5.0, b1 in -5.0f64..5.0,
            a2 in -5.0f64..5.0, b2 in -5.0f64..5.0,
        ) {
            let lhs = causal_symbol(lambda * a1 + a2, lambda * b1 + b2);
            let rhs = causal_symbol(a1, b1).scale(lambda) + causal_symbol(a2, b2);
            prop_assert!((lhs - rhs).max_abs() <= 1e-12);
        }
    }
}
