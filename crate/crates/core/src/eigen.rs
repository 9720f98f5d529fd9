//! Eigenvalues of small dense Hermitian matrices.
//!
//! The 2×2 case uses the closed form `mean ± sqrt(half_gap² + |m₁₂|²)`.
//! Larger sizes go through a cyclic complex Jacobi sweep, which is plenty for
//! the 4×4 operator symbols handled in this crate.

use nalgebra::{Matrix2, SMatrix, SVector};
use num_complex::Complex64;

/// Off-diagonal Frobenius threshold (relative to the matrix norm) at which
/// Jacobi sweeps stop.
pub const JACOBI_TOL: f64 = 1e-12;

const MAX_SWEEPS: usize = 64;

/// Eigenvalues of a Hermitian 2×2 matrix in ascending order.
///
/// Only the upper triangle and the real part of the diagonal are read.
pub fn eigvals2(m: &Matrix2<Complex64>) -> [f64; 2] {
    let mean = 0.5 * (m[(0, 0)].re + m[(1, 1)].re);
    let half_gap = 0.5 * (m[(0, 0)].re - m[(1, 1)].re);
    let radius = half_gap.hypot(m[(0, 1)].norm());
    [mean - radius, mean + radius]
}

/// Eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in ascending order and the unitary whose columns are
/// the matching eigenvectors.
pub fn jacobi_eigh<const N: usize>(
    m: &SMatrix<Complex64, N, N>,
) -> (SVector<f64, N>, SMatrix<Complex64, N, N>) {
    let mut a = *m;
    let mut v = SMatrix::<Complex64, N, N>::identity();
    let scale = a.norm().max(f64::MIN_POSITIVE);

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= JACOBI_TOL * scale {
            break;
        }
        for p in 0..N {
            for q in (p + 1)..N {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..N).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = SVector::<f64, N>::from_fn(|i, _| a[(order[i], order[i])].re);
    let vectors = SMatrix::<Complex64, N, N>::from_fn(|r, c| v[(r, order[c])]);
    (values, vectors)
}

/// Whether a Hermitian matrix is positive definite, by Gaussian elimination
/// with real pivots (an LDLᴴ factorization without pivoting).
pub fn is_positive_definite<const N: usize>(m: &SMatrix<Complex64, N, N>) -> bool {
    let mut a = *m;
    for j in 0..N {
        let pivot = a[(j, j)].re;
        if !(pivot > 0.0) {
            return false;
        }
        for i in (j + 1)..N {
            let factor = a[(i, j)] / pivot;
            for k in (j + 1)..N {
                let update = factor * a[(j, k)];
                a[(i, k)] -= update;
            }
        }
    }
    true
}

/// Largest eigenvalue with its unit eigenvector.
pub fn max_eigenpair<const N: usize>(m: &SMatrix<Complex64, N, N>) -> (f64, SVector<Complex64, N>) {
    let (values, vectors) = jacobi_eigh(m);
    (values[N - 1], vectors.column(N - 1).into_owned())
}

fn off_diagonal_norm<const N: usize>(a: &SMatrix<Complex64, N, N>) -> f64 {
    let mut sum = 0.0;
    for r in 0..N {
        for c in 0..N {
            if r != c {
                sum += a[(r, c)].norm_sqr();
            }
        }
    }
    sum.sqrt()
}

// One two-sided rotation annihilating a[p][q]. The unitary is
// diag(1, e^{-iφ}) on (p, q) followed by a real Givens rotation.
fn rotate<const N: usize>(
    a: &mut SMatrix<Complex64, N, N>,
    v: &mut SMatrix<Complex64, N, N>,
    p: usize,
    q: usize,
) {
    let apq = a[(p, q)];
    let magnitude = apq.norm();
    if magnitude < f64::MIN_POSITIVE {
        return;
    }
    let phase = apq / magnitude;
    let tau = (a[(q, q)].re - a[(p, p)].re) / (2.0 * magnitude);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // Column p and q of G: G[p][p] = c, G[p][q] = s, G[q][p] = -s·conj(phase),
    // G[q][q] = c·conj(phase).
    let gpp = Complex64::new(c, 0.0);
    let gpq = Complex64::new(s, 0.0);
    let gqp = -phase.conj() * s;
    let gqq = phase.conj() * c;

    // A <- A G (columns)
    for r in 0..N {
        let arp = a[(r, p)];
        let arq = a[(r, q)];
        a[(r, p)] = arp * gpp + arq * gqp;
        a[(r, q)] = arp * gpq + arq * gqq;
    }
    // A <- G* A (rows)
    for c_ in 0..N {
        let apc = a[(p, c_)];
        let aqc = a[(q, c_)];
        a[(p, c_)] = gpp.conj() * apc + gqp.conj() * aqc;
        a[(q, c_)] = gpq.conj() * apc + gqq.conj() * aqc;
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)].im = 0.0;
    a[(q, q)].im = 0.0;

    for r in 0..N {
        let vrp = v[(r, p)];
        let vrq = v[(r, q)];
        v[(r, p)] = vrp * gpp + vrq * gqp;
        v[(r, q)] = vrp * gpq + vrq * gqq;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Matrix4;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn closed_form_2x2_matches_pauli_spectra() {
        let sy = Matrix2::new(c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0));
        assert_eq!(eigvals2(&sy), [-1.0, 1.0]);
        let d = Matrix2::new(c(3.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(7.0, 0.0));
        assert_eq!(eigvals2(&d), [3.0, 7.0]);
    }

    #[test]
    fn jacobi_diagonalises_complex_hermitian_4x4() {
        let m = Matrix4::new(
            c(2.0, 0.0), c(1.0, 1.0), c(0.0, -0.5), c(0.3, 0.0),
            c(1.0, -1.0), c(-1.0, 0.0), c(0.2, 0.2), c(0.0, 1.0),
            c(0.0, 0.5), c(0.2, -0.2), c(0.5, 0.0), c(-0.7, 0.1),
            c(0.3, 0.0), c(0.0, -1.0), c(-0.7, -0.1), c(1.5, 0.0),
        );
        let (vals, vecs) = jacobi_eigh(&m);
        let recon = vecs * Matrix4::from_diagonal(&vals.map(|x| c(x, 0.0))) * vecs.adjoint();
        assert!((recon - m).norm() < 1e-12);
        assert!((vecs.adjoint() * vecs - Matrix4::identity()).norm() < 1e-12);
        for i in 1..4 {
            assert!(vals[i - 1] <= vals[i]);
        }
        let trace: f64 = (0..4).map(|i| m[(i, i)].re).sum();
        assert!((vals.sum() - trace).abs() < 1e-12);
    }

    #[test]
    fn jacobi_handles_already_diagonal_input() {
        let m = Matrix4::from_diagonal(&nalgebra::Vector4::new(c(1.0, 0.0), c(-2.0, 0.0), c(0.0, 0.0), c(5.0, 0.0)));
        let (vals, _) = jacobi_eigh(&m);
        assert_eq!(vals.as_slice(), &[-2.0, 0.0, 1.0, 5.0]);
    }

    #[test]
    fn definiteness_test_matches_the_spectrum() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20_000 {
            let a = Matrix4::<Complex64>::from_fn(|_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            let shift = rng.gen_range(0.0..5.0);
            let h = (a + a.adjoint()) * c(0.5, 0.0) + Matrix4::identity() * c(shift, 0.0);
            let (values, _) = jacobi_eigh(&h);
            if values[0].abs() > 1e-9 {
                assert_eq!(is_positive_definite(&h), values[0] > 0.0, "{values:?}");
            }
        }
        assert!(!is_positive_definite(&Matrix4::<Complex64>::zeros()));
    }
}
