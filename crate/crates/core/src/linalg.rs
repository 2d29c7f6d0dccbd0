//! Small dense complex linear algebra: Kronecker products, partial traces,
//! Pauli matrices and a Hermitian eigensolver with deterministic ordering.

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Tolerance used to accept a matrix as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

const DEGENERACY_TOL: f64 = 1e-12;

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[inline]
pub fn cr(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[cr(0.0), cr(1.0), cr(1.0), cr(0.0)])
}

pub fn pauli_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[cr(0.0), c(0.0, -1.0), c(0.0, 1.0), cr(0.0)])
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[cr(1.0), cr(0.0), cr(0.0), cr(-1.0)])
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn kron_vec(a: &CVector, b: &CVector) -> CVector {
    a.kronecker(b)
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.trace()
}

/// `|v><v|`
pub fn outer(v: &CVector) -> CMatrix {
    v * v.adjoint()
}

/// `<a|b>`, conjugate-linear in the first argument.
pub fn inner(a: &CVector, b: &CVector) -> Complex64 {
    a.dotc(b)
}

/// Largest entry of `|M - M^dagger|`.
pub fn hermiticity_error(m: &CMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    hermiticity_error(m) <= tol
}

/// Largest entry modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

/// Traces out the second factor of a `dim_a * dim_b` operator.
pub fn partial_trace_second(rho: &CMatrix, dim_a: usize, dim_b: usize) -> CMatrix {
    assert_eq!(rho.nrows(), dim_a * dim_b);
    CMatrix::from_fn(dim_a, dim_a, |i, j| {
        (0..dim_b).map(|k| rho[(i * dim_b + k, j * dim_b + k)]).sum()
    })
}

/// Traces out the first factor of a `dim_a * dim_b` operator.
pub fn partial_trace_first(rho: &CMatrix, dim_a: usize, dim_b: usize) -> CMatrix {
    assert_eq!(rho.nrows(), dim_a * dim_b);
    CMatrix::from_fn(dim_b, dim_b, |i, j| {
        (0..dim_a).map(|k| rho[(k * dim_b + i, k * dim_b + j)]).sum()
    })
}

/// Multiplies `v` by a global phase so that its first non-negligible
/// component is real and positive.
pub fn canonical_phase(v: &CVector) -> CVector {
    let scale = v.iter().fold(0.0f64, |acc, z| acc.max(z.norm()));
    match v.iter().find(|z| z.norm() > 1e-12 * scale.max(1e-300)) {
        Some(z) => {
            let phase = z.conj() / z.norm();
            v * phase
        }
        None => v.clone(),
    }
}

/// `|<a|b>|` for unit vectors, tolerant to global phases.
pub fn same_ray(a: &CVector, b: &CVector, tol: f64) -> bool {
    (inner(a, b).norm() - 1.0).abs() <= tol
}

/// Eigenvalues (descending) and orthonormal eigenvectors of a Hermitian
/// matrix.
#[derive(Debug, Clone)]
pub struct SpectralDecomp {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<CVector>,
}

impl SpectralDecomp {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn min(&self) -> f64 {
        *self.eigenvalues.last().expect("non-empty spectrum")
    }

    /// `sum_i lambda_i v_i v_i^dagger`
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.dim();
        self.eigenvalues
            .iter()
            .zip(&self.eigenvectors)
            .fold(CMatrix::zeros(n, n), |acc, (l, v)| acc + outer(v) * cr(*l))
    }
}

fn lexicographic_real(a: &CVector, b: &CVector) -> Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        match x.re.partial_cmp(&y.re) {
            Some(Ordering::Equal) | None => continue,
            Some(ord) => return ord,
        }
    }
    Ordering::Equal
}

/// Hermitian eigendecomposition for `d` in {2, 4, 16}.
///
/// Eigenvalues come out sorted descending. Degenerate eigenvalues are
/// ordered by lexicographic comparison of the real parts of their
/// (phase-canonicalized) eigenvectors, so output is reproducible.
pub fn hermitian_eigen(m: &CMatrix) -> Result<SpectralDecomp> {
    let d = m.nrows();
    if !m.is_square() || !matches!(d, 2 | 4 | 16) {
        return Err(Error::UnsupportedDimension(d));
    }
    let herr = hermiticity_error(m);
    if herr > HERMITIAN_TOL {
        return Err(Error::NotHermitian(herr));
    }
    let sym = (m + m.adjoint()) * cr(0.5);
    let eig = sym.symmetric_eigen();

    let scale = eig.eigenvalues.iter().fold(1.0f64, |acc, l| acc.max(l.abs()));
    let mut pairs: Vec<(f64, CVector)> = (0..d)
        .map(|k| {
            let v = eig.eigenvectors.column(k).into_owned();
            let v = &v / cr(v.norm());
            (eig.eigenvalues[k], canonical_phase(&v))
        })
        .collect();
    pairs.sort_by(|(la, va), (lb, vb)| {
        if (la - lb).abs() <= DEGENERACY_TOL * scale {
            lexicographic_real(va, vb)
        } else {
            lb.partial_cmp(la).unwrap_or(Ordering::Equal)
        }
    });

    let (eigenvalues, eigenvectors) = pairs.into_iter().unzip();
    Ok(SpectralDecomp {
        eigenvalues,
        eigenvectors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(d: usize, rng: &mut ChaCha8Rng) -> CMatrix {
        let a = CMatrix::from_fn(d, d, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        (&a + a.adjoint()) * cr(0.5)
    }

    #[test]
    fn identity_is_degenerate() {
        let s = hermitian_eigen(&identity(2)).unwrap();
        assert_eq!(s.eigenvalues, vec![1.0, 1.0]);
    }

    #[test]
    fn pauli_z_has_basis_eigenvectors() {
        let s = hermitian_eigen(&pauli_z()).unwrap();
        assert!((s.eigenvalues[0] - 1.0).abs() < 1e-15);
        assert!((s.eigenvalues[1] + 1.0).abs() < 1e-15);
        assert!((s.eigenvectors[0][0] - cr(1.0)).norm() < 1e-14);
        assert!((s.eigenvectors[1][1] - cr(1.0)).norm() < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = CMatrix::from_row_slice(2, 2, &[cr(0.0), cr(1.0), cr(0.0), cr(0.0)]);
        assert!(matches!(hermitian_eigen(&m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn rejects_other_dimensions() {
        assert_eq!(
            hermitian_eigen(&identity(3)).unwrap_err(),
            Error::UnsupportedDimension(3)
        );
    }

    #[test]
    fn random_trace_det_and_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xB311);
        for d in [2usize, 4, 16] {
            for _ in 0..20 {
                let m = random_hermitian(d, &mut rng);
                let s = hermitian_eigen(&m).unwrap();
                let sum: f64 = s.eigenvalues.iter().sum();
                assert!((sum - m.trace().re).abs() < 1e-12);
                assert!((&s.reconstruct() - &m).norm() < 1e-10);
                for w in s.eigenvalues.windows(2) {
                    assert!(w[0] >= w[1]);
                }
                for i in 0..d {
                    for j in 0..d {
                        let ip = inner(&s.eigenvectors[i], &s.eigenvectors[j]).norm();
                        let want = if i == j { 1.0 } else { 0.0 };
                        assert!((ip - want).abs() < 1e-10);
                    }
                }
                if d <= 4 {
                    let prod: f64 = s.eigenvalues.iter().product();
                    assert!((prod - m.determinant().re).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn partial_traces_of_product() {
        let a = CMatrix::from_row_slice(2, 2, &[cr(0.7), c(0.1, 0.2), c(0.1, -0.2), cr(0.3)]);
        let b = CMatrix::from_row_slice(2, 2, &[cr(0.4), c(0.0, 0.1), c(0.0, -0.1), cr(0.6)]);
        let ab = kron(&a, &b);
        assert!((partial_trace_second(&ab, 2, 2) - &a).norm() < 1e-15);
        assert!((partial_trace_first(&ab, 2, 2) - &b).norm() < 1e-15);
    }

    #[test]
    fn deterministic_output() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let m = random_hermitian(4, &mut rng);
        let a = hermitian_eigen(&m).unwrap();
        let b = hermitian_eigen(&m).unwrap();
        assert_eq!(a.eigenvalues, b.eigenvalues);
        assert_eq!(a.eigenvectors, b.eigenvectors);
    }
}
