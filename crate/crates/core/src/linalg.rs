//! Small dense complex-matrix helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen};

use crate::error::{Error, Result};
use crate::simcore::C64;

pub type CMatrix = DMatrix<C64>;

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0].map(|x| C64::new(x, 0.0)))
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0].map(|x| C64::new(x, 0.0)))
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Embeds single-qubit `op` on qubit `q` of an `n`-qubit register
/// (qubit 0 is the leftmost tensor factor).
pub fn embed_1q(op: &CMatrix, q: usize, n: usize) -> CMatrix {
    (0..n).fold(identity(1), |acc, k| {
        if k == q {
            kron(&acc, op)
        } else {
            kron(&acc, &identity(2))
        }
    })
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

pub fn frobenius_dist(a: &CMatrix, b: &CMatrix) -> f64 {
    frobenius(&(a - b))
}

pub fn hermiticity_error(m: &CMatrix) -> f64 {
    frobenius(&(m - m.adjoint()))
}

pub fn unitarity_error(m: &CMatrix) -> f64 {
    frobenius(&(m.adjoint() * m - identity(m.nrows())))
}

/// Eigenvalues (ascending) and eigenvectors of a Hermitian matrix.
pub fn hermitian_eigen(m: &CMatrix, tol: f64) -> Result<(Vec<f64>, CMatrix)> {
    if !m.is_square() {
        return Err(Error::Dimension(
            "eigendecomposition of a non-square matrix".into(),
        ));
    }
    let dev = m
        .iter()
        .zip(m.adjoint().iter())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    if dev.is_nan() || dev > tol {
        return Err(Error::NotHermitian(dev));
    }
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..m.nrows()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(m.nrows(), m.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

/// Complex Schur form `m = Q T Q†`; for a normal matrix `T` is diagonal and
/// the columns of `Q` are eigenvectors.
pub fn schur(m: &CMatrix) -> (CMatrix, CMatrix) {
    Schur::new(m.clone()).unpack()
}

/// Eigenvalues of a general complex matrix, sorted by phase in `(−π, π]`.
pub fn eigenvalues_by_phase(m: &CMatrix) -> Vec<C64> {
    let (_, t) = schur(m);
    let mut vals: Vec<C64> = t.diagonal().iter().copied().collect();
    vals.sort_by(|a, b| a.arg().total_cmp(&b.arg()));
    vals
}

/// Real power `k` of a unitary through its spectral form, principal branch
/// of each eigenphase.
pub fn unitary_power(m: &CMatrix, k: f64) -> CMatrix {
    let (q, t) = schur(m);
    let d = DVector::from_iterator(
        t.nrows(),
        t.diagonal()
            .iter()
            .map(|l| C64::from_polar(1.0, k * l.arg())),
    );
    &q * CMatrix::from_diagonal(&d) * q.adjoint()
}

/// Conjugates every entry.
pub fn conj(m: &CMatrix) -> CMatrix {
    m.map(|x| x.conj())
}
