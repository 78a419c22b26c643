//! Spin-½ single-site matrices.

use nalgebra::DVector;

use crate::linalg::Matrix;
use crate::scalar::{cplx, real, Real};

pub fn x<T: Real>() -> Matrix<T> {
    let (o, l) = (real(T::zero()), real(T::one()));
    Matrix::from_row_slice(2, 2, &[o, l, l, o])
}

pub fn y<T: Real>() -> Matrix<T> {
    let o = real(T::zero());
    Matrix::from_row_slice(2, 2, &[o, cplx(T::zero(), -T::one()), cplx(T::zero(), T::one()), o])
}

pub fn z<T: Real>() -> Matrix<T> {
    diag(&[T::one(), -T::one()])
}

pub fn identity<T: Real>(n: usize) -> Matrix<T> {
    Matrix::identity(n, n)
}

/// Real diagonal matrix.
pub fn diag<T: Real>(entries: &[T]) -> Matrix<T> {
    Matrix::from_diagonal(&DVector::from_iterator(entries.len(), entries.iter().map(|&v| real(v))))
}
