//! Dense complex matrix helpers built on nalgebra's Hermitian eigensolver and SVD.

use nalgebra::{ComplexField, DMatrix, DVector};

use crate::scalar::{real, Real, C};

pub type Matrix<T> = DMatrix<C<T>>;

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct Spectrum<T: Real> {
    values: DVector<T>,
    vectors: Matrix<T>,
}

impl<T: Real> Spectrum<T> {
    /// Decompose `m`, using only its Hermitian part `(m + m*)/2`.
    pub fn of_hermitian(m: &Matrix<T>) -> Self {
        let sym = hermitian_part(m);
        let eig = sym.symmetric_eigen();
        let n = eig.eigenvalues.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            eig.eigenvalues[a]
                .partial_cmp(&eig.eigenvalues[b])
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
        let mut vectors = Matrix::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            vectors.set_column(dst, &eig.eigenvectors.column(src));
        }
        Spectrum { values, vectors }
    }

    /// Assemble from eigenvalues and the matching orthonormal eigenvector columns.
    pub(crate) fn from_parts(values: DVector<T>, vectors: Matrix<T>) -> Self {
        Spectrum { values, vectors }
    }

    pub fn values(&self) -> &DVector<T> {
        &self.values
    }

    pub fn vectors(&self) -> &Matrix<T> {
        &self.vectors
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn min(&self) -> T {
        self.values.iter().copied().fold(T::infinity(), |a, b| a.min(b))
    }

    pub fn max(&self) -> T {
        self.values.iter().copied().fold(-T::infinity(), |a, b| a.max(b))
    }

    /// `V diag(f(λ)) V*`.
    pub fn map<F: Fn(T) -> C<T>>(&self, f: F) -> Matrix<T> {
        let n = self.dim();
        let mut scaled = self.vectors.clone();
        for j in 0..n {
            let w = f(self.values[j]);
            for i in 0..n {
                scaled[(i, j)] *= w;
            }
        }
        &scaled * self.vectors.adjoint()
    }

    pub fn map_real<F: Fn(T) -> T>(&self, f: F) -> Matrix<T> {
        self.map(|x| real(f(x)))
    }

    /// `V* m V`, i.e. `m` written in the eigenbasis.
    pub fn to_eigenbasis(&self, m: &Matrix<T>) -> Matrix<T> {
        self.vectors.adjoint() * m * &self.vectors
    }

    /// `V m V*`.
    pub fn from_eigenbasis(&self, m: &Matrix<T>) -> Matrix<T> {
        &self.vectors * m * self.vectors.adjoint()
    }
}

pub fn hermitian_part<T: Real>(m: &Matrix<T>) -> Matrix<T> {
    (m + m.adjoint()).scale(T::of(0.5))
}

/// Largest entrywise modulus of `m - m*`.
pub fn hermitian_defect<T: Real>(m: &Matrix<T>) -> T {
    let n = m.nrows();
    let mut worst = T::zero();
    for i in 0..n {
        for j in i..n {
            let d = (m[(i, j)] - m[(j, i)].conjugate()).modulus();
            worst = worst.max(d);
        }
    }
    worst
}

/// Singular values, largest first.
pub fn singular_values<T: Real>(m: &Matrix<T>) -> Vec<T> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut sv: Vec<T> = m.clone().singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    sv
}

pub fn op_norm<T: Real>(m: &Matrix<T>) -> T {
    singular_values(m).first().copied().unwrap_or_else(T::zero)
}

/// `Tr(m) / dim`.
pub fn normalized_trace<T: Real>(m: &Matrix<T>) -> C<T> {
    let n = m.nrows();
    if n == 0 {
        return C::new(T::zero(), T::zero());
    }
    m.trace() / real(T::of(n as f64))
}

/// Normalized Hilbert–Schmidt norm `(Tr m*m / dim)^{1/2}`.
pub fn hs_norm<T: Real>(m: &Matrix<T>) -> T {
    let n = m.nrows().max(1);
    let s = m.iter().fold(T::zero(), |acc, z| acc + z.modulus_squared());
    (s / T::of(n as f64)).sqrt()
}

pub fn max_abs_diff<T: Real>(a: &Matrix<T>, b: &Matrix<T>) -> T {
    a.iter()
        .zip(b.iter())
        .fold(T::zero(), |acc, (x, y)| acc.max((*x - *y).modulus()))
}

pub fn is_diagonal<T: Real>(m: &Matrix<T>, tol: T) -> bool {
    let n = m.nrows();
    (0..n).all(|i| (0..n).all(|j| i == j || m[(i, j)].modulus() <= tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cplx;

    #[test]
    fn spectrum_reconstructs_matrix() {
        let m = Matrix::<f64>::from_row_slice(
            2,
            2,
            &[real(2.0), cplx(0.0, -1.0), cplx(0.0, 1.0), real(2.0)],
        );
        let s = Spectrum::of_hermitian(&m);
        assert!((s.values()[0] - 1.0).abs() < 1e-14);
        assert!((s.values()[1] - 3.0).abs() < 1e-14);
        let back = s.map_real(|x| x);
        assert!(max_abs_diff(&back, &m) < 1e-14);
    }

    #[test]
    fn singular_values_sorted_descending() {
        let m = Matrix::<f64>::from_diagonal(&DVector::from_vec(vec![real(1.0), real(-3.0), real(2.0)]));
        assert_eq!(singular_values(&m), vec![3.0, 2.0, 1.0]);
        assert_eq!(op_norm(&Matrix::<f64>::zeros(0, 0)), 0.0);
    }
}
