//! Seeded sample generators for property checks and Monte-Carlo estimators.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::density::DensityOperator;
use crate::error::Result;
use crate::linalg::Matrix;
use crate::operator::{local_dim, LocalOperator};
use crate::region::{Lattice, Region};
use crate::scalar::{cplx, real, Real};

/// Regularization added to `g*g` by [`random_state`].
pub const STATE_REGULARIZATION: f64 = 1e-6;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Matrix of independent standard complex Gaussian entries.
pub fn gaussian_matrix<T: Real, R: rand::Rng>(rng: &mut R, dim: usize) -> Matrix<T> {
    Matrix::from_fn(dim, dim, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        cplx(T::of(re), T::of(im))
    })
}

/// Real Gaussian diagonal matrix.
pub fn gaussian_diagonal<T: Real, R: rand::Rng>(rng: &mut R, dim: usize) -> Matrix<T> {
    let mut m = Matrix::zeros(dim, dim);
    for i in 0..dim {
        let v: f64 = StandardNormal.sample(rng);
        m[(i, i)] = real(T::of(v));
    }
    m
}

/// Haar-ish unitary from the QR factorization of a Gaussian matrix.
pub fn unitary_matrix<T: Real, R: rand::Rng>(rng: &mut R, dim: usize) -> Matrix<T> {
    let g = gaussian_matrix::<T, R>(rng, dim);
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    // fix column phases so the distribution does not depend on QR conventions
    let mut u = q.clone();
    for j in 0..dim {
        let d = r[(j, j)];
        let m = nalgebra::ComplexField::modulus(d);
        if m > T::zero() {
            let phase = d / real(m);
            for i in 0..dim {
                u[(i, j)] *= phase;
            }
        }
    }
    u
}

pub fn random_operator<T: Real>(lattice: Lattice, region: &Region, seed: u64) -> Result<LocalOperator<T>> {
    let dim = local_dim(&lattice, region.len())?;
    let mut r = rng(seed);
    LocalOperator::new(lattice, region.clone(), gaussian_matrix(&mut r, dim))
}

/// `(g + g*)/2` for Gaussian `g`; Hermitian exactly.
pub fn random_hermitian<T: Real>(lattice: Lattice, region: &Region, seed: u64) -> Result<LocalOperator<T>> {
    let g = random_operator::<T>(lattice, region, seed)?;
    let m = g.matrix();
    let h = (m + m.adjoint()).scale(T::of(0.5));
    // exact Hermiticity: copy the upper triangle onto the lower
    let mut h = h;
    let n = h.nrows();
    for i in 0..n {
        h[(i, i)] = real(h[(i, i)].re);
        for j in i + 1..n {
            h[(j, i)] = h[(i, j)].conj();
        }
    }
    LocalOperator::new(lattice, region.clone(), h)
}

/// `(g*g + ε·1)` normalized to unit normalized trace, `ε = 1e-6`.
pub fn random_state<T: Real>(lattice: Lattice, region: &Region, seed: u64) -> Result<DensityOperator<T>> {
    let g = random_operator::<T>(lattice, region, seed)?;
    let n = g.dim();
    let mut m = g.matrix().adjoint() * g.matrix();
    for i in 0..n {
        m[(i, i)] += real(T::of(STATE_REGULARIZATION));
    }
    let tr = crate::linalg::normalized_trace(&m).re;
    m.scale_mut(T::one() / tr);
    for i in 0..n {
        m[(i, i)] = real(m[(i, i)].re);
        for j in i + 1..n {
            m[(j, i)] = m[(i, j)].conj();
        }
    }
    DensityOperator::new(LocalOperator::new(lattice, region.clone(), m)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_in_seed() {
        let r = Region::chain(0..2);
        let a = random_hermitian::<f64>(Lattice::chain(), &r, 42).unwrap();
        let b = random_hermitian::<f64>(Lattice::chain(), &r, 42).unwrap();
        let c = random_hermitian::<f64>(Lattice::chain(), &r, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a.is_hermitian(0.0));
    }

    #[test]
    fn random_state_is_strictly_positive_and_normalized() {
        for seed in 0..10 {
            let rho = random_state::<f64>(Lattice::chain(), &Region::chain(0..2), seed).unwrap();
            assert!(rho.spectrum().min() > 0.0);
            assert!((rho.op().normalized_trace().re - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn unitary_is_unitary() {
        let mut r = rng(9);
        let u = unitary_matrix::<f64, _>(&mut r, 4);
        let should_be_id = u.adjoint() * &u;
        assert!(crate::linalg::max_abs_diff(&should_be_id, &Matrix::identity(4, 4)) < 1e-13);
    }
}
