//! Strictly positive, unit-trace density operators with a cached spectral decomposition.

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Spectrum};
use crate::operator::LocalOperator;
use crate::region::Region;
use crate::scalar::{cplx, real, Real, C};

/// Tolerance on `Tr ρ = 1` (normalized trace) accepted by [`DensityOperator::new`].
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Eigenvalue floor below which fractional powers refuse to proceed.
pub const EIGENVALUE_FLOOR: f64 = 1e-300;

/// A density `ρ > 0` with `Tr ρ = 1` under the normalized trace.
///
/// The spectral decomposition is computed once and reused by every matrix
/// function of `ρ` (fractional powers, cocycles, modular flow).
#[derive(Clone, Debug)]
pub struct DensityOperator<T: Real> {
    op: LocalOperator<T>,
    spectrum: Spectrum<T>,
}

impl<T: Real> DensityOperator<T> {
    pub fn new(op: LocalOperator<T>) -> Result<Self> {
        let defect = crate::linalg::hermitian_defect(op.matrix());
        if defect > T::tol(1e-10) * (T::one() + op.op_norm()) {
            return Err(Error::NotHermitian {
                defect: defect.to_f64_lossy(),
            });
        }
        let spectrum = Spectrum::of_hermitian(op.matrix());
        Self::from_parts(op, spectrum)
    }

    /// Build from a Hermitian spectrum `(λ, V)`; `ρ = V diag(λ) V*`.
    pub(crate) fn from_spectrum(
        lattice: crate::region::Lattice,
        support: Region,
        spectrum: Spectrum<T>,
    ) -> Result<Self> {
        let matrix = spectrum.map_real(|x| x);
        let op = LocalOperator::new(lattice, support, matrix)?;
        Self::from_parts(op, spectrum)
    }

    fn from_parts(op: LocalOperator<T>, spectrum: Spectrum<T>) -> Result<Self> {
        let min = spectrum.min();
        if !(min > T::zero()) {
            return Err(Error::NonPositiveDensity {
                min_eigenvalue: min.to_f64_lossy(),
            });
        }
        let trace = op.normalized_trace().re;
        if (trace - T::one()).abs() > T::tol(NORMALIZATION_TOL) {
            return Err(Error::Unnormalized {
                trace: trace.to_f64_lossy(),
            });
        }
        Ok(DensityOperator { op, spectrum })
    }

    /// Normalize a positive operator to unit normalized trace.
    pub fn normalize(op: LocalOperator<T>) -> Result<Self> {
        let tr = op.normalized_trace().re;
        if !(tr > T::zero()) {
            return Err(Error::NonPositiveDensity {
                min_eigenvalue: tr.to_f64_lossy(),
            });
        }
        Self::new(op.scale_real(T::one() / tr))
    }

    /// The normalized trace state, `ρ = 1`.
    pub fn tracial(lattice: crate::region::Lattice, support: Region) -> Result<Self> {
        Self::new(LocalOperator::identity(lattice, support)?)
    }

    pub fn op(&self) -> &LocalOperator<T> {
        &self.op
    }

    pub fn matrix(&self) -> &Matrix<T> {
        self.op.matrix()
    }

    pub fn support(&self) -> &Region {
        self.op.support()
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn spectrum(&self) -> &Spectrum<T> {
        &self.spectrum
    }

    /// `ρ^a`. Errors if the smallest eigenvalue underflows the floor.
    pub fn power(&self, a: T) -> Result<LocalOperator<T>> {
        self.check_floor()?;
        Ok(self.op.with_matrix(self.spectrum.map_real(|x| x.powf(a))))
    }

    /// `ρ^{it} = exp(i t ln ρ)`.
    pub fn imaginary_power(&self, t: T) -> Result<LocalOperator<T>> {
        self.check_floor()?;
        Ok(self.op.with_matrix(self.spectrum.map(|x| {
            let phase = t * x.ln();
            cplx(phase.cos(), phase.sin())
        })))
    }

    /// Eigenvalues raised to `a`, in the order of [`Spectrum::values`].
    pub fn eigenvalue_powers(&self, a: T) -> Result<Vec<T>> {
        self.check_floor()?;
        Ok(self.spectrum.values().iter().map(|x| x.powf(a)).collect())
    }

    pub(crate) fn check_floor(&self) -> Result<()> {
        let min = self.spectrum.min();
        let floor = T::of(EIGENVALUE_FLOOR);
        if !(min > floor) || !(min > T::zero()) {
            return Err(Error::NonPositiveDensity {
                min_eigenvalue: min.to_f64_lossy(),
            });
        }
        Ok(())
    }

    /// `Tr(ρ f)` with `f` embedded into the support of `ρ`.
    pub fn expectation(&self, f: &LocalOperator<T>) -> Result<C<T>> {
        let f = f.embed(self.support())?;
        let n = self.dim();
        let m = self.matrix();
        let fm = f.matrix();
        let mut acc = real(T::zero());
        for i in 0..n {
            for k in 0..n {
                acc += m[(i, k)] * fm[(k, i)];
            }
        }
        Ok(acc / real(T::of(n as f64)))
    }
}
