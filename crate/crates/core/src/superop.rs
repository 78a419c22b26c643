//! Linear maps on the operator algebra of a fixed region.
//!
//! A [`Superoperator`] is immutable once built. [`Superoperator::apply`] is
//! pure, so sample batches can be mapped concurrently.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, Spectrum};
use crate::operator::LocalOperator;
use crate::region::{Lattice, Region};
use crate::scalar::{real, Real, C};

/// Largest ambient dimension for which dense matricization is attempted
/// (the matrix of the map is `N² × N²`).
pub const MATRICIZE_CAP: usize = 64;

/// Unitarity tolerance for [`SuperopKind::InnerAuto`] and [`SuperopKind::Jordan`].
pub const UNITARY_TOL: f64 = 1e-12;

/// Tolerance on `Tr_X(γ*γ) = 1` for a generalized conditional expectation.
pub const GAMMA_TOL: f64 = 1e-10;

pub type CustomMap<T> = Arc<dyn Fn(&LocalOperator<T>) -> Result<LocalOperator<T>> + Send + Sync>;

#[derive(Clone)]
pub enum SuperopKind<T: Real> {
    /// `f ↦ Tr_X f`, re-embedded into the ambient region.
    PartialTraceCe { traced: Region },
    /// `f ↦ Tr_X(γ* f γ)`.
    GeneralizedCe { traced: Region, gamma: LocalOperator<T> },
    /// `f ↦ Σ W_i* f W_i`.
    Kraus { ops: Vec<LocalOperator<T>> },
    /// `f ↦ u* f u` with `u` unitary.
    InnerAuto { u: LocalOperator<T> },
    /// `f ↦ fᵀ` in the computational basis.
    Transpose,
    /// `f ↦ u* fᵀ u` when `transpose`, else `u* f u`.
    Jordan { u: LocalOperator<T>, transpose: bool },
    /// `L = Σ_k (E_k − id)`.
    Generator { blocks: Vec<Superoperator<T>> },
    Custom(CustomMap<T>),
}

impl<T: Real> fmt::Debug for SuperopKind<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SuperopKind::PartialTraceCe { traced } => write!(f, "PartialTraceCe({traced})"),
            SuperopKind::GeneralizedCe { traced, .. } => write!(f, "GeneralizedCe({traced})"),
            SuperopKind::Kraus { ops } => write!(f, "Kraus({} ops)", ops.len()),
            SuperopKind::InnerAuto { .. } => write!(f, "InnerAuto"),
            SuperopKind::Transpose => write!(f, "Transpose"),
            SuperopKind::Jordan { transpose, .. } => write!(f, "Jordan(transpose={transpose})"),
            SuperopKind::Generator { blocks } => write!(f, "Generator({} blocks)", blocks.len()),
            SuperopKind::Custom(_) => write!(f, "Custom"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Superoperator<T: Real> {
    lattice: Lattice,
    ambient: Region,
    kind: SuperopKind<T>,
}

fn check_unitary<T: Real>(u: &LocalOperator<T>) -> Result<()> {
    let m = u.matrix();
    let id = Matrix::<T>::identity(m.nrows(), m.ncols());
    let defect = linalg::max_abs_diff(&(m.adjoint() * m), &id);
    if defect > T::tol(UNITARY_TOL) {
        return Err(Error::InvalidParameter(format!("operator is not unitary (defect {defect})")));
    }
    Ok(())
}

impl<T: Real> Superoperator<T> {
    /// Identity map, realized as conjugation by `1`.
    pub fn identity(lattice: Lattice, ambient: Region) -> Result<Self> {
        let u = LocalOperator::identity(lattice, ambient.clone())?;
        Ok(Superoperator {
            lattice,
            ambient,
            kind: SuperopKind::InnerAuto { u },
        })
    }

    pub fn partial_trace_ce(lattice: Lattice, ambient: Region, traced: Region) -> Result<Self> {
        if !traced.is_subset(&ambient) {
            return Err(Error::RegionNotInSupport {
                region: traced.to_string(),
                support: ambient.to_string(),
            });
        }
        crate::operator::local_dim(&lattice, ambient.len())?;
        Ok(Superoperator {
            lattice,
            ambient,
            kind: SuperopKind::PartialTraceCe { traced },
        })
    }

    /// `f ↦ Tr_X(γ* f γ)`; requires `Tr_X(γ*γ) = 1`.
    pub fn generalized_ce(gamma: LocalOperator<T>, traced: Region) -> Result<Self> {
        let ambient = gamma.support().clone();
        if !traced.is_subset(&ambient) {
            return Err(Error::RegionNotInSupport {
                region: traced.to_string(),
                support: ambient.to_string(),
            });
        }
        let norm = (&gamma.adjoint() * &gamma).partial_trace(&traced)?;
        let one = LocalOperator::identity(gamma.lattice(), ambient.clone())?;
        let defect = norm.max_abs_diff(&one);
        if defect > T::tol(GAMMA_TOL) {
            return Err(Error::InvalidParameter(format!(
                "gamma is not normalized: Tr_X(gamma* gamma) differs from 1 by {defect}"
            )));
        }
        Ok(Superoperator {
            lattice: gamma.lattice(),
            ambient,
            kind: SuperopKind::GeneralizedCe { traced, gamma },
        })
    }

    /// `f ↦ Σ W_i* f W_i`; each `W_i` is embedded into `ambient`.
    pub fn kraus(lattice: Lattice, ambient: Region, ops: Vec<LocalOperator<T>>) -> Result<Self> {
        if ops.is_empty() {
            return Err(Error::InvalidParameter("Kraus list must be non-empty".into()));
        }
        let ops = ops.iter().map(|w| w.embed(&ambient)).collect::<Result<Vec<_>>>()?;
        Ok(Superoperator {
            lattice,
            ambient,
            kind: SuperopKind::Kraus { ops },
        })
    }

    /// `f ↦ u* f u`.
    pub fn inner_auto(u: LocalOperator<T>) -> Result<Self> {
        check_unitary(&u)?;
        Ok(Superoperator {
            lattice: u.lattice(),
            ambient: u.support().clone(),
            kind: SuperopKind::InnerAuto { u },
        })
    }

    pub fn transpose(lattice: Lattice, ambient: Region) -> Result<Self> {
        crate::operator::local_dim(&lattice, ambient.len())?;
        Ok(Superoperator {
            lattice,
            ambient,
            kind: SuperopKind::Transpose,
        })
    }

    /// Trace-preserving Jordan morphism `f ↦ u* fᵀ u` (or `u* f u`).
    pub fn jordan(u: LocalOperator<T>, transpose: bool) -> Result<Self> {
        check_unitary(&u)?;
        Ok(Superoperator {
            lattice: u.lattice(),
            ambient: u.support().clone(),
            kind: SuperopKind::Jordan { u, transpose },
        })
    }

    /// `L = Σ_k (E_k − id)` over blocks sharing one ambient region.
    pub fn generator(blocks: Vec<Superoperator<T>>) -> Result<Self> {
        let first = blocks
            .first()
            .ok_or_else(|| Error::InvalidParameter("generator needs at least one block".into()))?;
        let (lattice, ambient) = (first.lattice, first.ambient.clone());
        for b in &blocks {
            if b.ambient != ambient || b.lattice != lattice {
                return Err(Error::KindMismatch(format!(
                    "generator blocks act on {} and {}",
                    ambient, b.ambient
                )));
            }
            if matches!(b.kind, SuperopKind::Generator { .. }) {
                return Err(Error::KindMismatch("generator blocks must not be generators".into()));
            }
        }
        Ok(Superoperator {
            lattice,
            ambient,
            kind: SuperopKind::Generator { blocks },
        })
    }

    pub fn custom(lattice: Lattice, ambient: Region, map: CustomMap<T>) -> Result<Self> {
        crate::operator::local_dim(&lattice, ambient.len())?;
        Ok(Superoperator {
            lattice,
            ambient,
            kind: SuperopKind::Custom(map),
        })
    }

    pub fn kind(&self) -> &SuperopKind<T> {
        &self.kind
    }

    pub fn ambient(&self) -> &Region {
        &self.ambient
    }

    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    pub fn dim(&self) -> usize {
        crate::operator::local_dim(&self.lattice, self.ambient.len()).expect("validated at construction")
    }

    /// Apply to `f`, embedded into the ambient region first.
    pub fn apply(&self, f: &LocalOperator<T>) -> Result<LocalOperator<T>> {
        if f.lattice() != self.lattice {
            return Err(Error::KindMismatch("operator and map live on different lattices".into()));
        }
        let f = f.embed(&self.ambient)?;
        match &self.kind {
            SuperopKind::PartialTraceCe { traced } => f.partial_trace(traced),
            SuperopKind::GeneralizedCe { traced, gamma } => {
                let m = gamma.matrix().adjoint() * f.matrix() * gamma.matrix();
                f.with_matrix(m).partial_trace(traced)
            }
            SuperopKind::Kraus { ops } => {
                let n = f.dim();
                let mut acc = Matrix::zeros(n, n);
                for w in ops {
                    acc += w.matrix().adjoint() * f.matrix() * w.matrix();
                }
                Ok(f.with_matrix(acc))
            }
            SuperopKind::InnerAuto { u } => Ok(f.with_matrix(u.matrix().adjoint() * f.matrix() * u.matrix())),
            SuperopKind::Transpose => Ok(f.transpose()),
            SuperopKind::Jordan { u, transpose } => {
                let inner = if *transpose { f.matrix().transpose() } else { f.matrix().clone() };
                Ok(f.with_matrix(u.matrix().adjoint() * inner * u.matrix()))
            }
            SuperopKind::Generator { blocks } => {
                let n = f.dim();
                let mut acc = Matrix::zeros(n, n);
                for b in blocks {
                    acc += b.apply(&f)?.matrix() - f.matrix();
                }
                Ok(f.with_matrix(acc))
            }
            SuperopKind::Custom(map) => {
                let out = map(&f)?.embed(&self.ambient)?;
                Ok(out)
            }
        }
    }

    fn check_matricize_cap(&self) -> Result<usize> {
        let n = self.dim();
        if n > MATRICIZE_CAP {
            return Err(Error::DimensionCap {
                dim: n,
                cap: MATRICIZE_CAP,
            });
        }
        Ok(n)
    }

    /// Images of the matrix units, `T(e_ij)`, in row-major order of `(i, j)`.
    fn unit_images(&self) -> Result<Vec<Matrix<T>>> {
        let n = self.check_matricize_cap()?;
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut e = Matrix::zeros(n, n);
                e[(i, j)] = real(T::one());
                let op = LocalOperator::new(self.lattice, self.ambient.clone(), e)?;
                out.push(self.apply(&op)?.into_matrix());
            }
        }
        Ok(out)
    }

    /// Matrix of the map on the `N²`-dimensional operator space, with
    /// operators vectorized row-major (`e_ij ↦ index i·N + j`).
    pub fn matricize(&self) -> Result<Matrix<T>> {
        let n = self.dim();
        let images = self.unit_images()?;
        let mut m = Matrix::zeros(n * n, n * n);
        for (col, img) in images.iter().enumerate() {
            for a in 0..n {
                for b in 0..n {
                    m[(a * n + b, col)] = img[(a, b)];
                }
            }
        }
        Ok(m)
    }

    /// Eigenvalues of [`Superoperator::matricize`].
    pub fn spectrum(&self) -> Result<Vec<C<T>>> {
        let m = self.matricize()?;
        m.eigenvalues()
            .map(|v| v.iter().copied().collect())
            .ok_or(Error::NoConvergence)
    }

    /// Choi matrix `Σ_ij e_ij ⊗ T(e_ij)`.
    pub fn choi(&self) -> Result<Matrix<T>> {
        let n = self.dim();
        let images = self.unit_images()?;
        let mut c = Matrix::zeros(n * n, n * n);
        for i in 0..n {
            for j in 0..n {
                let img = &images[i * n + j];
                for a in 0..n {
                    for b in 0..n {
                        c[(i * n + a, j * n + b)] = img[(a, b)];
                    }
                }
            }
        }
        Ok(c)
    }

    /// Smallest eigenvalue of the (Hermitian part of the) Choi matrix; the
    /// map is completely positive iff this is non-negative.
    pub fn choi_min_eigenvalue(&self) -> Result<T> {
        let c = linalg::hermitian_part(&self.choi()?);
        Ok(Spectrum::of_hermitian(&c).min())
    }

    /// Complete positivity with a tolerance scaled by the Choi matrix size.
    pub fn is_completely_positive(&self, tol: T) -> Result<bool> {
        let c = self.choi()?;
        let scale = T::one() + linalg::op_norm(&c);
        let min = Spectrum::of_hermitian(&linalg::hermitian_part(&c)).min();
        Ok(min >= -tol * scale)
    }

    /// `max |T(1) − 1|`, entrywise.
    pub fn unitality_defect(&self) -> Result<T> {
        let one = LocalOperator::identity(self.lattice, self.ambient.clone())?;
        Ok(self.apply(&one)?.max_abs_diff(&one))
    }
}
