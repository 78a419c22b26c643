//! Local operators of the quasi-local algebra: dense matrices tied to a support region.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::ComplexField;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, Spectrum};
use crate::region::{Lattice, Region, Site};
use crate::scalar::{real, Real, C};

/// Largest matrix dimension the library will materialize (12 spin-½ sites).
pub const DIMENSION_CAP: usize = 4096;

/// `n^k`, or an error when the result exceeds [`DIMENSION_CAP`].
pub fn local_dim(lattice: &Lattice, sites: usize) -> Result<usize> {
    let mut dim: usize = 1;
    for _ in 0..sites {
        dim = dim.saturating_mul(lattice.n);
        if dim > DIMENSION_CAP {
            return Err(Error::DimensionCap {
                dim,
                cap: DIMENSION_CAP,
            });
        }
    }
    Ok(dim)
}

/// An element of `A_Λ`: a dense `n^|Λ| × n^|Λ|` matrix whose tensor legs follow
/// the canonical order of its support.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalOperator<T: Real> {
    lattice: Lattice,
    support: Region,
    matrix: Matrix<T>,
}

impl<T: Real> LocalOperator<T> {
    pub fn new(lattice: Lattice, support: Region, matrix: Matrix<T>) -> Result<Self> {
        lattice.validate()?;
        if let Some(d) = support.dim() {
            if d != lattice.d {
                return Err(Error::InvalidRegion(format!(
                    "sites have {d} coordinates but the lattice is {}-dimensional",
                    lattice.d
                )));
            }
        }
        let dim = local_dim(&lattice, support.len())?;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: matrix.nrows().max(matrix.ncols()),
            });
        }
        Ok(LocalOperator {
            lattice,
            support,
            matrix,
        })
    }

    pub fn identity(lattice: Lattice, support: Region) -> Result<Self> {
        let dim = local_dim(&lattice, support.len())?;
        Self::new(lattice, support, Matrix::identity(dim, dim))
    }

    pub fn zeros(lattice: Lattice, support: Region) -> Result<Self> {
        let dim = local_dim(&lattice, support.len())?;
        Self::new(lattice, support, Matrix::zeros(dim, dim))
    }

    /// A single-site operator placed at `site`.
    pub fn on_site(lattice: Lattice, site: Site, matrix: Matrix<T>) -> Result<Self> {
        Self::new(lattice, Region::site(site), matrix)
    }

    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    pub fn support(&self) -> &Region {
        &self.support
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix<T> {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Same support, new matrix. Panics if the dimension changes.
    pub(crate) fn with_matrix(&self, matrix: Matrix<T>) -> Self {
        assert_eq!(matrix.nrows(), self.dim(), "matrix dimension changed");
        LocalOperator {
            lattice: self.lattice,
            support: self.support.clone(),
            matrix,
        }
    }

    /// `f ⊗ 1` on `target`, with legs permuted to the canonical order of `target`.
    pub fn embed(&self, target: &Region) -> Result<Self> {
        if target == &self.support {
            return Ok(self.clone());
        }
        let positions = target
            .positions_of(&self.support)
            .ok_or_else(|| Error::SupportNotContained {
                support: self.support.to_string(),
                target: target.to_string(),
            })?;
        let lattice = self.lattice;
        let dim = local_dim(&lattice, target.len())?;
        let legs = LegSplit::new(lattice.n, target.len(), &positions);
        let mut out = Matrix::zeros(dim, dim);
        for r in 0..dim {
            let (rs, rr) = legs.split(r);
            for c in 0..dim {
                let (cs, cr) = legs.split(c);
                if rr == cr {
                    out[(r, c)] = self.matrix[(rs, cs)];
                }
            }
        }
        Self::new(lattice, target.clone(), out)
    }

    /// `Tr(f) / n^|support|`; unchanged by [`embed`](Self::embed).
    pub fn normalized_trace(&self) -> C<T> {
        linalg::normalized_trace(&self.matrix)
    }

    /// Normalized partial trace over `region`, returned on the smaller support
    /// `support \ region`.
    pub fn reduce(&self, region: &Region) -> Result<Self> {
        let traced = self.support.positions_of(region).ok_or_else(|| Error::RegionNotInSupport {
            region: region.to_string(),
            support: self.support.to_string(),
        })?;
        let keep_region = self.support.difference(region);
        if region.is_empty() {
            return Ok(self.clone());
        }
        let n = self.lattice.n;
        let k = self.support.len();
        let keep_positions: Vec<usize> = (0..k).filter(|p| !traced.contains(p)).collect();
        let keep_dim = local_dim(&self.lattice, keep_positions.len())?;
        let traced_dim = local_dim(&self.lattice, traced.len())?;
        let legs = LegSplit::new(n, k, &keep_positions);
        let dim = self.dim();
        let mut out = Matrix::zeros(keep_dim, keep_dim);
        for r in 0..dim {
            let (rk, rt) = legs.split(r);
            for c in 0..dim {
                let (ck, ct) = legs.split(c);
                if rt == ct {
                    out[(rk, ck)] += self.matrix[(r, c)];
                }
            }
        }
        out.scale_mut(T::one() / T::of(traced_dim as f64));
        Self::new(self.lattice, keep_region, out)
    }

    /// `Tr_X f`: trace out `region` and re-embed as `(·) ⊗ 1_X` on the original
    /// support, so the map is a unital projection of the same algebra.
    pub fn partial_trace(&self, region: &Region) -> Result<Self> {
        self.reduce(region)?.embed(&self.support)
    }

    pub fn adjoint(&self) -> Self {
        self.with_matrix(self.matrix.adjoint())
    }

    pub fn transpose(&self) -> Self {
        self.with_matrix(self.matrix.transpose())
    }

    pub fn scale(&self, c: C<T>) -> Self {
        self.with_matrix(self.matrix.map(|z| z * c))
    }

    pub fn scale_real(&self, c: T) -> Self {
        self.scale(real(c))
    }

    pub fn op_norm(&self) -> T {
        linalg::op_norm(&self.matrix)
    }

    /// Normalized Hilbert–Schmidt norm.
    pub fn hs_norm(&self) -> T {
        linalg::hs_norm(&self.matrix)
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        if self.support == other.support {
            return linalg::max_abs_diff(&self.matrix, &other.matrix);
        }
        let u = self.support.union(&other.support);
        match (self.embed(&u), other.embed(&u)) {
            (Ok(a), Ok(b)) => linalg::max_abs_diff(&a.matrix, &b.matrix),
            _ => T::infinity(),
        }
    }

    /// Entrywise Hermiticity within `tol·(1 + ‖f‖_op)`.
    pub fn is_hermitian(&self, tol: T) -> bool {
        let scale = T::one() + self.op_norm();
        linalg::hermitian_defect(&self.matrix) <= tol * scale
    }

    /// Hermitian and `λ_min ≥ -tol·(1 + ‖f‖_op)`.
    pub fn is_positive(&self, tol: T) -> bool {
        if !self.is_hermitian(tol) {
            return false;
        }
        let scale = T::one() + self.op_norm();
        self.min_eigenvalue() >= -tol * scale
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> T {
        Spectrum::of_hermitian(&self.matrix).min()
    }

    pub fn spectrum(&self) -> Spectrum<T> {
        Spectrum::of_hermitian(&self.matrix)
    }

    /// Product `self · other`, both lifted to the union of their supports.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        let (a, b) = self.lift_pair(other)?;
        Ok(a.with_matrix(&a.matrix * &b.matrix))
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        let (a, b) = self.lift_pair(other)?;
        Ok(a.with_matrix(&a.matrix + &b.matrix))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        let (a, b) = self.lift_pair(other)?;
        Ok(a.with_matrix(&a.matrix - &b.matrix))
    }

    /// `[self, other]`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        let (a, b) = self.lift_pair(other)?;
        Ok(a.with_matrix(&a.matrix * &b.matrix - &b.matrix * &a.matrix))
    }

    fn lift_pair(&self, other: &Self) -> Result<(Self, Self)> {
        if self.lattice != other.lattice {
            return Err(Error::InvalidLattice("operators live on different lattices".into()));
        }
        if self.support == other.support {
            return Ok((self.clone(), other.clone()));
        }
        let u = self.support.union(&other.support);
        Ok((self.embed(&u)?, other.embed(&u)?))
    }

    /// Every entry within `tol` of zero.
    pub fn is_zero(&self, tol: T) -> bool {
        self.matrix.iter().all(|z| z.modulus() <= tol)
    }

    /// Convert the scalar type (e.g. `f64` to `f32`).
    pub fn cast<U: Real>(&self) -> LocalOperator<U> {
        LocalOperator {
            lattice: self.lattice,
            support: self.support.clone(),
            matrix: self
                .matrix
                .map(|z| C::new(U::of(z.re.to_f64_lossy()), U::of(z.im.to_f64_lossy()))),
        }
    }
}

macro_rules! lifted_binop {
    ($tr:ident, $method:ident, $try:ident) => {
        impl<'a, T: Real> $tr<&'a LocalOperator<T>> for &'a LocalOperator<T> {
            type Output = LocalOperator<T>;

            /// Panics if the operators live on different lattices or the union
            /// of supports exceeds the dimension cap.
            fn $method(self, rhs: &'a LocalOperator<T>) -> LocalOperator<T> {
                self.$try(rhs).expect("incompatible local operators")
            }
        }
    };
}

lifted_binop!(Mul, mul, try_mul);
lifted_binop!(Add, add, try_add);
lifted_binop!(Sub, sub, try_sub);

impl<T: Real> Neg for &LocalOperator<T> {
    type Output = LocalOperator<T>;

    fn neg(self) -> LocalOperator<T> {
        self.with_matrix(-self.matrix.clone())
    }
}

/// Splits a basis index of a `k`-leg tensor into the index over a chosen
/// subset of legs and the index over the remaining legs.
pub(crate) struct LegSplit {
    chosen: Vec<usize>,
    rest: Vec<usize>,
}

impl LegSplit {
    pub(crate) fn new(n: usize, k: usize, chosen_positions: &[usize]) -> Self {
        let dim = n.pow(k as u32);
        let mut chosen = vec![0; dim];
        let mut rest = vec![0; dim];
        let mut digits = vec![0usize; k];
        for idx in 0..dim {
            let mut x = idx;
            for leg in (0..k).rev() {
                digits[leg] = x % n;
                x /= n;
            }
            let (mut a, mut b) = (0, 0);
            for (leg, &digit) in digits.iter().enumerate() {
                if chosen_positions.contains(&leg) {
                    a = a * n + digit;
                } else {
                    b = b * n + digit;
                }
            }
            chosen[idx] = a;
            rest[idx] = b;
        }
        LegSplit { chosen, rest }
    }

    #[inline]
    pub(crate) fn split(&self, idx: usize) -> (usize, usize) {
        (self.chosen[idx], self.rest[idx])
    }
}
