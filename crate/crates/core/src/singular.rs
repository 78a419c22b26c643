//! Generalized singular values `μ_t(f)` as weighted step functions.
//!
//! At finite dimension `μ_t(f)` is the right-continuous decreasing step
//! function whose levels are the singular values of `f` and whose step
//! lengths are the trace masses of the matching spectral projections of `|f|`.

use nalgebra::ComplexField;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, Spectrum};
use crate::operator::LocalOperator;
use crate::scalar::Real;

/// Relative gap below which neighbouring singular values are merged into one step.
pub const MERGE_TOL: f64 = 1e-13;

/// The trace `τ` measuring step lengths.
#[derive(Clone, Debug, PartialEq)]
pub enum TraceSpec<T> {
    /// `τ(1) = 1`; each rank-one projection has mass `1/N`.
    Normalized,
    /// `τ(1) = N`; each rank-one projection has mass `1`.
    Standard,
    /// `τ(x) = Σ_i d_i x_ii` with positive weights `d`. Tracial only on
    /// algebras commuting with `diag(d)`, e.g. the diagonal subalgebra.
    Weighted(Vec<T>),
}

impl<T: Real> TraceSpec<T> {
    fn check(&self, dim: usize) -> Result<()> {
        if let TraceSpec::Weighted(d) = self {
            if d.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: d.len(),
                });
            }
            if d.iter().any(|&x| !(x > T::zero()) || !x.is_finite()) {
                return Err(Error::InvalidParameter("trace weights must be positive and finite".into()));
            }
        }
        Ok(())
    }

    /// `τ(1)` on an `N`-dimensional algebra.
    pub fn total_mass(&self, dim: usize) -> T {
        match self {
            TraceSpec::Normalized => T::one(),
            TraceSpec::Standard => T::of(dim as f64),
            TraceSpec::Weighted(d) => d.iter().fold(T::zero(), |a, &b| a + b),
        }
    }

    /// Mass of the rank-one projection onto column `k` of `vectors`.
    pub(crate) fn projection_mass(&self, vectors: &Matrix<T>, k: usize) -> T {
        let n = vectors.nrows();
        match self {
            TraceSpec::Normalized => T::one() / T::of(n as f64),
            TraceSpec::Standard => T::one(),
            TraceSpec::Weighted(d) => (0..n).fold(T::zero(), |acc, i| acc + d[i] * vectors[(i, k)].modulus_squared()),
        }
    }

    /// `τ(x)` for an explicit matrix.
    pub fn apply(&self, m: &Matrix<T>) -> T {
        let n = m.nrows();
        match self {
            TraceSpec::Normalized => linalg::normalized_trace(m).re,
            TraceSpec::Standard => m.trace().re,
            TraceSpec::Weighted(d) => (0..n).fold(T::zero(), |acc, i| acc + d[i] * m[(i, i)].re),
        }
    }

    /// The uniform traces, for which `μ_t` is unitarily invariant.
    pub fn is_uniform(&self) -> bool {
        !matches!(self, TraceSpec::Weighted(_))
    }
}

/// Decreasing step function `t ↦ μ_t`: level `values[k]` on an interval of
/// length `weights[k]`, zero beyond the sum of the weights.
#[derive(Clone, Debug, PartialEq)]
pub struct SingularProfile<T> {
    values: Vec<T>,
    weights: Vec<T>,
    total_mass: T,
}

impl<T: Real> SingularProfile<T> {
    /// Validates strictly decreasing positive levels, positive weights and
    /// `Σ weights ≤ total_mass`.
    pub fn new(values: Vec<T>, weights: Vec<T>, total_mass: T) -> Result<Self> {
        if values.len() != weights.len() {
            return Err(Error::DimensionMismatch {
                expected: values.len(),
                found: weights.len(),
            });
        }
        if values.iter().any(|&v| !(v > T::zero()) || !v.is_finite()) {
            return Err(Error::InvalidParameter("profile levels must be positive and finite".into()));
        }
        if values.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(Error::InvalidParameter("profile levels must be strictly decreasing".into()));
        }
        if weights.iter().any(|&w| !(w > T::zero()) || !w.is_finite()) {
            return Err(Error::InvalidParameter("profile weights must be positive and finite".into()));
        }
        let used = weights.iter().fold(T::zero(), |a, &b| a + b);
        if !(total_mass.is_finite()) || used > total_mass * (T::one() + T::tol(1e-12)) {
            return Err(Error::InvalidParameter(format!(
                "profile weights sum to {used}, exceeding the total mass {total_mass}"
            )));
        }
        Ok(SingularProfile {
            values,
            weights,
            total_mass,
        })
    }

    /// The zero function on `(0, total_mass)`.
    pub fn zero(total_mass: T) -> Self {
        SingularProfile {
            values: Vec::new(),
            weights: Vec::new(),
            total_mass,
        }
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Measure of the underlying space (`τ(1)`); steps with level zero are not
    /// stored, so this can exceed the sum of the weights.
    pub fn total_mass(&self) -> T {
        self.total_mass
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Largest level, `μ_0`.
    pub fn max_value(&self) -> T {
        self.values.first().copied().unwrap_or_else(T::zero)
    }

    /// `μ_t`, right-continuous.
    pub fn mu(&self, t: T) -> T {
        let mut edge = T::zero();
        for (&v, &w) in self.values.iter().zip(&self.weights) {
            edge += w;
            if t < edge {
                return v;
            }
        }
        T::zero()
    }

    /// Right endpoints of the steps.
    pub fn breakpoints(&self) -> Vec<T> {
        let mut edge = T::zero();
        self.weights
            .iter()
            .map(|&w| {
                edge += w;
                edge
            })
            .collect()
    }

    /// `|c| μ`.
    pub fn scale(&self, c: T) -> Self {
        let c = c.abs();
        if c == T::zero() {
            return Self::zero(self.total_mass);
        }
        SingularProfile {
            values: self.values.iter().map(|&v| v * c).collect(),
            weights: self.weights.clone(),
            total_mass: self.total_mass,
        }
    }

    /// The first `k` steps, zero afterwards. Increases to `self` as `k` grows.
    pub fn truncate(&self, k: usize) -> Self {
        let k = k.min(self.len());
        SingularProfile {
            values: self.values[..k].to_vec(),
            weights: self.weights[..k].to_vec(),
            total_mass: self.total_mass,
        }
    }

    /// Pointwise sum of two decreasing step functions.
    pub fn pointwise_sum(&self, other: &Self) -> Self {
        let mut cuts = self.breakpoints();
        cuts.extend(other.breakpoints());
        cuts.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
        cuts.dedup();
        let mut values = Vec::new();
        let mut weights = Vec::new();
        let mut left = T::zero();
        for c in cuts {
            if c > left {
                let mid = (left + c) * T::of(0.5);
                values.push(self.mu(mid) + other.mu(mid));
                weights.push(c - left);
                left = c;
            }
        }
        let total = self.total_mass.max(other.total_mass);
        merge_steps(values, weights, total)
    }

    /// `sup_t (μ_t(self) − c·μ_t(other))`, never negative. Zero means
    /// `self ≤ c·other` pointwise.
    pub fn excess_over(&self, other: &Self, c: T) -> T {
        let mut cuts = self.breakpoints();
        cuts.extend(other.breakpoints());
        cuts.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
        let mut left = T::zero();
        let mut worst = T::zero();
        for c_edge in cuts {
            if c_edge > left {
                let mid = (left + c_edge) * T::of(0.5);
                worst = worst.max(self.mu(mid) - c * other.mu(mid));
                left = c_edge;
            }
        }
        worst
    }
}

/// Sort levels decreasingly (by modulus), merge near-equal neighbours, drop
/// zero levels.
fn merge_steps<T: Real>(values: Vec<T>, weights: Vec<T>, total_mass: T) -> SingularProfile<T> {
    let mut pairs: Vec<(T, T)> = values
        .into_iter()
        .map(|v| v.abs())
        .zip(weights)
        .filter(|&(_, w)| w > T::zero())
        .collect();
    pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite levels"));
    let top = pairs.first().map(|p| p.0).unwrap_or_else(T::zero);
    let gap = T::tol(MERGE_TOL) * top;
    let mut out_v: Vec<T> = Vec::new();
    let mut out_w: Vec<T> = Vec::new();
    // running sums so a merged level is the weight-averaged mean of its group
    let mut group_sum = T::zero();
    for (v, w) in pairs {
        if !(v > gap) {
            continue;
        }
        match (out_v.last_mut(), out_w.last_mut()) {
            (Some(last_v), Some(last_w)) if *last_v - v <= gap => {
                group_sum += v * w;
                *last_w += w;
                *last_v = group_sum / *last_w;
            }
            _ => {
                group_sum = v * w;
                out_v.push(v);
                out_w.push(w);
            }
        }
    }
    SingularProfile {
        values: out_v,
        weights: out_w,
        total_mass,
    }
}

/// Decreasing rearrangement of a step function on `(0, Σ weights)`.
pub fn classical_rearrangement<T: Real>(values: &[T], weights: &[T]) -> Result<SingularProfile<T>> {
    if values.len() != weights.len() {
        return Err(Error::DimensionMismatch {
            expected: values.len(),
            found: weights.len(),
        });
    }
    if values.iter().any(|v| !v.is_finite()) || weights.iter().any(|&w| !(w >= T::zero()) || !w.is_finite()) {
        return Err(Error::InvalidParameter("step function needs finite levels and non-negative weights".into()));
    }
    let total = weights.iter().fold(T::zero(), |a, &b| a + b);
    Ok(merge_steps(values.to_vec(), weights.to_vec(), total))
}

/// `μ(f)` under the trace `τ`: singular values with the trace masses of the
/// corresponding right singular projections.
pub fn singular_profile<T: Real>(f: &LocalOperator<T>, trace: &TraceSpec<T>) -> Result<SingularProfile<T>> {
    singular_profile_of(f.matrix(), trace)
}

pub fn singular_profile_of<T: Real>(m: &Matrix<T>, trace: &TraceSpec<T>) -> Result<SingularProfile<T>> {
    let n = m.nrows();
    trace.check(n)?;
    let total = trace.total_mass(n);
    if trace.is_uniform() {
        let sv = linalg::singular_values(m);
        let w = trace.total_mass(n) / T::of(n as f64);
        return Ok(merge_steps(sv, vec![w; n], total));
    }
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.ok_or(Error::NoConvergence)?;
    // rows of v_t are the conjugated right singular vectors
    let vectors = v_t.adjoint();
    let weights = (0..n).map(|k| trace.projection_mass(&vectors, k)).collect();
    Ok(merge_steps(svd.singular_values.iter().copied().collect(), weights, total))
}

/// Spectral decomposition of `|f| = (f*f)^{1/2}`: eigenvalues (ascending)
/// and the trace mass of each eigenprojection.
pub(crate) fn modulus_spectrum<T: Real>(m: &Matrix<T>, trace: &TraceSpec<T>) -> Result<(Vec<T>, Vec<T>, Spectrum<T>)> {
    let n = m.nrows();
    trace.check(n)?;
    let spec = Spectrum::of_hermitian(&linalg::hermitian_part(&(m.adjoint() * m)));
    let levels = spec.values().iter().map(|&e| e.max(T::zero()).sqrt()).collect();
    let masses = (0..n).map(|k| trace.projection_mass(spec.vectors(), k)).collect();
    Ok((levels, masses, spec))
}
