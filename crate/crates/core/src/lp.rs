//! The two-parameter family `‖f‖_{L_{p,s}(ω_Λ)} = (Tr |ρ^{(1−s)/p} f ρ^{s/p}|^p)^{1/p}`.
//!
//! `Tr` is the normalized trace, so `‖1‖_{p,s} = 1` for every density. The
//! exponents sum to `1/p`; at `p = 2, s = ½` the square of the norm is the
//! symmetric (KMS) inner product `Tr(ρ^{½} f* ρ^{½} f)`.

use crate::density::DensityOperator;
use crate::error::{Error, Result};
use crate::gibbs::gibbs_density;
use crate::linalg::{self, Matrix};
use crate::operator::LocalOperator;
use crate::potential::Potential;
use crate::random;
use crate::region::Region;
use crate::scalar::{real, Real, C};

use nalgebra::ComplexField;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent<T> {
    Finite(T),
    Infinity,
}

impl<T: Real> Exponent<T> {
    /// Hölder conjugate `q` with `1/p + 1/q = 1`.
    pub fn conjugate(self) -> Exponent<T> {
        match self {
            Exponent::Infinity => Exponent::Finite(T::one()),
            Exponent::Finite(p) if p == T::one() => Exponent::Infinity,
            Exponent::Finite(p) => Exponent::Finite(p / (p - T::one())),
        }
    }

    pub fn as_real(self) -> T {
        match self {
            Exponent::Finite(p) => p,
            Exponent::Infinity => T::infinity(),
        }
    }
}

/// `(p, s)` with `p ∈ [1, ∞]` and `s ∈ [0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormParams<T> {
    pub p: Exponent<T>,
    pub s: T,
}

impl<T: Real> NormParams<T> {
    pub fn new(p: T, s: T) -> Result<Self> {
        let p = if p.is_finite() { Exponent::Finite(p) } else { Exponent::Infinity };
        Self::with_exponent(p, s)
    }

    pub fn with_exponent(p: Exponent<T>, s: T) -> Result<Self> {
        if let Exponent::Finite(p) = p {
            if !(p >= T::one()) {
                return Err(Error::InvalidParameter(format!("p must be at least 1, got {p}")));
            }
        }
        if !(s >= T::zero() && s <= T::one()) {
            return Err(Error::InvalidParameter(format!("s must lie in [0, 1], got {s}")));
        }
        Ok(NormParams { p, s })
    }

    pub fn conjugate(&self) -> NormParams<T> {
        NormParams {
            p: self.p.conjugate(),
            s: self.s,
        }
    }
}

/// `ρ^a` via the spectral decomposition of `ρ`.
pub fn fractional_power<T: Real>(rho: &DensityOperator<T>, a: T) -> Result<LocalOperator<T>> {
    rho.power(a)
}

/// `f` written in the eigenbasis of `ρ`, after embedding into `ρ`'s support.
fn in_eigenbasis<T: Real>(rho: &DensityOperator<T>, f: &LocalOperator<T>) -> Result<Matrix<T>> {
    let f = f.embed(rho.support())?;
    Ok(rho.spectrum().to_eigenbasis(f.matrix()))
}

/// `(mean σ_k^p)^{1/p}` over the singular values, computed with a max-scaling
/// so large `p` cannot overflow.
fn normalized_schatten<T: Real>(sv: &[T], p: T, dim: usize) -> T {
    let top = sv.first().copied().unwrap_or_else(T::zero);
    if top == T::zero() {
        return T::zero();
    }
    let sum = sv.iter().fold(T::zero(), |acc, &x| acc + (x / top).powf(p));
    top * (sum / T::of(dim as f64)).powf(T::one() / p)
}

/// `‖f‖_{L_{p,s}(ω_Λ)}`; `p = ∞` gives the operator norm.
///
/// Singular values are taken of `diag(λ^{(1−s)/p}) (V* f V) diag(λ^{s/p})`,
/// which is unitarily equivalent to `ρ^{(1−s)/p} f ρ^{s/p}`.
pub fn lps_norm<T: Real>(f: &LocalOperator<T>, rho: &DensityOperator<T>, params: NormParams<T>) -> Result<T> {
    let p = match params.p {
        Exponent::Infinity => return Ok(f.embed(rho.support())?.op_norm()),
        Exponent::Finite(p) => p,
    };
    let left = rho.eigenvalue_powers((T::one() - params.s) / p)?;
    let right = rho.eigenvalue_powers(params.s / p)?;
    let mut g = in_eigenbasis(rho, f)?;
    let n = g.nrows();
    for i in 0..n {
        for j in 0..n {
            g[(i, j)] *= real(left[i] * right[j]);
        }
    }
    Ok(normalized_schatten(&linalg::singular_values(&g), p, n))
}

/// `⟨f, g⟩ = Tr(ρ^{1−s} f* ρ^s g)` (normalized trace); `s = ½` is the KMS inner product.
pub fn kms_inner<T: Real>(f: &LocalOperator<T>, g: &LocalOperator<T>, rho: &DensityOperator<T>, s: T) -> Result<C<T>> {
    let ft = in_eigenbasis(rho, f)?;
    let gt = in_eigenbasis(rho, g)?;
    let a = rho.eigenvalue_powers(T::one() - s)?;
    let b = rho.eigenvalue_powers(s)?;
    let n = ft.nrows();
    let mut acc = real(T::zero());
    // Tr(A f* B g) with A, B diagonal: Σ_ij A_i conj(f_ji) B_j g_ji
    for i in 0..n {
        for j in 0..n {
            acc += ft[(j, i)].conjugate() * gt[(j, i)] * real(a[i] * b[j]);
        }
    }
    Ok(acc / real(T::of(n as f64)))
}

/// Scalar product whose norm is `‖·‖_{L_{2,s}}`: `Tr(ρ^s g* ρ^{1−s} f)`.
///
/// This is the duality pairing between `L_{q,s}` and `L_{p,s}`; it coincides
/// with [`kms_inner`] at `s = ½`.
pub fn lps_pairing<T: Real>(g: &LocalOperator<T>, f: &LocalOperator<T>, rho: &DensityOperator<T>, s: T) -> Result<C<T>> {
    kms_inner(g, f, rho, T::one() - s)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HolderReport<T> {
    pub pairing: C<T>,
    pub norm_f: T,
    pub norm_g: T,
    /// `|⟨g, f⟩| / (‖g‖_{q,s} ‖f‖_{p,s})`, zero when either norm vanishes.
    pub ratio: T,
}

/// Evaluate both sides of `|⟨g,f⟩_{ω,s}| ≤ ‖g‖_{q,s} ‖f‖_{p,s}`.
pub fn holder_check<T: Real>(
    f: &LocalOperator<T>,
    g: &LocalOperator<T>,
    rho: &DensityOperator<T>,
    params: NormParams<T>,
) -> Result<HolderReport<T>> {
    let pairing = lps_pairing(g, f, rho, params.s)?;
    let norm_f = lps_norm(f, rho, params)?;
    let norm_g = lps_norm(g, rho, params.conjugate())?;
    let denom = norm_f * norm_g;
    let ratio = if denom > T::zero() { pairing.modulus() / denom } else { T::zero() };
    Ok(HolderReport {
        pairing,
        norm_f,
        norm_g,
        ratio,
    })
}

/// Which dual elements [`duality_norm_estimate`] draws.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DualSampling {
    /// Gaussian complex matrices on the full support.
    General,
    /// Real diagonal matrices, plus the classical `ℓ_p` extremal
    /// `g_i = f_i |f_i|^{p−2}`. Needs diagonal `f` and `ρ`.
    Diagonal,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DualityEstimate<T> {
    /// `max |⟨g,f⟩| / ‖g‖_{q,s}` over the sample set.
    pub estimate: T,
    /// Largest Hölder ratio seen for any sample; must not exceed 1.
    pub worst_ratio: T,
    pub samples: usize,
}

/// Monte-Carlo lower bound on `sup_{‖g‖_q ≤ 1} |⟨g, f⟩_{ω,s}|`.
///
/// The sample set always contains `g = 1`. By Hölder the result never
/// exceeds [`lps_norm`].
pub fn duality_norm_estimate<T: Real>(
    f: &LocalOperator<T>,
    rho: &DensityOperator<T>,
    params: NormParams<T>,
    sample_count: usize,
    seed: u64,
    sampling: DualSampling,
) -> Result<DualityEstimate<T>> {
    let p = match params.p {
        Exponent::Finite(p) if p > T::one() => p,
        _ => {
            return Err(Error::InvalidParameter(
                "duality estimate needs a finite exponent p > 1".into(),
            ))
        }
    };
    if sample_count == 0 {
        return Err(Error::InvalidParameter("sample_count must be at least 1".into()));
    }
    let f = f.embed(rho.support())?;
    let n = f.dim();
    let q = params.conjugate();
    let norm_f = lps_norm(&f, rho, params)?;

    let mut candidates: Vec<LocalOperator<T>> = vec![LocalOperator::identity(f.lattice(), f.support().clone())?];
    if sampling == DualSampling::Diagonal {
        let tol = T::tol(1e-12);
        if !linalg::is_diagonal(f.matrix(), tol) || !linalg::is_diagonal(rho.matrix(), tol) {
            return Err(Error::InvalidParameter(
                "diagonal sampling needs diagonal f and density".into(),
            ));
        }
        let mut extremal = Matrix::zeros(n, n);
        for i in 0..n {
            let fi = f.matrix()[(i, i)];
            let m = fi.modulus();
            if m > T::zero() {
                extremal[(i, i)] = fi * real(m.powf(p - T::of(2.0)));
            }
        }
        candidates.push(f.with_matrix(extremal));
    }
    let mut rng = random::rng(seed);
    while candidates.len() < sample_count.max(1) + usize::from(sampling == DualSampling::Diagonal) {
        let m = match sampling {
            DualSampling::General => random::gaussian_matrix::<T, _>(&mut rng, n),
            DualSampling::Diagonal => random::gaussian_diagonal::<T, _>(&mut rng, n),
        };
        candidates.push(f.with_matrix(m));
    }

    let mut estimate = T::zero();
    let mut worst_ratio = T::zero();
    for g in &candidates {
        let norm_g = lps_norm(g, rho, q)?;
        if norm_g == T::zero() {
            continue;
        }
        let value = lps_pairing(g, &f, rho, params.s)?.modulus() / norm_g;
        estimate = estimate.max(value);
        if norm_f > T::zero() {
            worst_ratio = worst_ratio.max(value / norm_f);
        }
    }
    Ok(DualityEstimate {
        estimate,
        worst_ratio,
        samples: candidates.len(),
    })
}

/// Check that each volume contains the previous one and the observable.
pub fn check_nested(support: &Region, volumes: &[Region]) -> Result<()> {
    for (k, v) in volumes.iter().enumerate() {
        if !support.is_subset(v) {
            return Err(Error::NotNested(format!("observable support {support} is not inside volume {v}")));
        }
        if k > 0 && !volumes[k - 1].is_subset(v) {
            return Err(Error::NotNested(format!("{} is not contained in {v}", volumes[k - 1])));
        }
    }
    Ok(())
}

/// `‖f‖_{L_{p,s}(ω_Λ)}` along an increasing sequence of volumes.
pub fn monotonicity_sweep<T: Real>(
    phi: &Potential<T>,
    beta: T,
    f: &LocalOperator<T>,
    volumes: &[Region],
    params: NormParams<T>,
) -> Result<Vec<T>> {
    check_nested(f.support(), volumes)?;
    volumes
        .iter()
        .map(|v| {
            let rho = gibbs_density(phi, v, beta)?;
            lps_norm(f, &rho, params)
        })
        .collect()
}

/// `seq[k+1] ≤ seq[k] + slack` for every `k`.
pub fn is_non_increasing<T: Real>(seq: &[T], slack: T) -> bool {
    seq.windows(2).all(|w| w[1] <= w[0] + slack)
}
