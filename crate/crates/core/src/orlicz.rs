//! Orlicz functions and the Luxemburg gauge, computed two ways: by spectral
//! calculus of `|f|` and from the singular-value profile `μ(f)`.

use std::fmt;
use std::ops::Add;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::LocalOperator;
use crate::scalar::Real;
use crate::singular::{modulus_spectrum, singular_profile, SingularProfile, TraceSpec};

/// Relative tolerance for convexity of custom knot tables.
pub const CONVEXITY_TOL: f64 = 1e-12;

/// Relative agreement demanded between the two sides of the trace identity.
pub const TRACE_IDENTITY_TOL: f64 = 1e-10;

/// Iteration cap for bracket growth and for bisection.
pub const BISECTION_CAP: usize = 200;

/// Factor by which the Luxemburg bracket grows or shrinks per step.
pub const BRACKET_FACTOR: f64 = 4.0;

/// A value in `[0, ∞]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Extended<T> {
    Finite(T),
    Infinite,
}

impl<T: Real> Extended<T> {
    pub fn is_finite(&self) -> bool {
        matches!(self, Extended::Finite(_))
    }

    pub fn finite(self) -> Option<T> {
        match self {
            Extended::Finite(x) => Some(x),
            Extended::Infinite => None,
        }
    }

    /// `∞` maps to the scalar infinity.
    pub fn to_real(self) -> T {
        self.finite().unwrap_or_else(T::infinity)
    }

    fn from_real(x: T) -> Self {
        if x.is_finite() {
            Extended::Finite(x)
        } else {
            Extended::Infinite
        }
    }
}

impl<T: Real> Add for Extended<T> {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        match (self, rhs) {
            (Extended::Finite(a), Extended::Finite(b)) => Extended::from_real(a + b),
            _ => Extended::Infinite,
        }
    }
}

impl<T: Real> fmt::Display for Extended<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(x) => write!(f, "{x}"),
            Extended::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum OrliczKind<T> {
    /// `u^p`, `p ≥ 1`.
    Power(T),
    /// `e^u − 1`.
    ExpMinusOne,
    /// `cosh u − 1`.
    CoshMinusOne,
    /// `u ln(1 + u)`.
    LLogL,
    /// Piecewise linear through `(u_k, φ_k)` starting at `(0, 0)`; `∞` beyond
    /// the last knot.
    Custom(Vec<(T, T)>),
}

/// Convex `φ: [0, ∞) → [0, ∞]` with `φ(0) = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct OrliczFunction<T> {
    kind: OrliczKind<T>,
    a_phi: T,
    b_phi: T,
}

impl<T: Real> OrliczFunction<T> {
    pub fn power(p: T) -> Result<Self> {
        if !(p >= T::one()) || !p.is_finite() {
            return Err(Error::InvalidOrlicz(format!("power exponent must be finite and at least 1, got {p}")));
        }
        Ok(Self::smooth(OrliczKind::Power(p)))
    }

    pub fn exp_minus_one() -> Self {
        Self::smooth(OrliczKind::ExpMinusOne)
    }

    pub fn cosh_minus_one() -> Self {
        Self::smooth(OrliczKind::CoshMinusOne)
    }

    pub fn llogl() -> Self {
        Self::smooth(OrliczKind::LLogL)
    }

    fn smooth(kind: OrliczKind<T>) -> Self {
        OrliczFunction {
            kind,
            a_phi: T::zero(),
            b_phi: T::infinity(),
        }
    }

    /// Piecewise-linear `φ` through the knots, infinite beyond the last one.
    ///
    /// The knots must start at `(0, 0)`, have strictly increasing abscissae,
    /// and non-decreasing, non-negative slopes.
    pub fn custom(knots: Vec<(T, T)>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::InvalidOrlicz("custom function needs at least two knots".into()));
        }
        if knots[0] != (T::zero(), T::zero()) {
            return Err(Error::InvalidOrlicz("custom function must start at the knot (0, 0)".into()));
        }
        if knots.iter().any(|&(u, v)| !u.is_finite() || !v.is_finite()) {
            return Err(Error::InvalidOrlicz("knots must be finite".into()));
        }
        let mut prev_slope = T::zero();
        for w in knots.windows(2) {
            let ((u0, v0), (u1, v1)) = (w[0], w[1]);
            if !(u1 > u0) {
                return Err(Error::InvalidOrlicz("knot abscissae must be strictly increasing".into()));
            }
            let slope = (v1 - v0) / (u1 - u0);
            let slack = T::tol(CONVEXITY_TOL) * T::one().max(prev_slope.abs());
            if slope < prev_slope - slack {
                return Err(Error::InvalidOrlicz(format!(
                    "knots are not convex: slope drops from {prev_slope} to {slope} at u = {u0}"
                )));
            }
            prev_slope = slope.max(prev_slope);
        }
        let a_phi = knots
            .iter()
            .take_while(|&&(_, v)| v <= T::zero())
            .last()
            .map(|&(u, _)| u)
            .unwrap_or_else(T::zero);
        let b_phi = knots[knots.len() - 1].0;
        Ok(OrliczFunction {
            kind: OrliczKind::Custom(knots),
            a_phi,
            b_phi,
        })
    }

    pub fn kind(&self) -> &OrliczKind<T> {
        &self.kind
    }

    /// Largest `u` with `φ(u) = 0`.
    pub fn a_phi(&self) -> T {
        self.a_phi
    }

    /// `sup{u : φ(u) < ∞}`, possibly infinite.
    pub fn b_phi(&self) -> T {
        self.b_phi
    }

    pub fn name(&self) -> String {
        match &self.kind {
            OrliczKind::Power(p) => format!("power({p})"),
            OrliczKind::ExpMinusOne => "exp_minus_one".into(),
            OrliczKind::CoshMinusOne => "cosh_minus_one".into(),
            OrliczKind::LLogL => "llogl".into(),
            OrliczKind::Custom(k) => format!("custom({} knots)", k.len()),
        }
    }

    /// `φ(u)` for `u ≥ 0`; negative arguments are read as `|u|`.
    pub fn eval(&self, u: T) -> Extended<T> {
        let u = u.abs();
        if u > self.b_phi {
            return Extended::Infinite;
        }
        let v = match &self.kind {
            OrliczKind::Power(p) => {
                if u == T::zero() {
                    T::zero()
                } else {
                    u.powf(*p)
                }
            }
            OrliczKind::ExpMinusOne => u.exp_m1(),
            OrliczKind::CoshMinusOne => {
                let s = (u * T::of(0.5)).sinh();
                T::of(2.0) * s * s
            }
            OrliczKind::LLogL => u * u.ln_1p(),
            OrliczKind::Custom(knots) => {
                let k = knots.iter().position(|&(x, _)| x >= u).unwrap_or(knots.len() - 1);
                if k == 0 {
                    knots[0].1
                } else {
                    let ((u0, v0), (u1, v1)) = (knots[k - 1], knots[k]);
                    v0 + (v1 - v0) * (u - u0) / (u1 - u0)
                }
            }
        };
        Extended::from_real(v)
    }
}

/// Orlicz function as written in a configuration file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrliczSpec {
    pub kind: OrliczKindName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub knots: Option<Vec<[f64; 2]>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrliczKindName {
    Power,
    ExpMinusOne,
    CoshMinusOne,
    Llogl,
    Custom,
}

impl OrliczSpec {
    pub fn power(p: f64) -> Self {
        OrliczSpec {
            kind: OrliczKindName::Power,
            p: Some(p),
            knots: None,
        }
    }

    pub fn named(kind: OrliczKindName) -> Self {
        OrliczSpec { kind, p: None, knots: None }
    }

    pub fn build<T: Real>(&self) -> Result<OrliczFunction<T>> {
        let unexpected = |field: &str| Error::InvalidOrlicz(format!("field `{field}` does not apply to {:?}", self.kind));
        match self.kind {
            OrliczKindName::Power => {
                if self.knots.is_some() {
                    return Err(unexpected("knots"));
                }
                let p = self.p.ok_or_else(|| Error::InvalidOrlicz("power needs the field `p`".into()))?;
                OrliczFunction::power(T::of(p))
            }
            OrliczKindName::Custom => {
                if self.p.is_some() {
                    return Err(unexpected("p"));
                }
                let knots = self
                    .knots
                    .as_ref()
                    .ok_or_else(|| Error::InvalidOrlicz("custom needs the field `knots`".into()))?;
                OrliczFunction::custom(knots.iter().map(|k| (T::of(k[0]), T::of(k[1]))).collect())
            }
            kind => {
                if self.p.is_some() {
                    return Err(unexpected("p"));
                }
                if self.knots.is_some() {
                    return Err(unexpected("knots"));
                }
                Ok(match kind {
                    OrliczKindName::ExpMinusOne => OrliczFunction::exp_minus_one(),
                    OrliczKindName::CoshMinusOne => OrliczFunction::cosh_minus_one(),
                    _ => OrliczFunction::llogl(),
                })
            }
        }
    }
}

/// `Σ_k φ(levels_k / λ) masses_k`.
fn modular<T: Real>(phi: &OrliczFunction<T>, levels: &[T], masses: &[T], lambda: T) -> Extended<T> {
    levels.iter().zip(masses).fold(Extended::Finite(T::zero()), |acc, (&v, &w)| {
        if v == T::zero() || w == T::zero() {
            return acc;
        }
        acc + match phi.eval(v / lambda) {
            Extended::Finite(x) => Extended::from_real(x * w),
            Extended::Infinite => Extended::Infinite,
        }
    })
}

/// `inf{λ > 0 : Σ_k φ(levels_k/λ) masses_k ≤ 1}` by bisection.
///
/// The constraint is non-increasing in `λ`. The bracket starts at the top
/// level, grows or shrinks by [`BRACKET_FACTOR`], then bisection runs until
/// the endpoints are adjacent floats. The feasible endpoint is returned, so
/// boundary ties resolve to the infimum.
pub fn gauge<T: Real>(phi: &OrliczFunction<T>, levels: &[T], masses: &[T]) -> Result<T> {
    let top = levels.iter().fold(T::zero(), |a, &b| a.max(b.abs()));
    if top == T::zero() {
        return Ok(T::zero());
    }
    let feasible = |lambda: T| matches!(modular(phi, levels, masses, lambda), Extended::Finite(x) if x <= T::one());
    let factor = T::of(BRACKET_FACTOR);
    let mut hi = top;
    if phi.b_phi().is_finite() {
        hi = hi.max(top / phi.b_phi());
    }
    let mut grown = 0;
    while !feasible(hi) {
        grown += 1;
        if grown > BISECTION_CAP {
            return Err(Error::BracketFailure(format!(
                "no feasible scale up to {hi} for {} (top level {top})",
                phi.name()
            )));
        }
        hi = hi * factor;
    }
    let mut lo = hi / factor;
    let mut shrunk = 0;
    while feasible(lo) {
        shrunk += 1;
        if shrunk > BISECTION_CAP || !(lo > T::zero()) {
            return Err(Error::BracketFailure(format!(
                "constraint still feasible at scale {lo} for {} (top level {top})",
                phi.name()
            )));
        }
        hi = lo;
        lo = lo / factor;
    }
    for _ in 0..BISECTION_CAP {
        let mid = (lo + hi) * T::of(0.5);
        if !(mid > lo && mid < hi) {
            break;
        }
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Commutative Luxemburg norm of a decreasing step function.
pub fn profile_norm<T: Real>(phi: &OrliczFunction<T>, profile: &SingularProfile<T>) -> Result<T> {
    gauge(phi, profile.values(), profile.weights())
}

/// `∫ φ(μ_t) dt = Σ_k φ(values_k) weights_k`.
pub fn profile_phi<T: Real>(phi: &OrliczFunction<T>, profile: &SingularProfile<T>) -> Extended<T> {
    modular(phi, profile.values(), profile.weights(), T::one())
}

/// Both sides of `τ(φ(|f|)) = ∫ φ(μ_t(f)) dt`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TracePhi<T> {
    /// `τ(φ(|f|))`, the trace of the matrix `φ(|f|)`.
    pub spectral: Extended<T>,
    /// `Σ φ(μ_k) w_k` over the singular-value profile.
    pub profile: Extended<T>,
}

impl<T: Real> TracePhi<T> {
    /// Relative gap between the sides; `0` when both are infinite and `∞`
    /// when exactly one is.
    pub fn residual(&self) -> T {
        match (self.spectral, self.profile) {
            (Extended::Finite(a), Extended::Finite(b)) => {
                let scale = a.abs().max(b.abs());
                if scale == T::zero() {
                    T::zero()
                } else {
                    (a - b).abs() / scale
                }
            }
            (Extended::Infinite, Extended::Infinite) => T::zero(),
            _ => T::infinity(),
        }
    }
}

pub fn trace_phi_sides<T: Real>(f: &LocalOperator<T>, phi: &OrliczFunction<T>, trace: &TraceSpec<T>) -> Result<TracePhi<T>> {
    let (levels, _, spec) = modulus_spectrum(f.matrix(), trace)?;
    let spectral = if levels.iter().any(|&s| s > phi.b_phi()) {
        Extended::Infinite
    } else {
        let m = spec.map_real(|e| phi.eval(e.max(T::zero()).sqrt()).to_real());
        Extended::from_real(trace.apply(&m))
    };
    let profile = profile_phi(phi, &singular_profile(f, trace)?);
    Ok(TracePhi { spectral, profile })
}

/// `τ(φ(|f|))`, cross-checked against the profile integral to
/// [`TRACE_IDENTITY_TOL`] (relative).
pub fn trace_phi<T: Real>(f: &LocalOperator<T>, phi: &OrliczFunction<T>, trace: &TraceSpec<T>) -> Result<Extended<T>> {
    let sides = trace_phi_sides(f, phi, trace)?;
    if sides.residual() > T::tol(TRACE_IDENTITY_TOL) {
        return Err(Error::TraceIdentity {
            spectral: sides.spectral.to_real().to_f64_lossy(),
            profile: sides.profile.to_real().to_f64_lossy(),
        });
    }
    Ok(sides.spectral)
}

/// `inf{λ > 0 : τ(φ(|f|/λ)) ≤ 1}` with `τ(φ(|f|/λ))` evaluated through the
/// eigendecomposition of `f*f`.
pub fn luxemburg_norm<T: Real>(f: &LocalOperator<T>, phi: &OrliczFunction<T>, trace: &TraceSpec<T>) -> Result<T> {
    let (levels, masses, _) = modulus_spectrum(f.matrix(), trace)?;
    gauge(phi, &levels, &masses)
}

/// Luxemburg norm of the rearrangement, `ρ_φ(μ(f))`, from the SVD.
pub fn ddp_norm<T: Real>(f: &LocalOperator<T>, phi: &OrliczFunction<T>, trace: &TraceSpec<T>) -> Result<T> {
    profile_norm(phi, &singular_profile(f, trace)?)
}

/// A `λ > 0` with `τ(φ(λ|f|)) < ∞`.
///
/// Every bounded `f` qualifies at finite dimension: `λ = 1` when `b_φ = ∞`,
/// otherwise half the threshold `b_φ / ‖f‖`.
pub fn kunze_membership<T: Real>(f: &LocalOperator<T>, phi: &OrliczFunction<T>, _trace: &TraceSpec<T>) -> Result<T> {
    let top = f.op_norm();
    if !phi.b_phi().is_finite() || top == T::zero() {
        return Ok(T::one());
    }
    Ok(phi.b_phi() / top * T::of(0.5))
}

/// Largest violations of the function-norm axioms over a sample set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AxiomReport<T> {
    /// `ρ(0) = 0` and `ρ(f) > 0` for every non-zero sample.
    pub definite: bool,
    /// `max |ρ(cf) − |c|ρ(f)| / (|c|ρ(f))`.
    pub homogeneity: T,
    /// `max (ρ(f+g) − ρ(f) − ρ(g))₊ / (ρ(f) + ρ(g))`.
    pub triangle: T,
    /// `max (ρ(f) − ρ(f+g))₊ / ρ(f+g)`, using `f ≤ f + g`.
    pub monotonicity: T,
    /// Along the truncations `f_n ↑ f`: largest relative decrease of
    /// `ρ(f_n)`, or relative gap `|ρ(f) − lim ρ(f_n)|`, whichever is bigger.
    pub fatou: T,
    pub samples: usize,
}

impl<T: Real> AxiomReport<T> {
    pub fn passes(&self, tol: T, fatou_tol: T) -> bool {
        self.definite
            && self.homogeneity <= tol
            && self.triangle <= tol
            && self.monotonicity <= tol
            && self.fatou <= fatou_tol
    }
}

/// Probe the Banach function norm axioms of `ρ_φ` on sample profiles.
pub fn function_norm_axiom_check<T: Real>(phi: &OrliczFunction<T>, samples: &[SingularProfile<T>]) -> Result<AxiomReport<T>> {
    let rho = |p: &SingularProfile<T>| profile_norm(phi, p);
    let mut report = AxiomReport {
        definite: true,
        homogeneity: T::zero(),
        triangle: T::zero(),
        monotonicity: T::zero(),
        fatou: T::zero(),
        samples: samples.len(),
    };
    let rel = |num: T, den: T| if den > T::zero() { num / den } else { num };
    for (i, f) in samples.iter().enumerate() {
        let nf = rho(f)?;
        if rho(&SingularProfile::zero(f.total_mass()))? != T::zero() || (nf > T::zero()) == f.is_empty() {
            report.definite = false;
        }
        for c in [T::of(0.5), T::of(2.0), T::of(3.7)] {
            let ncf = rho(&f.scale(c))?;
            report.homogeneity = report.homogeneity.max(rel((ncf - c * nf).abs(), c * nf));
        }
        let g = &samples[(i + 1) % samples.len()];
        let ng = rho(g)?;
        let sum = f.pointwise_sum(g);
        let nsum = rho(&sum)?;
        report.triangle = report.triangle.max(rel(nsum - nf - ng, nf + ng));
        report.monotonicity = report.monotonicity.max(rel(nf - nsum, nsum));

        let mut prev = T::zero();
        for n in 0..=f.len() {
            let nn = rho(&f.truncate(n))?;
            report.fatou = report.fatou.max(rel(prev - nn, nf));
            prev = nn;
        }
        report.fatou = report.fatou.max(rel((nf - prev).abs(), nf));
    }
    Ok(report)
}
