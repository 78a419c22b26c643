//! Orlicz-norm bounds for positive unital maps.
//!
//! Each supported map class comes with a certified constant `C` such that
//! `‖T f‖_φ ≤ C ‖f‖_φ`. The bound rests on the singular-value inequality
//! `μ_t(W* f W) ≤ ‖W‖² μ_t(f)` together with the triangle inequality, and
//! both are checked directly on samples.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::operator::LocalOperator;
use crate::orlicz::{luxemburg_norm, OrliczFunction};
use crate::random;
use crate::scalar::Real;
use crate::singular::{singular_profile, SingularProfile, TraceSpec};
use crate::superop::{SuperopKind, Superoperator};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ContractionClass {
    /// `f ↦ u* f u`; an isometry, `C = 1`.
    InnerAutomorphism,
    /// `f ↦ Σ W_i* f W_i` with two or more terms; `C = Σ ‖W_i‖²`.
    KrausSum,
    /// `f ↦ V* f V`; `C = ‖V‖²`.
    Pure,
    /// Transpose or `f ↦ u* fᵀ u`; an isometry for the uniform traces, `C = 1`.
    Jordan,
}

impl ContractionClass {
    pub fn is_isometric(self) -> bool {
        matches!(self, ContractionClass::InnerAutomorphism | ContractionClass::Jordan)
    }

    pub fn name(self) -> &'static str {
        match self {
            ContractionClass::InnerAutomorphism => "inner_automorphism",
            ContractionClass::KrausSum => "kraus_sum",
            ContractionClass::Pure => "pure",
            ContractionClass::Jordan => "jordan",
        }
    }
}

pub fn contraction_class<T: Real>(map: &Superoperator<T>) -> Result<ContractionClass> {
    match map.kind() {
        SuperopKind::InnerAuto { .. } => Ok(ContractionClass::InnerAutomorphism),
        SuperopKind::Kraus { ops } if ops.len() == 1 => Ok(ContractionClass::Pure),
        SuperopKind::Kraus { .. } => Ok(ContractionClass::KrausSum),
        SuperopKind::Transpose | SuperopKind::Jordan { .. } => Ok(ContractionClass::Jordan),
        other => Err(Error::KindMismatch(format!("no contraction bound for {other:?}"))),
    }
}

/// The certified constant `C` of the map.
pub fn contraction_bound<T: Real>(map: &Superoperator<T>) -> Result<T> {
    Ok(match map.kind() {
        SuperopKind::Kraus { ops } => ops.iter().fold(T::zero(), |acc, w| {
            let n = w.op_norm();
            acc + n * n
        }),
        _ => {
            contraction_class(map)?;
            T::one()
        }
    })
}

/// Per-term pieces `(map, c)` with `μ(piece(f)) ≤ c μ(f)` step-wise.
fn step_terms<T: Real>(map: &Superoperator<T>) -> Result<Vec<(Box<dyn Fn(&LocalOperator<T>) -> LocalOperator<T> + Sync + '_>, T)>> {
    match map.kind() {
        SuperopKind::Kraus { ops } => Ok(ops
            .iter()
            .map(|w| {
                let n = w.op_norm();
                let f: Box<dyn Fn(&LocalOperator<T>) -> LocalOperator<T> + Sync> =
                    Box::new(move |x: &LocalOperator<T>| &(&w.adjoint() * x) * w);
                (f, n * n)
            })
            .collect()),
        _ => {
            contraction_class(map)?;
            let f: Box<dyn Fn(&LocalOperator<T>) -> LocalOperator<T> + Sync> =
                Box::new(move |x: &LocalOperator<T>| map.apply(x).expect("sample lives on the ambient region"));
            Ok(vec![(f, T::one())])
        }
    }
}

/// `sup_t (μ_t(a) − c μ_t(b))₊ / μ_0(b)`.
pub fn step_excess<T: Real>(a: &SingularProfile<T>, b: &SingularProfile<T>, c: T) -> T {
    let scale = b.max_value();
    let e = a.excess_over(b, c);
    if scale > T::zero() {
        e / scale
    } else {
        e
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContractionReport<T> {
    pub class: ContractionClass,
    /// Certified `C`.
    pub bound: T,
    /// `max ‖Tf‖_φ / ‖f‖_φ` over samples.
    pub max_ratio: T,
    pub min_ratio: T,
    /// Largest relative step-wise violation of `μ(term(f)) ≤ c μ(f)`; for
    /// isometric classes also of the reverse inequality.
    pub step_violation: T,
    pub samples: usize,
}

impl<T: Real> ContractionReport<T> {
    /// `max_ratio ≤ C + tol`, step-wise bounds within `tol`, and for
    /// isometric classes `|ratio − 1| ≤ tol` on every sample.
    pub fn certified(&self, tol: T) -> bool {
        let bounded = self.max_ratio <= self.bound + tol && self.step_violation <= tol;
        if self.class.is_isometric() {
            bounded && (self.max_ratio - T::one()).abs() <= tol && (self.min_ratio - T::one()).abs() <= tol
        } else {
            bounded
        }
    }
}

/// Evaluate `‖Tf‖_φ / ‖f‖_φ` on Gaussian samples and check the step-wise
/// singular-value bounds. Needs a uniform trace.
pub fn contraction_report<T: Real>(
    map: &Superoperator<T>,
    phi: &OrliczFunction<T>,
    trace: &TraceSpec<T>,
    samples: usize,
    seed: u64,
) -> Result<ContractionReport<T>> {
    if !trace.is_uniform() {
        return Err(Error::InvalidParameter("contraction bounds need the normalized or standard trace".into()));
    }
    let class = contraction_class(map)?;
    let bound = contraction_bound(map)?;
    let terms = step_terms(map)?;
    let n = map.dim();
    let mut rng = random::rng(seed);
    let inputs: Vec<LocalOperator<T>> = (0..samples)
        .map(|_| LocalOperator::new(map.lattice(), map.ambient().clone(), random::gaussian_matrix(&mut rng, n)))
        .collect::<Result<_>>()?;

    let per_sample: Vec<(T, T)> = inputs
        .par_iter()
        .map(|f| -> Result<(T, T)> {
            let out = map.apply(f)?;
            let ratio = luxemburg_norm(&out, phi, trace)? / luxemburg_norm(f, phi, trace)?;
            let mu_f = singular_profile(f, trace)?;
            let mut worst = T::zero();
            for (term, c) in &terms {
                let mu_t = singular_profile(&term(f), trace)?;
                worst = worst.max(step_excess(&mu_t, &mu_f, *c));
                if class.is_isometric() {
                    worst = worst.max(step_excess(&mu_f, &mu_t, T::one()));
                }
            }
            Ok((ratio, worst))
        })
        .collect::<Result<_>>()?;

    let mut report = ContractionReport {
        class,
        bound,
        max_ratio: T::zero(),
        min_ratio: T::infinity(),
        step_violation: T::zero(),
        samples,
    };
    for (ratio, worst) in per_sample {
        report.max_ratio = report.max_ratio.max(ratio);
        report.min_ratio = report.min_ratio.min(ratio);
        report.step_violation = report.step_violation.max(worst);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::region::{Lattice, Region};

    fn chain() -> Lattice {
        Lattice::chain()
    }

    fn unitary(seed: u64) -> LocalOperator<f64> {
        let mut r = random::rng(seed);
        LocalOperator::new(chain(), Region::chain(0..2), random::unitary_matrix(&mut r, 4)).unwrap()
    }

    fn phis() -> Vec<OrliczFunction<f64>> {
        vec![
            OrliczFunction::power(3.0).unwrap(),
            OrliczFunction::exp_minus_one(),
            OrliczFunction::custom(vec![(0.0, 0.0), (0.5, 0.0), (2.0, 3.0), (10.0, 40.0)]).unwrap(),
        ]
    }

    #[test]
    fn isometries() {
        let maps = vec![
            Superoperator::inner_auto(unitary(1)).unwrap(),
            Superoperator::transpose(chain(), Region::chain(0..2)).unwrap(),
            Superoperator::jordan(unitary(2), true).unwrap(),
        ];
        for map in &maps {
            for phi in phis() {
                let rep = contraction_report(map, &phi, &TraceSpec::Normalized, 40, 3).unwrap();
                assert!(rep.certified(1e-9), "{:?} {}: {rep:?}", map.kind(), phi.name());
                assert_eq!(rep.bound, 1.0);
            }
        }
    }

    #[test]
    fn kraus_pair_of_unitaries() {
        let map = Superoperator::kraus(chain(), Region::chain(0..2), vec![unitary(4), unitary(5)]).unwrap();
        let rep = contraction_report(&map, &OrliczFunction::power(2.0).unwrap(), &TraceSpec::Normalized, 50, 1).unwrap();
        assert_eq!(rep.class, ContractionClass::KrausSum);
        assert!((rep.bound - 2.0).abs() < 1e-12);
        assert!(rep.certified(1e-9), "{rep:?}");
    }

    #[test]
    fn pure_isometry_and_general_kraus() {
        // ‖V‖ = 0.8, so C = 0.64
        let v = unitary(7).scale_real(0.8);
        let map = Superoperator::kraus(chain(), Region::chain(0..2), vec![v]).unwrap();
        let rep = contraction_report(&map, &OrliczFunction::llogl(), &TraceSpec::Standard, 30, 2).unwrap();
        assert_eq!(rep.class, ContractionClass::Pure);
        assert!((rep.bound - 0.64).abs() < 1e-12);
        assert!(rep.certified(1e-9), "{rep:?}");
        let w1 = random::random_operator(chain(), &Region::chain(0..2), 8).unwrap();
        let w2 = random::random_operator(chain(), &Region::chain(0..1), 9).unwrap();
        let map = Superoperator::kraus(chain(), Region::chain(0..2), vec![w1, w2]).unwrap();
        let rep = contraction_report(&map, &OrliczFunction::exp_minus_one(), &TraceSpec::Normalized, 30, 2).unwrap();
        assert!(rep.certified(1e-9), "{rep:?}");
    }

    #[test]
    fn rejects_unsupported_classes() {
        let e = Superoperator::<f64>::partial_trace_ce(chain(), Region::chain(0..2), Region::chain(0..1)).unwrap();
        let phi = OrliczFunction::power(2.0).unwrap();
        assert!(matches!(
            contraction_report(&e, &phi, &TraceSpec::Normalized, 1, 0),
            Err(Error::KindMismatch(_))
        ));
        let t = Superoperator::<f64>::transpose(chain(), Region::chain(0..1)).unwrap();
        assert!(contraction_report(&t, &phi, &TraceSpec::Weighted(vec![1.0, 2.0]), 1, 0).is_err());
    }
}
