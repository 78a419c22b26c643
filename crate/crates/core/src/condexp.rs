//! Cocycles between densities, equivalence constants, generalized conditional
//! expectations and the block-spin-flip semigroups they generate.

use nalgebra::ComplexField;

use crate::density::DensityOperator;
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Spectrum};
use crate::lp::kms_inner;
use crate::operator::LocalOperator;
use crate::random;
use crate::region::Region;
use crate::scalar::{cplx, real, Real};
use crate::superop::{SuperopKind, Superoperator};

fn check_same_support<T: Real>(rho1: &DensityOperator<T>, rho2: &DensityOperator<T>) -> Result<()> {
    if rho1.support() != rho2.support() {
        return Err(Error::DimensionMismatch {
            expected: rho1.dim(),
            found: rho2.dim(),
        });
    }
    Ok(())
}

/// `V_t = ρ1^{it} ρ2^{−it}`.
pub fn rn_cocycle<T: Real>(rho1: &DensityOperator<T>, rho2: &DensityOperator<T>, t: T) -> Result<LocalOperator<T>> {
    check_same_support(rho1, rho2)?;
    let a = rho1.imaginary_power(t)?;
    let b = rho2.imaginary_power(-t)?;
    Ok(&a * &b)
}

/// `ξ = V_{−i/2} = ρ1^{1/2} ρ2^{−1/2}`.
pub fn cocycle_analytic_extension<T: Real>(rho1: &DensityOperator<T>, rho2: &DensityOperator<T>) -> Result<LocalOperator<T>> {
    check_same_support(rho1, rho2)?;
    let half = T::of(0.5);
    Ok(&rho1.power(half)? * &rho2.power(-half)?)
}

/// `σ_t(f) = ρ^{it} f ρ^{−it}`.
pub fn modular_automorphism<T: Real>(rho: &DensityOperator<T>, f: &LocalOperator<T>, t: T) -> Result<LocalOperator<T>> {
    let f = f.embed(rho.support())?;
    let phases: Vec<_> = rho
        .eigenvalue_powers(T::one())?
        .into_iter()
        .map(|x| {
            let a = t * x.ln();
            cplx(a.cos(), a.sin())
        })
        .collect();
    let mut m = rho.spectrum().to_eigenbasis(f.matrix());
    let n = m.nrows();
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] *= phases[i] * phases[j].conjugate();
        }
    }
    Ok(f.with_matrix(rho.spectrum().from_eigenbasis(&m)))
}

/// The extreme spectral values of `A = ρ1^{−1/2} ρ2 ρ1^{−1/2}` and the
/// positive operators attaining them.
#[derive(Clone, Debug)]
pub struct Equivalence<T: Real> {
    /// Smallest `c` with `φ1/c ≤ φ2 ≤ c φ1` on positive operators.
    pub constant: T,
    pub lambda_min: T,
    pub lambda_max: T,
    /// `ρ1^{−1/2} P ρ1^{−1/2}` for the top eigenprojection `P` of `A`; `φ2/φ1 = λ_max` on it.
    pub witness_max: LocalOperator<T>,
    /// Same for the bottom eigenprojection; `φ2/φ1 = λ_min` on it.
    pub witness_min: LocalOperator<T>,
}

pub fn equivalence<T: Real>(rho1: &DensityOperator<T>, rho2: &DensityOperator<T>) -> Result<Equivalence<T>> {
    check_same_support(rho1, rho2)?;
    let inv_half = rho1.power(T::of(-0.5))?;
    let a = inv_half.matrix() * rho2.matrix() * inv_half.matrix();
    let spec = Spectrum::of_hermitian(&crate::linalg::hermitian_part(&a));
    let (lambda_min, lambda_max) = (spec.min(), spec.max());
    let witness = |k: usize| {
        let v = spec.vectors().column(k);
        let p: Matrix<T> = &v * v.adjoint();
        rho1.op().with_matrix(inv_half.matrix() * p * inv_half.matrix())
    };
    let constant = lambda_max.max(T::one() / lambda_min);
    Ok(Equivalence {
        constant,
        lambda_min,
        lambda_max,
        witness_max: witness(spec.dim() - 1),
        witness_min: witness(0),
    })
}

/// `c = max(λ_max(A), 1/λ_min(A))` with `A = ρ1^{−1/2} ρ2 ρ1^{−1/2}`.
pub fn equivalence_constant<T: Real>(rho1: &DensityOperator<T>, rho2: &DensityOperator<T>) -> Result<T> {
    Ok(equivalence(rho1, rho2)?.constant)
}

/// Density of `φ ∘ Tr_X`, i.e. `Tr_X ρ` re-embedded into the support of `ρ`.
pub fn traced_density<T: Real>(rho: &DensityOperator<T>, traced: &Region) -> Result<DensityOperator<T>> {
    DensityOperator::new(rho.op().partial_trace(traced)?)
}

/// Generalized conditional expectation `E(f) = Tr_X(γ* f γ)` with
/// `γ = ρ^{1/2} (Tr_X ρ)^{−1/2}`.
pub fn block_spin_gce<T: Real>(rho: &DensityOperator<T>, traced: &Region) -> Result<Superoperator<T>> {
    if !traced.is_subset(rho.support()) {
        return Err(Error::RegionNotInSupport {
            region: traced.to_string(),
            support: rho.support().to_string(),
        });
    }
    let marginal = rho.op().reduce(traced)?;
    let spec = marginal.spectrum();
    if !(spec.min() > T::of(crate::density::EIGENVALUE_FLOOR)) {
        return Err(Error::SingularMarginal {
            min_eigenvalue: spec.min().to_f64_lossy(),
        });
    }
    let inv_sqrt = marginal.with_matrix(spec.map_real(|x| T::one() / x.sqrt())).embed(rho.support())?;
    let gamma = &rho.power(T::of(0.5))? * &inv_sqrt;
    Superoperator::generalized_ce(gamma, traced.clone())
}

/// Largest violations of the three conditional-expectation properties.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GceReport<T> {
    /// `max |E(1) − 1|`.
    pub unitality: T,
    /// `max(0, −λ_min(E(f*f)))` over samples normalized to `‖f‖ = 1`.
    pub positivity: T,
    /// `max |⟨E f, g⟩ − ⟨f, E g⟩|` in the KMS inner product of `ρ1`, for
    /// samples normalized to unit KMS norm.
    pub symmetry: T,
    pub samples: usize,
}

impl<T: Real> GceReport<T> {
    pub fn passes(&self, unitality: T, positivity: T, symmetry: T) -> bool {
        self.unitality <= unitality && self.positivity <= positivity && self.symmetry <= symmetry
    }
}

/// Check unitality, positivity and KMS symmetry of `E` on random samples.
pub fn gce_property_report<T: Real>(
    e: &Superoperator<T>,
    rho1: &DensityOperator<T>,
    samples: usize,
    seed: u64,
) -> Result<GceReport<T>> {
    if !matches!(
        e.kind(),
        SuperopKind::GeneralizedCe { .. } | SuperopKind::PartialTraceCe { .. }
    ) {
        return Err(Error::KindMismatch(format!("expected a conditional expectation, got {:?}", e.kind())));
    }
    let ambient = e.ambient().clone();
    let lattice = e.lattice();
    let unitality = e.unitality_defect()?;
    let half = T::of(0.5);
    let mut positivity = T::zero();
    let mut symmetry = T::zero();
    let mut rng = random::rng(seed);
    let n = e.dim();
    let unit = |m: Matrix<T>| -> Result<LocalOperator<T>> {
        let f = LocalOperator::new(lattice, ambient.clone(), m)?;
        let norm = kms_inner(&f, &f, rho1, half)?.re.sqrt();
        Ok(f.scale_real(T::one() / norm))
    };
    for _ in 0..samples {
        let f = unit(random::gaussian_matrix(&mut rng, n))?;
        let g = unit(random::gaussian_matrix(&mut rng, n))?;

        let fo = f.scale_real(T::one() / f.op_norm());
        let pos = e.apply(&(&fo.adjoint() * &fo))?;
        positivity = positivity.max(-pos.min_eigenvalue());

        let lhs = kms_inner(&e.apply(&f)?, &g, rho1, half)?;
        let rhs = kms_inner(&f, &e.apply(&g)?, rho1, half)?;
        symmetry = symmetry.max((lhs - rhs).modulus());
    }
    Ok(GceReport {
        unitality,
        positivity,
        symmetry,
        samples,
    })
}

/// `L = E − id`.
pub fn markov_generator<T: Real>(e: &Superoperator<T>) -> Result<Superoperator<T>> {
    Superoperator::generator(vec![e.clone()])
}

/// `L = Σ_k (E_k − id)` for a family of blocks on one ambient region.
pub fn markov_generator_sum<T: Real>(blocks: Vec<Superoperator<T>>) -> Result<Superoperator<T>> {
    Superoperator::generator(blocks)
}

/// Relative term size at which the series is truncated.
pub const SERIES_TOL: f64 = 1e-14;

const MAX_TERMS: usize = 500;

/// `P_t f = e^{tL} f` for `L = Σ_k (E_k − id)`.
///
/// With `S = Σ_k E_k` and `m` blocks, `P_t = e^{−mt} Σ_j (t^j/j!) S^j`. Time is
/// split into steps with `m·h ≤ 1` so the series converges quickly and
/// without cancellation; the dense superoperator is never formed.
pub fn semigroup_apply<T: Real>(l: &Superoperator<T>, f: &LocalOperator<T>, t: T) -> Result<LocalOperator<T>> {
    let blocks = match l.kind() {
        SuperopKind::Generator { blocks } => blocks,
        other => return Err(Error::KindMismatch(format!("expected a generator, got {other:?}"))),
    };
    if !(t >= T::zero()) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!("time must be finite and non-negative, got {t}")));
    }
    let mut current = f.embed(l.ambient())?;
    if t == T::zero() {
        return Ok(current);
    }
    let m = T::of(blocks.len() as f64);
    let steps = (m * t).ceil().to_f64_lossy().max(1.0) as usize;
    let h = t / T::of(steps as f64);
    let damping = (-m * h).exp();
    let apply_s = |x: &LocalOperator<T>| -> Result<Matrix<T>> {
        let n = x.dim();
        let mut acc = Matrix::zeros(n, n);
        for b in blocks {
            acc += b.apply(x)?.matrix();
        }
        Ok(acc)
    };
    for _ in 0..steps {
        let scale = current.matrix().norm();
        let mut term = current.clone();
        let mut acc = current.matrix().clone();
        let mut converged = scale == T::zero();
        for j in 1..=MAX_TERMS {
            let next = apply_s(&term)? * real(h / T::of(j as f64));
            term = current.with_matrix(next);
            acc += term.matrix();
            if term.matrix().norm() <= T::tol(SERIES_TOL) * scale {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NoConvergence);
        }
        current = current.with_matrix(acc * real(damping));
    }
    Ok(current)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gibbs::gibbs_density;
    use crate::pauli;
    use crate::potential::Potential;
    use crate::region::Lattice;

    fn chain() -> Lattice {
        Lattice::chain()
    }

    fn diag_density(a: f64, b: f64) -> DensityOperator<f64> {
        let op = LocalOperator::on_site(chain(), vec![0], pauli::diag(&[a, b])).unwrap();
        DensityOperator::new(op).unwrap()
    }

    fn ising(len: i64, beta: f64) -> DensityOperator<f64> {
        let phi = Potential::ising(chain(), 1.0, 0.2).unwrap();
        gibbs_density(&phi, &Region::chain(0..len), beta).unwrap()
    }

    fn heisenberg(len: i64, beta: f64) -> DensityOperator<f64> {
        let phi = Potential::heisenberg(chain(), 1.0, 0.7, 0.4, 0.2).unwrap();
        gibbs_density(&phi, &Region::chain(0..len), beta).unwrap()
    }

    #[test]
    fn cocycle_trivial_cases() {
        let r1 = heisenberg(2, 0.8);
        let r2 = random::random_state(chain(), &Region::chain(0..2), 3).unwrap();
        let one = LocalOperator::identity(chain(), Region::chain(0..2)).unwrap();
        assert!(rn_cocycle(&r1, &r2, 0.0).unwrap().max_abs_diff(&one) < 1e-13);
        assert!(rn_cocycle(&r1, &r1, 1.3).unwrap().max_abs_diff(&one) < 1e-12);
        let other = heisenberg(3, 0.8);
        assert!(rn_cocycle(&r1, &other, 0.5).is_err());
    }

    #[test]
    fn cocycle_identity() {
        let r1 = random::random_state(chain(), &Region::chain(0..2), 1).unwrap();
        let r2 = random::random_state(chain(), &Region::chain(0..2), 2).unwrap();
        let (t, s) = (0.37, -1.2);
        let lhs = rn_cocycle(&r1, &r2, t + s).unwrap();
        let vs = rn_cocycle(&r1, &r2, s).unwrap();
        let rhs = &rn_cocycle(&r1, &r2, t).unwrap() * &modular_automorphism(&r2, &vs, t).unwrap();
        assert!(lhs.max_abs_diff(&rhs) < 1e-10);
    }

    #[test]
    fn analytic_extension_diagonal() {
        let r1 = diag_density(1.5, 0.5);
        let r2 = diag_density(0.4, 1.6);
        let xi = cocycle_analytic_extension(&r1, &r2).unwrap();
        assert!((xi.matrix()[(0, 0)].re - (1.5f64 / 0.4).sqrt()).abs() < 1e-14);
        assert!((xi.matrix()[(1, 1)].re - (0.5f64 / 1.6).sqrt()).abs() < 1e-14);
        let xx = &xi.adjoint() * &xi;
        assert!((r2.expectation(&xx).unwrap().re - 1.0).abs() < 1e-14);
        let same = cocycle_analytic_extension(&r1, &r1).unwrap();
        assert!(same.max_abs_diff(&LocalOperator::identity(chain(), Region::chain(0..1)).unwrap()) < 1e-14);
    }

    #[test]
    fn equivalence_constant_examples() {
        let one = DensityOperator::tracial(chain(), Region::chain(0..1)).unwrap();
        let r2 = diag_density(1.5, 0.5);
        assert!((equivalence_constant(&one, &r2).unwrap() - 2.0).abs() < 1e-12);
        assert!((equivalence_constant(&r2, &r2).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn equivalence_witnesses_are_sharp() {
        let r1 = random::random_state(chain(), &Region::chain(0..2), 11).unwrap();
        let r2 = random::random_state(chain(), &Region::chain(0..2), 12).unwrap();
        let eq = equivalence(&r1, &r2).unwrap();
        for (w, target) in [(&eq.witness_max, eq.lambda_max), (&eq.witness_min, eq.lambda_min)] {
            assert!(w.is_positive(1e-12));
            let ratio = r2.expectation(w).unwrap().re / r1.expectation(w).unwrap().re;
            assert!((ratio - target).abs() < 1e-8 * target);
        }
        assert!(eq.constant >= 1.0);
    }

    #[test]
    fn gce_at_infinite_temperature_is_partial_trace() {
        let rho: DensityOperator<f64> = DensityOperator::tracial(chain(), Region::chain(0..3)).unwrap();
        let x = Region::chain(1..2);
        let e = block_spin_gce(&rho, &x).unwrap();
        for seed in 0..5 {
            let f = random::random_operator(chain(), &Region::chain(0..3), seed).unwrap();
            let expect = f.partial_trace(&x).unwrap();
            assert!(e.apply(&f).unwrap().max_abs_diff(&expect) < 1e-13);
        }
    }

    #[test]
    fn gce_on_product_state_is_partial_trace() {
        let free = Potential::ising(chain(), 0.0, 0.7).unwrap();
        let rho = gibbs_density(&free, &Region::chain(0..3), 0.9).unwrap();
        let x = Region::chain(0..1);
        let e = block_spin_gce(&rho, &x).unwrap();
        // γ = ρ_X^{1/2} ⊗ 1, so E(a ⊗ b) = ω_X(a) b
        let a = random::random_operator(chain(), &x, 3).unwrap();
        let b = random::random_operator(chain(), &Region::chain(1..3), 4).unwrap();
        let expect = b.embed(&Region::chain(0..3)).unwrap().scale(rho.expectation(&a).unwrap());
        assert!(e.apply(&(&a * &b)).unwrap().max_abs_diff(&expect) < 1e-12);
        assert!(e.apply(&b).unwrap().max_abs_diff(&b.embed(&Region::chain(0..3)).unwrap()) < 1e-12);
        assert!(e.unitality_defect().unwrap() < 1e-12);
    }

    #[test]
    fn gce_properties_on_gibbs_states() {
        for rho in [ising(3, 0.3), heisenberg(3, 0.5)] {
            let e = block_spin_gce(&rho, &Region::chain(1..2)).unwrap();
            let rep = gce_property_report(&e, &rho, 20, 7).unwrap();
            assert!(rep.unitality < 1e-12, "{rep:?}");
            assert!(rep.positivity < 1e-10, "{rep:?}");
            assert!(rep.symmetry < 1e-8, "{rep:?}");
        }
    }

    #[test]
    fn gce_errors() {
        let rho = ising(2, 0.3);
        assert!(block_spin_gce(&rho, &Region::chain(2..3)).is_err());
        let t = Superoperator::transpose(chain(), Region::chain(0..2)).unwrap();
        assert!(matches!(gce_property_report(&t, &rho, 1, 0), Err(Error::KindMismatch(_))));
    }

    #[test]
    fn generator_annihilates_identity_and_has_stable_spectrum() {
        let rho = heisenberg(2, 0.7);
        let e = block_spin_gce(&rho, &Region::chain(0..1)).unwrap();
        let l = markov_generator(&e).unwrap();
        let one = LocalOperator::identity(chain(), Region::chain(0..2)).unwrap();
        assert!(l.apply(&one).unwrap().is_zero(1e-12));
        for z in l.spectrum().unwrap() {
            assert!(z.re <= 1e-10, "{z}");
        }
        let id = Superoperator::identity(chain(), Region::chain(0..2)).unwrap();
        let zero = markov_generator(&id).unwrap();
        let f = random::random_operator(chain(), &Region::chain(0..2), 1).unwrap();
        assert!(zero.apply(&f).unwrap().is_zero(1e-15));
    }

    #[test]
    fn semigroup_closed_form_for_projection() {
        let x = Region::chain(0..1);
        let e = Superoperator::partial_trace_ce(chain(), Region::chain(0..2), x.clone()).unwrap();
        let l = markov_generator(&e).unwrap();
        let f = random::random_operator(chain(), &Region::chain(0..2), 9).unwrap();
        for t in [0.0, 0.3, 1.0, 4.5] {
            let got = semigroup_apply(&l, &f, t).unwrap();
            let ef = e.apply(&f).unwrap();
            let w: f64 = (-t).exp();
            let expect = &f.scale_real(w) + &ef.scale_real(1.0 - w);
            assert!(got.max_abs_diff(&expect) < 1e-10, "t={t}");
        }
        assert!(semigroup_apply(&l, &f, -1.0).is_err());
        assert!(semigroup_apply(&e, &f, 1.0).is_err());
    }

    #[test]
    fn semigroup_law_and_invariance() {
        let rho = ising(3, 0.4);
        let e1 = block_spin_gce(&rho, &Region::chain(0..1)).unwrap();
        let e2 = block_spin_gce(&rho, &Region::chain(2..3)).unwrap();
        let l = markov_generator_sum(vec![e1, e2]).unwrap();
        let f = random::random_hermitian(chain(), &Region::chain(0..3), 2).unwrap();
        let (t, s) = (0.7, 0.1);
        let ts = semigroup_apply(&l, &semigroup_apply(&l, &f, s).unwrap(), t).unwrap();
        let direct = semigroup_apply(&l, &f, t + s).unwrap();
        assert!(ts.max_abs_diff(&direct) < 1e-10);
        let before = rho.expectation(&f).unwrap();
        let after = rho.expectation(&direct).unwrap();
        assert!((before - after).modulus() < 1e-9);
    }
}
