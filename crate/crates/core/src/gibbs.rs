//! Finite-volume Gibbs densities, Gibbs states and Heisenberg-picture dynamics.

use crate::density::DensityOperator;
use crate::error::{Error, Result};
use crate::linalg::Spectrum;
use crate::operator::LocalOperator;
use crate::potential::Potential;
use crate::region::Region;
use crate::scalar::{cplx, Real, C};

/// `ρ_Λ = e^{−βH_Λ} / Tr e^{−βH_Λ}` under the normalized trace.
///
/// The exponential is taken on the spectrum of `H_Λ`, shifted by its smallest
/// eigenvalue so no weight overflows.
pub fn gibbs_density<T: Real>(phi: &Potential<T>, region: &Region, beta: T) -> Result<DensityOperator<T>> {
    let h = phi.hamiltonian(region)?;
    gibbs_density_of(&h, beta)
}

/// Gibbs density of an explicit Hamiltonian.
pub fn gibbs_density_of<T: Real>(h: &LocalOperator<T>, beta: T) -> Result<DensityOperator<T>> {
    if !(beta >= T::zero()) || !beta.is_finite() {
        return Err(Error::InvalidParameter(format!("beta must be finite and non-negative, got {beta}")));
    }
    let spectrum = h.spectrum();
    let shift = spectrum.min();
    let n = spectrum.dim();
    let weights: Vec<T> = spectrum.values().iter().map(|&e| (-beta * (e - shift)).exp()).collect();
    let z = weights.iter().fold(T::zero(), |a, &b| a + b) / T::of(n as f64);
    let values = nalgebra::DVector::from_iterator(n, weights.into_iter().map(|w| w / z));
    let rho_spectrum = Spectrum::from_parts(values, spectrum.vectors().clone());
    DensityOperator::from_spectrum(h.lattice(), h.support().clone(), rho_spectrum)
}

/// `ω_Λ(f) = Tr(ρ_Λ f)`.
pub fn gibbs_expectation<T: Real>(rho: &DensityOperator<T>, f: &LocalOperator<T>) -> Result<C<T>> {
    rho.expectation(f)
}

/// Heisenberg-picture flow `α_t(f) = e^{itH} f e^{−itH}` generated by a fixed Hamiltonian.
#[derive(Clone, Debug)]
pub struct HeisenbergFlow<T: Real> {
    hamiltonian: LocalOperator<T>,
    spectrum: Spectrum<T>,
}

impl<T: Real> HeisenbergFlow<T> {
    pub fn new(hamiltonian: LocalOperator<T>) -> Self {
        let spectrum = hamiltonian.spectrum();
        HeisenbergFlow { hamiltonian, spectrum }
    }

    pub fn hamiltonian(&self) -> &LocalOperator<T> {
        &self.hamiltonian
    }

    /// `e^{itH}` on the support of `H`.
    pub fn propagator(&self, t: T) -> LocalOperator<T> {
        let u = self.spectrum.map(|e| {
            let phase = t * e;
            cplx(phase.cos(), phase.sin())
        });
        self.hamiltonian.with_matrix(u)
    }

    pub fn evolve(&self, f: &LocalOperator<T>, t: T) -> Result<LocalOperator<T>> {
        let f = f.embed(self.hamiltonian.support())?;
        let u = self.propagator(t);
        let m = u.matrix() * f.matrix() * u.matrix().adjoint();
        Ok(f.with_matrix(m))
    }
}

/// One-shot form of [`HeisenbergFlow::evolve`].
pub fn heisenberg_evolve<T: Real>(f: &LocalOperator<T>, h: &LocalOperator<T>, t: T) -> Result<LocalOperator<T>> {
    HeisenbergFlow::new(h.clone()).evolve(f, t)
}

/// `‖Tr_{Λ2∖Λ1} ρ_{Λ2} − ρ_{Λ1} ⊗ 1‖_op`.
///
/// Zero for product families; a measured quantity for interacting ones.
pub fn compatibility_defect<T: Real>(phi: &Potential<T>, beta: T, inner: &Region, outer: &Region) -> Result<T> {
    if !inner.is_subset(outer) {
        return Err(Error::NotNested(format!("{inner} is not contained in {outer}")));
    }
    let rho_outer = gibbs_density(phi, outer, beta)?;
    let rho_inner = gibbs_density(phi, inner, beta)?;
    let marginal = rho_outer.op().partial_trace(&outer.difference(inner))?;
    let lifted = rho_inner.op().embed(outer)?;
    Ok((&marginal - &lifted).op_norm())
}
