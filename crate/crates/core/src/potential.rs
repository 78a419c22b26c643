//! Interaction potentials `Φ = {Φ_X}` and the two potential norms.

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::operator::{local_dim, LocalOperator};
use crate::pauli;
use crate::region::{Lattice, Region, Site};
use crate::scalar::Real;

/// One interaction term: a Hermitian matrix on `template`.
///
/// For translation-covariant potentials the template is anchored so that its
/// first site is the origin, and the term is repeated at every translate.
#[derive(Clone, Debug, PartialEq)]
pub struct PotentialTerm<T: Real> {
    pub template: Region,
    pub matrix: Matrix<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Potential<T: Real> {
    lattice: Lattice,
    terms: Vec<PotentialTerm<T>>,
    range: u64,
    translation_covariant: bool,
}

impl<T: Real> Potential<T> {
    /// Validate Hermiticity and dimensions; anchors covariant templates at the origin.
    pub fn new(lattice: Lattice, terms: Vec<PotentialTerm<T>>, translation_covariant: bool) -> Result<Self> {
        lattice.validate()?;
        let mut anchored = Vec::with_capacity(terms.len());
        let mut range = 0;
        for term in terms {
            if term.template.is_empty() {
                return Err(Error::InvalidRegion("potential term on the empty region".into()));
            }
            if term.template.dim() != Some(lattice.d) {
                return Err(Error::InvalidRegion(format!(
                    "template {} does not match lattice dimension {}",
                    term.template, lattice.d
                )));
            }
            let dim = local_dim(&lattice, term.template.len())?;
            if term.matrix.nrows() != dim || term.matrix.ncols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: term.matrix.nrows(),
                });
            }
            let defect = linalg::hermitian_defect(&term.matrix);
            if defect > T::tol(1e-12) {
                return Err(Error::NotHermitian {
                    defect: defect.to_f64_lossy(),
                });
            }
            range = range.max(term.template.diameter());
            let template = if translation_covariant {
                let first = &term.template.sites()[0];
                let offset: Site = first.iter().map(|c| -c).collect();
                term.template.translate(&offset)
            } else {
                term.template
            };
            anchored.push(PotentialTerm {
                template,
                matrix: term.matrix,
            });
        }
        Ok(Potential {
            lattice,
            terms: anchored,
            range,
            translation_covariant,
        })
    }

    /// Anisotropic nearest-neighbour Heisenberg model on a spin-½ lattice:
    /// `−(Jx σx⊗σx + Jy σy⊗σy + Jz σz⊗σz)` per bond and `−h σz` per site.
    pub fn heisenberg(lattice: Lattice, jx: T, jy: T, jz: T, h: T) -> Result<Self> {
        if lattice.n != 2 {
            return Err(Error::InvalidParameter(format!(
                "spin models need site dimension 2, got {}",
                lattice.n
            )));
        }
        let bond = -(pauli::x::<T>().kronecker(&pauli::x()).scale(jx)
            + pauli::y::<T>().kronecker(&pauli::y()).scale(jy)
            + pauli::z::<T>().kronecker(&pauli::z()).scale(jz));
        let mut terms = Vec::with_capacity(lattice.d + 1);
        for axis in 0..lattice.d {
            let mut e = lattice.origin();
            e[axis] = 1;
            terms.push(PotentialTerm {
                template: Region::new(vec![lattice.origin(), e])?,
                matrix: bond.clone(),
            });
        }
        terms.push(PotentialTerm {
            template: Region::site(lattice.origin()),
            matrix: pauli::z::<T>().scale(-h),
        });
        Self::new(lattice, terms, true)
    }

    /// Nearest-neighbour Ising model, the Heisenberg model with `Jx = Jy = 0`.
    pub fn ising(lattice: Lattice, j: T, h: T) -> Result<Self> {
        Self::heisenberg(lattice, T::zero(), T::zero(), j, h)
    }

    /// The zero potential on `lattice`.
    pub fn zero(lattice: Lattice) -> Self {
        Potential {
            lattice,
            terms: Vec::new(),
            range: 0,
            translation_covariant: true,
        }
    }

    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    pub fn terms(&self) -> &[PotentialTerm<T>] {
        &self.terms
    }

    pub fn range(&self) -> u64 {
        self.range
    }

    pub fn is_translation_covariant(&self) -> bool {
        self.translation_covariant
    }

    /// Every `(X, Φ_X)` with `X ⊆ region`.
    pub fn instances_in(&self, region: &Region) -> Vec<(Region, &Matrix<T>)> {
        let mut out = Vec::new();
        for term in &self.terms {
            if self.translation_covariant {
                for site in region.sites() {
                    let x = term.template.translate(site);
                    if x.is_subset(region) {
                        out.push((x, &term.matrix));
                    }
                }
            } else if term.template.is_subset(region) {
                out.push((term.template.clone(), &term.matrix));
            }
        }
        out
    }

    /// `sup_i Σ_{X∋i} w(|X|)·‖Φ_X‖`.
    fn weighted_norm<W: Fn(usize) -> T>(&self, weight: W) -> T {
        if self.translation_covariant {
            // each template has exactly |T| translates containing a given site
            self.terms.iter().fold(T::zero(), |acc, term| {
                let size = term.template.len();
                acc + T::of(size as f64) * weight(size) * linalg::op_norm(&term.matrix)
            })
        } else {
            let all = self
                .terms
                .iter()
                .fold(Region::empty(), |acc, t| acc.union(&t.template));
            all.sites()
                .iter()
                .map(|i| {
                    self.terms
                        .iter()
                        .filter(|t| t.template.contains(i))
                        .fold(T::zero(), |acc, t| {
                            acc + weight(t.template.len()) * linalg::op_norm(&t.matrix)
                        })
                })
                .fold(T::zero(), |a, b| a.max(b))
        }
    }

    /// `‖Φ‖₁ = sup_i Σ_{X∋i} ‖Φ_X‖`.
    pub fn norm1(&self) -> T {
        self.weighted_norm(|_| T::one())
    }

    /// `‖Φ‖_exp = sup_i Σ_{X∋i} e^{λ|X|} ‖Φ_X‖`.
    pub fn norm_exp(&self, lambda: T) -> Result<T> {
        if !(lambda > T::zero()) {
            return Err(Error::InvalidParameter(format!("lambda must be positive, got {lambda}")));
        }
        Ok(self.weighted_norm(|size| (lambda * T::of(size as f64)).exp()))
    }

    /// `H_Λ = Σ_{X⊆Λ} Φ_X` with free boundary conditions.
    pub fn hamiltonian(&self, region: &Region) -> Result<LocalOperator<T>> {
        let mut h = LocalOperator::zeros(self.lattice, region.clone())?;
        let mut acc = h.matrix().clone();
        for (x, m) in self.instances_in(region) {
            let term = LocalOperator::new(self.lattice, x, m.clone())?.embed(region)?;
            acc += term.matrix();
        }
        h = LocalOperator::new(self.lattice, region.clone(), acc)?;
        Ok(h)
    }
}

/// Single-site operator helper used by the experiment front-end.
pub fn site_operator<T: Real>(lattice: Lattice, name: &str, site: Site) -> Result<LocalOperator<T>> {
    let m = match name {
        "identity" | "id" => Matrix::identity(lattice.n, lattice.n),
        "sigma_x" | "x" if lattice.n == 2 => pauli::x(),
        "sigma_y" | "y" if lattice.n == 2 => pauli::y(),
        "sigma_z" | "z" if lattice.n == 2 => pauli::z(),
        _ => {
            return Err(Error::InvalidParameter(format!(
                "unknown single-site operator {name:?} for site dimension {}",
                lattice.n
            )))
        }
    };
    LocalOperator::on_site(lattice, site, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::real;

    fn chain() -> Lattice {
        Lattice::chain()
    }

    /// Brute-force `Σ_{X∋0} w(|X|)‖Φ_X‖` over every translate of every template
    /// that lies in a window of radius `range` around the origin.
    fn brute_norm(phi: &Potential<f64>, weight: impl Fn(usize) -> f64) -> f64 {
        let r = phi.range() as i64;
        let window = Region::chain(-r - 1..r + 2);
        phi.instances_in(&window)
            .into_iter()
            .filter(|(x, _)| x.contains(&[0]))
            .map(|(x, m)| weight(x.len()) * linalg::op_norm(m))
            .sum()
    }

    #[test]
    fn ising_bond_matrix() {
        let phi = Potential::<f64>::ising(chain(), 1.0, 0.0).unwrap();
        let bond = &phi.terms()[0];
        assert_eq!(bond.template, Region::chain(0..2));
        let d: Vec<f64> = (0..4).map(|i| bond.matrix[(i, i)].re).collect();
        assert_eq!(d, vec![-1.0, 1.0, 1.0, -1.0]);
    }

    #[test]
    fn isotropic_bond_commutes_with_swap() {
        let phi = Potential::<f64>::heisenberg(chain(), 0.7, 0.7, 0.7, 0.0).unwrap();
        let bond = &phi.terms()[0].matrix;
        let mut swap = Matrix::<f64>::zeros(4, 4);
        for (a, b) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
            swap[(a, b)] = real(1.0);
        }
        let comm = bond * &swap - &swap * bond;
        assert!(comm.iter().all(|z| nalgebra::ComplexField::modulus(*z) < 1e-15));
    }

    #[test]
    fn zero_couplings_give_zero_terms() {
        let phi = Potential::<f64>::ising(chain(), 0.0, 0.0).unwrap();
        assert!(phi.terms().iter().all(|t| t.matrix.iter().all(|z| z.re == 0.0 && z.im == 0.0)));
        assert_eq!(phi.norm1(), 0.0);
        assert_eq!(phi.norm_exp(0.5).unwrap(), 0.0);
        assert_eq!(Potential::<f64>::zero(chain()).norm1(), 0.0);
    }

    #[test]
    fn norm1_matches_enumeration() {
        let phi = Potential::<f64>::ising(chain(), 1.0, 0.0).unwrap();
        assert!((phi.norm1() - 2.0).abs() < 1e-14);
        assert!((brute_norm(&phi, |_| 1.0) - 2.0).abs() < 1e-14);
        let phi = Potential::<f64>::ising(chain(), 1.0, 0.5).unwrap();
        assert!((phi.norm1() - 2.5).abs() < 1e-14);
        assert!((brute_norm(&phi, |_| 1.0) - 2.5).abs() < 1e-14);
    }

    #[test]
    fn norm_exp_matches_enumeration() {
        let phi = Potential::<f64>::ising(chain(), 1.0, 0.0).unwrap();
        for lambda in [0.1f64, 0.5, 1.3] {
            let expected = 2.0 * (2.0 * lambda).exp();
            assert!((phi.norm_exp(lambda).unwrap() - expected).abs() < 1e-12);
            assert!((brute_norm(&phi, |k| (lambda * k as f64).exp()) - expected).abs() < 1e-12);
        }
        let phi = Potential::<f64>::heisenberg(chain(), 0.3, -1.2, 0.8, 0.4).unwrap();
        assert!((phi.norm_exp(1e-8).unwrap() - phi.norm1()).abs() < 1e-6);
        assert!(phi.norm_exp(0.0).is_err());
    }

    #[test]
    fn non_covariant_norm() {
        let lat = chain();
        let terms = vec![
            PotentialTerm {
                template: Region::chain(0..2),
                matrix: pauli::z::<f64>().kronecker(&pauli::z()),
            },
            PotentialTerm {
                template: Region::chain(1..2),
                matrix: pauli::x::<f64>().scale(3.0),
            },
        ];
        let phi = Potential::new(lat, terms, false).unwrap();
        assert!((phi.norm1() - 4.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian_term() {
        let mut m = pauli::x::<f64>();
        m[(0, 1)] = real(2.0);
        let t = PotentialTerm {
            template: Region::chain(0..1),
            matrix: m,
        };
        assert!(matches!(Potential::new(chain(), vec![t], true), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn ising_two_site_hamiltonian() {
        for j in [1.0, -0.4] {
            let phi = Potential::<f64>::ising(chain(), j, 0.0).unwrap();
            let h = phi.hamiltonian(&Region::chain(0..2)).unwrap();
            let expected = pauli::diag(&[-j, j, j, -j]);
            assert!(linalg::max_abs_diff(h.matrix(), &expected) < 1e-15);
        }
    }

    #[test]
    fn empty_region_hamiltonian() {
        let phi = Potential::<f64>::ising(chain(), 1.0, 0.3).unwrap();
        let h = phi.hamiltonian(&Region::empty()).unwrap();
        assert_eq!(h.dim(), 1);
        assert_eq!(h.matrix()[(0, 0)].re, 0.0);
    }

    #[test]
    fn hamiltonian_is_hermitian() {
        let phi = Potential::<f64>::heisenberg(chain(), 0.37, -1.1, 0.52, 0.81).unwrap();
        let h = phi.hamiltonian(&Region::chain(0..4)).unwrap();
        assert!(linalg::hermitian_defect(h.matrix()) < 1e-12);
    }

    #[test]
    fn two_dimensional_bonds() {
        let lat = Lattice::new(2, 2).unwrap();
        let phi = Potential::<f64>::ising(lat, 1.0, 0.0).unwrap();
        // 2x2 plaquette has four bonds
        let square = Region::new(vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]).unwrap();
        let bonds = phi.instances_in(&square).into_iter().filter(|(x, _)| x.len() == 2).count();
        assert_eq!(bonds, 4);
        assert!((phi.norm1() - 4.0).abs() < 1e-14);
    }
}
