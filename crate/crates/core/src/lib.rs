//! Finite-volume non-commutative `L_p` and Orlicz norms for quantum spin lattices.
//!
//! The crate works with dense matrices on finite regions of `Z^d`:
//!
//! * [`region`], [`operator`]: lattice regions, local operators, embeddings and
//!   normalized (partial) traces.
//! * [`potential`], [`gibbs`]: interaction potentials, Hamiltonians, Gibbs
//!   densities and Heisenberg dynamics.
//! * [`lp`]: the interpolating `L_{p,s}(ω_Λ)` norms, the KMS inner product,
//!   Hölder/duality checks and volume sweeps.
//! * [`condexp`]: Radon–Nikodym cocycles, generalized conditional expectations
//!   and the Markov semigroups they generate.
//! * [`orlicz`], [`singular`]: Orlicz functions, generalized singular values and
//!   Luxemburg norms, plus the contraction suite for positive maps.
//!
//! Everything is generic over the real scalar `T: Real` (`f32` or `f64`); the
//! aliases below fix `T = f64`.

pub mod condexp;
pub mod contraction;
pub mod density;
pub mod error;
pub mod gibbs;
pub mod io;
pub mod linalg;
pub mod lp;
pub mod operator;
pub mod orlicz;
pub mod pauli;
pub mod potential;
pub mod random;
pub mod region;
pub mod scalar;
pub mod singular;
pub mod superop;

pub use error::{Error, Result};
pub use region::{Lattice, Region, Site};
pub use scalar::{Real, C};

pub type Operator = operator::LocalOperator<f64>;
pub type Density = density::DensityOperator<f64>;
pub type Potential = potential::Potential<f64>;
pub type Superoperator = superop::Superoperator<f64>;
pub type OrliczFunction = orlicz::OrliczFunction<f64>;
pub type SingularProfile = singular::SingularProfile<f64>;
pub type NormParams = lp::NormParams<f64>;
pub type Matrix = linalg::Matrix<f64>;
