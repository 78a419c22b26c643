//! Values frozen from an independent dense numpy implementation.

mod common;

use common::*;
use qnc_core::condexp::{equivalence_constant, traced_density};
use qnc_core::gibbs::{compatibility_defect, gibbs_density};
use qnc_core::lp::{is_non_increasing, lps_norm, monotonicity_sweep, NormParams};
use qnc_core::orlicz::{ddp_norm, luxemburg_norm, OrliczFunction};
use qnc_core::potential::site_operator;
use qnc_core::singular::TraceSpec;
use qnc_core::{pauli, Operator, Region};

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

#[test]
fn compatibility_defect_with_field() {
    let d = compatibility_defect(&ising(), 0.2, &Region::chain(0..2), &Region::chain(0..4)).unwrap();
    assert!(close(d, 0.011637613453104878, 1e-10), "{d}");
}

#[test]
fn compatibility_defect_vanishes_without_field() {
    let phi = qnc_core::Potential::ising(chain(), 1.0, 0.0).unwrap();
    let d = compatibility_defect(&phi, 0.2, &Region::chain(0..2), &Region::chain(0..4)).unwrap();
    assert!(d < 1e-12, "{d}");
}

#[test]
fn ising_sigma_x_norms_decrease_with_volume() {
    let f: Operator = site_operator(chain(), "sigma_x", vec![0]).unwrap();
    let seq = monotonicity_sweep(&ising(), 0.5, &f, &volumes(2..=6), NormParams::new(3.0, 0.5).unwrap()).unwrap();
    let expected = [
        0.9576922996540679,
        0.9570288553353792,
        0.9567293076200761,
        0.9565943193249459,
        0.9565335406511382,
    ];
    for (a, b) in seq.iter().zip(expected) {
        assert!(close(*a, b, 1e-10), "{a} vs {b}");
    }
    assert!(is_non_increasing(&seq, 1e-12));
}

#[test]
fn sigma_x_second_moment_is_one() {
    let f: Operator = site_operator(chain(), "sigma_x", vec![0]).unwrap();
    let seq = monotonicity_sweep(&ising(), 0.5, &f, &volumes(2..=6), NormParams::new(2.0, 0.0).unwrap()).unwrap();
    for n in seq {
        assert!(close(n, 1.0, 1e-12), "{n}");
    }
}

#[test]
fn equivalence_constants_against_traced_state() {
    let x = Region::chain(0..1);
    for (beta, expected) in [(0.1, 1.1356245751607028), (0.3, 1.5272166053219436)] {
        for v in volumes(2..=6) {
            let rho = gibbs_density(&ising(), &v, beta).unwrap();
            let c = equivalence_constant(&rho, &traced_density(&rho, &x).unwrap()).unwrap();
            assert!(close(c, expected, 1e-10), "β={beta} |Λ|={}: {c}", v.len());
        }
    }
}

#[test]
fn heisenberg_mixed_observable() {
    let region = Region::chain(0..3);
    let rho = gibbs_density(&heisenberg(), &region, 0.7).unwrap();
    let a: Operator = site_operator(chain(), "sigma_x", vec![1]).unwrap();
    let b: Operator = site_operator(chain(), "sigma_z", vec![0]).unwrap();
    let f = a.embed(&region).unwrap().try_add(&b.scale_real(0.5).embed(&region).unwrap()).unwrap();
    let n = lps_norm(&f, &rho, NormParams::new(3.0, 0.25).unwrap()).unwrap();
    assert!(close(n, 1.138967965731615, 1e-10), "{n}");
}

#[test]
fn luxemburg_exponential_diagonal() {
    let f = Operator::on_site(chain(), vec![0], pauli::diag(&[2.0, 1.0])).unwrap();
    let phi = OrliczFunction::exp_minus_one();
    let n = luxemburg_norm(&f, &phi, &TraceSpec::Normalized).unwrap();
    assert!(close(n, 2.2437587208513388, 1e-12), "{n}");
    assert!(close(ddp_norm(&f, &phi, &TraceSpec::Normalized).unwrap(), n, 1e-12));
}

#[test]
fn luxemburg_llogl_with_kernel() {
    let f = Operator::new(chain(), Region::chain(0..2), pauli::diag(&[3.0, 1.0, 0.5, 0.0])).unwrap();
    let n = luxemburg_norm(&f, &OrliczFunction::llogl(), &TraceSpec::Normalized).unwrap();
    assert!(close(n, 1.158776085231293, 1e-12), "{n}");
}
