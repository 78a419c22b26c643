mod common;

use common::*;
use proptest::prelude::*;
use qnc_core::gibbs::gibbs_density;
use qnc_core::lp::{holder_check, lps_norm, NormParams};
use qnc_core::orlicz::luxemburg_norm;
use qnc_core::random::{self, random_operator, random_state};
use qnc_core::singular::{singular_profile, TraceSpec};
use qnc_core::{Density, Operator, OrliczFunction, Region};

fn orlicz(index: usize) -> OrliczFunction {
    match index {
        0 => OrliczFunction::power(1.7).unwrap(),
        1 => OrliczFunction::exp_minus_one(),
        2 => OrliczFunction::cosh_minus_one(),
        3 => OrliczFunction::llogl(),
        _ => OrliczFunction::custom(vec![(0.0, 0.0), (0.2, 0.0), (1.0, 1.0), (4.0, 10.0)]).unwrap(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn partial_trace_preserves_trace_and_is_bimodular(seed in 0u64..10_000, mask in 1usize..8) {
        let region = Region::chain(0..3);
        let x = Region::new((0..3).filter(|q| mask & (1 << q) != 0).map(|q| vec![q as i64])).unwrap();
        let kept = region.difference(&x);
        let f: Operator = random_operator(chain(), &region, seed).unwrap();
        let tx = f.partial_trace(&x).unwrap();
        prop_assert!((tx.normalized_trace() - f.normalized_trace()).norm() < 1e-12);

        let a: Operator = random_operator(chain(), &kept, seed + 1).unwrap();
        let b: Operator = random_operator(chain(), &kept, seed + 2).unwrap();
        let (a, b) = (a.embed(&region).unwrap(), b.embed(&region).unwrap());
        let lhs = (&(&a * &f) * &b).partial_trace(&x).unwrap();
        let rhs = &(&a * &tx) * &b;
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-11);
    }

    #[test]
    fn lps_norm_is_unital_and_homogeneous(
        seed in 0u64..10_000,
        p in 1.0f64..6.0,
        s in 0.0f64..=1.0,
        c in -5.0f64..5.0,
    ) {
        let region = Region::chain(0..2);
        let rho: Density = random_state(chain(), &region, seed).unwrap();
        let params = NormParams::new(p, s).unwrap();
        let one = Operator::identity(chain(), region.clone()).unwrap();
        prop_assert!((lps_norm(&one, &rho, params).unwrap() - 1.0).abs() < 1e-10);
        let f: Operator = random_operator(chain(), &region, seed + 7).unwrap();
        let n = lps_norm(&f, &rho, params).unwrap();
        let m = lps_norm(&f.scale_real(c), &rho, params).unwrap();
        prop_assert!((m - c.abs() * n).abs() <= 1e-10 * n.max(1.0));
    }

    #[test]
    fn holder_inequality(seed in 0u64..10_000, p in 1.0f64..8.0, s in 0.0f64..=1.0, beta in 0.0f64..1.5) {
        let region = Region::chain(0..2);
        let rho = gibbs_density(&heisenberg(), &region, beta).unwrap();
        let f: Operator = random_operator(chain(), &region, seed).unwrap();
        let g: Operator = random_operator(chain(), &region, seed + 1).unwrap();
        let rep = holder_check(&f, &g, &rho, NormParams::new(p, s).unwrap()).unwrap();
        prop_assert!(rep.ratio <= 1.0 + 1e-10, "{rep:?}");
    }

    #[test]
    fn luxemburg_norm_scales_and_is_unitarily_invariant(
        seed in 0u64..10_000,
        index in 0usize..5,
        c in 0.05f64..20.0,
    ) {
        let region = Region::chain(0..2);
        let phi = orlicz(index);
        let f: Operator = random_operator(chain(), &region, seed).unwrap();
        let n = luxemburg_norm(&f, &phi, &TraceSpec::Normalized).unwrap();
        let m = luxemburg_norm(&f.scale_real(c), &phi, &TraceSpec::Normalized).unwrap();
        prop_assert!((m - c * n).abs() <= 1e-11 * m);

        let mut r = random::rng(seed);
        let u = Operator::new(chain(), region.clone(), random::unitary_matrix(&mut r, 4)).unwrap();
        let v = Operator::new(chain(), region, random::unitary_matrix(&mut r, 4)).unwrap();
        let g = &(&u * &f) * &v;
        let k = luxemburg_norm(&g, &phi, &TraceSpec::Normalized).unwrap();
        prop_assert!((k - n).abs() <= 1e-11 * n);
    }

    #[test]
    fn profile_is_invariant_under_unitaries_and_adjoint(seed in 0u64..10_000, standard in any::<bool>()) {
        let region = Region::chain(0..2);
        let trace = if standard { TraceSpec::Standard } else { TraceSpec::Normalized };
        let f: Operator = random_operator(chain(), &region, seed).unwrap();
        let mut r = random::rng(seed + 3);
        let u = Operator::new(chain(), region, random::unitary_matrix(&mut r, 4)).unwrap();
        let a = singular_profile(&f, &trace).unwrap();
        let rotated = &u.adjoint() * &(&f * &u);
        for other in [singular_profile(&rotated, &trace).unwrap(), singular_profile(&f.adjoint(), &trace).unwrap()] {
            prop_assert_eq!(a.len(), other.len());
            for i in 0..a.len() {
                prop_assert!((a.values()[i] - other.values()[i]).abs() < 1e-11 * a.max_value());
                prop_assert!((a.weights()[i] - other.weights()[i]).abs() < 1e-12);
            }
        }
        let mass: f64 = a.weights().iter().sum();
        prop_assert!((mass - a.total_mass()).abs() < 1e-12 * a.total_mass());
    }
}
