//! Independent reference implementations used by the integration tests.
//!
//! These deliberately avoid the library's own code paths: partial traces by
//! bit manipulation, classical weighted `ℓ_p` norms and a plain bisection for
//! the classical Luxemburg norm.

#![allow(dead_code)]

use qnc_core::Matrix;
use qnc_core::Potential;
use qnc_core::{Lattice, Region};

pub fn chain() -> Lattice {
    Lattice::chain()
}

pub fn ising() -> Potential {
    Potential::ising(chain(), 1.0, 0.2).unwrap()
}

pub fn heisenberg() -> Potential {
    Potential::heisenberg(chain(), 1.0, 0.7, 0.4, 0.2).unwrap()
}

pub fn volumes(sizes: std::ops::RangeInclusive<i64>) -> Vec<Region> {
    sizes.map(|k| Region::chain(0..k)).collect()
}

/// Normalized partial trace of a qubit operator on `k` sites over the
/// positions in `traced`, re-embedded. Site 0 is the most significant bit.
pub fn partial_trace_bits(m: &Matrix, k: usize, traced: &[usize]) -> Matrix {
    let mask: usize = traced.iter().map(|&q| 1usize << (k - 1 - q)).sum();
    let dim = 1usize << k;
    let mut out = Matrix::zeros(dim, dim);
    for r in 0..dim {
        for c in 0..dim {
            if r & mask != c & mask {
                continue;
            }
            let mut acc = qnc_core::C::<f64>::new(0.0, 0.0);
            // enumerate all assignments of the traced bits
            let mut t = mask;
            loop {
                acc += m[((r & !mask) | t, (c & !mask) | t)];
                if t == 0 {
                    break;
                }
                t = (t - 1) & mask;
            }
            out[(r, c)] = acc / (1u64 << traced.len()) as f64;
        }
    }
    out
}

/// `(Σ_i w_i |x_i|^p / Σ_i 1)^{1/p}` with `w` summing to the length.
pub fn weighted_lp(x: &[f64], w: &[f64], p: f64) -> f64 {
    let n = x.len() as f64;
    (x.iter().zip(w).map(|(a, b)| b * a.abs().powf(p)).sum::<f64>() / n).powf(1.0 / p)
}

/// Classical Luxemburg norm of the sequence `x` with masses `w`, by plain
/// bisection on `[0, hi]`.
pub fn classical_luxemburg(x: &[f64], w: &[f64], phi: impl Fn(f64) -> f64) -> f64 {
    let top = x.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    if top == 0.0 {
        return 0.0;
    }
    let modular = |l: f64| x.iter().zip(w).map(|(a, b)| b * phi(a.abs() / l)).sum::<f64>();
    let mut hi = top;
    while !(modular(hi) <= 1.0) {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if modular(mid) <= 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}
