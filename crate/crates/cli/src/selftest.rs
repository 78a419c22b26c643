//! The property suite, driven by the configuration: one or more rows per
//! property with the measured value, the tolerance and the verdict.

use qnc_core::condexp::{
    block_spin_gce, equivalence, gce_property_report, markov_generator, semigroup_apply, traced_density,
};
use qnc_core::contraction::contraction_report;
use qnc_core::gibbs::gibbs_density;
use qnc_core::lp::{
    duality_norm_estimate, holder_check, kms_inner, lps_norm, monotonicity_sweep, DualSampling,
    NormParams,
};
use qnc_core::orlicz::{ddp_norm, luxemburg_norm, trace_phi_sides};
use qnc_core::random::{self, random_operator, random_state};
use qnc_core::singular::{classical_rearrangement, singular_profile, TraceSpec};
use qnc_core::{pauli, Density, Operator, OrliczFunction, Region, Superoperator};

use crate::config::ExperimentConfig;
use crate::error::CliResult;
use crate::run::{orlicz_functions, sample_maps, Outcome};
use crate::table::ResultTable;

struct Suite {
    table: ResultTable,
    passed: bool,
}

impl Suite {
    /// `value ≤ tol` passes.
    fn record(&mut self, id: usize, check: &str, value: f64, tol: f64) {
        let ok = value <= tol;
        self.passed &= ok;
        self.table.push(vec![id.into(), check.into(), value.into(), tol.into(), ok.into()]);
    }
}

pub fn run(cfg: &ExperimentConfig) -> CliResult<Outcome> {
    let seed = cfg.seed()?;
    let mut suite = Suite {
        table: ResultTable::new(&["criterion", "check", "value", "tolerance", "passed"]),
        passed: true,
    };
    trace_compatibility(cfg, seed, &mut suite)?;
    unitality(cfg, &mut suite)?;
    monotonicity(cfg, &mut suite)?;
    kms(cfg, seed, &mut suite)?;
    holder(cfg, seed, &mut suite)?;
    gce(cfg, seed, &mut suite)?;
    semigroup(cfg, seed, &mut suite)?;
    equivalences(cfg, seed, &mut suite)?;
    trace_identity(cfg, seed, &mut suite)?;
    luxemburg(cfg, seed, &mut suite)?;
    contraction(cfg, seed, &mut suite)?;
    commutative(cfg, seed, &mut suite)?;
    Ok(Outcome {
        table: suite.table,
        passed: suite.passed,
    })
}

/// Line regions of 1..=3 sites.
fn small_region(cfg: &ExperimentConfig, k: u64) -> Region {
    Region::line(cfg.lattice.d, 1 + (k % 3) as usize)
}

fn subsets(region: &Region) -> Vec<Region> {
    let sites = region.sites();
    (0..1usize << sites.len())
        .map(|mask| {
            Region::new((0..sites.len()).filter(|q| mask & (1 << q) != 0).map(|q| sites[q].clone()))
                .expect("subsets of a region are regions")
        })
        .collect()
}

fn trace_compatibility(cfg: &ExperimentConfig, seed: u64, suite: &mut Suite) -> CliResult<()> {
    let mut worst = 0.0f64;
    for k in 0..cfg.samples as u64 {
        let region = small_region(cfg, k);
        let f: Operator = random_operator(cfg.lattice, &region, seed.wrapping_add(k))?;
        for x in subsets(&region) {
            worst = worst.max((f.partial_trace(&x)?.normalized_trace() - f.normalized_trace()).norm());
        }
    }
    suite.record(1, "partial traces preserve the trace", worst, cfg.tolerances.trace);
    Ok(())
}

fn unitality(cfg: &ExperimentConfig, suite: &mut Suite) -> CliResult<()> {
    let phi = cfg.potential()?;
    let mut worst = 0.0f64;
    for v in cfg.regions()? {
        let one = Operator::identity(cfg.lattice, v.clone())?;
        for beta in cfg.betas() {
            let rho = gibbs_density(&phi, &v, beta)?;
            for &p in &cfg.norms.p {
                for &s in &cfg.norms.s {
                    worst = worst.max((lps_norm(&one, &rho, NormParams::new(p, s)?)? - 1.0).abs());
                }
            }
        }
    }
    suite.record(2, "norm of the identity is one", worst, cfg.tolerances.unitality);
    Ok(())
}

fn monotonicity(cfg: &ExperimentConfig, suite: &mut Suite) -> CliResult<()> {
    let phi = cfg.potential()?;
    let f = cfg.observable()?;
    let regions = cfg.regions()?;
    let slack = cfg.tolerances.monotonicity_slack;
    let mut worst = f64::NEG_INFINITY;
    for beta in cfg.betas() {
        for &p in cfg.norms.p.iter().filter(|p| **p >= 2.0) {
            for &s in &[0.0, 0.5, 1.0] {
                let seq = monotonicity_sweep(&phi, beta, &f, &regions, NormParams::new(p, s)?)?;
                for w in seq.windows(2) {
                    worst = worst.max(w[1] - w[0]);
                }
            }
        }
    }
    if worst == f64::NEG_INFINITY {
        worst = 0.0;
    }
    suite.record(3, "norms do not grow with the volume", worst, slack);
    Ok(())
}

fn first_density(cfg: &ExperimentConfig) -> CliResult<(Region, Density)> {
    let v = cfg.regions()?[0].clone();
    let rho = gibbs_density(&cfg.potential()?, &v, cfg.betas()[0])?;
    Ok((v, rho))
}

fn kms(cfg: &ExperimentConfig, seed: u64, suite: &mut Suite) -> CliResult<()> {
    let (v, gibbs) = first_density(cfg)?;
    let mut worst = 0.0f64;
    for k in 0..cfg.samples as u64 {
        let rho = if k % 2 == 0 { gibbs.clone() } else { random_state(cfg.lattice, &v, seed.wrapping_add(k))? };
        let f: Operator = random_operator(cfg.lattice, &v, seed.wrapping_add(1000 + k))?;
        let n = lps_norm(&f, &rho, NormParams::new(2.0, 0.5)?)?;
        let inner = kms_inner(&f, &f, &rho, 0.5)?;
        worst = worst.max((n * n - inner.re).abs().max(inner.im.abs()) / n.max(1.0).powi(2));
    }
    suite.record(4, "p=2, s=1/2 norm squared equals the KMS form", worst, cfg.tolerances.kms);
    Ok(())
}

fn conjugate_grid(cfg: &ExperimentConfig) -> Vec<f64> {
    let ps: Vec<f64> = cfg.norms.p.iter().copied().filter(|p| *p > 1.0).collect();
    if ps.is_empty() {
        vec![2.0]
    } else {
        ps
    }
}

fn holder(cfg: &ExperimentConfig, seed: u64, suite: &mut Suite) -> CliResult<()> {
    let region = Region::line(cfg.lattice.d, 2);
    let ps = conjugate_grid(cfg);
    let mut ratio = 0.0f64;
    let mut dual = 0.0f64;
    for k in 0..cfg.samples as u64 {
        let rho: Density = random_state(cfg.lattice, &region, seed.wrapping_add(3 * k))?;
        let f: Operator = random_operator(cfg.lattice, &region, seed.wrapping_add(3 * k + 1))?;
        let g: Operator = random_operator(cfg.lattice, &region, seed.wrapping_add(3 * k + 2))?;
        let s = cfg.norms.s[k as usize % cfg.norms.s.len()];
        let params = NormParams::new(ps[k as usize % ps.len()], s)?;
        ratio = ratio.max(holder_check(&f, &g, &rho, params)?.ratio);
        if k < 10 {
            let est = duality_norm_estimate(&f, &rho, params, 20, seed.wrapping_add(k), DualSampling::General)?;
            dual = dual.max(est.estimate / lps_norm(&f, &rho, params)?);
        }
    }
    let tol = cfg.tolerances.holder;
    suite.record(5, "Hölder pairing ratio minus one", ratio - 1.0, tol);
    suite.record(5, "duality estimate over norm minus one", dual - 1.0, tol);

    // diagonal observables against a diagonal state reach the norm
    let (v, rho) = first_density(cfg)?;
    let mut gap = 0.0f64;
    if qnc_core::linalg::is_diagonal(rho.matrix(), 1e-14) {
        let dim = rho.dim();
        for k in 0..10u64 {
            let mut r = random::rng(seed.wrapping_add(k));
            let f = Operator::new(cfg.lattice, v.clone(), random::gaussian_diagonal(&mut r, dim))?;
            let params = NormParams::new(ps[k as usize % ps.len()], cfg.norms.s[k as usize % cfg.norms.s.len()])?;
            let est = duality_norm_estimate(&f, &rho, params, 10, k, DualSampling::Diagonal)?;
            let n = lps_norm(&f, &rho, params)?;
            gap = gap.max((n - est.estimate).abs() / n);
        }
    }
    suite.record(5, "diagonal duality estimate reaches the norm", gap, cfg.tolerances.duality);
    Ok(())
}

fn gce(cfg: &ExperimentConfig, seed: u64, suite: &mut Suite) -> CliResult<()> {
    let phi = cfg.potential()?;
    let (mut unit, mut pos, mut sym) = (0.0f64, 0.0f64, 0.0f64);
    for v in cfg.regions()?.into_iter().filter(|v| v.len() <= 4) {
        for beta in cfg.betas() {
            let rho = gibbs_density(&phi, &v, beta)?;
            for (i, site) in v.sites().iter().enumerate() {
                let e = block_spin_gce(&rho, &Region::site(site.clone()))?;
                let rep = gce_property_report(&e, &rho, cfg.samples, seed.wrapping_add(i as u64))?;
                unit = unit.max(rep.unitality);
                pos = pos.max(rep.positivity);
                sym = sym.max(rep.symmetry);
            }
        }
    }
    let tol = &cfg.tolerances;
    suite.record(6, "conditional expectation is unital", unit, tol.gce_unitality);
    suite.record(6, "conditional expectation is positive", pos, tol.gce_positivity);
    suite.record(6, "conditional expectation is KMS-symmetric", sym, tol.gce_symmetry);
    Ok(())
}

fn semigroup(cfg: &ExperimentConfig, seed: u64, suite: &mut Suite) -> CliResult<()> {
    let (v, rho) = first_density(cfg)?;
    let x = Region::site(v.sites()[v.len() - 1].clone());
    let l = markov_generator(&block_spin_gce(&rho, &x)?)?;
    let one = Operator::identity(cfg.lattice, v.clone())?;
    let (mut p0, mut law, mut unital, mut positive, mut invariance) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for k in 0..5u64 {
        let f: Operator = random_operator(cfg.lattice, &v, seed.wrapping_add(k))?;
        p0 = p0.max(semigroup_apply(&l, &f, 0.0)?.max_abs_diff(&f));
        for t in [0.1, 0.7] {
            for s in [0.1, 0.7] {
                let a = semigroup_apply(&l, &semigroup_apply(&l, &f, s)?, t)?;
                law = law.max(a.max_abs_diff(&semigroup_apply(&l, &f, t + s)?));
            }
            let pf = semigroup_apply(&l, &f, t)?;
            invariance = invariance.max((rho.expectation(&pf)? - rho.expectation(&f)?).norm());
            let square = &f.adjoint() * &f;
            positive = positive.max(-semigroup_apply(&l, &square, t)?.min_eigenvalue() / square.op_norm());
            unital = unital.max(semigroup_apply(&l, &one, t)?.max_abs_diff(&one));
        }
    }
    let e0 = Superoperator::partial_trace_ce(cfg.lattice, v.clone(), x)?;
    let l0 = markov_generator(&e0)?;
    let mut closed = 0.0f64;
    for k in 0..5u64 {
        let f: Operator = random_operator(cfg.lattice, &v, seed.wrapping_add(50 + k))?;
        for t in [0.1, 0.7, 3.0f64] {
            let w = (-t).exp();
            let expect = &f.scale_real(w) + &e0.apply(&f)?.scale_real(1.0 - w);
            closed = closed.max(semigroup_apply(&l0, &f, t)?.max_abs_diff(&expect));
        }
    }
    let tol = &cfg.tolerances;
    suite.record(7, "P_0 is the identity", p0, tol.trace);
    suite.record(7, "P_t P_s = P_(t+s)", law, tol.semigroup);
    suite.record(7, "P_t is unital", unital, tol.semigroup);
    suite.record(7, "P_t is positive", positive, tol.semigroup);
    suite.record(7, "P_t preserves the state", invariance, tol.invariance);
    suite.record(7, "closed form for a true conditional expectation", closed, tol.semigroup);
    Ok(())
}

fn equivalences(cfg: &ExperimentConfig, seed: u64, suite: &mut Suite) -> CliResult<()> {
    let lattice = cfg.lattice;
    let site = lattice.origin();
    let tol = &cfg.tolerances;
    if lattice.n == 2 {
        let one = Density::tracial(lattice, Region::site(site.clone()))?;
        let rho = Density::new(Operator::on_site(lattice, site, pauli::diag(&[1.5, 0.5]))?)?;
        let c = equivalence(&one, &rho)?.constant;
        suite.record(8, "constant of diag(3/2, 1/2) against the trace is 2", (c - 2.0).abs(), tol.equivalence);
    }
    let region = Region::line(lattice.d, 2);
    let mut sharp = 0.0f64;
    for k in 0..10u64 {
        let a: Density = random_state(lattice, &region, seed.wrapping_add(k))?;
        let b: Density = random_state(lattice, &region, seed.wrapping_add(100 + k))?;
        let eq = equivalence(&a, &b)?;
        for (w, target) in [(&eq.witness_max, eq.lambda_max), (&eq.witness_min, eq.lambda_min)] {
            let ratio = b.expectation(w)?.re / a.expectation(w)?.re;
            sharp = sharp.max((ratio - target).abs() / target);
        }
    }
    suite.record(8, "spectral witnesses attain the bounds", sharp, tol.witness);

    let phi = cfg.potential()?;
    let regions: Vec<Region> = cfg.regions()?.into_iter().filter(|v| cfg.probe.is_subset(v)).collect();
    if regions.len() >= 2 {
        let beta = cfg.betas()[0];
        let c = |v: &Region| -> CliResult<f64> {
            let rho = gibbs_density(&phi, v, beta)?;
            Ok(equivalence(&rho, &traced_density(&rho, &cfg.probe)?)?.constant)
        };
        let first = c(&regions[0])?;
        let last = c(regions.last().unwrap())?;
        suite.record(8, "growth of the constant with the volume", last / first, tol.equivalence_growth);
    }
    Ok(())
}

fn finite_tail() -> OrliczFunction {
    OrliczFunction::custom(vec![(0.0, 0.0), (0.4, 0.0), (1.0, 0.5), (2.5, 3.0)]).expect("valid knots")
}

fn trace_identity(cfg: &ExperimentConfig, seed: u64, suite: &mut Suite) -> CliResult<()> {
    let mut phis = orlicz_functions(cfg)?;
    phis.push(finite_tail());
    let mut worst = 0.0f64;
    for k in 0..cfg.samples as u64 {
        let region = small_region(cfg, k);
        let f: Operator = random_operator(cfg.lattice, &region, seed.wrapping_add(k))?;
        let f = f.scale_real(0.4 + 0.01 * (k % 100) as f64);
        let phi = &phis[k as usize % phis.len()];
        let trace = if k % 2 == 0 { TraceSpec::Normalized } else { TraceSpec::Standard };
        worst = worst.max(trace_phi_sides(&f, phi, &trace)?.residual());
    }
    suite.record(9, "trace of φ(|f|) equals the profile integral", worst, cfg.tolerances.trace_identity);
    Ok(())
}

fn luxemburg(cfg: &ExperimentConfig, seed: u64, suite: &mut Suite) -> CliResult<()> {
    let lattice = cfg.lattice;
    let mut lp_gap = 0.0f64;
    for k in 0..10u64 {
        let region = small_region(cfg, k);
        let tracial = Density::tracial(lattice, region.clone())?;
        let f: Operator = random_operator(lattice, &region, seed.wrapping_add(k))?;
        for &p in &cfg.norms.p {
            let lux = luxemburg_norm(&f, &OrliczFunction::power(p)?, &TraceSpec::Normalized)?;
            for &s in &cfg.norms.s {
                let n = lps_norm(&f, &tracial, NormParams::new(p, s)?)?;
                lp_gap = lp_gap.max((lux - n).abs() / n);
            }
        }
    }
    let id = Operator::identity(lattice, Region::site(lattice.origin()))?;
    let anchor = luxemburg_norm(&id, &OrliczFunction::exp_minus_one(), &TraceSpec::Normalized)?;
    let mut phis = orlicz_functions(cfg)?;
    phis.push(finite_tail());
    let mut gap = 0.0f64;
    for k in 0..cfg.samples as u64 {
        let region = small_region(cfg, k);
        let f: Operator = random_operator(lattice, &region, seed.wrapping_add(500 + k))?;
        let phi = &phis[k as usize % phis.len()];
        let a = luxemburg_norm(&f, phi, &TraceSpec::Normalized)?;
        gap = gap.max((a - ddp_norm(&f, phi, &TraceSpec::Normalized)?).abs() / a);
    }
    let tol = &cfg.tolerances;
    suite.record(10, "power Orlicz norm equals the tracial L_p norm", lp_gap, tol.luxemburg);
    suite.record(10, "exp_minus_one norm of the identity is 1/ln 2", (anchor - 1.0 / 2f64.ln()).abs(), tol.luxemburg);
    suite.record(10, "eigenvalue and rearrangement routes agree", gap, tol.norm_agreement);
    Ok(())
}

fn contraction(cfg: &ExperimentConfig, seed: u64, suite: &mut Suite) -> CliResult<()> {
    let region = Region::line(cfg.lattice.d, 2);
    let maps = sample_maps(cfg, &region, seed)?;
    let phis = orlicz_functions(cfg)?;
    let (mut iso, mut excess, mut step) = (0.0f64, f64::NEG_INFINITY, 0.0f64);
    for (i, (_, map)) in maps.iter().enumerate() {
        for (j, phi) in phis.iter().enumerate() {
            let s = seed.wrapping_add((i * phis.len() + j) as u64);
            let rep = contraction_report(map, phi, &TraceSpec::Normalized, cfg.samples, s)?;
            if rep.class.is_isometric() {
                iso = iso.max((rep.max_ratio - 1.0).abs()).max((rep.min_ratio - 1.0).abs());
            }
            excess = excess.max(rep.max_ratio - rep.bound);
            step = step.max(rep.step_violation);
        }
    }
    let tol = cfg.tolerances.contraction;
    suite.record(11, "isometric classes keep the Orlicz norm", iso, tol);
    suite.record(11, "ratio stays below the certified constant", excess.max(0.0), tol);
    suite.record(11, "singular values obey the step-wise bound", step, tol);
    Ok(())
}

fn commutative(cfg: &ExperimentConfig, seed: u64, suite: &mut Suite) -> CliResult<()> {
    let (v, rho) = first_density(cfg)?;
    let dim = rho.dim();
    let (mut norm_gap, mut profile_gap) = (0.0f64, 0.0f64);
    if qnc_core::linalg::is_diagonal(rho.matrix(), 1e-14) {
        let weights: Vec<f64> = (0..dim).map(|i| rho.matrix()[(i, i)].re).collect();
        for k in 0..cfg.samples as u64 {
            let mut r = random::rng(seed.wrapping_add(k));
            let d = random::gaussian_diagonal(&mut r, dim);
            let x: Vec<f64> = (0..dim).map(|i| d[(i, i)].re).collect();
            let f = Operator::new(cfg.lattice, v.clone(), d)?;
            let p = cfg.norms.p[k as usize % cfg.norms.p.len()];
            let s = cfg.norms.s[k as usize % cfg.norms.s.len()];
            let n = lps_norm(&f, &rho, NormParams::new(p, s)?)?;
            let classical =
                (x.iter().zip(&weights).map(|(a, w)| w * a.abs().powf(p)).sum::<f64>() / dim as f64).powf(1.0 / p);
            norm_gap = norm_gap.max((n - classical).abs() / classical);
            let a = singular_profile(&f, &TraceSpec::Normalized)?;
            let b = classical_rearrangement(&x, &vec![1.0 / dim as f64; dim])?;
            if a.len() != b.len() {
                profile_gap = f64::INFINITY;
                continue;
            }
            for i in 0..a.len() {
                profile_gap = profile_gap
                    .max((a.values()[i] - b.values()[i]).abs())
                    .max((a.weights()[i] - b.weights()[i]).abs());
            }
        }
    }
    let tol = cfg.tolerances.norm_agreement;
    suite.record(12, "diagonal norms equal weighted sequence norms", norm_gap, tol);
    suite.record(12, "diagonal profiles equal classical rearrangements", profile_gap, tol);
    Ok(())
}
