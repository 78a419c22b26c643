//! Experiment drivers. Grid cells run in parallel; rows are assembled in grid
//! order so the output never depends on scheduling.

use qnc_core::condexp::{block_spin_gce, equivalence, markov_generator_sum, semigroup_apply, traced_density};
use qnc_core::contraction::contraction_report;
use qnc_core::gibbs::gibbs_density;
use qnc_core::lp::{kms_inner, lps_norm, monotonicity_sweep, NormParams};
use qnc_core::orlicz::{ddp_norm, luxemburg_norm, trace_phi_sides};
use qnc_core::random;
use qnc_core::singular::TraceSpec;
use qnc_core::{Density, Operator, OrliczFunction, Region, Superoperator};
use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};
use crate::selftest;
use crate::table::{ResultTable, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Subcommand {
    Norms,
    Monotonicity,
    Semigroup,
    Equivalence,
    Orlicz,
    Contraction,
    Selftest,
}

impl Subcommand {
    pub fn name(self) -> &'static str {
        match self {
            Subcommand::Norms => "norms",
            Subcommand::Monotonicity => "monotonicity",
            Subcommand::Semigroup => "semigroup",
            Subcommand::Equivalence => "equivalence",
            Subcommand::Orlicz => "orlicz",
            Subcommand::Contraction => "contraction",
            Subcommand::Selftest => "selftest",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub table: ResultTable,
    pub passed: bool,
}

pub fn run(cmd: Subcommand, cfg: &ExperimentConfig) -> CliResult<Outcome> {
    cfg.validate()?;
    match cmd {
        Subcommand::Norms => norms(cfg),
        Subcommand::Monotonicity => monotonicity(cfg),
        Subcommand::Semigroup => semigroup(cfg),
        Subcommand::Equivalence => equivalence_scan(cfg),
        Subcommand::Orlicz => orlicz(cfg),
        Subcommand::Contraction => contraction(cfg),
        Subcommand::Selftest => selftest::run(cfg),
    }
}

pub(crate) fn orlicz_functions(cfg: &ExperimentConfig) -> CliResult<Vec<OrliczFunction>> {
    Ok(cfg.orlicz.iter().map(|s| s.build()).collect::<qnc_core::Result<_>>()?)
}

fn require_inside(what: &str, region: &Region, volume: &Region) -> CliResult<()> {
    if region.is_subset(volume) {
        Ok(())
    } else {
        Err(CliError::Config(format!("{what} {region} is not inside volume {volume}")))
    }
}

fn norms(cfg: &ExperimentConfig) -> CliResult<Outcome> {
    let phi = cfg.potential()?;
    let f = cfg.observable()?;
    let regions = cfg.regions()?;
    for v in &regions {
        require_inside("observable support", f.support(), v)?;
    }
    let cells: Vec<(f64, &Region)> = cfg.betas().into_iter().flat_map(|b| regions.iter().map(move |v| (b, v))).collect();
    let blocks: Vec<Vec<Vec<Value>>> = cells
        .par_iter()
        .map(|&(beta, v)| -> CliResult<Vec<Vec<Value>>> {
            let rho = gibbs_density(&phi, v, beta)?;
            let one = Operator::identity(cfg.lattice, v.clone())?;
            let mut rows = Vec::new();
            for &p in &cfg.norms.p {
                for &s in &cfg.norms.s {
                    let params = NormParams::new(p, s)?;
                    let norm = lps_norm(&f, &rho, params)?;
                    let defect = (lps_norm(&one, &rho, params)? - 1.0).abs();
                    rows.push(vec![beta.into(), v.len().into(), p.into(), s.into(), norm.into(), defect.into()]);
                }
            }
            Ok(rows)
        })
        .collect::<CliResult<_>>()?;
    let mut table = ResultTable::new(&["beta", "volume", "p", "s", "norm", "unit_defect"]);
    let mut passed = true;
    for row in blocks.into_iter().flatten() {
        if let Value::Num(d) = row[5] {
            passed &= d <= cfg.tolerances.unitality;
        }
        table.push(row);
    }
    Ok(Outcome { table, passed })
}

fn monotonicity(cfg: &ExperimentConfig) -> CliResult<Outcome> {
    let phi = cfg.potential()?;
    let f = cfg.observable()?;
    let regions = cfg.regions()?;
    let slack = cfg.tolerances.monotonicity_slack;
    let mut cells = Vec::new();
    for beta in cfg.betas() {
        for &p in &cfg.norms.p {
            for &s in &cfg.norms.s {
                cells.push((beta, p, s));
            }
        }
    }
    let sequences: Vec<Vec<f64>> = cells
        .par_iter()
        .map(|&(beta, p, s)| Ok(monotonicity_sweep(&phi, beta, &f, &regions, NormParams::new(p, s)?)?))
        .collect::<CliResult<_>>()?;
    let mut table = ResultTable::new(&["beta", "p", "s", "volume", "norm", "increase", "sequence_ok"]);
    let mut passed = true;
    for ((beta, p, s), seq) in cells.iter().zip(&sequences) {
        let ok = qnc_core::lp::is_non_increasing(seq, slack);
        passed &= ok;
        for (k, (v, n)) in regions.iter().zip(seq).enumerate() {
            let increase = if k == 0 { 0.0 } else { n - seq[k - 1] };
            table.push(vec![
                (*beta).into(),
                (*p).into(),
                (*s).into(),
                v.len().into(),
                (*n).into(),
                increase.into(),
                ok.into(),
            ]);
        }
    }
    Ok(Outcome { table, passed })
}

fn kms_norm(f: &Operator, rho: &Density) -> CliResult<f64> {
    Ok(kms_inner(f, f, rho, 0.5)?.re.max(0.0).sqrt())
}

fn semigroup(cfg: &ExperimentConfig) -> CliResult<Outcome> {
    let phi = cfg.potential()?;
    let regions = cfg.regions()?;
    let ambient = regions.last().expect("validated non-empty").clone();
    let f = cfg.observable()?;
    require_inside("observable support", f.support(), &ambient)?;
    for b in &cfg.blocks {
        require_inside("block", b, &ambient)?;
    }
    let tol = &cfg.tolerances;
    let per_beta: Vec<Vec<Vec<Value>>> = cfg
        .betas()
        .par_iter()
        .map(|&beta| -> CliResult<Vec<Vec<Value>>> {
            let rho = gibbs_density(&phi, &ambient, beta)?;
            let blocks = cfg.blocks.iter().map(|b| block_spin_gce(&rho, b)).collect::<qnc_core::Result<_>>()?;
            let l = markov_generator_sum(blocks)?;
            let one = Operator::identity(cfg.lattice, ambient.clone())?;
            let f0 = f.embed(&ambient)?;
            let mean0 = rho.expectation(&f0)?;
            let norm0 = kms_norm(&f0, &rho)?;
            let mut rows = Vec::new();
            for &t in &cfg.times {
                let pt = semigroup_apply(&l, &f0, t)?;
                let mean = rho.expectation(&pt)?;
                let norm = kms_norm(&pt, &rho)?;
                let unital = semigroup_apply(&l, &one, t)?.max_abs_diff(&one);
                let invariance = (mean - mean0).norm();
                let growth = norm - norm0;
                let identity = if t == 0.0 { pt.max_abs_diff(&f0) } else { 0.0 };
                let ok = unital <= tol.semigroup
                    && identity <= tol.semigroup
                    && invariance <= tol.invariance
                    && growth <= tol.invariance * norm0.max(1.0);
                rows.push(vec![
                    beta.into(),
                    t.into(),
                    mean.re.into(),
                    norm.into(),
                    unital.into(),
                    invariance.into(),
                    ok.into(),
                ]);
            }
            Ok(rows)
        })
        .collect::<CliResult<_>>()?;
    let mut table = ResultTable::new(&["beta", "t", "expectation", "kms_norm", "unit_defect", "invariance_defect", "ok"]);
    let mut passed = true;
    for row in per_beta.into_iter().flatten() {
        passed &= row[6] == Value::Bool(true);
        table.push(row);
    }
    Ok(Outcome { table, passed })
}

fn equivalence_scan(cfg: &ExperimentConfig) -> CliResult<Outcome> {
    let phi = cfg.potential()?;
    let regions = cfg.regions()?;
    for v in &regions {
        require_inside("probe", &cfg.probe, v)?;
    }
    let betas = cfg.betas();
    let per_beta: Vec<Vec<(f64, f64, f64)>> = betas
        .par_iter()
        .map(|&beta| {
            regions
                .iter()
                .map(|v| -> CliResult<(f64, f64, f64)> {
                    let rho = gibbs_density(&phi, v, beta)?;
                    let eq = equivalence(&rho, &traced_density(&rho, &cfg.probe)?)?;
                    Ok((eq.constant, eq.lambda_min, eq.lambda_max))
                })
                .collect()
        })
        .collect::<CliResult<_>>()?;
    let mut table = ResultTable::new(&["beta", "volume", "constant", "lambda_min", "lambda_max", "bounded"]);
    let mut passed = true;
    for (beta, scan) in betas.iter().zip(&per_beta) {
        let bounded = scan.last().unwrap().0 < cfg.tolerances.equivalence_growth * scan[0].0;
        passed &= bounded;
        for (v, (c, lo, hi)) in regions.iter().zip(scan) {
            table.push(vec![
                (*beta).into(),
                v.len().into(),
                (*c).into(),
                (*lo).into(),
                (*hi).into(),
                bounded.into(),
            ]);
        }
    }
    Ok(Outcome { table, passed })
}

fn orlicz(cfg: &ExperimentConfig) -> CliResult<Outcome> {
    let regions = cfg.regions()?;
    let f = cfg.observable()?;
    let phis = orlicz_functions(cfg)?;
    let traces = [("normalized", TraceSpec::Normalized), ("standard", TraceSpec::Standard)];
    let mut cells = Vec::new();
    for v in &regions {
        require_inside("observable support", f.support(), v)?;
        for phi in &phis {
            for trace in &traces {
                cells.push((v, phi, trace));
            }
        }
    }
    let tol = &cfg.tolerances;
    let rows: Vec<Vec<Value>> = cells
        .par_iter()
        .map(|&(v, phi, (trace_name, trace))| -> CliResult<Vec<Value>> {
            let g = f.embed(v)?;
            let lux = luxemburg_norm(&g, phi, trace)?;
            let ddp = ddp_norm(&g, phi, trace)?;
            let sides = trace_phi_sides(&g, phi, trace)?;
            let residual = sides.residual();
            let gap = if lux > 0.0 { (lux - ddp).abs() / lux } else { (lux - ddp).abs() };
            let ok = residual <= tol.trace_identity && gap <= tol.norm_agreement;
            Ok(vec![
                v.len().into(),
                phi.name().into(),
                (*trace_name).into(),
                lux.into(),
                ddp.into(),
                sides.spectral.to_real().into(),
                sides.profile.to_real().into(),
                residual.into(),
                ok.into(),
            ])
        })
        .collect::<CliResult<_>>()?;
    let mut table = ResultTable::new(&[
        "volume",
        "phi",
        "trace",
        "luxemburg",
        "rearrangement",
        "trace_phi",
        "profile_phi",
        "residual",
        "ok",
    ]);
    let mut passed = true;
    for row in rows {
        passed &= row[8] == Value::Bool(true);
        table.push(row);
    }
    Ok(Outcome { table, passed })
}

/// One representative map of each class on `ambient`, drawn from `seed`.
pub(crate) fn sample_maps(cfg: &ExperimentConfig, ambient: &Region, seed: u64) -> CliResult<Vec<(&'static str, Superoperator)>> {
    let lattice = cfg.lattice;
    let dim = Operator::identity(lattice, ambient.clone())?.dim();
    let mut rng = random::rng(seed);
    let u = Operator::new(lattice, ambient.clone(), random::unitary_matrix(&mut rng, dim))?;
    let v = Operator::new(lattice, ambient.clone(), random::unitary_matrix(&mut rng, dim))?;
    let w1 = Operator::new(lattice, ambient.clone(), random::gaussian_matrix(&mut rng, dim))?;
    let w2 = Operator::new(lattice, ambient.clone(), random::gaussian_matrix(&mut rng, dim))?;
    Ok(vec![
        ("inner_automorphism", Superoperator::inner_auto(u.clone())?),
        ("transpose", Superoperator::transpose(lattice, ambient.clone())?),
        ("jordan", Superoperator::jordan(v, true)?),
        ("pure", Superoperator::kraus(lattice, ambient.clone(), vec![w1.scale_real(1.0 / w1.op_norm())])?),
        ("kraus_sum", Superoperator::kraus(lattice, ambient.clone(), vec![u, w2])?),
    ])
}

fn contraction(cfg: &ExperimentConfig) -> CliResult<Outcome> {
    let seed = cfg.seed()?;
    let ambient = cfg.regions()?[0].clone();
    let maps = sample_maps(cfg, &ambient, seed)?;
    let phis = orlicz_functions(cfg)?;
    let mut cells = Vec::new();
    for (i, map) in maps.iter().enumerate() {
        for (j, phi) in phis.iter().enumerate() {
            cells.push((map, phi, seed.wrapping_add(1 + (i * phis.len() + j) as u64)));
        }
    }
    let tol = cfg.tolerances.contraction;
    let rows: Vec<Vec<Value>> = cells
        .par_iter()
        .map(|&((name, map), phi, s)| -> CliResult<Vec<Value>> {
            let rep = contraction_report(map, phi, &TraceSpec::Normalized, cfg.samples, s)?;
            Ok(vec![
                (*name).into(),
                rep.class.name().into(),
                phi.name().into(),
                rep.bound.into(),
                rep.max_ratio.into(),
                rep.min_ratio.into(),
                rep.step_violation.into(),
                rep.certified(tol).into(),
            ])
        })
        .collect::<CliResult<_>>()?;
    let mut table = ResultTable::new(&[
        "map",
        "class",
        "phi",
        "bound",
        "max_ratio",
        "min_ratio",
        "step_violation",
        "certified",
    ]);
    let mut passed = true;
    for row in rows {
        passed &= row[7] == Value::Bool(true);
        table.push(row);
    }
    Ok(Outcome { table, passed })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ExperimentConfig {
        ExperimentConfig::parse(r#"{"beta": [0.2, 0.5], "volumes": [2, 3], "norms": {"p": [2, 3], "s": [0, 0.5]}, "seed": 1, "samples": 8}"#)
            .unwrap()
    }

    #[test]
    fn norms_of_identity_are_one() {
        let cfg = ExperimentConfig::parse(r#"{"norms": {"p": [2], "s": [0.5]}, "observable": {"name": "identity"}}"#).unwrap();
        let out = run(Subcommand::Norms, &cfg).unwrap();
        assert!(out.passed);
        assert_eq!(out.table.rows.len(), 15);
        for v in out.table.column("norm").unwrap() {
            let Value::Num(x) = v else { panic!() };
            assert!((x - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_potential_gives_constant_norms() {
        let cfg = ExperimentConfig::parse(r#"{"potential": {"type": "custom"}, "observable": {"name": "sigma_x"}}"#).unwrap();
        let out = run(Subcommand::Monotonicity, &cfg).unwrap();
        assert!(out.passed);
        for v in out.table.column("increase").unwrap() {
            let Value::Num(x) = v else { panic!() };
            assert!(x.abs() < 1e-14);
        }
    }

    #[test]
    fn every_subcommand_passes_on_a_small_grid() {
        let cfg = small();
        for cmd in [
            Subcommand::Norms,
            Subcommand::Monotonicity,
            Subcommand::Semigroup,
            Subcommand::Equivalence,
            Subcommand::Orlicz,
            Subcommand::Contraction,
        ] {
            let out = run(cmd, &cfg).unwrap();
            assert!(out.passed, "{}: {}", cmd.name(), out.table.to_csv().unwrap());
            assert!(!out.table.rows.is_empty());
        }
    }

    #[test]
    fn contraction_needs_a_seed() {
        let mut cfg = small();
        cfg.seed = None;
        assert!(matches!(run(Subcommand::Contraction, &cfg), Err(CliError::Config(_))));
    }

    #[test]
    fn observable_outside_volume_is_a_config_error() {
        let cfg = ExperimentConfig::parse(r#"{"volumes": [2], "observable": {"name": "sigma_z", "site": [5]}}"#).unwrap();
        assert!(matches!(run(Subcommand::Norms, &cfg), Err(CliError::Config(_))));
    }
}
