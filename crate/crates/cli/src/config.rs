//! Experiment configuration: a single JSON document with documented defaults.

use std::fs;
use std::path::{Path, PathBuf};

use qnc_core::io::OperatorDocument;
use qnc_core::orlicz::{OrliczKindName, OrliczSpec};
use qnc_core::potential::{site_operator, PotentialTerm};
use qnc_core::{Lattice, Operator, Potential, Region, Site};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub lattice: Lattice,
    pub potential: PotentialSpec,
    /// A single inverse temperature or a grid.
    pub beta: BetaSpec,
    /// Site counts (a line along the first axis) or explicit regions.
    pub volumes: Vec<VolumeSpec>,
    pub observable: ObservableSpec,
    pub norms: NormGrid,
    pub orlicz: Vec<OrliczSpec>,
    /// Traced regions whose conditional expectations drive the semigroup.
    pub blocks: Vec<Region>,
    /// Traced region for the equivalence scan.
    pub probe: Region,
    pub times: Vec<f64>,
    /// Random samples per randomized check.
    pub samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub tolerances: Tolerances,
    pub output: OutputSpec,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            lattice: Lattice::chain(),
            potential: PotentialSpec::default(),
            beta: BetaSpec::Grid(vec![0.1, 0.3, 0.5]),
            volumes: (2..=6).map(VolumeSpec::Size).collect(),
            observable: ObservableSpec::default(),
            norms: NormGrid::default(),
            orlicz: vec![
                OrliczSpec::power(2.0),
                OrliczSpec::named(OrliczKindName::ExpMinusOne),
                OrliczSpec::named(OrliczKindName::Llogl),
            ],
            blocks: vec![Region::chain(0..1), Region::chain(1..2)],
            probe: Region::chain(0..1),
            times: vec![0.0, 0.1, 0.5, 1.0, 2.0, 5.0],
            samples: 100,
            seed: None,
            tolerances: Tolerances::default(),
            output: OutputSpec::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BetaSpec {
    Single(f64),
    Grid(Vec<f64>),
}

impl BetaSpec {
    pub fn values(&self) -> Vec<f64> {
        match self {
            BetaSpec::Single(b) => vec![*b],
            BetaSpec::Grid(g) => g.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VolumeSpec {
    Size(usize),
    Sites(Region),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialKind {
    Ising,
    Heisenberg,
    Custom,
}

fn one() -> f64 {
    1.0
}

fn default_field() -> f64 {
    0.2
}

fn default_range() -> u64 {
    1
}

/// Ising uses `Jz` as its coupling; Heisenberg uses all three.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSpec {
    #[serde(rename = "type")]
    pub kind: PotentialKind,
    #[serde(rename = "Jx", default, skip_serializing_if = "Option::is_none")]
    pub jx: Option<f64>,
    #[serde(rename = "Jy", default, skip_serializing_if = "Option::is_none")]
    pub jy: Option<f64>,
    #[serde(rename = "Jz", default = "one")]
    pub jz: f64,
    #[serde(default = "default_field")]
    pub h: f64,
    #[serde(default = "default_range")]
    pub range: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terms: Option<Vec<TermSpec>>,
}

impl Default for PotentialSpec {
    fn default() -> Self {
        PotentialSpec {
            kind: PotentialKind::Ising,
            jx: None,
            jy: None,
            jz: 1.0,
            h: default_field(),
            range: 1,
            terms: None,
        }
    }
}

/// One translation-covariant term: `coupling · ⊗ ops` on `sites`, or an
/// explicit matrix given as `[re, im]` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub sites: Region,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ops: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<[f64; 2]>>>,
    #[serde(default = "one")]
    pub coupling: f64,
}

/// A named single-site operator or an operator document on disk.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ObservableSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub site: Option<Site>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub file: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NormGrid {
    pub p: Vec<f64>,
    pub s: Vec<f64>,
}

impl Default for NormGrid {
    fn default() -> Self {
        NormGrid {
            p: vec![1.0, 1.5, 2.0, 3.0, 4.0],
            s: vec![0.0, 0.25, 0.5, 0.75, 1.0],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub trace: f64,
    pub unitality: f64,
    pub monotonicity_slack: f64,
    pub kms: f64,
    pub holder: f64,
    pub duality: f64,
    pub gce_unitality: f64,
    pub gce_positivity: f64,
    pub gce_symmetry: f64,
    pub semigroup: f64,
    pub invariance: f64,
    pub equivalence: f64,
    pub witness: f64,
    /// Allowed ratio between the last and first equivalence constant.
    pub equivalence_growth: f64,
    pub trace_identity: f64,
    pub luxemburg: f64,
    pub norm_agreement: f64,
    pub contraction: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            trace: 1e-12,
            unitality: 1e-10,
            monotonicity_slack: 1e-8,
            kms: 1e-10,
            holder: 1e-10,
            duality: 1e-6,
            gce_unitality: 1e-12,
            gce_positivity: 1e-10,
            gce_symmetry: 1e-8,
            semigroup: 1e-10,
            invariance: 1e-9,
            equivalence: 1e-12,
            witness: 1e-8,
            equivalence_growth: 10.0,
            trace_identity: 1e-10,
            luxemburg: 1e-10,
            norm_agreement: 1e-12,
            contraction: 1e-9,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    #[serde(alias = "structured-text", alias = "structured_text")]
    Json,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    pub format: Format,
}

impl ExperimentConfig {
    /// The default bundle used when no config file is given: the defaults
    /// plus a fixed seed.
    pub fn bundle() -> Self {
        ExperimentConfig {
            seed: Some(0),
            ..Default::default()
        }
    }

    /// Parse and validate; errors name the offending field.
    pub fn parse(text: &str) -> CliResult<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            if path == "." {
                CliError::Config(e.inner().to_string())
            } else {
                CliError::Config(format!("{path}: {}", e.inner()))
            }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> CliResult<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// SHA-256 of the canonical serialization, ignoring the output section.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.output = OutputSpec::default();
        let text = serde_json::to_string(&canonical).expect("configs always serialize");
        hex::encode(Sha256::digest(text.as_bytes()))
    }

    pub fn validate(&self) -> CliResult<()> {
        let bad = |field: &str, why: &str| Err(CliError::Config(format!("{field}: {why}")));
        self.lattice.validate().map_err(|e| CliError::Config(format!("lattice: {e}")))?;
        let betas = self.beta.values();
        if betas.is_empty() {
            return bad("beta", "grid is empty");
        }
        if betas.iter().any(|b| !b.is_finite() || *b < 0.0) {
            return bad("beta", "values must be finite and non-negative");
        }
        if self.volumes.is_empty() {
            return bad("volumes", "list is empty");
        }
        if self.norms.p.is_empty() {
            return bad("norms.p", "grid is empty");
        }
        if self.norms.p.iter().any(|p| !(*p >= 1.0) || !p.is_finite()) {
            return bad("norms.p", "values must be finite and at least 1");
        }
        if self.norms.s.is_empty() {
            return bad("norms.s", "grid is empty");
        }
        if self.norms.s.iter().any(|s| !(0.0..=1.0).contains(s)) {
            return bad("norms.s", "values must lie in [0, 1]");
        }
        if self.orlicz.is_empty() {
            return bad("orlicz", "list is empty");
        }
        for (k, spec) in self.orlicz.iter().enumerate() {
            spec.build::<f64>().map_err(|e| CliError::Config(format!("orlicz[{k}]: {e}")))?;
        }
        if self.blocks.is_empty() {
            return bad("blocks", "list is empty");
        }
        if self.times.is_empty() {
            return bad("times", "grid is empty");
        }
        if self.times.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return bad("times", "values must be finite and non-negative");
        }
        if self.samples == 0 {
            return bad("samples", "must be positive");
        }
        if self.observable.file.is_some() && (self.observable.name.is_some() || self.observable.site.is_some()) {
            return bad("observable", "give either `file` or `name`/`site`, not both");
        }
        self.potential()?;
        self.regions()?;
        Ok(())
    }

    pub fn betas(&self) -> Vec<f64> {
        self.beta.values()
    }

    pub fn regions(&self) -> CliResult<Vec<Region>> {
        self.volumes
            .iter()
            .enumerate()
            .map(|(k, v)| match v {
                VolumeSpec::Size(0) => Err(CliError::Config(format!("volumes[{k}]: size must be positive"))),
                VolumeSpec::Size(n) => Ok(Region::line(self.lattice.d, *n)),
                VolumeSpec::Sites(r) => {
                    if r.is_empty() || r.dim() != Some(self.lattice.d) {
                        Err(CliError::Config(format!(
                            "volumes[{k}]: region must be non-empty with {}-dimensional sites",
                            self.lattice.d
                        )))
                    } else {
                        Ok(r.clone())
                    }
                }
            })
            .collect()
    }

    pub fn potential(&self) -> CliResult<Potential> {
        let spec = &self.potential;
        let field = |name: &str, e: qnc_core::Error| CliError::Config(format!("potential.{name}: {e}"));
        if spec.kind != PotentialKind::Custom && spec.range != 1 {
            return Err(CliError::Config("potential.range: built-in models are nearest-neighbour (range 1)".into()));
        }
        if spec.kind != PotentialKind::Custom && spec.terms.is_some() {
            return Err(CliError::Config("potential.terms: only custom potentials take terms".into()));
        }
        match spec.kind {
            PotentialKind::Ising => {
                if spec.jx.is_some() || spec.jy.is_some() {
                    return Err(CliError::Config("potential: Ising takes only Jz and h".into()));
                }
                Potential::ising(self.lattice, spec.jz, spec.h).map_err(|e| field("type", e))
            }
            PotentialKind::Heisenberg => Potential::heisenberg(
                self.lattice,
                spec.jx.unwrap_or(1.0),
                spec.jy.unwrap_or(1.0),
                spec.jz,
                spec.h,
            )
            .map_err(|e| field("type", e)),
            PotentialKind::Custom => {
                let mut terms = Vec::new();
                for (k, t) in spec.terms.iter().flatten().enumerate() {
                    let op = self.term_operator(t).map_err(|e| field(&format!("terms[{k}]"), e))?;
                    if t.sites.diameter() > spec.range {
                        return Err(CliError::Config(format!(
                            "potential.terms[{k}]: diameter {} exceeds range {}",
                            t.sites.diameter(),
                            spec.range
                        )));
                    }
                    terms.push(PotentialTerm {
                        template: op.support().clone(),
                        matrix: op.into_matrix(),
                    });
                }
                Potential::new(self.lattice, terms, true).map_err(|e| field("terms", e))
            }
        }
    }

    fn term_operator(&self, t: &TermSpec) -> qnc_core::Result<Operator> {
        let invalid = |m: &str| qnc_core::Error::InvalidParameter(m.into());
        let op = match (&t.ops, &t.matrix) {
            (Some(ops), None) => {
                if ops.len() != t.sites.len() {
                    return Err(invalid("`ops` needs one name per site"));
                }
                let mut acc = Operator::identity(self.lattice, t.sites.clone())?;
                for (name, site) in ops.iter().zip(t.sites.sites()) {
                    let single: Operator = site_operator(self.lattice, name, site.clone())?;
                    acc = acc.try_mul(&single.embed(&t.sites)?)?;
                }
                acc
            }
            (None, Some(matrix)) => OperatorDocument {
                lattice: self.lattice,
                support: t.sites.clone(),
                matrix: matrix.clone(),
            }
            .to_operator()?,
            _ => return Err(invalid("give exactly one of `ops` and `matrix`")),
        };
        Ok(op.scale_real(t.coupling))
    }

    pub fn observable(&self) -> CliResult<Operator> {
        let spec = &self.observable;
        if let Some(path) = &spec.file {
            return qnc_core::io::read_operator(path)
                .map_err(|e| CliError::Config(format!("observable.file {}: {e}", path.display())));
        }
        let name = spec.name.as_deref().unwrap_or("sigma_z");
        let site = spec.site.clone().unwrap_or_else(|| self.lattice.origin());
        site_operator(self.lattice, name, site).map_err(|e| CliError::Config(format!("observable: {e}")))
    }

    pub fn seed(&self) -> CliResult<u64> {
        self.seed
            .ok_or_else(|| CliError::Config("seed: required for randomized runs (set it or pass --seed)".into()))
    }
}

/// Read a config; a relative observable file is taken relative to the config.
pub fn load_config(path: impl AsRef<Path>) -> CliResult<ExperimentConfig> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let mut cfg = ExperimentConfig::parse(&text)?;
    if let Some(file) = &cfg.observable.file {
        if file.is_relative() {
            if let Some(dir) = path.parent() {
                cfg.observable.file = Some(dir.join(file));
            }
        }
    }
    Ok(cfg)
}

pub fn save_config(cfg: &ExperimentConfig, path: impl AsRef<Path>) -> CliResult<()> {
    fs::write(path, cfg.to_json()?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = ExperimentConfig::parse("{}").unwrap();
        assert_eq!(cfg, ExperimentConfig::default());
        assert_eq!(cfg.betas(), vec![0.1, 0.3, 0.5]);
        assert_eq!(cfg.regions().unwrap().len(), 5);
        assert_eq!(cfg.seed, None);
    }

    #[test]
    fn unknown_fields_are_named() {
        let err = ExperimentConfig::parse(r#"{"norms": {"pp": [2]}}"#).unwrap_err();
        assert!(err.to_string().contains("pp"), "{err}");
        let err = ExperimentConfig::parse(r#"{"potential": {"type": "ising", "J": 1}}"#).unwrap_err();
        assert!(err.to_string().contains("`J`"), "{err}");
    }

    #[test]
    fn type_errors_carry_the_path() {
        let err = ExperimentConfig::parse(r#"{"tolerances": {"kms": "small"}}"#).unwrap_err();
        assert!(err.to_string().starts_with("tolerances.kms"), "{err}");
    }

    #[test]
    fn invalid_values_are_rejected() {
        for (text, field) in [
            (r#"{"beta": []}"#, "beta"),
            (r#"{"norms": {"p": [0.5]}}"#, "norms.p"),
            (r#"{"norms": {"s": [1.5]}}"#, "norms.s"),
            (r#"{"volumes": [0]}"#, "volumes[0]"),
            (r#"{"orlicz": [{"kind": "power"}]}"#, "orlicz[0]"),
            (r#"{"potential": {"type": "ising", "range": 2}}"#, "potential.range"),
            (r#"{"potential": {"type": "ising", "Jx": 1}}"#, "potential"),
        ] {
            let err = ExperimentConfig::parse(text).unwrap_err();
            assert!(err.to_string().starts_with(field), "{text}: {err}");
        }
    }

    #[test]
    fn scalar_beta_and_explicit_regions() {
        let cfg = ExperimentConfig::parse(r#"{"beta": 0.4, "volumes": [[[0]], [[0], [1]]]}"#).unwrap();
        assert_eq!(cfg.betas(), vec![0.4]);
        assert_eq!(cfg.regions().unwrap()[1], Region::chain(0..2));
    }

    #[test]
    fn custom_potential_from_ops_matches_ising() {
        let text = r#"{"potential": {"type": "custom", "terms": [
            {"sites": [[0], [1]], "ops": ["z", "z"], "coupling": -1},
            {"sites": [[0]], "ops": ["z"], "coupling": -0.2}]}}"#;
        let cfg = ExperimentConfig::parse(text).unwrap();
        let region = Region::chain(0..4);
        let a = cfg.potential().unwrap().hamiltonian(&region).unwrap();
        let b = Potential::ising(Lattice::chain(), 1.0, 0.2).unwrap().hamiltonian(&region).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-14);
    }

    #[test]
    fn custom_potential_rejects_non_hermitian_matrix() {
        let text = r#"{"potential": {"type": "custom", "terms": [
            {"sites": [[0]], "matrix": [[[0, 0], [1, 0]], [[0, 0], [0, 0]]]}]}}"#;
        assert!(ExperimentConfig::parse(text).is_err());
    }

    #[test]
    fn round_trip_is_stable() {
        let text = r#"{"beta": 0.25, "seed": 7, "orlicz": [{"kind": "custom", "knots": [[0, 0], [1, 0.5]]}],
            "output": {"format": "structured-text"}}"#;
        let a = ExperimentConfig::parse(text).unwrap();
        let b = ExperimentConfig::parse(&a.to_json().unwrap()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
        assert_eq!(b.output.format, Format::Json);
    }

    #[test]
    fn hash_ignores_output_and_tracks_seed() {
        let a = ExperimentConfig::bundle();
        let mut b = a.clone();
        b.output.path = Some("x.csv".into());
        assert_eq!(a.hash(), b.hash());
        b.seed = Some(1);
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }
}
