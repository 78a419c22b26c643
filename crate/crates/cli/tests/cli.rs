use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qnc_cli::config::Format;
use qnc_cli::{load_config, save_config, ExperimentConfig};
use tempfile::TempDir;

fn qnc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qnc")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

const SMALL: &str = r#"{"beta": [0.3], "volumes": [2, 3], "norms": {"p": [2, 3], "s": [0, 0.5]}, "samples": 10, "seed": 3}"#;

#[test]
fn selftest_passes_on_default_bundle() {
    let out = qnc(&["selftest"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.starts_with("criterion,check,value,tolerance,passed\n"));
    assert!(!csv.contains(",false"));
}

#[test]
fn selftest_with_written_default_config() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("default.json");
    save_config(&ExperimentConfig::default(), &cfg).unwrap();
    let out = qnc(&["selftest", "--config", cfg.to_str().unwrap(), "--seed", "0"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
}

#[test]
fn unknown_key_is_named_and_exits_2() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "bad.json", r#"{"norms": {"pp": [2]}}"#);
    let out = qnc(&["norms", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("pp"), "{}", stderr(&out));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&qnc(&[])), 2);
    assert_eq!(code(&qnc(&["frobnicate"])), 2);
    assert_eq!(code(&qnc(&["norms", "--seed", "x"])), 2);
    assert_eq!(code(&qnc(&["norms", "--config", "/nonexistent/cfg.json"])), 2);
}

#[test]
fn randomized_run_without_seed_exits_2() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"volumes": [2]}"#);
    let out = qnc(&["contraction", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("seed"));
    let out = qnc(&["contraction", "--config", cfg.to_str().unwrap(), "--seed", "5"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
}

#[test]
fn identity_norms_are_one() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "n.json",
        r#"{"norms": {"p": [2], "s": [0.5]}, "observable": {"name": "identity"}}"#,
    );
    let csv_path = dir.path().join("n.csv");
    let out = qnc(&["norms", "--config", cfg.to_str().unwrap(), "--out", csv_path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let csv = fs::read_to_string(&csv_path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "beta,volume,p,s,norm,unit_defect");
    let mut rows = 0;
    for line in lines {
        let norm: f64 = line.split(',').nth(4).unwrap().parse().unwrap();
        assert!((norm - 1.0).abs() < 1e-12, "{line}");
        rows += 1;
    }
    assert_eq!(rows, 15);
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("n.csv.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["subcommand"], "norms");
    assert_eq!(meta["passed"], true);
    assert_eq!(meta["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(meta["config_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn zero_potential_monotonicity_passes() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "z.json", r#"{"potential": {"type": "custom"}, "observable": {"name": "sigma_x"}}"#);
    let out = qnc(&["monotonicity", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
}

#[test]
fn failing_assertion_exits_1() {
    // σx on an anisotropic Heisenberg chain: the norm rises from two to three sites
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "h.json",
        r#"{"potential": {"type": "heisenberg", "Jx": 1, "Jy": 0.7, "Jz": 0.4, "h": 0.2},
            "observable": {"name": "sigma_x"}, "beta": 0.5, "volumes": [2, 3],
            "norms": {"p": [2], "s": [0.5]}}"#,
    );
    let out = qnc(&["monotonicity", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 1, "{}", stderr(&out));
    assert!(String::from_utf8(out.stdout).unwrap().contains(",false"));
}

#[test]
fn output_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "s.json", SMALL);
    for cmd in ["norms", "monotonicity", "semigroup", "equivalence", "orlicz", "contraction", "selftest"] {
        let a = qnc(&[cmd, "--config", cfg.to_str().unwrap()]);
        let b = qnc(&[cmd, "--config", cfg.to_str().unwrap()]);
        assert_eq!(code(&a), 0, "{cmd}: {}", stderr(&a));
        assert!(!a.stdout.is_empty());
        assert_eq!(a.stdout, b.stdout, "{cmd}");
    }
}

#[test]
fn seed_override_changes_samples_and_hash() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "s.json", SMALL);
    let run = |seed: &str| {
        let out = dir.path().join(format!("c{seed}.csv"));
        let o = qnc(&["contraction", "--config", cfg.to_str().unwrap(), "--seed", seed, "--out", out.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        let meta: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(dir.path().join(format!("c{seed}.csv.meta.json"))).unwrap())
                .unwrap();
        (fs::read_to_string(out).unwrap(), meta["config_hash"].as_str().unwrap().to_owned())
    };
    let (a, ha) = run("1");
    let (b, hb) = run("2");
    assert_ne!(a, b);
    assert_ne!(ha, hb);
}

#[test]
fn json_output_carries_metadata() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "j.json",
        r#"{"beta": 0.2, "volumes": [2], "output": {"format": "json"}}"#,
    );
    let out = qnc(&["equivalence", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["columns"][2], "constant");
    assert_eq!(v["metadata"]["subcommand"], "equivalence");
    assert!(v["rows"][0][2].as_f64().unwrap() >= 1.0);
}

#[test]
fn observable_file_is_resolved_next_to_config() {
    let dir = TempDir::new().unwrap();
    let lattice = qnc_core::Lattice::chain();
    let f: qnc_core::Operator = qnc_core::random::random_hermitian(lattice, &qnc_core::Region::chain(0..2), 9).unwrap();
    qnc_core::io::write_operator(dir.path().join("f.json"), &f).unwrap();
    let cfg = write(
        dir.path(),
        "o.json",
        r#"{"observable": {"file": "f.json"}, "volumes": [2, 3], "beta": 0.3}"#,
    );
    let out = qnc(&["orlicz", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
}

#[test]
fn config_round_trip_through_files() {
    let dir = TempDir::new().unwrap();
    let first = write(dir.path(), "a.json", SMALL);
    let a = load_config(&first).unwrap();
    let second = dir.path().join("b.json");
    save_config(&a, &second).unwrap();
    let b = load_config(&second).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.hash(), b.hash());
    assert_eq!(b.output.format, Format::Csv);
}
