use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use qnc_cli::{load_config, run, write_table, CliError, ExperimentConfig, Subcommand};

/// Run an experiment and write its result table.
///
/// Exit status: 0 when every assertion passes, 1 when one fails, 2 on a
/// usage or configuration error.
#[derive(Debug, Parser)]
#[command(name = "qnc", version)]
struct Args {
    #[arg(value_enum)]
    subcommand: Subcommand,
    /// JSON experiment configuration; the default bundle when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file; overrides `output.path`. Without either, the table goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long)]
    seed: Option<u64>,
}

fn execute(args: Args) -> Result<bool, CliError> {
    let mut cfg = match &args.config {
        Some(path) => load_config(path)?,
        None => ExperimentConfig::bundle(),
    };
    if let Some(seed) = args.seed {
        cfg.seed = Some(seed);
    }
    if let Some(out) = args.out {
        cfg.output.path = Some(out);
    }
    let start = Instant::now();
    let outcome = run(args.subcommand, &cfg)?;
    let mut table = outcome.table;
    table.metadata.subcommand = args.subcommand.name().into();
    table.metadata.config_hash = cfg.hash();
    table.metadata.version = env!("CARGO_PKG_VERSION").into();
    table.metadata.wall_time_s = start.elapsed().as_secs_f64();
    table.metadata.passed = outcome.passed;
    match &cfg.output.path {
        Some(path) => write_table(&table, path, cfg.output.format)?,
        None => std::io::stdout().write_all(table.render(cfg.output.format)?.as_bytes())?,
    }
    eprintln!(
        "{}: {} ({} rows, {:.2} s, config {})",
        table.metadata.subcommand,
        if outcome.passed { "PASS" } else { "FAIL" },
        table.rows.len(),
        table.metadata.wall_time_s,
        &table.metadata.config_hash[..12]
    );
    Ok(outcome.passed)
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
