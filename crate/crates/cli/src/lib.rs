//! Configuration-driven experiment runner on top of `qnc-core`.

pub mod config;
pub mod error;
pub mod run;
pub mod selftest;
pub mod table;

pub use config::{load_config, save_config, ExperimentConfig};
pub use error::{CliError, CliResult};
pub use run::{run, Outcome, Subcommand};
pub use table::{write_table, ResultTable};
