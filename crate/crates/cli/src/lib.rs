//! Config-driven runner for the Landau–Pekar solver, the truncated Fock-space
//! validator and the bounds suite. Every run writes `manifest.json`,
//! `series.jsonl`, `summary.csv` and two-column `plotdata/*.csv` files into
//! its output directory.

pub mod artifacts;
pub mod config;
pub mod error;
pub mod run;

use std::path::{Path, PathBuf};

pub use config::{Mode, RunConfig};
pub use error::CliError;
pub use run::{run, RunSummary};

/// Loads, resolves and runs `config_path` in `mode`.
pub fn execute(mode: Mode, config_path: &Path, out: Option<PathBuf>, seed: Option<u64>) -> Result<RunSummary, CliError> {
    let cfg = RunConfig::load(config_path)?.resolve(mode, seed, out)?;
    run(&cfg)
}
