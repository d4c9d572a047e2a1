//! Batch runner behind the `contrast-asym` binary: config parsing, the check registry,
//! run manifests, oracle tables and rate plots.

pub mod checks;
pub mod config;
pub mod error;
pub mod oracle;
pub mod plot;
pub mod run;

pub use config::{parse_config, RunConfig};
pub use error::CliError;
pub use run::{run, RunManifest, Status};

use std::path::Path;

/// Reads and parses a configuration file.
pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_config(&text)
}

/// Runs only the assumption check of `config`, without writing files.
pub fn check_assumptions(config: &RunConfig) -> Result<checks::Outcome, CliError> {
    let family = config.build_family()?;
    let solver = contrast_asym::fem::solver::solver_registry().get(&config.solver)?;
    let ctx = checks::CheckContext { config, family, fem: contrast_asym::fem::Fem::new(solver) };
    let check = checks::check_registry().get("assumptions")?;
    Ok(check.run(&ctx)?)
}
