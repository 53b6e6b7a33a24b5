//! Configuration, execution and file output for photon-to-qubit transfer
//! scenarios built on `qst-core`.

pub mod config;
pub mod error;
pub mod output;
pub mod runner;

pub use config::{Engine, Overrides, Scenario, ScenarioConfig};
pub use error::{Error, Result};
pub use runner::{execute, GridPoint, RunResult, ScenarioOutcome};

/// Run a validated scenario and write its artifacts; returns the outcome and
/// the files written.
pub fn simulate(
    cfg: &ScenarioConfig,
    jobs: usize,
) -> Result<(ScenarioOutcome, Vec<std::path::PathBuf>)> {
    let outcome = execute(cfg, jobs)?;
    let written = output::write_outcome(cfg, &outcome)?;
    Ok((outcome, written))
}
