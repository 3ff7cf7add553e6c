//! Scenario ingestion and serialization for the `warpcurv` command.

pub mod error;
pub mod output;
pub mod scenario;

pub use error::{CliError, Result};
pub use output::{describe, run, verification, RunOptions, RunSummary};
pub use scenario::{load_scenario, parse_scenario, OutputKind, Scenario};
