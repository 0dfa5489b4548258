//! Command-line front end for the fuzzy plate solver: TOML configuration,
//! crisp solves, fuzzy sweeps, transient rod runs and CSV output.

pub mod commands;
pub mod config;
pub mod error;
pub mod number;

pub use commands::ScenarioSelector;
pub use config::RunConfig;
pub use error::{Category, CliError};
