//! Command-line front end: TOML experiment configs in, distribution CSV and
//! metrics JSON out.

pub mod app;
pub mod config;
pub mod output;
pub mod provenance;
pub mod run;

pub use app::{main_with, CliError};
pub use config::{parse_config, ConfigError, ConfigErrors, Kind, RunConfig};
pub use run::{execute, Report};
