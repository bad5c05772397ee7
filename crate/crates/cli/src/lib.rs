//! Config parsing, scenario runs and CSV output for the `catspin` binary.

pub mod config;
pub mod output;
pub mod scenario;
pub mod units;

pub use config::{validate_config, ConfigError, ScenarioConfig, ScenarioId};
pub use output::{write_tables, DataTable};
pub use scenario::{run_scenario, Report, ScenarioOutput};
