//! Command-line front end: scenario files, parameter sweeps written as CSV,
//! and the self-verification suite.

pub mod config;
pub mod error;
pub mod runs;
pub mod verify;

pub use config::{ModeSetting, ScenarioConfig};
pub use error::{CliError, CliResult};
pub use runs::{run, Command, RunOutput};
pub use verify::{run_verify, Report, VerifyOptions};
