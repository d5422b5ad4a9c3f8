//! Scenario files, the checking commands and their reports.

pub mod commands;
pub mod error;
pub mod export;
pub mod generate;
pub mod report;
pub mod resolve;
pub mod scenario;
pub mod witness_io;

pub use commands::{run, Command, Options, SearchMode};
pub use error::{CliError, CliResult};
pub use report::{Outcome, Report};
pub use resolve::Scenario;
pub use scenario::ScenarioFile;
