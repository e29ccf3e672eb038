//! Command-line front end: scenario parsing, execution and report output.

pub mod dictionary;
pub mod error;
pub mod report;
pub mod run;
pub mod scenario;

pub use error::{CliError, CliResult};
