//! Suite runner behind the `sasaki-spectra` binary: configuration, the seven
//! named suites and the JSON/CSV report.

pub mod config;
pub mod report;
pub mod suites;

pub use config::{Format, Generator, Suite, SuiteConfig, UsageError};
pub use report::{Record, Report, Status};
pub use suites::run_suite;
