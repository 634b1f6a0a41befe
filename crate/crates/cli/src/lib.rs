//! Library surface of the batch driver, exposed so the acceptance suite can
//! run suites in-process.

pub mod config;
pub mod output;
pub mod radon_cmd;
pub mod spectrum_cmd;
pub mod suites;

pub use config::{parse_config, GroupSpec, RunConfig};
pub use suites::{run_suite, SuiteOutcome, SUITES};
