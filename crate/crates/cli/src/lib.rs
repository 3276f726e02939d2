//! Batch interface to the `sgmod` engine: a small definition language,
//! JSON and text reports, a content-addressed cache and a fuzz harness.

pub mod cache;
pub mod dsl;
pub mod env;
pub mod error;
pub mod fuzz;
pub mod report;
pub mod run;

pub use dsl::parse_script;
pub use error::CliError;
pub use report::Report;
pub use run::{run_script, run_source, Config};
