//! Batch front-end for the conferencing interference channel regions: reads
//! a JSON run configuration, computes the requested regions and writes CSV
//! vertex tables, an SVG overlay and a text report.

pub mod config;
pub mod error;
pub mod output;
pub mod report;
pub mod run;

pub use config::{Mode, Overrides, RunConfig};
pub use error::CliError;
pub use report::{RunReport, Verdict};
pub use run::execute;
