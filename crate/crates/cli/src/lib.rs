//! Command-line front end for the section-moment laboratory: body
//! descriptors, experiment configuration, batch sweeps and reports.

pub mod body_spec;
pub mod config;
pub mod report;
pub mod runner;

pub use body_spec::{parse_body_spec, BodySpecError};
pub use config::{Command, ExperimentConfig, OutputFormat};
pub use report::ReportDocument;
