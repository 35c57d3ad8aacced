//! Scenario runner for the eqradar engine: JSON configs, figure presets,
//! CSV/SVG output and a run manifest.

pub mod config;
pub mod error;
pub mod presets;
pub mod run;
pub mod svg;
pub mod tables;

pub use config::RunConfig;
pub use error::CliError;
