//! Command-line front end: configuration, scenarios, outputs and acceptance checks.

pub mod config;
pub mod error;
pub mod output;
pub mod run;
pub mod scenario;
pub mod scene;
pub mod validate;
