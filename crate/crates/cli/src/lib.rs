//! Command-line pipeline around the stationarity analysis library: single
//! clip analysis and labeling, batch labeling of manifests, synthetic
//! validation, plot data and timing benchmarks.

pub mod batch;
pub mod bench;
pub mod config;
pub mod corpus;
pub mod error;
pub mod pipeline;
pub mod plot;
pub mod records;
pub mod validate;

pub use error::{exit, CliError, Result};
