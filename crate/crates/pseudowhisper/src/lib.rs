//! File formats, configuration and batch processing around
//! [`pseudowhisper_core`]: WAV input/output, `PWF1` feature dumps, TSV
//! manifests, `key = value` configs and JSON-lines reports.

pub mod batch;
pub mod config;
pub mod error;
pub mod features;
pub mod manifest;
pub mod report;
pub mod wav;

pub use error::{Error, Result};
pub use pseudowhisper_core as core;
