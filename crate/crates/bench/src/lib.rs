//! Benchmark harness for the spatial indexes in `lsi-core`.
//!
//! The `lsi-bench` binary exposes four subcommands: `generate`, `tune`,
//! `run` and `build-stats`. Everything it does is also available here.

pub mod cli;
pub mod error;
pub mod harness;
pub mod input;
pub mod report;

pub use error::{BenchError, Result};
