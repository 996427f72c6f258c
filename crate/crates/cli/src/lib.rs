//! Batch harness: configured suites in, JSON-lines reports out.

pub mod config;
pub mod eval;
pub mod runner;
pub mod suites;
