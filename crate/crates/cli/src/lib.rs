//! Command-line front end: TOML configs, CSV/JSON output, a rayon executor
//! and the acceptance suite.

pub mod commands;
pub mod config;
pub mod error;
pub mod exec;
pub mod output;
pub mod suite;
