//! Driver for `dickson-core`: one-shot subcommands and reproducible grid suites.

pub mod commands;
pub mod config;
pub mod emit;
pub mod suite;
