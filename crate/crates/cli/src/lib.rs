//! Command implementations of the `psym` tool.

pub mod args;
pub mod commands;
pub mod config;
pub mod json;
pub mod pathspec;
pub mod report;
pub mod suite;
