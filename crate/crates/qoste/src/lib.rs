//! File formats, experiment configuration and subcommands of the `qoste` tool.

pub mod commands;
pub mod config;
pub mod error;
pub mod io;

pub use error::{Error, Result};
