//! Command-line driver, configuration and data-file formats on top of
//! `breitham-core`, plus thread-parallel scan and sweep drivers.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod format;
pub mod parallel;

pub use config::{Command, RunConfig, Settings};
pub use error::{CliError, Result};
