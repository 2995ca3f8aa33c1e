//! Library side of the `nstar` command-line tool.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod docs;
pub mod report;
pub mod run;
pub mod suite;

pub use run::{execute, Cli, CliError};
