//! Scenario files, presets and output writers behind the `fluctoptics`
//! command-line tool.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod output;
pub mod presets;
pub mod run;

pub use config::{parse_config, Scenario};
pub use error::CliError;
pub use run::{run_scenario, Command};
