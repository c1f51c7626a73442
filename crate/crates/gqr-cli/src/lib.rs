//! Batch front end: configuration parsing, experiment orchestration and
//! plot-ready data emission for the scattering simulator.

// Validations use the `!(x > 0.0)` form so NaN inputs fail them too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod output;
pub mod run;

pub use config::{parse_config, ExperimentKind, RunConfig};
pub use error::{CliError, ExitCode};
pub use run::run;
