//! Batch front end for the `xkerr` model: presets, unit-tagged parameter
//! files, sweeps, and CSV/JSON output with a reproducibility manifest.

pub mod config;
pub mod error;
pub mod output;
pub mod presets;
pub mod quantity;
pub mod run;
pub mod sweep;

pub use config::{Command, Format, ParamValue, RunConfig};
pub use error::CliError;
pub use run::{run, Summary};
