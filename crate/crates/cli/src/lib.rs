//! Command-line front end of the driven quarkonium toolkit: configuration,
//! unit conversion, and the table, curve and section generators.

pub mod checks;
pub mod commands;
pub mod config;
pub mod error;
pub mod presets;
pub mod sidecar;
pub mod units;

pub use config::Config;
pub use error::{CliError, Result};
pub use units::{OmegaUnit, UnitContext};
