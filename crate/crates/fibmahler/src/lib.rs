//! Command-line front end for `fibmahler-core`: run configuration, the
//! on-disk family cache, CSV/TSV/JSON output and parallel drivers.

pub mod cache;
pub mod cli;
pub mod config;
pub mod drive;
pub mod format;
pub mod json;
pub mod session;

pub use cli::{run, Cli, Command};
pub use config::{OutputFormat, RunConfig};
pub use session::Session;
