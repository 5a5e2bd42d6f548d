//! File formats, configuration, plotting and the command-line front end
//! for [`needle_core`].

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod parallel;
pub mod report;
pub mod svg;
pub mod traceio;

pub use error::{exit, CliError};
pub use parallel::synthesize_parallel;
pub use traceio::{format_trace, load_trace, parse_trace, save_trace};
