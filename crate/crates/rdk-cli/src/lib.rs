//! The `rdk` command line: JSON codecs and subcommands over `rdk_core`.

pub mod app;
pub mod codec;
mod commands;

pub use app::run;
