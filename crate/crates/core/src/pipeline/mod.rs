//! End-to-end commands behind the `langscape` binary.

mod commands;
mod config;

pub use commands::*;
pub use config::{load_config, parse_config, ConfigError, Overrides, PipelineConfig};
