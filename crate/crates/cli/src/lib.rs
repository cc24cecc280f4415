//! Command-line front end: JSON configuration, field writers and subcommands.

pub mod commands;
pub mod config;
pub mod output;
pub mod verify;

pub use commands::{run, Cli, Command, Failure, Outcome};
pub use config::{parse_config, read_config, ConfigError, DesignConfig, RunConfig, Violation};
pub use output::{cell_csv, face_csv, parse_cell_csv, read_cell_csv, vtk, Artifact, Format};
