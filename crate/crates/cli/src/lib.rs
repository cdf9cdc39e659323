//! Library side of the `celldiv` command-line tool: configuration files,
//! run manifests and the subcommand implementations.

pub mod commands;
pub mod config;
pub mod manifest;
