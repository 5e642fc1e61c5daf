//! File formats and subcommand implementations behind the `hiercrt` binary.

pub mod commands;
pub mod format;
