//! File formats, Graphviz export and the `kpmod` command line.

pub mod commands;
pub mod dot;
pub mod expr;
pub mod format;

pub use commands::{run, Cli, Command, Outcome};
