//! Command-line front end: JSON documents, Graphviz export and the command
//! dispatcher behind the `evstruct` binary.

pub mod app;
pub mod doc;
pub mod dot;
pub mod error;

pub use app::{run, Cli, Command, Outcome};
pub use doc::{CountKind, CountReport, CountRow, Document};
pub use error::CliError;
