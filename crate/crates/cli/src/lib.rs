//! Model files, command dispatch and CSV output for the `qmod` binary.

pub mod commands;
pub mod error;
pub mod model_file;
pub mod record;

pub use commands::{execute_command, CommandKind, CommandSpec, InterfereArgs};
pub use error::CliError;
pub use model_file::{dump_model, parse_model, parse_model_str, write_model};
pub use record::{emit_csv, OutputRecord, Value};
