//! Batch front end for the oracle summary library: task files, commands and
//! result files.

pub mod commands;
pub mod error;
pub mod report;
pub mod task;

pub use commands::{BenchOptions, EvaluateOptions, RunOptions};
pub use error::CliError;
pub use report::{render_text, ResultFile};
pub use task::{Overrides, TaskFile};
