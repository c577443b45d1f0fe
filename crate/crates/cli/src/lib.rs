//! Problem-file parsing and command dispatch for the `novikov` binary.

pub mod commands;
pub mod problem;

pub use commands::{run_command, Command, CommandError, CommandReport, RunOptions};
pub use problem::{parse_problem, ProblemError, ProblemFile};
