//! Benchmark driver and inspection commands for the `smw-core` solvers.

pub mod bench;
pub mod commands;
pub mod config;
pub mod table;

pub use bench::{run_bench, BenchRow};
pub use commands::{
    dump_problem, parse_stencil_literal, solve_command, spectrum_command, validate_problem,
    SolveArgs, SpectrumReport,
};
pub use config::{BenchConfig, Format, Method, ResolvedConfig};
pub use table::emit_table;

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("unknown method '{name}' (valid: {valid})")]
    UnknownMethod { name: String, valid: String },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("I/O error: {0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] smw_core::Error),
}
