//! Configuration, built-in problems, initial data, error norms and
//! file output.

pub mod config;
pub mod driver;
pub mod output;
pub mod problems;
pub mod sample;

pub use config::RunConfig;
pub use driver::{build_mesh, convergence, resolve_problem, run, run_definition, ConvergenceTable, RunResult, RunSummary};
pub use output::{write_vtk, OutputFields};
pub use problems::{builtin, Problem, ProblemDef};
pub use sample::{error_norms, sample_initial_condition, ErrorNorms, Norms};
