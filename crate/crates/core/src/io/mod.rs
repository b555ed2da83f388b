//! Instance files, command dispatch and reports.
//!
//! Exit statuses: 0 when every check passes, 1 when a check fails, 2 on
//! input errors.

mod num;
mod report;
mod run;
mod schema;

pub use num::{format_num, Num};
pub use report::{emit_report, render_text, Format, GridRow, Report, Section};
pub use run::{parse_grid_spec, run, Command, RunOptions};
pub use schema::{
    build, emit_instance, parse_instance, parse_instance_str, CertificateSpec, ConstraintSpec, FnRef, FunctionSpec,
    Instance, InstanceFile, PertSpec, PerturbationSpec, RiskFile, Scheme, SpaceSpec, DEFAULT_TOL,
};

use crate::error::Error;

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("cannot read {path}: {msg}")]
    Read { path: String, msg: String },
    #[error("line {line}, column {column}: {msg}")]
    Syntax { line: usize, column: usize, msg: String },
    #[error("{path}: {source}")]
    Field { path: String, source: Error },
    #[error("{0}")]
    Run(#[from] Error),
    #[error("{0}")]
    Usage(String),
}

impl IoError {
    pub const EXIT_CODE: i32 = 2;
}
