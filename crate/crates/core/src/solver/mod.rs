//! Solving CNF instances with an external process or the built-in CDCL.

mod cdcl;
mod dimacs;
mod external;

use std::fmt;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::encoding::{CnfInstance, Model};

pub use dimacs::{dimacs_string, parse_dimacs, write_dimacs, DimacsError};
pub use external::{parse_output, solve_external};

/// Environment variable naming the external solver command.
pub const SOLVER_ENV: &str = "NONTERM_SAT_SOLVER";

pub const DEFAULT_SOLVER: &str = "kissat";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UnknownReason {
    Timeout,
    SolverError,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolverResult {
    Satisfiable(Model),
    Unsatisfiable,
    Unknown { reason: UnknownReason, detail: String },
}

impl SolverResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SolverResult::Satisfiable(_))
    }

    pub fn is_unsat(&self) -> bool {
        matches!(self, SolverResult::Unsatisfiable)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SolverError {
    #[error("cannot run solver `{command}`: {message}")]
    Spawn { command: String, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolverChoice {
    /// A command line; the CNF path is appended.
    External(String),
    /// The built-in CDCL solver with an optional conflict limit.
    Builtin { conflict_limit: Option<u64> },
}

impl SolverChoice {
    /// `$NONTERM_SAT_SOLVER`, or `kissat`.
    pub fn from_env() -> Self {
        let command = std::env::var(SOLVER_ENV)
            .ok()
            .filter(|s| !s.trim().is_empty())
            .unwrap_or_else(|| DEFAULT_SOLVER.to_string());
        SolverChoice::External(command)
    }

    pub fn builtin() -> Self {
        SolverChoice::Builtin { conflict_limit: None }
    }
}

impl Default for SolverChoice {
    fn default() -> Self {
        SolverChoice::from_env()
    }
}

impl fmt::Display for SolverChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolverChoice::External(cmd) => f.write_str(cmd),
            SolverChoice::Builtin { .. } => f.write_str("builtin"),
        }
    }
}

/// Complete CDCL search; `Unknown(timeout)` once `conflict_limit` conflicts
/// have been analysed.
pub fn solve_builtin(instance: &CnfInstance, conflict_limit: Option<u64>) -> SolverResult {
    solve_builtin_until(instance, conflict_limit, None)
}

pub fn solve_builtin_until(
    instance: &CnfInstance,
    conflict_limit: Option<u64>,
    deadline: Option<Instant>,
) -> SolverResult {
    match cdcl::solve(instance, conflict_limit, deadline) {
        cdcl::Outcome::Sat(values) => SolverResult::Satisfiable(cdcl::model(values)),
        cdcl::Outcome::Unsat => SolverResult::Unsatisfiable,
        cdcl::Outcome::Limit(why) => SolverResult::Unknown {
            reason: UnknownReason::Timeout,
            detail: why.to_string(),
        },
    }
}

pub fn solve(
    instance: &CnfInstance,
    choice: &SolverChoice,
    timeout: Option<Duration>,
) -> Result<SolverResult, SolverError> {
    match choice {
        SolverChoice::External(cmd) => solve_external(instance, cmd, timeout),
        SolverChoice::Builtin { conflict_limit } => Ok(solve_builtin_until(
            instance,
            *conflict_limit,
            timeout.map(|t| Instant::now() + t),
        )),
    }
}
