use std::io::{self, Read};
use std::process::{Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use super::dimacs::write_dimacs;
use super::{SolverError, SolverResult, UnknownReason};
use crate::encoding::{CnfInstance, Model};

/// Runs `command` (split on whitespace, the CNF path appended) and reads
/// SAT-competition output. Literals beyond the instance's variables are
/// ignored; variables missing from the `v` lines are false.
pub fn solve_external(
    instance: &CnfInstance,
    command: &str,
    timeout: Option<Duration>,
) -> Result<SolverResult, SolverError> {
    let mut parts = command.split_whitespace();
    let program = parts.next().ok_or_else(|| SolverError::Spawn {
        command: command.to_string(),
        message: "empty solver command".into(),
    })?;
    let mut file = tempfile::Builder::new().prefix("nonterm-").suffix(".cnf").tempfile()?;
    write_dimacs(instance, file.as_file_mut())?;
    let mut child = Command::new(program)
        .args(parts)
        .arg(file.path())
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .map_err(|e| SolverError::Spawn {
            command: command.to_string(),
            message: e.to_string(),
        })?;
    let mut stdout = child.stdout.take().expect("piped stdout");
    let reader = thread::spawn(move || {
        let mut out = String::new();
        stdout.read_to_string(&mut out).map(|_| out)
    });
    let deadline = timeout.map(|t| Instant::now() + t);
    let status = loop {
        if let Some(status) = child.try_wait()? {
            break Some(status);
        }
        if deadline.is_some_and(|d| Instant::now() >= d) {
            let _ = child.kill();
            let _ = child.wait();
            break None;
        }
        thread::sleep(Duration::from_millis(5));
    };
    let output = reader
        .join()
        .map_err(|_| io::Error::other("solver output reader panicked"))??;
    drop(file);
    let Some(status) = status else {
        return Ok(SolverResult::Unknown {
            reason: UnknownReason::Timeout,
            detail: format!("killed after {:?}", timeout.unwrap_or_default()),
        });
    };
    Ok(parse_output(&output, status.code(), instance.variables()))
}

/// Interprets solver output and exit code.
pub fn parse_output(output: &str, exit_code: Option<i32>, variables: usize) -> SolverResult {
    let error = |detail: String| SolverResult::Unknown {
        reason: UnknownReason::SolverError,
        detail,
    };
    let mut status = None;
    let mut trues = Vec::new();
    for line in output.lines() {
        let line = line.trim();
        if let Some(s) = line.strip_prefix("s ") {
            status = Some(s.trim().to_string());
        } else if let Some(v) = line.strip_prefix("v ") {
            for tok in v.split_whitespace() {
                match tok.parse::<i64>() {
                    Ok(l) if l > 0 => trues.push(l as usize),
                    Ok(_) => {}
                    Err(_) => return error(format!("bad value token `{tok}`")),
                }
            }
        }
    }
    let by_code = match exit_code {
        Some(10) => Some("SATISFIABLE"),
        Some(20) => Some("UNSATISFIABLE"),
        _ => None,
    };
    let verdict = match (status.as_deref(), by_code) {
        (Some(s), Some(c)) if s != c => return error(format!("status line `{s}` contradicts exit code")),
        (Some(s), _) => s.to_string(),
        (None, Some(c)) => c.to_string(),
        (None, None) => return error(format!("no status line (exit code {exit_code:?})")),
    };
    match verdict.as_str() {
        "SATISFIABLE" => SolverResult::Satisfiable(Model::from_true_vars(variables, trues)),
        "UNSATISFIABLE" => SolverResult::Unsatisfiable,
        "UNKNOWN" => SolverResult::Unknown {
            reason: UnknownReason::SolverError,
            detail: "solver answered UNKNOWN".into(),
        },
        other => error(format!("unexpected status `{other}`")),
    }
}
