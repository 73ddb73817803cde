//! The iterative disproof driver: encode, solve and verify for growing state
//! counts until an automaton is found.

mod corpus;
mod validate;

use std::fmt::{self, Write as _};
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::thread;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::automata::{smallest_accepted_term, verify_tda, verify_tdas, TreeAutomaton, VerificationReport};
use crate::encoding::{audit_model, decode_automaton, encode, AuditReport, EncodingError, Method};
use crate::solver::{solve, write_dimacs, SolverChoice, SolverError, SolverResult, UnknownReason};
use crate::terms::CombinatorRule;

pub use corpus::{lookup, resolve_rule, CorpusEntry, CORPUS};
pub use validate::{validate_counterexample, ValidationFailure, ValidationReport};

#[derive(Debug, Clone)]
pub struct SearchOptions {
    pub method: Method,
    /// Largest state count tried.
    pub max_states: usize,
    pub per_n_timeout: Option<Duration>,
    pub total_timeout: Option<Duration>,
    pub solver: SolverChoice,
    /// Depth and width of the reduction check on the extracted term.
    pub validate_steps: usize,
    pub validate_breadth: usize,
    /// Directory receiving `<rule>-<method>-n<N>.cnf` and `.map` files.
    pub emit_cnf: Option<PathBuf>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            method: Method::Tdas,
            max_states: 7,
            per_n_timeout: None,
            total_timeout: None,
            solver: SolverChoice::default(),
            validate_steps: 50,
            validate_breadth: 100,
            emit_cnf: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchStatus {
    /// A verified automaton was found.
    Disproved,
    /// Every state count up to the maximum is unsatisfiable.
    ExhaustedUnsat,
    /// A time budget ran out, or the solver gave no answer.
    Timeout,
}

impl SearchStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SearchStatus::Disproved => "disproved",
            SearchStatus::ExhaustedUnsat => "exhausted_unsat",
            SearchStatus::Timeout => "timeout",
        }
    }
}

impl fmt::Display for SearchStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StepResult {
    Sat,
    Unsat,
    Timeout,
    SolverError,
}

impl StepResult {
    pub fn as_str(self) -> &'static str {
        match self {
            StepResult::Sat => "sat",
            StepResult::Unsat => "unsat",
            StepResult::Timeout => "timeout",
            StepResult::SolverError => "solver_error",
        }
    }
}

/// One solver call.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepLog {
    pub n: usize,
    pub result: StepResult,
    pub vars: usize,
    pub clauses: usize,
    pub encode_s: f64,
    pub solve_s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchOutcome {
    pub rule: String,
    pub method: Method,
    pub status: SearchStatus,
    pub found_states: Option<usize>,
    /// Printed smallest accepted term.
    pub counterexample: Option<String>,
    pub automaton: Option<TreeAutomaton>,
    pub verification: Option<VerificationReport>,
    pub audit: Option<AuditReport>,
    pub validation: Option<ValidationReport>,
    pub per_n: Vec<StepLog>,
    pub total_s: f64,
}

#[derive(Debug, thiserror::Error)]
pub enum SearchError {
    #[error("invalid search options: {0}")]
    InvalidOptions(String),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("cannot write CNF: {0}")]
    Io(#[from] io::Error),
    /// A satisfying assignment did not yield a valid automaton. This is a
    /// bug in the encoding, the decoder or the solver.
    #[error("internal error at N = {n}: {message}")]
    Internal {
        n: usize,
        message: String,
        automaton: Option<Box<TreeAutomaton>>,
    },
}

/// The smallest useful state count: an accepted redex has left depth at
/// least the arity, and the states along its left spine are distinct.
pub fn min_states(rule: &CombinatorRule) -> usize {
    rule.arity() + 1
}

/// Tries N = arity + 1, arity + 2, ... up to `max_states` and stops at the
/// first satisfiable encoding. Every decoded automaton is verified, audited against the model,
/// and its smallest accepted term is checked to reduce without reaching a
/// normal form.
pub fn disprove(rule: &CombinatorRule, options: &SearchOptions) -> Result<SearchOutcome, SearchError> {
    let start = Instant::now();
    if options.max_states < min_states(rule) {
        return Err(SearchError::InvalidOptions(format!(
            "{} needs at least {} states",
            rule.name(),
            min_states(rule)
        )));
    }
    if options.validate_breadth == 0 {
        return Err(SearchError::InvalidOptions(
            "validation breadth must be positive".into(),
        ));
    }
    if let Some(dir) = &options.emit_cnf {
        fs::create_dir_all(dir)?;
    }
    let deadline = options.total_timeout.map(|t| start + t);
    let mut outcome = SearchOutcome {
        rule: rule.to_string(),
        method: options.method,
        status: SearchStatus::ExhaustedUnsat,
        found_states: None,
        counterexample: None,
        automaton: None,
        verification: None,
        audit: None,
        validation: None,
        per_n: Vec::new(),
        total_s: 0.0,
    };
    for n in min_states(rule)..=options.max_states {
        let remaining = deadline.map(|d| d.saturating_duration_since(Instant::now()));
        if remaining == Some(Duration::ZERO) {
            outcome.status = SearchStatus::Timeout;
            break;
        }
        let timeout = match (remaining, options.per_n_timeout) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };

        let t0 = Instant::now();
        let instance = encode(rule, n, options.method).map_err(|e| internal(n, e.to_string(), None))?;
        let encode_s = t0.elapsed().as_secs_f64();
        if let Some(dir) = &options.emit_cnf {
            let stem = format!("{}-{}-n{}", file_stem(rule.name()), options.method, n);
            let mut cnf = BufWriter::new(File::create(dir.join(format!("{stem}.cnf")))?);
            write_dimacs(&instance, &mut cnf)?;
            cnf.flush()?;
            let mut map = BufWriter::new(File::create(dir.join(format!("{stem}.map")))?);
            instance.write_variable_map(&mut map)?;
            map.flush()?;
        }

        let t1 = Instant::now();
        let result = solve(&instance, &options.solver, timeout)?;
        let solve_s = t1.elapsed().as_secs_f64();
        let mut log = StepLog {
            n,
            result: StepResult::Unsat,
            vars: instance.variables(),
            clauses: instance.clause_count(),
            encode_s,
            solve_s,
            detail: None,
        };
        match result {
            SolverResult::Unsatisfiable => outcome.per_n.push(log),
            SolverResult::Unknown { reason, detail } => {
                log.result = match reason {
                    UnknownReason::Timeout => StepResult::Timeout,
                    UnknownReason::SolverError => StepResult::SolverError,
                };
                log.detail = Some(detail);
                outcome.per_n.push(log);
                outcome.status = SearchStatus::Timeout;
                break;
            }
            SolverResult::Satisfiable(model) => {
                log.result = StepResult::Sat;
                outcome.per_n.push(log);
                let automaton = decode_automaton(&instance, &model).map_err(|e| match e {
                    EncodingError::ModelInconsistent(m) => internal(n, format!("solver model rejected: {m}"), None),
                    other => internal(n, other.to_string(), None),
                })?;
                let report = match options.method {
                    Method::Tdas => verify_tdas(&automaton, rule),
                    Method::TdaBaseline => verify_tda(&automaton, rule),
                };
                if !report.passed() {
                    let message = format!("decoded automaton fails verification\n{report}");
                    return Err(internal(n, message, Some(automaton)));
                }
                let audit = audit_model(&instance, &model, &automaton);
                if !audit.passed() {
                    let message = format!("model disagrees with automaton semantics\n{audit}");
                    return Err(internal(n, message, Some(automaton)));
                }
                let Some(term) = smallest_accepted_term(&automaton) else {
                    return Err(internal(
                        n,
                        "verified automaton has an empty language".into(),
                        Some(automaton),
                    ));
                };
                let validation = validate_counterexample(
                    &term,
                    &automaton,
                    rule,
                    options.validate_steps,
                    options.validate_breadth,
                )
                .map_err(|e| internal(n, format!("counterexample check failed: {e}"), Some(automaton.clone())))?;
                outcome.status = SearchStatus::Disproved;
                outcome.found_states = Some(n);
                outcome.counterexample = Some(rule.display_term(&term).to_string());
                outcome.automaton = Some(automaton);
                outcome.verification = Some(report);
                outcome.audit = Some(audit);
                outcome.validation = Some(validation);
                break;
            }
        }
    }
    outcome.total_s = start.elapsed().as_secs_f64();
    Ok(outcome)
}

fn internal(n: usize, message: String, automaton: Option<TreeAutomaton>) -> SearchError {
    SearchError::Internal {
        n,
        message,
        automaton: automaton.map(Box::new),
    }
}

fn file_stem(name: &str) -> String {
    name.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '_' || c == '-' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

/// One line of a corpus run. `outcome` is `None` for skipped slow entries.
#[derive(Debug)]
pub struct CorpusRow {
    pub entry: &'static CorpusEntry,
    pub method: Method,
    pub outcome: Option<Result<SearchOutcome, SearchError>>,
}

/// Runs `disprove` for every entry and method on up to `jobs` threads.
/// Slow entries are skipped unless `include_slow`. Rows come back in input
/// order.
pub fn run_corpus(
    entries: &[&'static CorpusEntry],
    methods: &[Method],
    options: &SearchOptions,
    jobs: usize,
    include_slow: bool,
) -> Vec<CorpusRow> {
    let tasks: Vec<(&'static CorpusEntry, Method)> = entries
        .iter()
        .flat_map(|&e| methods.iter().map(move |&m| (e, m)))
        .collect();
    let run = |(entry, method): (&'static CorpusEntry, Method)| {
        let options = SearchOptions {
            method,
            ..options.clone()
        };
        let outcome = (include_slow || !entry.slow).then(|| disprove(&entry.parse(), &options));
        CorpusRow { entry, method, outcome }
    };
    let jobs = jobs.clamp(1, tasks.len().max(1));
    if jobs == 1 {
        return tasks.into_iter().map(run).collect();
    }
    let next = std::sync::atomic::AtomicUsize::new(0);
    let mut slots: Vec<Option<CorpusRow>> = (0..tasks.len()).map(|_| None).collect();
    let done = std::sync::Mutex::new(Vec::new());
    thread::scope(|s| {
        for _ in 0..jobs {
            s.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                let Some(&task) = tasks.get(i) else { break };
                let row = run(task);
                done.lock().expect("no poisoned lock").push((i, row));
            });
        }
    });
    for (i, row) in done.into_inner().expect("no poisoned lock") {
        slots[i] = Some(row);
    }
    slots.into_iter().map(|r| r.expect("every task ran")).collect()
}

/// A fixed-width table of corpus results.
pub fn render_table(rows: &[CorpusRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<6} {:<13} {:<16} {:>3} {:>5} {:>10} {:>11} {:>9}  counterexample",
        "rule", "method", "status", "|Q|", "known", "vars", "clauses", "time(s)"
    );
    for row in rows {
        let known = row.entry.known_states.map_or("-".to_string(), |k| k.to_string());
        match &row.outcome {
            None => {
                let _ = writeln!(
                    out,
                    "{:<6} {:<13} {:<16} {:>3} {:>5} {:>10} {:>11} {:>9}  -",
                    row.entry.name,
                    row.method.as_str(),
                    "skipped",
                    "-",
                    known,
                    "-",
                    "-",
                    "-"
                );
            }
            Some(Ok(o)) => {
                let last = o.per_n.last();
                let _ = writeln!(
                    out,
                    "{:<6} {:<13} {:<16} {:>3} {:>5} {:>10} {:>11} {:>9.2}  {}",
                    row.entry.name,
                    row.method.as_str(),
                    o.status.as_str(),
                    o.found_states.map_or("-".to_string(), |n| n.to_string()),
                    known,
                    last.map_or(0, |l| l.vars),
                    last.map_or(0, |l| l.clauses),
                    o.total_s,
                    o.counterexample.as_deref().unwrap_or("-"),
                );
            }
            Some(Err(e)) => {
                let first = e.to_string();
                let first = first.lines().next().unwrap_or("");
                let _ = writeln!(
                    out,
                    "{:<6} {:<13} {:<16} {:>3} {:>5} {:>10} {:>11} {:>9}  {}",
                    row.entry.name,
                    row.method.as_str(),
                    "error",
                    "-",
                    known,
                    "-",
                    "-",
                    "-",
                    first
                );
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terms::parse_rule;

    fn builtin(method: Method, max_states: usize) -> SearchOptions {
        SearchOptions {
            method,
            max_states,
            solver: SolverChoice::builtin(),
            ..SearchOptions::default()
        }
    }

    #[test]
    fn p_needs_four_states() {
        let rule = lookup("P").unwrap().parse();
        let o = disprove(&rule, &builtin(Method::Tdas, 6)).unwrap();
        assert_eq!(o.status, SearchStatus::Disproved);
        assert_eq!(o.found_states, Some(4));
        let ns: Vec<_> = o.per_n.iter().map(|l| (l.n, l.result)).collect();
        assert_eq!(ns, vec![(4, StepResult::Sat)]);
        assert!(o.verification.unwrap().passed());
        assert!(o.validation.unwrap().steps == 50);
    }

    #[test]
    fn terminating_rule_exhausts() {
        // every step shrinks the term
        let rule = parse_rule("I x -> x").unwrap();
        let o = disprove(&rule, &builtin(Method::Tdas, 4)).unwrap();
        assert_eq!(o.status, SearchStatus::ExhaustedUnsat);
        assert_eq!(o.per_n.len(), 3);
        assert!(o.automaton.is_none());
    }

    #[test]
    fn tiny_budget_times_out() {
        let rule = lookup("D1").unwrap().parse();
        let mut opts = builtin(Method::Tdas, 9);
        opts.total_timeout = Some(Duration::from_millis(1));
        let o = disprove(&rule, &opts).unwrap();
        assert_eq!(o.status, SearchStatus::Timeout);
    }

    #[test]
    fn rejects_bad_options() {
        let rule = lookup("P").unwrap().parse();
        assert!(matches!(
            disprove(&rule, &builtin(Method::Tdas, 3)),
            Err(SearchError::InvalidOptions(_))
        ));
    }

    #[test]
    fn emits_cnf_files() {
        let dir = tempfile::tempdir().unwrap();
        let rule = lookup("P").unwrap().parse();
        let mut opts = builtin(Method::Tdas, 4);
        opts.emit_cnf = Some(dir.path().to_path_buf());
        disprove(&rule, &opts).unwrap();
        let cnf = fs::read_to_string(dir.path().join("P-tdas-n4.cnf")).unwrap();
        assert!(cnf.starts_with("p cnf 7110 "));
        assert!(dir.path().join("P-tdas-n4.map").exists());
    }

    #[test]
    fn corpus_rows_keep_order() {
        let entries = [lookup("P").unwrap(), lookup("P").unwrap()];
        let rows = run_corpus(
            &entries,
            &[Method::Tdas, Method::TdaBaseline],
            &builtin(Method::Tdas, 4),
            2,
            false,
        );
        let got: Vec<_> = rows.iter().map(|r| r.method).collect();
        assert_eq!(
            got,
            vec![Method::Tdas, Method::TdaBaseline, Method::Tdas, Method::TdaBaseline]
        );
        for r in &rows {
            let o = r.outcome.as_ref().unwrap().as_ref().unwrap();
            assert_eq!(o.status, SearchStatus::Disproved);
        }
        let table = render_table(&rows);
        assert_eq!(table.lines().count(), 5);
    }

    #[test]
    fn slow_entries_are_skipped() {
        let rows = run_corpus(
            &[lookup("Phi2").unwrap()],
            &[Method::Tdas],
            &builtin(Method::Tdas, 9),
            1,
            false,
        );
        assert!(rows[0].outcome.is_none());
        assert!(render_table(&rows).contains("skipped"));
    }
}
