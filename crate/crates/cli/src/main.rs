//! `nonterm`: disprove termination of a combinator, verify automata, and
//! trace reductions.
//!
//! Exit codes: 0 success (disproved, verified, ...), 1 exhausted or rejected,
//! 2 timeout, 64 usage, 65 bad input data, 66 missing file, 69 solver
//! unavailable, 70 internal error, 74 I/O error.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{ArgAction, Args, Parser, Subcommand};
use nonterm::automata::{parse_automaton, serialize_automaton, verify_tda, verify_tdas};
use nonterm::encoding::Method;
use nonterm::search::{self, render_table, resolve_rule, SearchError, SearchOptions, SearchStatus, CORPUS};
use nonterm::solver::SolverChoice;
use nonterm::terms::{
    innermost_successors, is_normal_form, is_redex, ldepth, parse_term, rewrite_successors, CombinatorRule,
};

const EX_USAGE: u8 = 64;
const EX_DATAERR: u8 = 65;
const EX_NOINPUT: u8 = 66;
const EX_UNAVAILABLE: u8 = 69;
const EX_SOFTWARE: u8 = 70;
const EX_IOERR: u8 = 74;

#[derive(Parser, Debug)]
#[command(
    name = "nonterm",
    version,
    about = "Disprove termination of sole combinatory calculi"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Search for a sink-final automaton proving non-termination.
    Disprove {
        /// A corpus name (P, P3, D1, ...) or a rule such as "P x y z -> z (x y z)".
        rule: String,
        #[command(flatten)]
        search: SearchArgs,
        /// Method: tdas, or tda-baseline (alias ez).
        #[arg(long, default_value = "tdas")]
        method: Method,
        /// Write <rule>-<method>-n<N>.cnf and .map files into this directory.
        #[arg(long, value_name = "DIR")]
        emit_cnf: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Check an automaton file against a rule.
    Verify {
        automaton: PathBuf,
        rule: String,
        /// Check the escape-to-final conditions instead of the sink ones.
        #[arg(long)]
        tda: bool,
        #[arg(long)]
        json: bool,
    },
    /// Print a reduction sequence.
    Reduce {
        term: String,
        /// Defaults to the corpus entry named by the head of the term.
        #[arg(long)]
        rule: Option<String>,
        #[arg(long, default_value_t = 20)]
        steps: usize,
        /// Contract only innermost redexes; `--innermost=false` allows any redex.
        #[arg(long, default_value_t = true, action = ArgAction::Set, num_args = 0..=1, default_missing_value = "true")]
        innermost: bool,
        #[arg(long)]
        json: bool,
    },
    /// Run the built-in combinator corpus.
    Corpus {
        #[command(flatten)]
        search: SearchArgs,
        /// tdas, tda-baseline (alias ez), or both.
        #[arg(long, default_value = "tdas")]
        method: String,
        /// Also run entries marked slow.
        #[arg(long)]
        include_slow: bool,
        /// Restrict to these names (comma separated).
        #[arg(long, value_delimiter = ',')]
        only: Vec<String>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        json: bool,
    },
    /// Parse a rule, and optionally a term, and describe them.
    Parse {
        rule: String,
        term: Option<String>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args, Debug)]
struct SearchArgs {
    #[arg(long, default_value_t = 7)]
    max_states: usize,
    /// Seconds per solver call.
    #[arg(long, value_name = "SECS")]
    per_n_timeout: Option<f64>,
    /// Seconds for the whole search (per combinator in a corpus run).
    #[arg(long, value_name = "SECS")]
    timeout: Option<f64>,
    /// External solver command; the CNF path is appended. Defaults to
    /// $NONTERM_SAT_SOLVER or kissat.
    #[arg(long, value_name = "CMD", conflicts_with = "builtin_solver")]
    solver: Option<String>,
    /// Use the built-in CDCL solver.
    #[arg(long)]
    builtin_solver: bool,
    /// Reduction steps checked on the extracted counterexample.
    #[arg(long, default_value_t = 50)]
    steps: usize,
}

/// A failure mapped to an exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EX_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("nonterm: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Disprove {
            rule,
            search,
            method,
            emit_cnf,
            json,
        } => cmd_disprove(&rule, &search, method, emit_cnf, json),
        Command::Verify {
            automaton,
            rule,
            tda,
            json,
        } => cmd_verify(&automaton, &rule, tda, json),
        Command::Reduce {
            term,
            rule,
            steps,
            innermost,
            json,
        } => cmd_reduce(&term, rule.as_deref(), steps, innermost, json),
        Command::Corpus {
            search,
            method,
            include_slow,
            only,
            jobs,
            json,
        } => cmd_corpus(&search, &method, include_slow, &only, jobs, json),
        Command::Parse { rule, term, json } => cmd_parse(&rule, term.as_deref(), json),
    }
}

fn rule_arg(text: &str) -> Result<CombinatorRule, Failure> {
    resolve_rule(text).map_err(|e| Failure::new(EX_DATAERR, format!("bad rule `{text}`: {e}")))
}

fn seconds(flag: &str, v: Option<f64>) -> Result<Option<Duration>, Failure> {
    match v {
        None => Ok(None),
        Some(s) if s.is_finite() && s > 0.0 => Ok(Some(Duration::from_secs_f64(s))),
        Some(s) => Err(Failure::new(
            EX_USAGE,
            format!("--{flag} must be a positive number of seconds, got {s}"),
        )),
    }
}

fn search_options(args: &SearchArgs, method: Method, emit_cnf: Option<PathBuf>) -> Result<SearchOptions, Failure> {
    let solver = if args.builtin_solver {
        SolverChoice::builtin()
    } else if let Some(cmd) = &args.solver {
        if cmd.trim().is_empty() {
            return Err(Failure::new(EX_USAGE, "--solver must not be empty"));
        }
        SolverChoice::External(cmd.clone())
    } else {
        SolverChoice::from_env()
    };
    Ok(SearchOptions {
        method,
        max_states: args.max_states,
        per_n_timeout: seconds("per-n-timeout", args.per_n_timeout)?,
        total_timeout: seconds("timeout", args.timeout)?,
        solver,
        validate_steps: args.steps,
        emit_cnf,
        ..SearchOptions::default()
    })
}

fn search_failure(e: SearchError) -> Failure {
    match e {
        SearchError::InvalidOptions(m) => Failure::new(EX_USAGE, m),
        SearchError::Solver(e) => Failure::new(EX_UNAVAILABLE, e.to_string()),
        SearchError::Io(e) => Failure::new(EX_IOERR, format!("cannot write CNF: {e}")),
        SearchError::Internal { n, message, automaton } => {
            let mut m = format!("internal error at N = {n}: {message}");
            if let Some(a) = automaton {
                let _ = write!(m, "\noffending automaton:\n{}", serialize_automaton(&a));
            }
            Failure::new(EX_SOFTWARE, m)
        }
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(v).map_err(|e| Failure::new(EX_SOFTWARE, format!("cannot serialize: {e}")))
}

fn status_code(status: SearchStatus) -> u8 {
    match status {
        SearchStatus::Disproved => 0,
        SearchStatus::ExhaustedUnsat => 1,
        SearchStatus::Timeout => 2,
    }
}

fn cmd_disprove(
    rule_text: &str,
    args: &SearchArgs,
    method: Method,
    emit_cnf: Option<PathBuf>,
    json: bool,
) -> Result<u8, Failure> {
    let rule = rule_arg(rule_text)?;
    let options = search_options(args, method, emit_cnf)?;
    let outcome = search::disprove(&rule, &options).map_err(search_failure)?;
    if json {
        println!("{}", to_json(&outcome)?);
        return Ok(status_code(outcome.status));
    }
    // Everything but the automaton is a comment, so the output is itself an
    // automaton file.
    let mut out = String::new();
    let _ = writeln!(out, "# rule: {}", outcome.rule);
    let _ = writeln!(out, "# method: {}  solver: {}", outcome.method, options.solver);
    let _ = writeln!(out, "#    N  result        vars     clauses  encode(s)   solve(s)");
    for l in &outcome.per_n {
        let _ = writeln!(
            out,
            "# {:>4}  {:<12} {:>8} {:>11} {:>10.3} {:>10.3}",
            l.n,
            l.result.as_str(),
            l.vars,
            l.clauses,
            l.encode_s,
            l.solve_s
        );
        if let Some(d) = &l.detail {
            let _ = writeln!(out, "#       {d}");
        }
    }
    match outcome.found_states {
        Some(n) => {
            let _ = writeln!(out, "# status: {} with {n} states", outcome.status);
        }
        None => {
            let _ = writeln!(out, "# status: {}", outcome.status);
        }
    }
    let _ = writeln!(out, "# total: {:.3} s", outcome.total_s);
    if let Some(term) = &outcome.counterexample {
        let _ = writeln!(out, "# counterexample: {term}");
    }
    if let Some(v) = &outcome.validation {
        let _ = writeln!(
            out,
            "# validated: {} innermost steps, {} terms, none normal",
            v.steps, v.visited
        );
    }
    if let Some(a) = &outcome.automaton {
        out.push_str(&serialize_automaton(a));
    }
    print!("{out}");
    Ok(status_code(outcome.status))
}

fn cmd_verify(path: &PathBuf, rule_text: &str, tda: bool, json: bool) -> Result<u8, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        let code = if e.kind() == std::io::ErrorKind::NotFound {
            EX_NOINPUT
        } else {
            EX_IOERR
        };
        Failure::new(code, format!("cannot read {}: {e}", path.display()))
    })?;
    let rule = rule_arg(rule_text)?;
    let a = parse_automaton(&text).map_err(|e| Failure::new(EX_DATAERR, format!("{}: {e}", path.display())))?;
    let report = if tda {
        verify_tda(&a, &rule)
    } else {
        verify_tdas(&a, &rule)
    };
    if json {
        println!("{}", to_json(&report)?);
    } else {
        print!("{report}");
        if !report.to_string().ends_with('\n') {
            println!();
        }
    }
    Ok(if report.passed() { 0 } else { 1 })
}

/// The leading identifier of a term, e.g. `P3` in `(P3 P3) P3`.
fn head_name(term: &str) -> &str {
    let s = term.trim_start_matches(|c: char| c == '(' || c.is_whitespace());
    let end = s
        .char_indices()
        .find(|&(_, c)| c == '(' || c == ')' || c.is_whitespace())
        .map_or(s.len(), |(i, _)| i);
    &s[..end]
}

fn cmd_reduce(
    term_text: &str,
    rule_text: Option<&str>,
    steps: usize,
    innermost: bool,
    json: bool,
) -> Result<u8, Failure> {
    let rule = match rule_text {
        Some(r) => rule_arg(r)?,
        None => {
            let name = head_name(term_text);
            search::lookup(name)
                .map(|e| e.parse())
                .ok_or_else(|| Failure::new(EX_USAGE, format!("`{name}` is not a corpus combinator; pass --rule")))?
        }
    };
    let mut t = parse_term(term_text, &rule).map_err(|e| Failure::new(EX_DATAERR, format!("bad term: {e}")))?;
    let mut trace = vec![rule.display_term(&t).to_string()];
    let mut normal = false;
    for _ in 0..steps {
        let next = if innermost {
            innermost_successors(&t, &rule)
        } else {
            rewrite_successors(&t, &rule)
        };
        match next.into_iter().next() {
            Some(s) => {
                t = s;
                trace.push(rule.display_term(&t).to_string());
            }
            None => {
                normal = true;
                break;
            }
        }
    }
    if !normal && is_normal_form(&t, &rule) {
        normal = true;
    }
    if json {
        let v = serde_json::json!({
            "rule": rule.to_string(),
            "innermost": innermost,
            "steps": trace.len() - 1,
            "normal_form": normal,
            "trace": trace,
        });
        println!("{}", to_json(&v)?);
    } else {
        for (i, s) in trace.iter().enumerate() {
            println!("{i:>4}  {s}");
        }
        let n = trace.len() - 1;
        let unit = if n == 1 { "step" } else { "steps" };
        if normal {
            println!("normal form after {n} {unit}");
        } else {
            println!("no normal form within {n} {unit}");
        }
    }
    Ok(0)
}

fn cmd_corpus(
    args: &SearchArgs,
    method: &str,
    include_slow: bool,
    only: &[String],
    jobs: usize,
    json: bool,
) -> Result<u8, Failure> {
    let methods = match method {
        "both" => vec![Method::Tdas, Method::TdaBaseline],
        m => vec![m.parse::<Method>().map_err(|e| Failure::new(EX_USAGE, e))?],
    };
    if jobs == 0 {
        return Err(Failure::new(EX_USAGE, "--jobs must be positive"));
    }
    let entries = if only.is_empty() {
        CORPUS.iter().collect::<Vec<_>>()
    } else {
        only.iter()
            .map(|n| search::lookup(n).ok_or_else(|| Failure::new(EX_USAGE, format!("unknown corpus entry `{n}`"))))
            .collect::<Result<Vec<_>, _>>()?
    };
    let options = search_options(args, methods[0], None)?;
    let rows = search::run_corpus(&entries, &methods, &options, jobs, include_slow);
    let mut code = 0;
    for row in &rows {
        if let Some(Err(e)) = &row.outcome {
            code = match e {
                SearchError::Solver(_) => EX_UNAVAILABLE,
                SearchError::Io(_) => EX_IOERR,
                SearchError::InvalidOptions(_) => EX_USAGE,
                SearchError::Internal { .. } => EX_SOFTWARE,
            }
            .max(code);
        }
    }
    if json {
        let v: Vec<_> = rows
            .iter()
            .map(|r| match &r.outcome {
                None => serde_json::json!({"name": r.entry.name, "method": r.method, "skipped": true}),
                Some(Ok(o)) => serde_json::json!({
                    "name": r.entry.name,
                    "method": r.method,
                    "skipped": false,
                    "known_states": r.entry.known_states,
                    "outcome": o,
                }),
                Some(Err(e)) => serde_json::json!({
                    "name": r.entry.name,
                    "method": r.method,
                    "skipped": false,
                    "error": e.to_string(),
                }),
            })
            .collect();
        println!("{}", to_json(&v)?);
    } else {
        print!("{}", render_table(&rows));
    }
    Ok(code)
}

fn cmd_parse(rule_text: &str, term_text: Option<&str>, json: bool) -> Result<u8, Failure> {
    let rule = rule_arg(rule_text)?;
    let term = match term_text {
        Some(t) => Some(parse_term(t, &rule).map_err(|e| Failure::new(EX_DATAERR, format!("bad term: {e}")))?),
        None => None,
    };
    if json {
        let mut v = serde_json::json!({
            "rule": rule.to_string(),
            "name": rule.name(),
            "arity": rule.arity(),
        });
        if let Some(t) = &term {
            v["term"] = rule.display_term(t).to_string().into();
            v["leaves"] = t.leaf_count().into();
            v["ldepth"] = ldepth(t).into();
            v["redex"] = is_redex(t, &rule).into();
            v["normal_form"] = is_normal_form(t, &rule).into();
        }
        println!("{}", to_json(&v)?);
    } else {
        println!("rule: {rule}");
        println!("arity: {}", rule.arity());
        if let Some(t) = &term {
            println!("term: {}", rule.display_term(t));
            println!("leaves: {}", t.leaf_count());
            println!("ldepth: {}", ldepth(t));
            println!("redex: {}", is_redex(t, &rule));
            println!("normal form: {}", is_normal_form(t, &rule));
        }
    }
    Ok(0)
}
