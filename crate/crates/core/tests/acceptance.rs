//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails. Runs without the libtest harness so the lines are
//! always shown; pass `--include-slow` (or set `NONTERM_ACCEPTANCE_SLOW=1`)
//! to add the nine-state Phi2 search.

mod common;

use std::time::{Duration, Instant};

use common::{
    all_terms, backend_agreement, closure_sampling_cases, external_solver, fixture, oracle_audit,
    sink_absorption_cases, Table, FIXTURES,
};
use nonterm::automata::{smallest_accepted_term, tda_to_tdas, verify_tda, verify_tdas};
use nonterm::encoding::{check_witness, cnf_stats, decode_automaton, encode, encoding_order, Method};
use nonterm::search::{disprove, lookup, SearchOptions, SearchOutcome, SearchStatus, StepResult};
use nonterm::solver::{solve, SolverChoice, SolverResult};
use nonterm::terms::CombinatorRule;

/// Per-fixture verification budget.
const VERIFY_BUDGET: Duration = Duration::from_secs(5);
/// Search budgets per combinator.
const SEARCH_BUDGET: Duration = Duration::from_secs(600);
const SEVEN_STATE_BUDGET: Duration = Duration::from_secs(3600);
const NEGATIVE_BUDGET: Duration = Duration::from_secs(1800);
/// The P/N=4 encoding must be within this factor of 7,116 vars / 33,543
/// clauses.
const SIZE_FACTOR: f64 = 10.0;
const VALIDATE_STEPS: usize = 50;

struct Suite {
    failed: Vec<String>,
}

impl Suite {
    fn record(&mut self, id: &str, what: &str, result: Result<String, String>) {
        match result {
            Ok(detail) => println!("PASS  {id:<3} {what}: {detail}"),
            Err(detail) => {
                println!("FAIL  {id:<3} {what}: {detail}");
                self.failed.push(id.to_string());
            }
        }
    }
}

fn rule(name: &str) -> CombinatorRule {
    lookup(name).expect("corpus entry").parse()
}

fn options(solver: &SolverChoice, method: Method, max_states: usize, budget: Duration) -> SearchOptions {
    SearchOptions {
        method,
        max_states,
        total_timeout: Some(budget),
        solver: solver.clone(),
        validate_steps: VALIDATE_STEPS,
        ..SearchOptions::default()
    }
}

/// Disproved at exactly `expected`, every earlier N unsatisfiable and
/// tried, all within `budget`.
fn check_found(name: &str, o: &SearchOutcome, expected: usize, budget: Duration) -> Result<String, String> {
    let arity = rule(name).arity();
    if o.status != SearchStatus::Disproved {
        return Err(format!("{name}: status {} after {:.1} s", o.status, o.total_s));
    }
    if o.found_states != Some(expected) {
        return Err(format!(
            "{name}: found {:?} states, expected {expected}",
            o.found_states
        ));
    }
    let tried: Vec<usize> = o.per_n.iter().map(|l| l.n).collect();
    if tried != (arity + 1..=expected).collect::<Vec<_>>() {
        return Err(format!("{name}: tried N = {tried:?}"));
    }
    if o.per_n[..o.per_n.len() - 1]
        .iter()
        .any(|l| l.result != StepResult::Unsat)
    {
        return Err(format!("{name}: an intermediate N was not UNSAT"));
    }
    if o.total_s > budget.as_secs_f64() {
        return Err(format!("{name}: {:.1} s exceeds {:?}", o.total_s, budget));
    }
    Ok(format!("{name} N={expected} in {:.1} s", o.total_s))
}

fn main() {
    let slow = std::env::args().any(|a| a == "--include-slow")
        || std::env::var("NONTERM_ACCEPTANCE_SLOW").is_ok_and(|v| v == "1");
    let mut suite = Suite { failed: Vec::new() };
    let external = external_solver();
    let no_solver = || Err("no external SAT solver runs (set NONTERM_SAT_SOLVER)".to_string());

    // 1: reference automata
    let mut details = Vec::new();
    let mut result = Ok(());
    for name in FIXTURES {
        let (rule, a) = fixture(name);
        let t = Instant::now();
        let report = verify_tdas(&a, &rule);
        let elapsed = t.elapsed();
        if !report.passed() {
            result = Err(format!("{name} rejected:\n{report}"));
            break;
        }
        if elapsed > VERIFY_BUDGET {
            result = Err(format!("{name} took {elapsed:.2?}"));
            break;
        }
        details.push(format!("{name} {:.0?}", elapsed));
    }
    suite.record(
        "1",
        "reference automata are sink-final automata (< 5 s each)",
        result.map(|_| details.join(", ")),
    );

    // 2: state counts, 3: soundness, 7: model audit
    let mut found: Vec<(String, SearchOutcome)> = Vec::new();
    match &external {
        None => suite.record("2", "state counts of the disproof search", no_solver()),
        Some(solver) => {
            let mut lines = Vec::new();
            let mut result = Ok(());
            let plan = [
                ("P", 4, SEARCH_BUDGET),
                ("P3", 6, SEARCH_BUDGET),
                ("D1", 6, SEARCH_BUDGET),
                ("D2", 6, SEARCH_BUDGET),
                ("S2", 6, SEARCH_BUDGET),
                ("Phi", 7, SEVEN_STATE_BUDGET),
                ("S1", 7, SEVEN_STATE_BUDGET),
            ];
            for (name, expected, budget) in plan {
                let o = match disprove(&rule(name), &options(solver, Method::Tdas, expected, budget)) {
                    Ok(o) => o,
                    Err(e) => {
                        result = Err(format!("{name}: {e}"));
                        break;
                    }
                };
                let checked = check_found(name, &o, expected, budget);
                found.push((name.to_string(), o));
                match checked {
                    Ok(line) => lines.push(line),
                    Err(e) => {
                        result = Err(e);
                        break;
                    }
                }
            }
            suite.record(
                "2",
                "state counts of the disproof search (4, 6, 6, 6, 6, 7, 7)",
                result.map(|_| lines.join(", ")),
            );
        }
    }

    // 5: baseline
    match &external {
        None => suite.record("5", "baseline method and conversion", no_solver()),
        Some(solver) => {
            let p = rule("P");
            let result = disprove(&p, &options(solver, Method::TdaBaseline, 4, SEARCH_BUDGET))
                .map_err(|e| e.to_string())
                .and_then(|o| {
                    check_found("P", &o, 4, SEARCH_BUDGET)?;
                    let a = o.automaton.clone().ok_or("no automaton")?;
                    let tda = verify_tda(&a, &p);
                    if !tda.passed() {
                        return Err(format!("baseline automaton rejected:\n{tda}"));
                    }
                    let b = tda_to_tdas(&a, &p).map_err(|e| e.to_string())?;
                    let report = verify_tdas(&b, &p);
                    if !report.passed() || b.state_count() > 4 {
                        return Err(format!("converted automaton ({} states):\n{report}", b.state_count()));
                    }
                    let detail = format!(
                        "P N=4 ({} vars, {} clauses), converted to {} states",
                        o.per_n[0].vars,
                        o.per_n[0].clauses,
                        b.state_count()
                    );
                    found.push(("P baseline".into(), o));
                    Ok(detail)
                });
            suite.record("5", "baseline disproves P at N=4 and converts", result);
        }
    }

    // 3
    let result = if found.is_empty() {
        Err("no disproof outcomes to check".into())
    } else {
        found
            .iter()
            .try_for_each(|(name, o)| {
                let r = rule(name.split(' ').next().unwrap());
                let a = o.automaton.as_ref().ok_or(format!("{name}: no automaton"))?;
                let report = if o.method == Method::Tdas {
                    verify_tdas(a, &r)
                } else {
                    verify_tda(a, &r)
                };
                if !report.passed() {
                    return Err(format!("{name}: automaton rejected"));
                }
                match &o.validation {
                    Some(v) if v.steps == VALIDATE_STEPS => Ok(()),
                    other => Err(format!("{name}: validation {other:?}")),
                }
            })
            .map(|_| format!("{} outcomes, {VALIDATE_STEPS} innermost levels each", found.len()))
    };
    suite.record(
        "3",
        "every disproof verifies and its counterexample never normalizes",
        result,
    );

    // 4: smallest counterexample for P
    let result = (|| {
        let (p, a) = fixture("P");
        let table = Table::of(&a);
        let t = smallest_accepted_term(&a).ok_or("empty language")?;
        if t.leaf_count() != 8 || !table.accepts(&t) {
            return Err(format!(
                "smallest term {} has {} leaves",
                p.display_term(&t),
                t.leaf_count()
            ));
        }
        let mut checked = 0;
        for leaves in 1..=7 {
            for s in all_terms(leaves) {
                checked += 1;
                if table.accepts(&s) {
                    return Err(format!("{} is accepted", p.display_term(&s)));
                }
            }
        }
        Ok(format!(
            "{} (8 leaves); none of {checked} smaller terms accepted",
            p.display_term(&t)
        ))
    })();
    suite.record("4", "smallest counterexample for P", result);

    // 6: negative results
    match &external {
        None => suite.record("6", "no automaton for S3 and S4 up to 6 states", no_solver()),
        Some(solver) => {
            let mut lines = Vec::new();
            let mut result = Ok(());
            for name in ["S3", "S4"] {
                let r = rule(name);
                let o = match disprove(&r, &options(solver, Method::Tdas, 6, NEGATIVE_BUDGET)) {
                    Ok(o) => o,
                    Err(e) => {
                        result = Err(format!("{name}: {e}"));
                        break;
                    }
                };
                let tried: Vec<usize> = o.per_n.iter().map(|l| l.n).collect();
                if o.status != SearchStatus::ExhaustedUnsat || tried != (r.arity() + 1..=6).collect::<Vec<_>>() {
                    result = Err(format!("{name}: status {}, tried {tried:?}", o.status));
                    break;
                }
                if o.total_s > NEGATIVE_BUDGET.as_secs_f64() {
                    result = Err(format!("{name}: {:.1} s", o.total_s));
                    break;
                }
                lines.push(format!("{name} UNSAT for N={tried:?} in {:.1} s", o.total_s));
            }
            suite.record(
                "6",
                "no automaton for S3 and S4 up to 6 states",
                result.map(|_| lines.join(", ")),
            );
        }
    }

    // 7: library audit of every model, independent evaluator on fresh models
    let result = match &external {
        None => no_solver(),
        Some(_) if found.is_empty() => Err("no models to audit".into()),
        Some(solver) => (|| {
            let mut checked = 0;
            for (name, o) in &found {
                let audit = o.audit.as_ref().ok_or(format!("{name}: no audit"))?;
                if !audit.passed() {
                    return Err(format!("{name}: {audit}"));
                }
                checked += audit.checked;
            }
            let mut independent = 0;
            for (name, n, method) in [
                ("P", 4, Method::Tdas),
                ("P3", 6, Method::Tdas),
                ("P", 4, Method::TdaBaseline),
            ] {
                let r = rule(name);
                let inst = encode(&r, n, method).map_err(|e| e.to_string())?;
                let SolverResult::Satisfiable(model) =
                    solve(&inst, solver, Some(SEARCH_BUDGET)).map_err(|e| e.to_string())?
                else {
                    return Err(format!("{name} {method} N={n} not satisfiable"));
                };
                let a = decode_automaton(&inst, &model).map_err(|e| e.to_string())?;
                let (count, bad) = oracle_audit(&inst, &model, &a);
                if !bad.is_empty() {
                    return Err(format!("{name} {method}: {}", bad.join("; ")));
                }
                independent += count;
            }
            Ok(format!(
                "{checked} values audited over {} models; {independent} values against the independent evaluator",
                found.len()
            ))
        })(),
    };
    suite.record("7", "model values agree with recomputed semantics", result);

    // 8: encoding sizes
    let result = (|| {
        let stats = cnf_stats(&encode(&rule("P"), 4, Method::Tdas).map_err(|e| e.to_string())?);
        let within = |got: usize, target: f64| {
            let r = got as f64 / target;
            (1.0 / SIZE_FACTOR..=SIZE_FACTOR).contains(&r)
        };
        if !within(stats.variables, 7116.0) || !within(stats.clauses, 33543.0) {
            return Err(format!("P N=4: {} vars, {} clauses", stats.variables, stats.clauses));
        }
        let mut fewer = Vec::new();
        for e in nonterm::search::CORPUS {
            let r = e.parse();
            let n = r.arity() + 1;
            let ours = encode(&r, n, Method::Tdas)
                .map_err(|e| e.to_string())?
                .eval_variable_count();
            let base = encode(&r, n, Method::TdaBaseline)
                .map_err(|e| e.to_string())?
                .eval_variable_count();
            if ours >= base {
                return Err(format!("{} N={n}: {ours} vs {base} eval variables", e.name));
            }
            fewer.push(format!("{} {ours}<{base}", e.name));
        }
        Ok(format!(
            "P N=4 {} vars / {} clauses; eval variables at N=arity+1: {}",
            stats.variables,
            stats.clauses,
            fewer.join(", ")
        ))
    })();
    suite.record("8", "encoding size and eval variable counts", result);

    // 9: property suites
    let result = (|| {
        let absorbed = sink_absorption_cases(1000, 101)?;
        let successors = closure_sampling_cases(1000, 102)?;
        for name in FIXTURES {
            let (r, a) = fixture(name);
            let ordered = encoding_order(&a).ok_or(format!("{name}: no encoding order"))?;
            let report = check_witness(&r, &ordered, Method::Tdas).map_err(|e| e.to_string())?;
            if report.violated != 0 {
                return Err(format!("{name}: {} clauses violated", report.violated));
            }
        }
        let solver = external.as_ref().ok_or("no external SAT solver runs")?;
        let (sat, unsat) = backend_agreement(solver, 50_000)?;
        Ok(format!(
            "{absorbed} contexts, 1000 terms / {successors} successors, 8 pinned automata, {sat} SAT + {unsat} UNSAT instances agree"
        ))
    })();
    suite.record("9", "property suites", result);

    if slow {
        let result = match &external {
            None => no_solver(),
            Some(solver) => disprove(
                &rule("Phi2"),
                &options(solver, Method::Tdas, 9, Duration::from_secs(86_400)),
            )
            .map_err(|e| e.to_string())
            .and_then(|o| check_found("Phi2", &o, 9, Duration::from_secs(86_400))),
        };
        suite.record("2s", "Phi2 needs 9 states (slow)", result);
    } else {
        println!("SKIP  2s  Phi2 needs 9 states (slow): pass --include-slow to run");
    }

    if suite.failed.is_empty() {
        println!("acceptance: all criteria passed");
    } else {
        println!("acceptance: failed {}", suite.failed.join(", "));
        std::process::exit(1);
    }
}
