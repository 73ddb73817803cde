//! Line-oriented automaton files.
//!
//! ```text
//! # comment
//! states 4
//! final 4
//! sink 4              # adds A(4,q) -> 4 and A(q,4) -> 4 for every q
//! Z -> 1
//! A(1,1) -> 1|2
//! ```
//!
//! The leaf symbol may be written with any identifier (`Z`, `P`, ...);
//! serialization always uses `Z`.

use std::fmt::Write as _;

use super::{AutomatonError, State, StateSet, TreeAutomaton};

fn syntax(line: usize, message: impl Into<String>) -> AutomatonError {
    AutomatonError::Syntax {
        line,
        message: message.into(),
    }
}

fn parse_state(line: usize, text: &str) -> Result<State, AutomatonError> {
    text.trim()
        .parse::<State>()
        .map_err(|_| syntax(line, format!("expected a state number, found `{}`", text.trim())))
}

fn parse_targets(line: usize, text: &str) -> Result<Vec<State>, AutomatonError> {
    text.split(['|', ',']).map(|s| parse_state(line, s)).collect()
}

enum Item {
    Leaf(Vec<State>),
    App(State, State, Vec<State>),
    Sink(State),
}

pub fn parse_automaton(text: &str) -> Result<TreeAutomaton, AutomatonError> {
    let mut states = None;
    let mut finals = None;
    let mut items = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix("states ") {
            if states.is_some() {
                return Err(syntax(line, "duplicate `states` directive"));
            }
            states = Some(parse_state(line, rest)?);
        } else if let Some(rest) = content.strip_prefix("final ") {
            if finals.is_some() {
                return Err(syntax(line, "duplicate `final` directive"));
            }
            finals = Some((line, parse_targets(line, rest)?));
        } else if let Some(rest) = content.strip_prefix("sink ") {
            items.push((line, Item::Sink(parse_state(line, rest)?)));
        } else {
            let (lhs, rhs) = content
                .split_once("->")
                .ok_or_else(|| syntax(line, "expected `states`, `final`, `sink` or a rule"))?;
            let targets = parse_targets(line, rhs)?;
            let lhs = lhs.trim();
            if let Some(args) = lhs.strip_prefix("A(").and_then(|s| s.strip_suffix(')')) {
                let (a, b) = args
                    .split_once(',')
                    .ok_or_else(|| syntax(line, "application rule needs two argument states"))?;
                items.push((line, Item::App(parse_state(line, a)?, parse_state(line, b)?, targets)));
            } else if !lhs.is_empty() && lhs.chars().all(|c| c.is_alphanumeric() || c == '_') {
                items.push((line, Item::Leaf(targets)));
            } else {
                return Err(syntax(line, format!("malformed left-hand side `{lhs}`")));
            }
        }
    }
    let states = states.ok_or_else(|| syntax(0, "missing `states` directive"))?;
    let (final_line, finals) = finals.ok_or_else(|| syntax(0, "missing `final` directive"))?;
    if states == 0 {
        return Err(AutomatonError::InvalidInput(
            "automaton needs at least one state".into(),
        ));
    }
    let in_range = |q: State| {
        if q == 0 || q > states {
            Err(AutomatonError::StateOutOfRange { state: q, states })
        } else {
            Ok(q)
        }
    };
    let finals: StateSet = finals.into_iter().map(in_range).collect::<Result<_, _>>()?;
    if finals.is_empty() {
        return Err(syntax(final_line, "empty final set"));
    }
    let mut a = TreeAutomaton::new(states, finals)?;
    for (_, item) in items {
        match item {
            Item::Leaf(ts) => {
                for q in ts {
                    a.add_leaf(q)?;
                }
            }
            Item::App(q1, q2, ts) => {
                for q in ts {
                    a.add_app(q1, q2, q)?;
                }
            }
            Item::Sink(q) => a.add_sink_rules(q)?,
        }
    }
    Ok(a)
}

fn join(s: StateSet, sep: &str) -> String {
    s.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(sep)
}

/// Normal form of the file format: sink states are written as a `sink`
/// directive and their rules are omitted from the listing.
pub fn serialize_automaton(a: &TreeAutomaton) -> String {
    let mut out = String::new();
    let n = a.state_count();
    let _ = writeln!(out, "states {n}");
    let _ = writeln!(out, "final {}", join(a.finals(), ","));
    let sinks: StateSet = a.states().filter(|&q| a.is_sink(q)).collect();
    for q in sinks.iter() {
        let _ = writeln!(out, "sink {q}");
    }
    if !a.leaf_targets().is_empty() {
        let _ = writeln!(out, "Z -> {}", join(a.leaf_targets(), "|"));
    }
    for q1 in 1..=n {
        for q2 in 1..=n {
            if sinks.contains(q1) || sinks.contains(q2) {
                continue;
            }
            let ts = a.app_targets(q1, q2);
            if !ts.is_empty() {
                let _ = writeln!(out, "A({q1},{q2}) -> {}", join(ts, "|"));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::fixtures::A_P;

    #[test]
    fn parses_reference_listing() {
        let a = parse_automaton(A_P).unwrap();
        assert_eq!(a.state_count(), 4);
        assert_eq!(a.finals(), StateSet::singleton(4));
        assert!(a.is_sink(4));
        assert_eq!(a.leaf_targets(), StateSet::singleton(1));
        assert_eq!(a.app_targets(3, 3), StateSet::full(4));
        // 7 sink pairs plus the listed non-sink rules
        assert_eq!(a.rule_count(), 1 + 7 + 2 * 5 + 3 * 3 + 4);
    }

    #[test]
    fn round_trips_to_normal_form() {
        let a = parse_automaton(A_P).unwrap();
        let text = serialize_automaton(&a);
        assert_eq!(parse_automaton(&text).unwrap(), a);
        assert_eq!(serialize_automaton(&parse_automaton(&text).unwrap()), text);
        assert!(text.contains("sink 4\n"));
        assert!(text.contains("A(3,3) -> 1|2|3|4\n"));
    }

    #[test]
    fn one_state_universal_automaton() {
        let a = parse_automaton("states 1; final 1; sink 1; Z -> 1".replace("; ", "\n").as_str()).unwrap();
        assert_eq!(a.state_count(), 1);
        assert!(a.is_sink(1));
        assert_eq!(a.leaf_targets(), StateSet::singleton(1));
    }

    #[test]
    fn reports_errors() {
        assert!(matches!(
            parse_automaton("states 2\nfinal 3\n"),
            Err(AutomatonError::StateOutOfRange { state: 3, states: 2 })
        ));
        assert!(matches!(
            parse_automaton("states 2\nfinal 1\nA(1,3) -> 1\n"),
            Err(AutomatonError::StateOutOfRange { state: 3, .. })
        ));
        assert!(matches!(
            parse_automaton("states 2\nfinal 1\nA(1) -> 1\n"),
            Err(AutomatonError::Syntax { line: 3, .. })
        ));
        assert!(matches!(
            parse_automaton("final 1\n"),
            Err(AutomatonError::Syntax { .. })
        ));
        assert!(matches!(
            parse_automaton("states 2\nfinal 1\nZ -> x\n"),
            Err(AutomatonError::Syntax { line: 3, .. })
        ));
    }
}
