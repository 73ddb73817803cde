use crate::terms::{parse_rule, CombinatorRule, TermError};

/// A combinator of the built-in corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CorpusEntry {
    pub name: &'static str,
    pub aliases: &'static [&'static str],
    pub rule: &'static str,
    /// Smallest number of TDAS states known to disprove termination, or
    /// `None` when no TDAS with at most 9 states exists.
    pub known_states: Option<usize>,
    /// Excluded from corpus runs unless slow entries are requested.
    pub slow: bool,
}

impl CorpusEntry {
    pub fn parse(&self) -> CombinatorRule {
        parse_rule(self.rule).expect("corpus rules are valid")
    }
}

pub const CORPUS: &[CorpusEntry] = &[
    CorpusEntry {
        name: "P",
        aliases: &[],
        rule: "P x y z -> z (x y z)",
        known_states: Some(4),
        slow: false,
    },
    CorpusEntry {
        name: "P3",
        aliases: &[],
        rule: "P3 x y z -> y (x z y)",
        known_states: Some(6),
        slow: false,
    },
    CorpusEntry {
        name: "D1",
        aliases: &[],
        rule: "D1 x y z w -> x z (y w) (x z)",
        known_states: Some(6),
        slow: false,
    },
    CorpusEntry {
        name: "D2",
        aliases: &[],
        rule: "D2 x y z w -> x w (y z) (x w)",
        known_states: Some(6),
        slow: false,
    },
    CorpusEntry {
        name: "Phi",
        aliases: &["Φ"],
        rule: "Phi x y z w -> x (y w) (z w)",
        known_states: Some(7),
        slow: false,
    },
    CorpusEntry {
        name: "Phi2",
        aliases: &["Φ2", "Φ_2"],
        rule: "Phi2 x y z w1 w2 -> x (y w1 w2) (z w1 w2)",
        known_states: Some(9),
        slow: true,
    },
    CorpusEntry {
        name: "S1",
        aliases: &[],
        rule: "S1 x y z w -> x y w (z w)",
        known_states: Some(7),
        slow: false,
    },
    CorpusEntry {
        name: "S2",
        aliases: &[],
        rule: "S2 x y z w -> x z w (y z w)",
        known_states: Some(6),
        slow: false,
    },
    CorpusEntry {
        name: "S3",
        aliases: &[],
        rule: "S3 x y z w v -> x y (z v) (w v)",
        known_states: None,
        slow: false,
    },
    CorpusEntry {
        name: "S4",
        aliases: &[],
        rule: "S4 x y z w v -> z (x w v) (y w v)",
        known_states: None,
        slow: false,
    },
];

/// Looks a combinator up by name or alias, case-sensitively.
pub fn lookup(name: &str) -> Option<&'static CorpusEntry> {
    let name = name.trim();
    CORPUS.iter().find(|e| e.name == name || e.aliases.contains(&name))
}

/// A registered name, or a full rule string.
pub fn resolve_rule(text: &str) -> Result<CombinatorRule, TermError> {
    match lookup(text) {
        Some(entry) => Ok(entry.parse()),
        None => parse_rule(text),
    }
}
