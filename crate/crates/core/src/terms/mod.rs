//! Terms over `{Z, A}`, combinator rules and reduction.

mod parse;
mod reduce;
mod rule;

use std::fmt;
use std::sync::Arc;

pub use parse::parse_term;
pub use reduce::{
    contract, innermost_successors, is_normal_form, is_redex, ldepth, rewrite_successors, spine_arguments,
};
pub use rule::{parse_rule, CombinatorRule};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TermError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("invalid rule: {0}")]
    InvalidRule(String),
}

/// A binary applicative term. `Comb` is the single combinator constant,
/// `Var(i)` is the rule variable `x{i+1}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Comb,
    Var(usize),
    App(Arc<Term>, Arc<Term>),
}

impl Term {
    pub fn app(left: Term, right: Term) -> Term {
        Term::App(Arc::new(left), Arc::new(right))
    }

    /// Left-nested application `head a1 a2 .. an`.
    pub fn apply_all<I: IntoIterator<Item = Term>>(head: Term, args: I) -> Term {
        args.into_iter().fold(head, Term::app)
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Comb => true,
            Term::Var(_) => false,
            Term::App(l, r) => l.is_ground() && r.is_ground(),
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            Term::Comb | Term::Var(_) => 1,
            Term::App(l, r) => l.leaf_count() + r.leaf_count(),
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            Term::Comb | Term::Var(_) => 1,
            Term::App(l, r) => 1 + l.node_count() + r.node_count(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Comb | Term::Var(_) => 0,
            Term::App(l, r) => 1 + l.depth().max(r.depth()),
        }
    }

    /// Variable indices occurring in the term, sorted and deduplicated.
    pub fn vars(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out.sort_unstable();
        out.dedup();
        out
    }

    fn collect_vars(&self, out: &mut Vec<usize>) {
        match self {
            Term::Comb => {}
            Term::Var(i) => out.push(*i),
            Term::App(l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
        }
    }

    /// Number of occurrences of variable `var`.
    pub fn occurrences(&self, var: usize) -> usize {
        match self {
            Term::Comb => 0,
            Term::Var(i) => usize::from(*i == var),
            Term::App(l, r) => l.occurrences(var) + r.occurrences(var),
        }
    }

    /// Replaces `Var(i)` by `args[i]`.
    ///
    /// Panics if a variable index is out of range for `args`.
    pub fn substitute(&self, args: &[Term]) -> Term {
        match self {
            Term::Comb => Term::Comb,
            Term::Var(i) => args[*i].clone(),
            Term::App(l, r) => Term::app(l.substitute(args), r.substitute(args)),
        }
    }

    /// Distinct subterms in post-order (children before parents).
    pub fn subterms(&self) -> Vec<Term> {
        let mut out = Vec::new();
        self.push_subterms(&mut out);
        out
    }

    pub(crate) fn push_subterms(&self, out: &mut Vec<Term>) {
        if let Term::App(l, r) = self {
            l.push_subterms(out);
            r.push_subterms(out);
        }
        if !out.contains(self) {
            out.push(self.clone());
        }
    }

    /// Pretty printer using `name` for the combinator and `x1, x2, ..` for
    /// variables.
    pub fn display<'a>(&'a self, name: &'a str) -> TermDisplay<'a> {
        TermDisplay {
            term: self,
            name,
            var_names: None,
        }
    }

    pub fn display_with<'a>(&'a self, name: &'a str, var_names: &'a [String]) -> TermDisplay<'a> {
        TermDisplay {
            term: self,
            name,
            var_names: Some(var_names),
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display("Z"))
    }
}

pub struct TermDisplay<'a> {
    term: &'a Term,
    name: &'a str,
    var_names: Option<&'a [String]>,
}

impl TermDisplay<'_> {
    fn write_leaf(&self, f: &mut fmt::Formatter<'_>, t: &Term) -> fmt::Result {
        match t {
            Term::Comb => f.write_str(self.name),
            Term::Var(i) => match self.var_names.and_then(|names| names.get(*i)) {
                Some(n) => f.write_str(n),
                None => write!(f, "x{}", i + 1),
            },
            Term::App(..) => unreachable!(),
        }
    }

    fn write_term(&self, f: &mut fmt::Formatter<'_>, t: &Term) -> fmt::Result {
        match t {
            Term::App(l, r) => {
                self.write_term(f, l)?;
                f.write_str(" ")?;
                if matches!(**r, Term::App(..)) {
                    f.write_str("(")?;
                    self.write_term(f, r)?;
                    f.write_str(")")
                } else {
                    self.write_leaf(f, r)
                }
            }
            leaf => self.write_leaf(f, leaf),
        }
    }
}

impl fmt::Display for TermDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_term(f, self.term)
    }
}
