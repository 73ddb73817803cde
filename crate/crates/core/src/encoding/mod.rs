//! CNF encodings of "there is an N-state automaton disproving termination".
//!
//! [`encode_tdas`] asks for a TDAS whose final sink state is `N`;
//! [`encode_tda_baseline`] asks for a TDA with final set `{N}` and no sink
//! requirement, with substitutions ranging over all states. Both share the
//! variable layout described in the `layout` submodule and clausify through
//! [`builder`] so that the same constraint code can also check a candidate
//! assignment without materializing the instance.

mod builder;
mod decode;
mod formulas;
mod layout;

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::automata::{State, MAX_STATES};
use crate::terms::{CombinatorRule, Term};

pub use builder::CheckReport;
pub use decode::{audit_model, check_witness, decode_automaton, encoding_order, witness_assignment, AuditReport};

use builder::Builder;
use layout::Layout;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "tdas")]
    Tdas,
    #[serde(rename = "tda-baseline")]
    TdaBaseline,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Tdas => "tdas",
            Method::TdaBaseline => "tda-baseline",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tdas" => Ok(Method::Tdas),
            "tda-baseline" | "tda" | "baseline" | "ez" => Ok(Method::TdaBaseline),
            _ => Err(format!("unknown method `{s}` (expected tdas or tda-baseline)")),
        }
    }
}

/// Meaning of a CNF variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EncodingVariable {
    /// `Z -> q`.
    TransLeaf { q: State },
    /// `A(q1, q2) -> q`.
    TransApp { q1: State, q2: State, q: State },
    /// `minld(q) = m` (for `m >= 1`; `m = 0` shares `TransLeaf(q)`).
    MinLd { q: State, m: usize },
    /// Every term of `L(A, q)` contains a redex.
    Redex { q: State },
    /// `tα ⇒* q`, with `alpha` listing `(variable, state)` pairs.
    Eval {
        term: Term,
        alpha: Vec<(usize, State)>,
        q: State,
    },
    /// A term of left depth `d` reaches `q` without passing a redex
    /// (baseline only).
    ProductReach { q: State, d: usize },
    /// Tseitin auxiliary, numbered from 0 in order of creation.
    Aux(usize),
}

impl EncodingVariable {
    /// Human-readable form with the rule's variable names.
    pub fn describe(&self, rule: &CombinatorRule) -> String {
        match self {
            EncodingVariable::TransLeaf { q } => format!("Z -> {q}"),
            EncodingVariable::TransApp { q1, q2, q } => format!("A({q1},{q2}) -> {q}"),
            EncodingVariable::MinLd { q, m } => format!("minld({q}) = {m}"),
            EncodingVariable::Redex { q } => format!("redex({q})"),
            EncodingVariable::Eval { term, alpha, q } => {
                let names = rule.var_names();
                let subst: Vec<String> = alpha.iter().map(|(x, s)| format!("{}={s}", names[*x])).collect();
                format!(
                    "eval({}, [{}], {q})",
                    term.display_with(rule.name(), names),
                    subst.join(",")
                )
            }
            EncodingVariable::ProductReach { q, d } => format!("nf({q},{d})"),
            EncodingVariable::Aux(i) => format!("aux{i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EncodingError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("model inconsistent with instance: {0}")]
    ModelInconsistent(String),
}

/// A total assignment; `value(v)` for `v in 1..=V`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    values: Vec<bool>,
}

impl Model {
    /// `values[0]` is ignored.
    pub fn from_values(values: Vec<bool>) -> Self {
        Model { values }
    }

    /// From the true literals; every other variable up to `vars` is false.
    pub fn from_true_vars(vars: usize, trues: impl IntoIterator<Item = usize>) -> Self {
        let mut values = vec![false; vars + 1];
        for v in trues {
            if v <= vars {
                values[v] = true;
            }
        }
        Model { values }
    }

    pub fn variables(&self) -> usize {
        self.values.len().saturating_sub(1)
    }

    pub fn value(&self, v: usize) -> bool {
        self.values[v]
    }

    pub fn lit(&self, lit: i32) -> bool {
        self.values[lit.unsigned_abs() as usize] == (lit > 0)
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }
}

/// What an instance encodes.
#[derive(Debug, Clone)]
pub struct EncodingInfo {
    pub rule: CombinatorRule,
    pub states: usize,
    pub method: Method,
    layout: Layout,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct CnfStats {
    pub variables: usize,
    pub clauses: usize,
}

/// A clause database with an optional variable map.
#[derive(Debug, Clone)]
pub struct CnfInstance {
    variables: usize,
    lits: Vec<i32>,
    starts: Vec<usize>,
    info: Option<Arc<EncodingInfo>>,
}

impl CnfInstance {
    pub fn new(variables: usize) -> Self {
        CnfInstance {
            variables,
            lits: Vec::new(),
            starts: vec![0],
            info: None,
        }
    }

    /// A plain instance; the variable count is the largest literal.
    pub fn from_clauses<I, C>(clauses: I) -> Self
    where
        I: IntoIterator<Item = C>,
        C: AsRef<[i32]>,
    {
        let mut inst = CnfInstance::new(0);
        for c in clauses {
            inst.add_clause(c.as_ref());
        }
        inst
    }

    pub fn add_clause(&mut self, clause: &[i32]) {
        debug_assert!(clause.iter().all(|&l| l != 0));
        for &l in clause {
            self.variables = self.variables.max(l.unsigned_abs() as usize);
        }
        self.lits.extend_from_slice(clause);
        self.starts.push(self.lits.len());
    }

    pub fn variables(&self) -> usize {
        self.variables
    }

    pub fn clause_count(&self) -> usize {
        self.starts.len() - 1
    }

    pub fn clause(&self, i: usize) -> &[i32] {
        &self.lits[self.starts[i]..self.starts[i + 1]]
    }

    pub fn clauses(&self) -> impl Iterator<Item = &[i32]> + '_ {
        self.starts.windows(2).map(|w| &self.lits[w[0]..w[1]])
    }

    pub fn literal_count(&self) -> usize {
        self.lits.len()
    }

    pub fn info(&self) -> Option<&EncodingInfo> {
        self.info.as_deref()
    }

    /// Meaning of variable `v`, if this is an encoding instance.
    pub fn variable(&self, v: usize) -> Option<EncodingVariable> {
        let info = self.info()?;
        (v >= 1 && v <= self.variables).then(|| info.layout.describe(v))
    }

    /// Index of `Z -> q` / `A(q1,q2) -> q`, for pinning transitions.
    pub fn trans_leaf_var(&self, q: State) -> Option<i32> {
        self.info().map(|i| i.layout.trans_leaf(q))
    }

    pub fn trans_app_var(&self, q1: State, q2: State, q: State) -> Option<i32> {
        self.info().map(|i| i.layout.trans_app(q1, q2, q))
    }

    /// Number of `Eval` variables with their own index.
    pub fn eval_variable_count(&self) -> usize {
        self.info().map_or(0, |i| i.layout.eval_variable_count())
    }

    pub fn satisfied_by(&self, model: &Model) -> bool {
        self.first_violated(model).is_none()
    }

    /// Index of the first clause the model falsifies.
    pub fn first_violated(&self, model: &Model) -> Option<usize> {
        self.clauses().position(|c| !c.iter().any(|&l| model.lit(l)))
    }

    /// Writes `index<TAB>description` for every variable.
    pub fn write_variable_map(&self, out: &mut dyn Write) -> io::Result<()> {
        let mut out = io::BufWriter::new(out);
        if let Some(info) = self.info() {
            for v in 1..=self.variables {
                writeln!(out, "{v}\t{}", info.layout.describe(v).describe(&info.rule))?;
            }
        }
        out.flush()
    }
}

pub fn cnf_stats(instance: &CnfInstance) -> CnfStats {
    CnfStats {
        variables: instance.variables(),
        clauses: instance.clause_count(),
    }
}

fn check_size(rule: &CombinatorRule, n: usize) -> Result<(), EncodingError> {
    if n < rule.arity() + 1 {
        return Err(EncodingError::InvalidInput(format!(
            "{} needs at least {} states, got {n}",
            rule.name(),
            rule.arity() + 1
        )));
    }
    if n > MAX_STATES {
        return Err(EncodingError::InvalidInput(format!(
            "at most {MAX_STATES} states supported"
        )));
    }
    Ok(())
}

pub fn encode(rule: &CombinatorRule, n: usize, method: Method) -> Result<CnfInstance, EncodingError> {
    check_size(rule, n)?;
    let layout = Layout::new(rule, n, method);
    let mut b = Builder::collect(layout.structural());
    formulas::emit(rule, &layout, &mut b);
    let (variables, lits, starts) = b.finish_collect();
    Ok(CnfInstance {
        variables,
        lits,
        starts,
        info: Some(Arc::new(EncodingInfo {
            rule: rule.clone(),
            states: n,
            method,
            layout,
        })),
    })
}

/// An instance satisfiable iff an `n`-state TDAS with final sink `n` exists
/// whose states are numbered in a reachability order.
pub fn encode_tdas(rule: &CombinatorRule, n: usize) -> Result<CnfInstance, EncodingError> {
    encode(rule, n, Method::Tdas)
}

/// The baseline TDA encoding with final set `{n}`.
pub fn encode_tda_baseline(rule: &CombinatorRule, n: usize) -> Result<CnfInstance, EncodingError> {
    encode(rule, n, Method::TdaBaseline)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terms::parse_rule;

    fn p() -> CombinatorRule {
        parse_rule("P x y z -> z (x y z)").unwrap()
    }

    #[test]
    fn sink_units_for_p() {
        let inst = encode_tdas(&p(), 4).unwrap();
        let info = inst.info().unwrap();
        let units = inst
            .clauses()
            .take(28)
            .filter(|c| c.len() == 1)
            .filter(|c| {
                matches!(
                    info.layout.describe(c[0].unsigned_abs() as usize),
                    EncodingVariable::TransApp { .. }
                )
            })
            .count();
        assert_eq!(units, 28);
        // the first ordering clause: state 1 can only come from Z
        assert_eq!(inst.clause(28), &[info.layout.trans_leaf(1)]);
    }

    #[test]
    fn too_few_states() {
        assert!(matches!(encode_tdas(&p(), 3), Err(EncodingError::InvalidInput(_))));
        assert!(matches!(
            encode_tda_baseline(&p(), 3),
            Err(EncodingError::InvalidInput(_))
        ));
    }

    #[test]
    fn size_close_to_reported() {
        let s = cnf_stats(&encode_tdas(&p(), 4).unwrap());
        assert!(s.variables > 711 && s.variables < 71_160, "{s:?}");
        assert!(s.clauses > 3_354 && s.clauses < 335_430, "{s:?}");
    }

    #[test]
    fn empty_instance() {
        assert_eq!(cnf_stats(&CnfInstance::new(0)), CnfStats::default());
    }

    #[test]
    fn deterministic() {
        let a = encode_tdas(&p(), 4).unwrap();
        let b = encode_tdas(&p(), 4).unwrap();
        assert_eq!(a.lits, b.lits);
        assert_eq!(a.starts, b.starts);
    }

    #[test]
    fn variable_map_lines() {
        let inst = encode_tdas(&p(), 4).unwrap();
        let mut out = Vec::new();
        inst.write_variable_map(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text.lines().count(), inst.variables());
        assert!(text.starts_with("1\tZ -> 1\n"));
        assert!(text.contains("\teval(P x y z, [x=1,y=2,z=3], 4)\n"));
    }
}
