//! Shared fixtures and independent oracles for the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;
use std::time::Duration;

use nonterm::automata::{parse_automaton, State, TreeAutomaton};
use nonterm::encoding::CnfInstance;
use nonterm::solver::{solve, SolverChoice, SolverResult};
use nonterm::terms::{parse_rule, CombinatorRule, Term};
use rand::{Rng, SeedableRng};

pub const FIXTURES: [&str; 8] = ["P", "P3", "D1", "D2", "Phi", "Phi2", "S1", "S2"];

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(format!("{name}.aut"))
}

/// The rule is on the first line as a comment.
pub fn fixture(name: &str) -> (CombinatorRule, TreeAutomaton) {
    let text = std::fs::read_to_string(fixture_path(name)).expect("fixture exists");
    let first = text.lines().next().unwrap_or_default();
    let rule = parse_rule(first.trim_start_matches('#').trim()).expect("fixture rule");
    let a = parse_automaton(&text).expect("fixture parses");
    (rule, a)
}

/// Whether the configured external solver answers a trivial instance.
pub fn external_solver() -> Option<SolverChoice> {
    let choice = SolverChoice::from_env();
    let probe = CnfInstance::from_clauses([[1, 2], [-1, 2]]);
    match solve(&probe, &choice, Some(Duration::from_secs(30))) {
        Ok(SolverResult::Satisfiable(_)) => Some(choice),
        _ => None,
    }
}

/// A plain transition table, filled once from the automaton and then
/// evaluated without calling back into the library.
pub struct Table {
    pub n: usize,
    pub finals: u64,
    pub leaf: u64,
    /// `app[q1][q2]` is a bit set of targets.
    pub app: Vec<Vec<u64>>,
}

impl Table {
    pub fn of(a: &TreeAutomaton) -> Table {
        let n = a.state_count();
        let mut t = Table {
            n,
            finals: 0,
            leaf: 0,
            app: vec![vec![0; n + 1]; n + 1],
        };
        for q in a.finals().iter() {
            t.finals |= 1 << q;
        }
        for q in a.leaf_rules() {
            t.leaf |= 1 << q;
        }
        for (q1, q2, q) in a.app_rules() {
            t.app[q1][q2] |= 1 << q;
        }
        t
    }

    /// Run of `t` with variable `i` in state `alpha[i]`.
    pub fn run(&self, t: &Term, alpha: &[State]) -> u64 {
        match t {
            Term::Comb => self.leaf,
            Term::Var(i) => 1 << alpha[*i],
            Term::App(l, r) => {
                let (ls, rs) = (self.run(l, alpha), self.run(r, alpha));
                let mut out = 0;
                for q1 in 1..=self.n {
                    if ls >> q1 & 1 == 0 {
                        continue;
                    }
                    for q2 in 1..=self.n {
                        if rs >> q2 & 1 == 1 {
                            out |= self.app[q1][q2];
                        }
                    }
                }
                out
            }
        }
    }

    pub fn accepts(&self, t: &Term) -> bool {
        self.run(t, &[]) & self.finals != 0
    }

    /// Least left depth of the terms reaching each state, by Bellman-Ford
    /// style relaxation. Index 0 is unused.
    #[allow(clippy::needless_range_loop)]
    pub fn minld(&self) -> Vec<Option<usize>> {
        let mut d: Vec<Option<usize>> = (0..=self.n)
            .map(|q| (q > 0 && self.leaf >> q & 1 == 1).then_some(0))
            .collect();
        let reach = self.reachable_set();
        loop {
            let mut changed = false;
            for q1 in 1..=self.n {
                let Some(d1) = d[q1] else { continue };
                for q2 in 1..=self.n {
                    if reach >> q2 & 1 == 0 {
                        continue;
                    }
                    for q in 1..=self.n {
                        if self.app[q1][q2] >> q & 1 == 1 && d[q].is_none_or(|x| d1 + 1 < x) {
                            d[q] = Some(d1 + 1);
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                return d;
            }
        }
    }

    pub fn reachable(&self, q: State) -> bool {
        self.reachable_set() >> q & 1 == 1
    }

    pub fn reachable_set(&self) -> u64 {
        let mut r = self.leaf;
        loop {
            let mut next = r;
            for q1 in 1..=self.n {
                for q2 in 1..=self.n {
                    if r >> q1 & 1 == 1 && r >> q2 & 1 == 1 {
                        next |= self.app[q1][q2];
                    }
                }
            }
            if next == r {
                return r;
            }
            r = next;
        }
    }

    /// Every state is a leaf target or the target of a rule over strictly
    /// smaller states.
    pub fn reach_ordered(&self) -> bool {
        (1..=self.n)
            .all(|q| self.leaf >> q & 1 == 1 || (1..q).any(|q1| (1..q).any(|q2| self.app[q1][q2] >> q & 1 == 1)))
    }
}

/// A uniform-ish random ground term with exactly `leaves` leaves.
pub fn random_term<R: Rng>(rng: &mut R, leaves: usize) -> Term {
    if leaves <= 1 {
        return Term::Comb;
    }
    let left = rng.gen_range(1..leaves);
    Term::app(random_term(rng, left), random_term(rng, leaves - left))
}

/// Every ground term with exactly `leaves` leaves.
pub fn all_terms(leaves: usize) -> Vec<Term> {
    if leaves == 1 {
        return vec![Term::Comb];
    }
    let mut out = Vec::new();
    for k in 1..leaves {
        let rights = all_terms(leaves - k);
        for l in all_terms(k) {
            for r in &rights {
                out.push(Term::app(l.clone(), r.clone()));
            }
        }
    }
    out
}

/// Compares transition, `MinLd` and `Eval` variables of a model with values
/// recomputed from the automaton by [`Table`]. Returns the number of
/// variables checked and the first mismatches.
pub fn oracle_audit(
    instance: &CnfInstance,
    model: &nonterm::encoding::Model,
    a: &TreeAutomaton,
) -> (usize, Vec<String>) {
    use nonterm::encoding::EncodingVariable as V;
    let table = Table::of(a);
    let minld = table.minld();
    let arity = instance.info().expect("encoded instance").rule.arity();
    let mut alpha = vec![0; arity];
    let (mut checked, mut bad) = (0, Vec::new());
    for v in 1..=instance.variables() {
        let Some(var) = instance.variable(v) else { continue };
        let expected = match &var {
            V::TransLeaf { q } => table.leaf >> q & 1 == 1,
            V::TransApp { q1, q2, q } => table.app[*q1][*q2] >> q & 1 == 1,
            V::MinLd { q, m } => minld[*q] == Some(*m),
            V::Eval { term, alpha: pairs, q } => {
                alpha.fill(0);
                for &(x, s) in pairs {
                    alpha[x] = s;
                }
                table.run(term, &alpha) >> q & 1 == 1
            }
            _ => continue,
        };
        checked += 1;
        if model.value(v) != expected && bad.len() < 20 {
            bad.push(format!(
                "variable {v} ({var:?}) is {} but should be {expected}",
                model.value(v)
            ));
        }
    }
    (checked, bad)
}

/// `n+1` pigeons in `n` holes.
pub fn pigeonhole(n: usize) -> CnfInstance {
    let var = |p: usize, h: usize| (p * n + h + 1) as i32;
    let mut inst = CnfInstance::new((n + 1) * n);
    for p in 0..=n {
        let clause: Vec<i32> = (0..n).map(|h| var(p, h)).collect();
        inst.add_clause(&clause);
    }
    for h in 0..n {
        for p1 in 0..=n {
            for p2 in p1 + 1..=n {
                inst.add_clause(&[-var(p1, h), -var(p2, h)]);
            }
        }
    }
    inst
}

pub fn random_3sat<R: Rng>(rng: &mut R, vars: usize, clauses: usize) -> CnfInstance {
    let mut inst = CnfInstance::new(vars);
    for _ in 0..clauses {
        let clause: Vec<i32> = (0..3)
            .map(|_| {
                let v = rng.gen_range(1..=vars) as i32;
                if rng.gen_bool(0.5) {
                    v
                } else {
                    -v
                }
            })
            .collect();
        inst.add_clause(&clause);
    }
    inst
}

/// Encodings, crafted and random instances with at most `max_clauses`
/// clauses, for comparing solver backends.
pub fn agreement_instances(max_clauses: usize) -> Vec<(String, CnfInstance)> {
    use nonterm::encoding::{encode, Method};
    let mut out = Vec::new();
    let rules = [
        "W x -> x x",
        "T x y -> y x y",
        "P x y z -> z (x y z)",
        "P3 x y z -> y (x z y)",
        "D1 x y z w -> x z (y w) (x z)",
    ];
    for text in rules {
        let rule = parse_rule(text).unwrap();
        for method in [Method::Tdas, Method::TdaBaseline] {
            for n in rule.arity() + 1..=6 {
                let inst = encode(&rule, n, method).unwrap();
                if inst.clause_count() <= max_clauses {
                    out.push((format!("{} {method} N={n}", rule.name()), inst));
                }
            }
        }
    }
    for n in 3..=6 {
        out.push((format!("pigeonhole {n}"), pigeonhole(n)));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
    for i in 0..40 {
        let vars = 50 + 2 * i;
        let clauses = (vars as f64 * (3.9 + 0.02 * i as f64)) as usize;
        out.push((format!("random 3-SAT #{i}"), random_3sat(&mut rng, vars, clauses)));
    }
    out
}

/// Wraps random accepted terms of the final state in contexts whose other
/// subterms are drawn from the languages of random states, over all
/// reference automata. Returns the number of cases.
pub fn sink_absorption_cases(cases: usize, seed: u64) -> Result<usize, String> {
    use nonterm::automata::random_accepted_term;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let fixtures: Vec<_> = FIXTURES.iter().map(|n| fixture(n)).collect();
    for case in 0..cases {
        let (_, a) = &fixtures[case % fixtures.len()];
        let table = Table::of(a);
        let qf = a.finals().iter().next().unwrap();
        let mut c = random_accepted_term(&mut rng, a, qf, 10).ok_or("final state has no term")?;
        for _ in 0..rng.gen_range(1..6) {
            let q = rng.gen_range(1..=a.state_count());
            let sibling = random_accepted_term(&mut rng, a, q, 10).ok_or("state has no term")?;
            c = if rng.gen_bool(0.5) {
                Term::app(c, sibling)
            } else {
                Term::app(sibling, c)
            };
        }
        if !(table.accepts(&c) && a.accepts(&c)) {
            return Err(format!(
                "case {case} ({}): context lost acceptance",
                FIXTURES[case % fixtures.len()]
            ));
        }
    }
    Ok(cases)
}

/// Draws accepted terms from the reference automata and checks that all
/// their innermost successors are accepted. Returns the number of
/// successors checked.
pub fn closure_sampling_cases(cases: usize, seed: u64) -> Result<usize, String> {
    use nonterm::automata::random_accepted_term;
    use nonterm::terms::innermost_successors;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let fixtures: Vec<_> = FIXTURES.iter().map(|n| fixture(n)).collect();
    let mut successors = 0;
    for case in 0..cases {
        let name = FIXTURES[case % fixtures.len()];
        let (rule, a) = &fixtures[case % fixtures.len()];
        let table = Table::of(a);
        let qf = a.finals().iter().next().unwrap();
        let t = random_accepted_term(&mut rng, a, qf, 10).ok_or("final state has no term")?;
        if !table.accepts(&t) {
            return Err(format!("case {case} ({name}): sampled term rejected"));
        }
        let next = innermost_successors(&t, rule);
        if next.is_empty() {
            return Err(format!("case {case} ({name}): accepted normal form"));
        }
        for s in next {
            if !table.accepts(&s) {
                return Err(format!("case {case} ({name}): successor rejected"));
            }
            successors += 1;
        }
    }
    Ok(successors)
}

/// Solves every agreement instance with both backends. Returns the numbers
/// of satisfiable and unsatisfiable instances.
pub fn backend_agreement(external: &SolverChoice, max_clauses: usize) -> Result<(usize, usize), String> {
    use nonterm::solver::solve_builtin;
    let (mut sat, mut unsat) = (0, 0);
    for (name, inst) in agreement_instances(max_clauses) {
        let ours = solve_builtin(&inst, None);
        let theirs = solve(&inst, external, Some(Duration::from_secs(120))).map_err(|e| format!("{name}: {e}"))?;
        match (&ours, &theirs) {
            (SolverResult::Satisfiable(a), SolverResult::Satisfiable(b)) => {
                if !inst.satisfied_by(a) || !inst.satisfied_by(b) {
                    return Err(format!("{name}: a model violates the instance"));
                }
                sat += 1;
            }
            (SolverResult::Unsatisfiable, SolverResult::Unsatisfiable) => unsat += 1,
            _ => return Err(format!("{name}: builtin {ours:?} vs external {theirs:?}")),
        }
    }
    Ok((sat, unsat))
}
