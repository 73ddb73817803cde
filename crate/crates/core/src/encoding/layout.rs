//! Deterministic numbering of the structural variables.
//!
//! ```text
//! TransLeaf(q)        q in 1..N
//! TransApp(q1,q2,q)   lexicographic
//! MinLd(q,m)          q < N, 1 <= m < M       (tdas; m = 0 is TransLeaf)
//! Redex(q)            q in 1..N               (tdas)
//! ProductReach(q,d)   q in 1..N, d < M        (baseline)
//! Eval(t,α,q)         per subterm, α mixed radix over FVar(t), then q
//! Aux                 everything after
//! ```

use super::{EncodingVariable, Method};
use crate::automata::State;
use crate::terms::{CombinatorRule, Term};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct EvalBlock {
    pub(crate) term: Term,
    pub(crate) vars: Vec<usize>,
    /// First index, or `None` for the combinator leaf, which shares the
    /// `TransLeaf` variables.
    pub(crate) base: Option<usize>,
    pub(crate) count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Layout {
    pub(crate) method: Method,
    pub(crate) n: usize,
    pub(crate) m: usize,
    /// Number of values a substitution may take per variable.
    pub(crate) radix: usize,
    leaf: usize,
    app: usize,
    minld: usize,
    redex: usize,
    product: usize,
    pub(crate) evals: Vec<EvalBlock>,
    pub(crate) aux: usize,
}

impl Layout {
    pub(crate) fn new(rule: &CombinatorRule, n: usize, method: Method) -> Self {
        let m = rule.arity();
        let radix = match method {
            Method::Tdas => n - 1,
            Method::TdaBaseline => n,
        };
        let mut next = 1;
        let mut take = |count: usize| {
            let base = next;
            next += count;
            base
        };
        let leaf = take(n);
        let app = take(n * n * n);
        let (minld, redex, product) = match method {
            Method::Tdas => (take((n - 1) * (m - 1)), take(n), 0),
            Method::TdaBaseline => (0, 0, take(n * m)),
        };
        let evals = rule
            .subterms()
            .iter()
            .map(|t| {
                let vars = t.vars();
                if *t == Term::Comb {
                    EvalBlock {
                        term: t.clone(),
                        vars,
                        base: None,
                        count: 0,
                    }
                } else {
                    let count = radix.pow(vars.len() as u32) * n;
                    EvalBlock {
                        term: t.clone(),
                        vars,
                        base: Some(take(count)),
                        count,
                    }
                }
            })
            .collect();
        let aux = next;
        Layout {
            method,
            n,
            m,
            radix,
            leaf,
            app,
            minld,
            redex,
            product,
            evals,
            aux,
        }
    }

    /// Number of structural (non-auxiliary) variables.
    pub(crate) fn structural(&self) -> usize {
        self.aux - 1
    }

    pub(crate) fn trans_leaf(&self, q: State) -> i32 {
        (self.leaf + q - 1) as i32
    }

    pub(crate) fn trans_app(&self, q1: State, q2: State, q: State) -> i32 {
        let n = self.n;
        (self.app + ((q1 - 1) * n + (q2 - 1)) * n + (q - 1)) as i32
    }

    /// `MinLd(q, m)` for `q < N`; `m = 0` is `TransLeaf(q)`.
    pub(crate) fn minld(&self, q: State, m: usize) -> i32 {
        debug_assert!(self.method == Method::Tdas && q < self.n && m < self.m);
        if m == 0 {
            self.trans_leaf(q)
        } else {
            (self.minld + (q - 1) * (self.m - 1) + (m - 1)) as i32
        }
    }

    pub(crate) fn redex(&self, q: State) -> i32 {
        debug_assert!(self.method == Method::Tdas);
        (self.redex + q - 1) as i32
    }

    pub(crate) fn product(&self, q: State, d: usize) -> i32 {
        debug_assert!(self.method == Method::TdaBaseline);
        (self.product + (q - 1) * self.m + d) as i32
    }

    /// Substitution code of `alpha` (indexed by rule variable, values
    /// `1..=radix`) restricted to the block's variables.
    fn code(&self, block: &EvalBlock, alpha: &[State]) -> usize {
        block.vars.iter().fold(0, |acc, &x| acc * self.radix + (alpha[x] - 1))
    }

    pub(crate) fn eval(&self, term: usize, alpha: &[State], q: State) -> i32 {
        let block = &self.evals[term];
        match block.base {
            None => self.trans_leaf(q),
            Some(base) => (base + self.code(block, alpha) * self.n + (q - 1)) as i32,
        }
    }

    /// Number of substitutions over the block's variables.
    pub(crate) fn alpha_count(&self, term: usize) -> usize {
        self.radix.pow(self.evals[term].vars.len() as u32)
    }

    /// Writes the substitution with the given code into `alpha`.
    pub(crate) fn decode_alpha(&self, term: usize, mut code: usize, alpha: &mut [State]) {
        for &x in self.evals[term].vars.iter().rev() {
            alpha[x] = code % self.radix + 1;
            code /= self.radix;
        }
    }

    pub(crate) fn eval_variable_count(&self) -> usize {
        self.evals.iter().map(|b| b.count).sum()
    }

    pub(crate) fn describe(&self, v: usize) -> EncodingVariable {
        let n = self.n;
        if v >= self.aux {
            return EncodingVariable::Aux(v - self.aux);
        }
        if v < self.app {
            return EncodingVariable::TransLeaf { q: v - self.leaf + 1 };
        }
        let after_app = self.app + n * n * n;
        if v < after_app {
            let i = v - self.app;
            return EncodingVariable::TransApp {
                q1: i / (n * n) + 1,
                q2: i / n % n + 1,
                q: i % n + 1,
            };
        }
        match self.method {
            Method::Tdas => {
                if v < self.redex {
                    let i = v - self.minld;
                    return EncodingVariable::MinLd {
                        q: i / (self.m - 1) + 1,
                        m: i % (self.m - 1) + 1,
                    };
                }
                if v < self.redex + n {
                    return EncodingVariable::Redex { q: v - self.redex + 1 };
                }
            }
            Method::TdaBaseline => {
                if v < self.product + n * self.m {
                    let i = v - self.product;
                    return EncodingVariable::ProductReach {
                        q: i / self.m + 1,
                        d: i % self.m,
                    };
                }
            }
        }
        for (t, block) in self.evals.iter().enumerate() {
            if let Some(base) = block.base {
                if v >= base && v < base + block.count {
                    let i = v - base;
                    let mut alpha = vec![0; self.m];
                    self.decode_alpha(t, i / n, &mut alpha);
                    return EncodingVariable::Eval {
                        term: block.term.clone(),
                        alpha: block.vars.iter().map(|&x| (x, alpha[x])).collect(),
                        q: i % n + 1,
                    };
                }
            }
        }
        unreachable!("variable {v} below the auxiliary range is structural")
    }
}
