use std::fmt;

use super::parse::{resolve, tokenize, ExprParser, Token};
use super::{Term, TermError};

/// The single rule `Z x1 .. xM -> rhs` of a sole combinatory calculus.
///
/// Variables are stored as `Var(0) .. Var(M-1)` in left-hand-side order; the
/// surface names are kept for printing only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CombinatorRule {
    name: String,
    var_names: Vec<String>,
    lhs: Term,
    rhs: Term,
    subterms: Vec<Term>,
}

impl CombinatorRule {
    /// Builds a rule from an already resolved right-hand side.
    pub fn new(name: &str, var_names: Vec<String>, rhs: Term) -> Result<Self, TermError> {
        let arity = var_names.len();
        if arity == 0 {
            return Err(TermError::InvalidRule(
                "a combinator needs at least one argument".into(),
            ));
        }
        for (i, v) in var_names.iter().enumerate() {
            if var_names[..i].contains(v) {
                return Err(TermError::InvalidRule(format!(
                    "variable `{v}` occurs more than once on the left-hand side"
                )));
            }
        }
        if !rhs.is_ground() && rhs.vars().iter().any(|&v| v >= arity) {
            return Err(TermError::InvalidRule(
                "right-hand side uses an unknown variable".into(),
            ));
        }
        if rhs_mentions_comb(&rhs) {
            return Err(TermError::InvalidRule(
                "right-hand side may only combine variables".into(),
            ));
        }
        if let Some(missing) = (0..arity).find(|&v| rhs.occurrences(v) == 0) {
            return Err(TermError::InvalidRule(format!(
                "erasing rule: `{}` does not occur on the right-hand side",
                var_names[missing]
            )));
        }
        let lhs = Term::apply_all(Term::Comb, (0..arity).map(Term::Var));
        let mut subterms = Vec::new();
        lhs.push_subterms(&mut subterms);
        rhs.push_subterms(&mut subterms);
        Ok(CombinatorRule {
            name: name.to_string(),
            var_names,
            lhs,
            rhs,
            subterms,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Number of arguments `M`; a term is a redex iff its left depth is `M`.
    pub fn arity(&self) -> usize {
        self.var_names.len()
    }

    pub fn lhs(&self) -> &Term {
        &self.lhs
    }

    pub fn rhs(&self) -> &Term {
        &self.rhs
    }

    pub fn var_names(&self) -> &[String] {
        &self.var_names
    }

    /// `sub(lhs) ∪ sub(rhs)`, each subterm once, children before parents,
    /// left-hand side first.
    pub fn subterms(&self) -> &[Term] {
        &self.subterms
    }

    pub fn display_term<'a>(&'a self, t: &'a Term) -> super::TermDisplay<'a> {
        t.display_with(&self.name, &self.var_names)
    }
}

fn rhs_mentions_comb(t: &Term) -> bool {
    match t {
        Term::Comb => true,
        Term::Var(_) => false,
        Term::App(l, r) => rhs_mentions_comb(l) || rhs_mentions_comb(r),
    }
}

impl fmt::Display for CombinatorRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)?;
        for v in &self.var_names {
            write!(f, " {v}")?;
        }
        write!(f, " -> {}", self.display_term(&self.rhs))
    }
}

/// Parses `NAME var+ -> expr`.
pub fn parse_rule(text: &str) -> Result<CombinatorRule, TermError> {
    let tokens = tokenize(text)?;
    let arrow = tokens
        .iter()
        .position(|(_, t)| *t == Token::Arrow)
        .ok_or_else(|| TermError::Syntax {
            offset: text.len(),
            message: "expected `->`".into(),
        })?;
    let mut head = Vec::new();
    for (off, tok) in &tokens[..arrow] {
        match tok {
            Token::Ident(name) => head.push(*name),
            _ => {
                return Err(TermError::Syntax {
                    offset: *off,
                    message: "left-hand side must be `NAME var+`".into(),
                })
            }
        }
    }
    let Some((&name, vars)) = head.split_first() else {
        return Err(TermError::Syntax {
            offset: 0,
            message: "missing combinator name".into(),
        });
    };
    if vars.is_empty() {
        return Err(TermError::Syntax {
            offset: tokens[arrow].0,
            message: "combinator needs at least one variable".into(),
        });
    }
    if vars.contains(&name) {
        return Err(TermError::InvalidRule(format!(
            "`{name}` is used both as combinator and variable"
        )));
    }
    let rhs_tokens = &tokens[arrow + 1..];
    let mut parser = ExprParser::new(rhs_tokens, text.len());
    let raw = parser.expr()?;
    parser.finish()?;
    let rhs = resolve(&raw, &|ident| {
        if ident == name {
            Some(Term::Comb)
        } else {
            vars.iter().position(|v| *v == ident).map(Term::Var)
        }
    })
    .map_err(|e| match e {
        TermError::UnknownSymbol(s) => TermError::InvalidRule(format!("right-hand side uses unknown variable `{s}`")),
        other => other,
    })?;
    CombinatorRule::new(name, vars.iter().map(|v| v.to_string()).collect(), rhs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(i: usize) -> Term {
        Term::Var(i)
    }

    #[test]
    fn parses_p() {
        let r = parse_rule("P x y z -> z (x y z)").unwrap();
        assert_eq!(r.arity(), 3);
        let xyz = Term::app(Term::app(v(0), v(1)), v(2));
        assert_eq!(r.rhs(), &Term::app(v(2), xyz));
        assert_eq!(r.to_string(), "P x y z -> z (x y z)");
        assert_eq!(r.subterms().len(), 10);
    }

    #[test]
    fn accepts_duplicating_rhs() {
        let r = parse_rule("D1 x y z w -> x z (y w) (x z)").unwrap();
        assert_eq!(r.arity(), 4);
        assert_eq!(r.rhs().occurrences(0), 2);
    }

    #[test]
    fn rejects_erasing_and_nonlinear_rules() {
        assert!(matches!(parse_rule("K x y -> x"), Err(TermError::InvalidRule(_))));
        assert!(matches!(parse_rule("W x x -> x x"), Err(TermError::InvalidRule(_))));
        assert!(matches!(parse_rule("B x y -> x y q"), Err(TermError::InvalidRule(_))));
        assert!(matches!(parse_rule("B x y -> B x y"), Err(TermError::InvalidRule(_))));
    }

    #[test]
    fn rejects_malformed_rules() {
        assert!(matches!(parse_rule("P x y"), Err(TermError::Syntax { .. })));
        assert!(matches!(parse_rule("P -> P"), Err(TermError::Syntax { .. })));
        assert!(matches!(parse_rule("-> x"), Err(TermError::Syntax { .. })));
        assert!(matches!(parse_rule("P x -> (x"), Err(TermError::Syntax { .. })));
        assert!(matches!(parse_rule("P (x) -> x"), Err(TermError::Syntax { .. })));
    }

    #[test]
    fn unicode_names_and_arrow() {
        let r = parse_rule("Φ x y z w → x (y w) (z w)").unwrap();
        assert_eq!(r.name(), "Φ");
        assert_eq!(r.arity(), 4);
    }
}
