use super::{CombinatorRule, Term, TermError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Token<'a> {
    Ident(&'a str),
    Open,
    Close,
    Arrow,
}

pub(crate) fn tokenize(text: &str) -> Result<Vec<(usize, Token<'_>)>, TermError> {
    let mut tokens = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c == '(' {
            tokens.push((i, Token::Open));
            chars.next();
        } else if c == ')' {
            tokens.push((i, Token::Close));
            chars.next();
        } else if c == '-' {
            chars.next();
            match chars.next() {
                Some((_, '>')) => tokens.push((i, Token::Arrow)),
                _ => {
                    return Err(TermError::Syntax {
                        offset: i,
                        message: "expected `->`".into(),
                    })
                }
            }
        } else if c == '→' {
            tokens.push((i, Token::Arrow));
            chars.next();
        } else if is_ident_char(c) {
            let start = i;
            let mut end = i;
            while let Some(&(j, d)) = chars.peek() {
                if !is_ident_char(d) {
                    break;
                }
                end = j + d.len_utf8();
                chars.next();
            }
            tokens.push((start, Token::Ident(&text[start..end])));
        } else {
            return Err(TermError::Syntax {
                offset: i,
                message: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(tokens)
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

/// Application tree over identifiers, before symbols are resolved.
#[derive(Debug, Clone)]
pub(crate) enum Raw<'a> {
    Ident(&'a str),
    App(Box<Raw<'a>>, Box<Raw<'a>>),
}

pub(crate) struct ExprParser<'t, 'a> {
    tokens: &'t [(usize, Token<'a>)],
    pos: usize,
    end_offset: usize,
}

impl<'t, 'a> ExprParser<'t, 'a> {
    pub(crate) fn new(tokens: &'t [(usize, Token<'a>)], end_offset: usize) -> Self {
        ExprParser {
            tokens,
            pos: 0,
            end_offset,
        }
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end_offset, |(off, _)| *off)
    }

    fn error(&self, message: &str) -> TermError {
        TermError::Syntax {
            offset: self.offset(),
            message: message.into(),
        }
    }

    /// expr := atom+
    pub(crate) fn expr(&mut self) -> Result<Raw<'a>, TermError> {
        let mut acc = self.atom()?;
        while let Some((_, tok)) = self.tokens.get(self.pos) {
            if matches!(tok, Token::Close | Token::Arrow) {
                break;
            }
            let arg = self.atom()?;
            acc = Raw::App(Box::new(acc), Box::new(arg));
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<Raw<'a>, TermError> {
        match self.tokens.get(self.pos) {
            Some((_, Token::Ident(name))) => {
                self.pos += 1;
                Ok(Raw::Ident(name))
            }
            Some((_, Token::Open)) => {
                self.pos += 1;
                let inner = self.expr()?;
                match self.tokens.get(self.pos) {
                    Some((_, Token::Close)) => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    _ => Err(self.error("expected `)`")),
                }
            }
            Some(_) => Err(self.error("expected identifier or `(`")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    pub(crate) fn finish(&self) -> Result<(), TermError> {
        if self.pos == self.tokens.len() {
            Ok(())
        } else {
            Err(self.error("trailing input"))
        }
    }
}

/// Parses a ground term whose only constant is the rule's combinator name.
pub fn parse_term(text: &str, rule: &CombinatorRule) -> Result<Term, TermError> {
    let tokens = tokenize(text)?;
    let mut parser = ExprParser::new(&tokens, text.len());
    let raw = parser.expr()?;
    parser.finish()?;
    resolve(&raw, &|name| (name == rule.name()).then_some(Term::Comb))
}

pub(crate) fn resolve(raw: &Raw<'_>, lookup: &dyn Fn(&str) -> Option<Term>) -> Result<Term, TermError> {
    match raw {
        Raw::Ident(name) => lookup(name).ok_or_else(|| TermError::UnknownSymbol((*name).to_string())),
        Raw::App(l, r) => Ok(Term::app(resolve(l, lookup)?, resolve(r, lookup)?)),
    }
}
