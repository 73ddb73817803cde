use std::io::{self, BufWriter, Write};

use crate::encoding::CnfInstance;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DimacsError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

struct Counting<W> {
    inner: W,
    bytes: u64,
}

impl<W: Write> Write for Counting<W> {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        let n = self.inner.write(buf)?;
        self.bytes += n as u64;
        Ok(n)
    }

    fn flush(&mut self) -> io::Result<()> {
        self.inner.flush()
    }
}

/// Strict DIMACS: `p cnf V C`, then one 0-terminated clause per line.
/// Returns the number of bytes written.
pub fn write_dimacs(instance: &CnfInstance, out: &mut dyn Write) -> io::Result<u64> {
    let mut w = BufWriter::with_capacity(1 << 16, Counting { inner: out, bytes: 0 });
    writeln!(w, "p cnf {} {}", instance.variables(), instance.clause_count())?;
    let mut line = String::new();
    for clause in instance.clauses() {
        line.clear();
        for &l in clause {
            line.push_str(&l.to_string());
            line.push(' ');
        }
        line.push_str("0\n");
        w.write_all(line.as_bytes())?;
    }
    w.flush()?;
    let counting = w.into_inner().map_err(|e| e.into_error())?;
    Ok(counting.bytes)
}

pub fn dimacs_string(instance: &CnfInstance) -> String {
    let mut buf = Vec::new();
    write_dimacs(instance, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("ascii")
}

/// Parses DIMACS CNF. Comment lines start with `c`; clauses may span lines.
/// The declared clause count must match.
pub fn parse_dimacs(text: &str) -> Result<CnfInstance, DimacsError> {
    let syntax = |line: usize, message: String| DimacsError::Syntax { line, message };
    let mut header = None;
    let mut instance = CnfInstance::new(0);
    let mut current = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('c') {
            continue;
        }
        if content.starts_with('%') {
            break;
        }
        if let Some(rest) = content.strip_prefix("p ") {
            if header.is_some() {
                return Err(syntax(line, "duplicate header".into()));
            }
            let fields: Vec<&str> = rest.split_whitespace().collect();
            match fields.as_slice() {
                ["cnf", v, c] => {
                    let v: usize = v
                        .parse()
                        .map_err(|_| syntax(line, format!("bad variable count `{v}`")))?;
                    let c: usize = c.parse().map_err(|_| syntax(line, format!("bad clause count `{c}`")))?;
                    header = Some((v, c));
                    instance = CnfInstance::new(v);
                }
                _ => return Err(syntax(line, "expected `p cnf V C`".into())),
            }
            continue;
        }
        let Some((vars, _)) = header else {
            return Err(syntax(line, "clause before header".into()));
        };
        for tok in content.split_whitespace() {
            let lit: i32 = tok.parse().map_err(|_| syntax(line, format!("bad literal `{tok}`")))?;
            if lit == 0 {
                instance.add_clause(&current);
                current.clear();
            } else {
                if lit.unsigned_abs() as usize > vars {
                    return Err(syntax(line, format!("literal {lit} exceeds {vars} variables")));
                }
                current.push(lit);
            }
        }
    }
    let Some((_, clauses)) = header else {
        return Err(syntax(0, "missing header".into()));
    };
    if !current.is_empty() {
        return Err(syntax(0, "last clause is not terminated".into()));
    }
    if instance.clause_count() != clauses {
        return Err(syntax(
            0,
            format!("header declares {clauses} clauses, found {}", instance.clause_count()),
        ));
    }
    Ok(instance)
}
