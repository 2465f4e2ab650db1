//! Minimal s-expression reader shared by the SMT-LIB2 tooling and the MSO formula syntax.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

impl Sexp {
    pub fn atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom(a) => Some(a),
            Sexp::List(_) => None,
        }
    }

    pub fn list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List(l) => Some(l),
            Sexp::Atom(_) => None,
        }
    }

    /// The head atom of a non-empty list.
    pub fn head(&self) -> Option<&str> {
        self.list()?.first()?.atom()
    }
}

impl fmt::Display for Sexp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexp::Atom(a) => f.write_str(a),
            Sexp::List(items) => {
                f.write_str("(")?;
                for (i, it) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{it}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// A located syntax error: 1-based line, byte offset and message.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SexpError {
    pub line: usize,
    pub offset: usize,
    pub msg: String,
}

impl fmt::Display for SexpError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, offset {}: {}", self.line, self.offset, self.msg)
    }
}

/// Reads every top-level expression, each tagged with the line it starts on.
/// `;` starts a comment running to the end of the line.
pub fn parse_all(text: &str) -> Result<Vec<(usize, Sexp)>, SexpError> {
    let mut out = Vec::new();
    let mut stack: Vec<(usize, Vec<Sexp>)> = Vec::new();
    let mut line = 1;
    let mut chars = text.char_indices().peekable();
    while let Some(&(offset, c)) = chars.peek() {
        match c {
            '\n' => {
                line += 1;
                chars.next();
            }
            c if c.is_whitespace() => {
                chars.next();
            }
            ';' => {
                while chars.peek().is_some_and(|&(_, c)| c != '\n') {
                    chars.next();
                }
            }
            '(' => {
                chars.next();
                stack.push((line, Vec::new()));
            }
            ')' => {
                chars.next();
                let (start, items) = stack.pop().ok_or(SexpError { line, offset, msg: "unbalanced ')'".into() })?;
                push(&mut stack, &mut out, start, Sexp::List(items));
            }
            _ => {
                let mut atom = String::new();
                while let Some(&(_, c)) = chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    atom.push(c);
                    chars.next();
                }
                push(&mut stack, &mut out, line, Sexp::Atom(atom));
            }
        }
    }
    if let Some((start, _)) = stack.last() {
        return Err(SexpError {
            line,
            offset: text.len(),
            msg: format!("unexpected end of input: '(' from line {start} is never closed"),
        });
    }
    Ok(out)
}

fn push(stack: &mut [(usize, Vec<Sexp>)], out: &mut Vec<(usize, Sexp)>, line: usize, e: Sexp) {
    match stack.last_mut() {
        Some((_, items)) => items.push(e),
        None => out.push((line, e)),
    }
}

/// Reads exactly one expression.
pub fn parse_one(text: &str) -> Result<Sexp, SexpError> {
    let mut all = parse_all(text)?;
    match all.len() {
        1 => Ok(all.pop().unwrap().1),
        0 => Err(SexpError { line: 1, offset: text.len(), msg: "unexpected end of input".into() }),
        _ => Err(SexpError { line: all[1].0, offset: 0, msg: "trailing input after the first expression".into() }),
    }
}
