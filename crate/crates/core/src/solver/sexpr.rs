//! Minimal s-expression reader for solver output.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sexp {
    /// Symbol or numeral, with `|...|` quoting removed.
    Atom(String),
    Str(String),
    List(Vec<Sexp>),
}

impl Sexp {
    pub fn atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom(a) => Some(a),
            _ => None,
        }
    }

    pub fn list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List(xs) => Some(xs),
            _ => None,
        }
    }
}

impl fmt::Display for Sexp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexp::Atom(a) => write!(f, "{a}"),
            Sexp::Str(s) => write!(f, "{s:?}"),
            Sexp::List(xs) => {
                write!(f, "(")?;
                for (k, x) in xs.iter().enumerate() {
                    if k > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("offset {offset}: {message}")]
pub struct SexpError {
    pub offset: usize,
    pub message: String,
}

/// Parses every top-level expression in `text`. `;` starts a line comment.
pub fn parse_all(text: &str) -> Result<Vec<Sexp>, SexpError> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut pos = 0;
    let mut stack: Vec<Vec<Sexp>> = vec![Vec::new()];
    let err = |offset: usize, message: &str| SexpError {
        offset,
        message: message.to_string(),
    };
    while pos < chars.len() {
        let (off, c) = chars[pos];
        match c {
            _ if c.is_whitespace() => pos += 1,
            ';' => {
                while pos < chars.len() && chars[pos].1 != '\n' {
                    pos += 1;
                }
            }
            '(' => {
                stack.push(Vec::new());
                pos += 1;
            }
            ')' => {
                if stack.len() == 1 {
                    return Err(err(off, "unbalanced `)`"));
                }
                let done = stack.pop().unwrap();
                stack.last_mut().unwrap().push(Sexp::List(done));
                pos += 1;
            }
            '|' => {
                let start = pos + 1;
                let mut end = start;
                while end < chars.len() && chars[end].1 != '|' {
                    end += 1;
                }
                if end == chars.len() {
                    return Err(err(off, "unterminated quoted symbol"));
                }
                let s: String = chars[start..end].iter().map(|&(_, c)| c).collect();
                stack.last_mut().unwrap().push(Sexp::Atom(s));
                pos = end + 1;
            }
            '"' => {
                let mut s = String::new();
                pos += 1;
                loop {
                    match chars.get(pos) {
                        None => return Err(err(off, "unterminated string")),
                        // SMT-LIB escapes a quote by doubling it.
                        Some(&(_, '"')) if chars.get(pos + 1).map(|x| x.1) == Some('"') => {
                            s.push('"');
                            pos += 2;
                        }
                        Some(&(_, '"')) => {
                            pos += 1;
                            break;
                        }
                        Some(&(_, c)) => {
                            s.push(c);
                            pos += 1;
                        }
                    }
                }
                stack.last_mut().unwrap().push(Sexp::Str(s));
            }
            _ => {
                let start = pos;
                while pos < chars.len() {
                    let c = chars[pos].1;
                    if c.is_whitespace() || "()|\";".contains(c) {
                        break;
                    }
                    pos += 1;
                }
                let s: String = chars[start..pos].iter().map(|&(_, c)| c).collect();
                stack.last_mut().unwrap().push(Sexp::Atom(s));
            }
        }
    }
    if stack.len() != 1 {
        return Err(err(text.len(), "unbalanced `(`"));
    }
    Ok(stack.pop().unwrap())
}
