//! Two-mode tokenizer: character data between tags, and tag interiors.

use super::{PnmlError, Pos};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    /// `<?`
    SpecialOpen,
    /// `<`
    Open,
    /// Character data made only of ASCII digits.
    Digit(String),
    /// Any other character data.
    Text(String),
    /// `>`
    Close,
    /// `?>`
    SpecialClose,
    /// `/>`
    SlashClose,
    Slash,
    Equals,
    Str(String),
    Place,
    Transition,
    Arc,
    Initial,
    Inscription,
    TextTag,
    Underscore,
    Source,
    Target,
    Id,
    Name(String),
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::SpecialOpen => "`<?`".into(),
            Tok::Open => "`<`".into(),
            Tok::Digit(d) => format!("digits `{d}`"),
            Tok::Text(t) => format!("text `{}`", t.trim()),
            Tok::Close => "`>`".into(),
            Tok::SpecialClose => "`?>`".into(),
            Tok::SlashClose => "`/>`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Equals => "`=`".into(),
            Tok::Str(s) => format!("string {s}"),
            Tok::Place => "`place`".into(),
            Tok::Transition => "`transition`".into(),
            Tok::Arc => "`arc`".into(),
            Tok::Initial => "`initialMarking`".into(),
            Tok::Inscription => "`inscription`".into(),
            Tok::TextTag => "`text`".into(),
            Tok::Underscore => "`_`".into(),
            Tok::Source => "`source`".into(),
            Tok::Target => "`target`".into(),
            Tok::Id => "`id`".into(),
            Tok::Name(n) => format!("name `{n}`"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

fn is_name_start(c: char) -> bool {
    c == ':'
        || c.is_ascii_alphabetic()
        || ('\u{2070}'..='\u{218F}').contains(&c)
        || ('\u{2C00}'..='\u{2FEF}').contains(&c)
        || ('\u{3001}'..='\u{D7FF}').contains(&c)
        || ('\u{F900}'..='\u{FDCF}').contains(&c)
        || ('\u{FDF0}'..='\u{FFFD}').contains(&c)
}

fn is_name_char(c: char) -> bool {
    is_name_start(c)
        || matches!(c, '-' | '_' | '.' | '\u{00B7}')
        || c.is_ascii_digit()
        || ('\u{0300}'..='\u{036F}').contains(&c)
        || ('\u{203F}'..='\u{2040}').contains(&c)
}

fn keyword(name: &str) -> Option<Tok> {
    Some(match name {
        "place" => Tok::Place,
        "transition" => Tok::Transition,
        "arc" => Tok::Arc,
        "initialMarking" => Tok::Initial,
        "inscription" => Tok::Inscription,
        "text" => Tok::TextTag,
        "source" => Tok::Source,
        "target" => Tok::Target,
        "id" => Tok::Id,
        _ => return None,
    })
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    rest: &'a str,
    pos: Pos,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Self {
        Cursor {
            chars: src.chars().peekable(),
            rest: src,
            pos: Pos { line: 1, col: 1 },
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn starts_with(&self, s: &str) -> bool {
        self.rest.starts_with(s)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        self.rest = &self.rest[c.len_utf8()..];
        if c == '\n' {
            self.pos.line += 1;
            self.pos.col = 1;
        } else {
            self.pos.col += 1;
        }
        Some(c)
    }

    fn bump_n(&mut self, n: usize) {
        for _ in 0..n {
            self.bump();
        }
    }
}

/// Tokenizes a PNML document. Whitespace-only character data and comments are skipped.
pub fn tokenize(src: &str) -> Result<Vec<Token>, PnmlError> {
    let mut cur = Cursor::new(src);
    let mut out = Vec::new();
    let mut inside = false;
    while let Some(c) = cur.peek() {
        let pos = cur.pos;
        if !inside {
            if cur.starts_with("<!--") {
                match cur.rest.find("-->") {
                    Some(end) => {
                        let n = cur.rest[..end + 3].chars().count();
                        cur.bump_n(n);
                    }
                    None => return Err(PnmlError::lex(pos, "unterminated comment")),
                }
            } else if cur.starts_with("<?") {
                cur.bump_n(2);
                out.push(Token {
                    tok: Tok::SpecialOpen,
                    pos,
                });
                inside = true;
            } else if c == '<' {
                cur.bump();
                out.push(Token {
                    tok: Tok::Open,
                    pos,
                });
                inside = true;
            } else if c == '&' {
                return Err(PnmlError::lex(pos, "unexpected character `&`"));
            } else {
                let mut run = String::new();
                while let Some(c) = cur.peek() {
                    if c == '<' || c == '&' {
                        break;
                    }
                    run.push(c);
                    cur.bump();
                }
                if run.chars().all(|c| matches!(c, ' ' | '\t' | '\r' | '\n')) {
                    continue;
                }
                let tok = if run.chars().all(|c| c.is_ascii_digit()) {
                    Tok::Digit(run)
                } else {
                    Tok::Text(run)
                };
                out.push(Token { tok, pos });
            }
            continue;
        }
        match c {
            ' ' | '\t' | '\r' | '\n' => {
                cur.bump();
            }
            '>' => {
                cur.bump();
                out.push(Token {
                    tok: Tok::Close,
                    pos,
                });
                inside = false;
            }
            '?' if cur.starts_with("?>") => {
                cur.bump_n(2);
                out.push(Token {
                    tok: Tok::SpecialClose,
                    pos,
                });
                inside = false;
            }
            '/' if cur.starts_with("/>") => {
                cur.bump_n(2);
                out.push(Token {
                    tok: Tok::SlashClose,
                    pos,
                });
                inside = false;
            }
            '/' => {
                cur.bump();
                out.push(Token {
                    tok: Tok::Slash,
                    pos,
                });
            }
            '=' => {
                cur.bump();
                out.push(Token {
                    tok: Tok::Equals,
                    pos,
                });
            }
            '"' | '\'' => {
                let quote = c;
                cur.bump();
                let mut body = String::new();
                loop {
                    match cur.peek() {
                        Some(c) if c == quote => {
                            cur.bump();
                            break;
                        }
                        Some('<') | None => {
                            return Err(PnmlError::lex(pos, "unterminated string"));
                        }
                        Some(c) => {
                            body.push(c);
                            cur.bump();
                        }
                    }
                }
                out.push(Token {
                    tok: Tok::Str(body),
                    pos,
                });
            }
            '_' => {
                cur.bump();
                out.push(Token {
                    tok: Tok::Underscore,
                    pos,
                });
            }
            c if is_name_start(c) => {
                let mut name = String::new();
                while let Some(c) = cur.peek() {
                    if !is_name_char(c) {
                        break;
                    }
                    name.push(c);
                    cur.bump();
                }
                let tok = keyword(&name).unwrap_or(Tok::Name(name));
                out.push(Token { tok, pos });
            }
            other => {
                return Err(PnmlError::lex(
                    pos,
                    format!("unexpected character `{other}` inside a tag"),
                ));
            }
        }
    }
    Ok(out)
}
