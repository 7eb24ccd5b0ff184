//! Tokenizer and recursive-descent parser for the concrete syntax.

use super::{typecheck, BinOp, Formula, FotlError, Modality, PlaceRef, Quantifier, ServerFormula};
use crate::Pos;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    LParen,
    RParen,
    Not,
    Bin(BinOp),
    Modal(Modality),
    Quant(Quantifier),
    Var(char),
    Place(usize),
    Name(String),
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Not => "`~`".into(),
            Tok::Bin(op) => format!("`{}`", op.symbol()),
            Tok::Modal(m) => format!("`{}`", m.symbol()),
            Tok::Quant(Quantifier::Exists) => "`E`".into(),
            Tok::Quant(Quantifier::Forall) => "`V`".into(),
            Tok::Var(v) => format!("variable `{v}`"),
            Tok::Place(i) => format!("place `p{i}`"),
            Tok::Name(n) => format!("place `'{n}'`"),
        }
    }
}

fn syntax(pos: Pos, message: impl Into<String>) -> FotlError {
    FotlError::Syntax {
        pos,
        message: message.into(),
    }
}

fn tokenize(src: &str) -> Result<Vec<(Tok, Pos)>, FotlError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut col) = (1, 1);
    let mut i = 0;
    while i < chars.len() {
        let pos = Pos { line, col };
        let c = chars[i];
        let start = i;
        let tok = match c {
            '\n' => {
                line += 1;
                col = 1;
                i += 1;
                continue;
            }
            ' ' | '\t' | '\r' => {
                i += 1;
                col += 1;
                continue;
            }
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '~' => Tok::Not,
            '|' => Tok::Bin(BinOp::Or),
            '&' => Tok::Bin(BinOp::And),
            '=' if chars.get(i + 1) == Some(&'>') => {
                i += 1;
                Tok::Bin(BinOp::Implies)
            }
            'E' => Tok::Quant(Quantifier::Exists),
            'V' => Tok::Quant(Quantifier::Forall),
            'X' | 'F' | 'G' | 'U' => {
                let word: String = chars[i..]
                    .iter()
                    .take_while(|c| c.is_alphanumeric() || **c == '_')
                    .collect();
                let tok = match word.as_str() {
                    "X_s" => Tok::Modal(Modality::NextS),
                    "F_s" => Tok::Modal(Modality::FutureS),
                    "G_s" => Tok::Modal(Modality::GloballyS),
                    "X_c" => Tok::Modal(Modality::NextC),
                    "F_c" => Tok::Modal(Modality::FutureC),
                    "G_c" => Tok::Modal(Modality::GloballyC),
                    "U_s" => Tok::Bin(BinOp::UntilS),
                    "U_c" => Tok::Bin(BinOp::UntilC),
                    _ => return Err(syntax(pos, format!("unknown modality `{word}`"))),
                };
                i += 2;
                tok
            }
            'p' if chars
                .get(i + 1)
                .is_some_and(|c| c.is_ascii_digit() || *c == '-') =>
            {
                let digits: String = chars[i + 1..]
                    .iter()
                    .enumerate()
                    .take_while(|(k, c)| c.is_ascii_digit() || (*k == 0 && **c == '-'))
                    .map(|(_, c)| c)
                    .collect();
                i += digits.chars().count();
                if digits.starts_with('-') {
                    return Err(syntax(pos, format!("negative place index `p{digits}`")));
                }
                let n = digits
                    .parse()
                    .map_err(|_| syntax(pos, format!("place index `{digits}` is out of range")))?;
                Tok::Place(n)
            }
            '\'' => {
                let name: String = chars[i + 1..]
                    .iter()
                    .take_while(|c| **c != '\'' && **c != '\n')
                    .collect();
                let end = i + 1 + name.chars().count();
                if chars.get(end) != Some(&'\'') {
                    return Err(syntax(pos, "unterminated place name"));
                }
                if name.is_empty() {
                    return Err(syntax(pos, "empty place name"));
                }
                i = end;
                Tok::Name(name)
            }
            c if c.is_ascii_lowercase() => Tok::Var(c),
            other => return Err(syntax(pos, format!("unexpected character `{other}`"))),
        };
        i += 1;
        col += i - start;
        out.push((tok, pos));
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    i: usize,
    eof: Pos,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|t| &t.0)
    }

    fn pos(&self) -> Pos {
        self.toks.get(self.i).map_or(self.eof, |t| t.1)
    }

    fn unexpected(&self, expected: &str) -> FotlError {
        match self.toks.get(self.i) {
            Some((t, pos)) => syntax(
                *pos,
                format!("unexpected {}, expected {expected}", t.describe()),
            ),
            None => syntax(
                self.eof,
                format!("unexpected end of input, expected {expected}"),
            ),
        }
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> Result<(), FotlError> {
        if self.peek() == Some(&tok) {
            self.i += 1;
            Ok(())
        } else {
            Err(self.unexpected(expected))
        }
    }

    fn formula(&mut self) -> Result<Formula, FotlError> {
        let first = self.unary()?;
        let Some(Tok::Bin(op)) = self.peek().cloned() else {
            return Ok(first);
        };
        self.i += 1;
        let mut acc = Formula::binary(op, first, self.unary()?);
        while let Some(Tok::Bin(next)) = self.peek().cloned() {
            if next != op || !op.is_associative() {
                return Err(syntax(
                    self.pos(),
                    format!(
                        "`{}` after `{}` needs parentheses to group the operands",
                        next.symbol(),
                        op.symbol()
                    ),
                ));
            }
            self.i += 1;
            acc = Formula::binary(op, acc, self.unary()?);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Formula, FotlError> {
        match self.peek().cloned() {
            Some(Tok::Not) => {
                self.i += 1;
                Ok(Formula::negation(self.unary()?))
            }
            Some(Tok::Modal(m)) => {
                self.i += 1;
                Ok(Formula::modal(m, self.unary()?))
            }
            Some(Tok::Quant(q)) => {
                self.i += 1;
                let v = match self.peek() {
                    Some(Tok::Var(v)) => *v,
                    _ => return Err(self.unexpected("a variable after the quantifier")),
                };
                self.i += 1;
                Ok(Formula::quant(q, v, self.unary()?))
            }
            Some(Tok::LParen) => {
                self.i += 1;
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Some(Tok::Place(n)) => {
                self.i += 1;
                self.atom_tail(PlaceRef::Index(n))
            }
            Some(Tok::Name(n)) => {
                self.i += 1;
                self.atom_tail(PlaceRef::Name(n))
            }
            _ => Err(self.unexpected("a formula")),
        }
    }

    /// Optional `( VAR )` after a place. A `(` not followed by a variable
    /// and `)` is a syntax error rather than a grouping.
    fn atom_tail(&mut self, place: PlaceRef) -> Result<Formula, FotlError> {
        if self.peek() != Some(&Tok::LParen) {
            return Ok(Formula::Atom { place, var: None });
        }
        self.i += 1;
        let v = match self.peek() {
            Some(Tok::Var(v)) => *v,
            _ => return Err(self.unexpected("a variable")),
        };
        self.i += 1;
        self.expect(Tok::RParen, "`)`")?;
        Ok(Formula::Atom {
            place,
            var: Some(v),
        })
    }
}

fn end_pos(text: &str) -> Pos {
    let line = text.matches('\n').count() + 1;
    let col = text.rsplit('\n').next().unwrap_or("").chars().count() + 1;
    Pos { line, col }
}

/// Parses a formula without checking well-formedness.
pub fn parse_syntax(text: &str) -> Result<Formula, FotlError> {
    let toks = tokenize(text)?;
    let mut p = Parser {
        toks,
        i: 0,
        eof: end_pos(text),
    };
    let f = p.formula()?;
    if p.peek().is_some() {
        return Err(p.unexpected("end of input"));
    }
    Ok(f)
}

/// Parses and checks a closed FOTL₁ formula.
pub fn parse_formula(text: &str) -> Result<ServerFormula, FotlError> {
    typecheck(&parse_syntax(text)?).map_err(FotlError::IllFormed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fotl::ClientFormula as C;
    use crate::fotl::ServerFormula as S;

    fn b<T>(x: T) -> Box<T> {
        Box::new(x)
    }

    #[test]
    fn psi1() {
        let f = parse_formula("G_s V x ( p0(x) => F_c ( p4(x) | p5(x) ) )").unwrap();
        let at = |i| b(C::Atom(PlaceRef::Index(i)));
        let want = S::Globally(b(S::Forall(
            'x',
            C::Implies(at(0), b(C::Future(b(C::Or(at(4), at(5)))))),
        )));
        assert_eq!(f, want);
    }

    #[test]
    fn chains_and_grouping() {
        let f = parse_syntax("p0(x) & p1(x) & p2(x)").unwrap();
        assert_eq!(f.to_string(), "p0(x) & p1(x) & p2(x)");
        assert!(parse_syntax("p0(x) & p1(x) | p2(x)").is_err());
        assert!(parse_syntax("p0(x) => p1(x) => p2(x)").is_err());
        assert!(parse_syntax("p0(x) U_c p1(x) U_c p2(x)").is_err());
        let f = parse_syntax("p0(x) | ( p1(x) | p2(x) )").unwrap();
        assert_eq!(f.to_string(), "p0(x) | ( p1(x) | p2(x) )");
    }

    #[test]
    fn lexical_errors() {
        let e = parse_syntax("G_s V x ( X_q ( p0(x) ) )").unwrap_err();
        assert!(e.to_string().contains("unknown modality `X_q`"), "{e}");
        assert!(parse_syntax("p-1(x)")
            .unwrap_err()
            .to_string()
            .contains("negative"));
        assert!(parse_syntax("p0(xy)").is_err());
        assert!(parse_syntax("p0(x").is_err());
        assert!(parse_syntax("").is_err());
        assert!(parse_syntax("p0(x) )").is_err());
        let e = parse_syntax("G_s V x (\n  p0(x) # )").unwrap_err();
        assert_eq!(
            e,
            syntax(Pos { line: 2, col: 9 }, "unexpected character `#`")
        );
    }

    #[test]
    fn named_atoms_and_server_atoms() {
        let f = parse_syntax("'p_SR' & G_s E y ( 'p_PR'(y) )").unwrap();
        assert_eq!(f.to_string(), "'p_SR' & G_s E y ( 'p_PR'(y) )");
    }
}
