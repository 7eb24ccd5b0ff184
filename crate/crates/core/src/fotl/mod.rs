//! FOTL₁ properties: concrete syntax, well-formedness, printing and
//! resolution of place predicates against a net.
//!
//! Parsing happens in two stages. [`parse_syntax`] builds an untyped
//! [`Formula`]; [`check_well_formed`] enforces the one-variable fragment
//! (quantifiers only over client formulas, quantifier depth one, no server
//! modality under a quantifier) and [`typecheck`] turns it into a
//! [`ServerFormula`] whose quantifiers bind [`ClientFormula`]s.
//!
//! Concrete syntax, loosest to tightest:
//!
//! ```text
//! formula := unary ( ('|' unary)* | ('&' unary)* | '=>' unary | 'U_s' unary | 'U_c' unary )
//! unary   := '~' unary | MODALITY unary | ('E' | 'V') VAR unary | atom | '(' formula ')'
//! atom    := 'p' INDEX [ '(' VAR ')' ] | '\'' NAME '\'' [ '(' VAR ')' ]
//! ```
//!
//! Different binary operators never mix without parentheses. Atoms without a
//! variable are server propositions (the server place holds a token).

mod check;
mod parse;
mod resolve;

use std::fmt;

use thiserror::Error;

use crate::Pos;

pub use check::{check_well_formed, typecheck, WfDiagnostic};
pub use parse::{parse_formula, parse_syntax};
pub use resolve::{resolve_predicates, ResolveError};

/// Reference to a place, by position in the net's declaration order or by id.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PlaceRef {
    Index(usize),
    Name(String),
}

impl PlaceRef {
    /// The resolved index. Panics on an unresolved name.
    pub fn index(&self) -> usize {
        match self {
            PlaceRef::Index(i) => *i,
            PlaceRef::Name(n) => panic!("place `{n}` has not been resolved"),
        }
    }
}

impl fmt::Display for PlaceRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlaceRef::Index(i) => write!(f, "p{i}"),
            PlaceRef::Name(n) => write!(f, "'{n}'"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantifier {
    Exists,
    Forall,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Modality {
    NextS,
    FutureS,
    GloballyS,
    NextC,
    FutureC,
    GloballyC,
}

impl Modality {
    pub fn is_server(self) -> bool {
        matches!(
            self,
            Modality::NextS | Modality::FutureS | Modality::GloballyS
        )
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Modality::NextS => "X_s",
            Modality::FutureS => "F_s",
            Modality::GloballyS => "G_s",
            Modality::NextC => "X_c",
            Modality::FutureC => "F_c",
            Modality::GloballyC => "G_c",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Or,
    And,
    Implies,
    UntilS,
    UntilC,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Or => "|",
            BinOp::And => "&",
            BinOp::Implies => "=>",
            BinOp::UntilS => "U_s",
            BinOp::UntilC => "U_c",
        }
    }

    /// Operators that may be chained without parentheses.
    pub fn is_associative(self) -> bool {
        matches!(self, BinOp::Or | BinOp::And)
    }
}

/// Untyped syntax tree, exactly as written.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom { place: PlaceRef, var: Option<char> },
    Not(Box<Formula>),
    Modal(Modality, Box<Formula>),
    Quant(Quantifier, char, Box<Formula>),
    Binary(BinOp, Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn atom(place: usize, var: char) -> Formula {
        Formula::Atom {
            place: PlaceRef::Index(place),
            var: Some(var),
        }
    }

    pub fn negation(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn modal(m: Modality, f: Formula) -> Formula {
        Formula::Modal(m, Box::new(f))
    }

    pub fn quant(q: Quantifier, v: char, f: Formula) -> Formula {
        Formula::Quant(q, v, Box::new(f))
    }

    pub fn binary(op: BinOp, a: Formula, b: Formula) -> Formula {
        Formula::Binary(op, Box::new(a), Box::new(b))
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom {
                place,
                var: Some(v),
            } => write!(f, "{place}({v})"),
            Formula::Atom { place, var: None } => write!(f, "{place}"),
            Formula::Not(a) => match **a {
                Formula::Atom { .. } => write!(f, "~ {a}"),
                _ => write!(f, "~ ( {a} )"),
            },
            Formula::Modal(m, a) => match **a {
                Formula::Quant(..) if m.is_server() => write!(f, "{} {a}", m.symbol()),
                _ => write!(f, "{} ( {a} )", m.symbol()),
            },
            Formula::Quant(q, v, a) => {
                let q = match q {
                    Quantifier::Exists => "E",
                    Quantifier::Forall => "V",
                };
                write!(f, "{q} {v} ( {a} )")
            }
            Formula::Binary(op, a, b) => {
                let left_bare = match **a {
                    Formula::Binary(inner, ..) => inner == *op && op.is_associative(),
                    _ => true,
                };
                if left_bare {
                    write!(f, "{a}")?;
                } else {
                    write!(f, "( {a} )")?;
                }
                write!(f, " {} ", op.symbol())?;
                match **b {
                    Formula::Binary(..) => write!(f, "( {b} )"),
                    _ => write!(f, "{b}"),
                }
            }
        }
    }
}

/// Formula over the single free variable of a quantifier.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ClientFormula {
    Atom(PlaceRef),
    Not(Box<ClientFormula>),
    Or(Box<ClientFormula>, Box<ClientFormula>),
    And(Box<ClientFormula>, Box<ClientFormula>),
    Implies(Box<ClientFormula>, Box<ClientFormula>),
    Next(Box<ClientFormula>),
    Future(Box<ClientFormula>),
    Globally(Box<ClientFormula>),
    Until(Box<ClientFormula>, Box<ClientFormula>),
}

/// Closed FOTL₁ formula.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ServerFormula {
    Atom(PlaceRef),
    Not(Box<ServerFormula>),
    Or(Box<ServerFormula>, Box<ServerFormula>),
    And(Box<ServerFormula>, Box<ServerFormula>),
    Implies(Box<ServerFormula>, Box<ServerFormula>),
    Exists(char, ClientFormula),
    Forall(char, ClientFormula),
    Next(Box<ServerFormula>),
    Future(Box<ServerFormula>),
    Globally(Box<ServerFormula>),
    Until(Box<ServerFormula>, Box<ServerFormula>),
}

impl ClientFormula {
    /// Untyped form, with `var` as the variable of every atom.
    pub fn to_syntax(&self, var: char) -> Formula {
        use ClientFormula as C;
        let s = |f: &ClientFormula| f.to_syntax(var);
        match self {
            C::Atom(p) => Formula::Atom {
                place: p.clone(),
                var: Some(var),
            },
            C::Not(a) => Formula::negation(s(a)),
            C::Or(a, b) => Formula::binary(BinOp::Or, s(a), s(b)),
            C::And(a, b) => Formula::binary(BinOp::And, s(a), s(b)),
            C::Implies(a, b) => Formula::binary(BinOp::Implies, s(a), s(b)),
            C::Next(a) => Formula::modal(Modality::NextC, s(a)),
            C::Future(a) => Formula::modal(Modality::FutureC, s(a)),
            C::Globally(a) => Formula::modal(Modality::GloballyC, s(a)),
            C::Until(a, b) => Formula::binary(BinOp::UntilC, s(a), s(b)),
        }
    }

    /// Nesting depth of client modalities.
    pub fn temporal_depth(&self) -> usize {
        use ClientFormula as C;
        match self {
            C::Atom(_) => 0,
            C::Not(a) => a.temporal_depth(),
            C::Or(a, b) | C::And(a, b) | C::Implies(a, b) => {
                a.temporal_depth().max(b.temporal_depth())
            }
            C::Next(a) | C::Future(a) | C::Globally(a) => 1 + a.temporal_depth(),
            C::Until(a, b) => 1 + a.temporal_depth().max(b.temporal_depth()),
        }
    }

    pub fn places(&self, out: &mut Vec<PlaceRef>) {
        use ClientFormula as C;
        match self {
            C::Atom(p) => out.push(p.clone()),
            C::Not(a) | C::Next(a) | C::Future(a) | C::Globally(a) => a.places(out),
            C::Or(a, b) | C::And(a, b) | C::Implies(a, b) | C::Until(a, b) => {
                a.places(out);
                b.places(out);
            }
        }
    }
}

impl ServerFormula {
    pub fn to_syntax(&self) -> Formula {
        use ServerFormula as S;
        let s = |f: &ServerFormula| f.to_syntax();
        match self {
            S::Atom(p) => Formula::Atom {
                place: p.clone(),
                var: None,
            },
            S::Not(a) => Formula::negation(s(a)),
            S::Or(a, b) => Formula::binary(BinOp::Or, s(a), s(b)),
            S::And(a, b) => Formula::binary(BinOp::And, s(a), s(b)),
            S::Implies(a, b) => Formula::binary(BinOp::Implies, s(a), s(b)),
            S::Exists(v, c) => Formula::quant(Quantifier::Exists, *v, c.to_syntax(*v)),
            S::Forall(v, c) => Formula::quant(Quantifier::Forall, *v, c.to_syntax(*v)),
            S::Next(a) => Formula::modal(Modality::NextS, s(a)),
            S::Future(a) => Formula::modal(Modality::FutureS, s(a)),
            S::Globally(a) => Formula::modal(Modality::GloballyS, s(a)),
            S::Until(a, b) => Formula::binary(BinOp::UntilS, s(a), s(b)),
        }
    }

    /// Nesting depth of temporal modalities of either kind.
    pub fn temporal_depth(&self) -> usize {
        use ServerFormula as S;
        match self {
            S::Atom(_) => 0,
            S::Not(a) => a.temporal_depth(),
            S::Or(a, b) | S::And(a, b) | S::Implies(a, b) => {
                a.temporal_depth().max(b.temporal_depth())
            }
            S::Exists(_, c) | S::Forall(_, c) => c.temporal_depth(),
            S::Next(a) | S::Future(a) | S::Globally(a) => 1 + a.temporal_depth(),
            S::Until(a, b) => 1 + a.temporal_depth().max(b.temporal_depth()),
        }
    }

    /// Every place reference, server and client, in syntax order.
    pub fn places(&self) -> Vec<PlaceRef> {
        fn go(f: &ServerFormula, out: &mut Vec<PlaceRef>) {
            use ServerFormula as S;
            match f {
                S::Atom(p) => out.push(p.clone()),
                S::Not(a) | S::Next(a) | S::Future(a) | S::Globally(a) => go(a, out),
                S::Or(a, b) | S::And(a, b) | S::Implies(a, b) | S::Until(a, b) => {
                    go(a, out);
                    go(b, out);
                }
                S::Exists(_, c) | S::Forall(_, c) => c.places(out),
            }
        }
        let mut out = Vec::new();
        go(self, &mut out);
        out
    }
}

impl fmt::Display for ServerFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_syntax())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FotlError {
    #[error("{pos}: syntax: {message}")]
    Syntax { pos: Pos, message: String },
    #[error("ill-formed formula: {}", render_wf(.0))]
    IllFormed(Vec<WfDiagnostic>),
}

fn render_wf(d: &[WfDiagnostic]) -> String {
    d.iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

impl FotlError {
    /// `file:line:col: code: message`, one line per problem.
    pub fn render(&self, file: &str) -> String {
        match self {
            FotlError::Syntax { pos, message } => format!("{file}:{pos}: syntax: {message}"),
            FotlError::IllFormed(ds) => ds
                .iter()
                .map(|d| format!("{file}:1:1: {}: {}", d.rule, d.message))
                .collect::<Vec<_>>()
                .join("\n"),
        }
    }
}
