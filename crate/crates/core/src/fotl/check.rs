//! Well-formedness of the one-variable fragment and conversion to typed form.

use std::fmt;

use super::{BinOp, ClientFormula, Formula, Modality, Quantifier, ServerFormula};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WfDiagnostic {
    /// One of `quantified-server-modality`, `quantifier-depth`,
    /// `free-variable`, `client-modality-outside-quantifier`,
    /// `unbound-variable`, `server-atom-in-client-formula`.
    pub rule: &'static str,
    pub message: String,
}

impl fmt::Display for WfDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.rule, self.message)
    }
}

fn diag(out: &mut Vec<WfDiagnostic>, rule: &'static str, message: String) {
    out.push(WfDiagnostic { rule, message });
}

fn server(f: &Formula, out: &mut Vec<WfDiagnostic>) -> Option<ServerFormula> {
    use ServerFormula as S;
    let un = |a: &Formula, out: &mut Vec<WfDiagnostic>| server(a, out).map(Box::new);
    match f {
        Formula::Atom { place, var: None } => Some(S::Atom(place.clone())),
        Formula::Atom { var: Some(v), .. } => {
            diag(
                out,
                "free-variable",
                format!("`{f}` uses variable `{v}` outside any quantifier"),
            );
            None
        }
        Formula::Not(a) => Some(S::Not(un(a, out)?)),
        Formula::Modal(m, a) => {
            if !m.is_server() {
                diag(
                    out,
                    "client-modality-outside-quantifier",
                    format!("`{}` must appear under a quantifier", m.symbol()),
                );
                server(a, out);
                return None;
            }
            let a = un(a, out)?;
            Some(match m {
                Modality::NextS => S::Next(a),
                Modality::FutureS => S::Future(a),
                _ => S::Globally(a),
            })
        }
        Formula::Quant(q, v, a) => {
            let c = client(a, *v, out)?;
            Some(match q {
                Quantifier::Exists => S::Exists(*v, c),
                Quantifier::Forall => S::Forall(*v, c),
            })
        }
        Formula::Binary(op, a, b) => {
            if *op == BinOp::UntilC {
                diag(
                    out,
                    "client-modality-outside-quantifier",
                    "`U_c` must appear under a quantifier".into(),
                );
                server(a, out);
                server(b, out);
                return None;
            }
            let (a, b) = (un(a, out), un(b, out));
            let (a, b) = (a?, b?);
            Some(match op {
                BinOp::Or => S::Or(a, b),
                BinOp::And => S::And(a, b),
                BinOp::Implies => S::Implies(a, b),
                _ => S::Until(a, b),
            })
        }
    }
}

fn client(f: &Formula, var: char, out: &mut Vec<WfDiagnostic>) -> Option<ClientFormula> {
    use ClientFormula as C;
    let un = |a: &Formula, out: &mut Vec<WfDiagnostic>| client(a, var, out).map(Box::new);
    match f {
        Formula::Atom {
            place,
            var: Some(v),
        } if *v == var => Some(C::Atom(place.clone())),
        Formula::Atom { var: Some(v), .. } => {
            diag(
                out,
                "unbound-variable",
                format!("`{f}` uses `{v}` but the enclosing quantifier binds `{var}`"),
            );
            None
        }
        Formula::Atom { var: None, .. } => {
            diag(
                out,
                "server-atom-in-client-formula",
                format!("server proposition `{f}` appears under the quantifier on `{var}`"),
            );
            None
        }
        Formula::Not(a) => Some(C::Not(un(a, out)?)),
        Formula::Modal(m, a) => {
            if m.is_server() {
                diag(
                    out,
                    "quantified-server-modality",
                    format!("`{}` appears under the quantifier on `{var}`", m.symbol()),
                );
                client(a, var, out);
                return None;
            }
            let a = un(a, out)?;
            Some(match m {
                Modality::NextC => C::Next(a),
                Modality::FutureC => C::Future(a),
                _ => C::Globally(a),
            })
        }
        Formula::Quant(_, v, a) => {
            diag(
                out,
                "quantifier-depth",
                format!("quantifier on `{v}` is nested under the quantifier on `{var}`"),
            );
            client(a, *v, out);
            None
        }
        Formula::Binary(op, a, b) => {
            if *op == BinOp::UntilS {
                diag(
                    out,
                    "quantified-server-modality",
                    format!("`U_s` appears under the quantifier on `{var}`"),
                );
                client(a, var, out);
                client(b, var, out);
                return None;
            }
            let (a, b) = (un(a, out), un(b, out));
            let (a, b) = (a?, b?);
            Some(match op {
                BinOp::Or => C::Or(a, b),
                BinOp::And => C::And(a, b),
                BinOp::Implies => C::Implies(a, b),
                _ => C::Until(a, b),
            })
        }
    }
}

/// Every violation of the fragment's rules; empty iff the formula is a
/// closed FOTL₁ formula.
pub fn check_well_formed(f: &Formula) -> Vec<WfDiagnostic> {
    let mut out = Vec::new();
    server(f, &mut out);
    out
}

/// Converts a well-formed syntax tree to its typed form.
pub fn typecheck(f: &Formula) -> Result<ServerFormula, Vec<WfDiagnostic>> {
    let mut out = Vec::new();
    match server(f, &mut out) {
        Some(s) if out.is_empty() => Ok(s),
        _ => Err(out),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fotl::parse_syntax;

    fn rules(src: &str) -> Vec<&'static str> {
        check_well_formed(&parse_syntax(src).unwrap())
            .into_iter()
            .map(|d| d.rule)
            .collect()
    }

    #[test]
    fn accepted() {
        assert!(rules("G_s V x ( p0(x) => F_c ( p4(x) | p5(x) ) )").is_empty());
        assert!(rules("p1").is_empty());
        assert!(rules("p1 U_s E x ( p0(x) )").is_empty());
        assert!(rules("X_s ( p1 & V y ( G_c ( p0(y) ) ) )").is_empty());
    }

    #[test]
    fn rejected() {
        assert_eq!(
            rules("E x E y ( p0(x) )"),
            ["quantifier-depth", "unbound-variable"]
        );
        assert_eq!(rules("E x V y ( p0(y) )"), ["quantifier-depth"]);
        assert_eq!(
            rules("V x ( G_s ( p0(x) ) )"),
            ["quantified-server-modality"]
        );
        assert_eq!(
            rules("V x ( p0(x) U_s p1(x) )"),
            ["quantified-server-modality"]
        );
        assert_eq!(rules("p0(x)"), ["free-variable"]);
        assert_eq!(rules("F_c ( p1 )"), ["client-modality-outside-quantifier"]);
        assert_eq!(rules("p1 U_c p2"), ["client-modality-outside-quantifier"]);
        assert_eq!(rules("V x ( p0(y) )"), ["unbound-variable"]);
        assert_eq!(
            rules("V x ( p0(x) & p1 )"),
            ["server-atom-in-client-formula"]
        );
        assert_eq!(
            rules("F_c ( p0(x) ) & V x ( G_s ( p1 ) )"),
            [
                "client-modality-outside-quantifier",
                "free-variable",
                "quantified-server-modality",
                "server-atom-in-client-formula"
            ]
        );
    }
}
