//! Binding place predicates to the places of a net.

use thiserror::Error;

use super::{ClientFormula, PlaceRef, ServerFormula};
use crate::net::{NuNet, Role};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResolveError {
    #[error("index-out-of-range: `p{index}` but the net has {places} places")]
    IndexOutOfRange { index: usize, places: usize },
    #[error("unknown-place: the net has no place `{0}`")]
    UnknownPlace(String),
    #[error("role-mismatch: `{place}` is a {actual} place but is used as a {expected} predicate")]
    RoleMismatch {
        place: String,
        expected: Role,
        actual: Role,
    },
}

fn bind(p: &PlaceRef, expected: Role, net: &NuNet, errors: &mut Vec<ResolveError>) -> PlaceRef {
    let index = match p {
        PlaceRef::Index(i) if *i < net.places().len() => *i,
        PlaceRef::Index(i) => {
            errors.push(ResolveError::IndexOutOfRange {
                index: *i,
                places: net.places().len(),
            });
            return p.clone();
        }
        PlaceRef::Name(n) => match net.place_index(n) {
            Some(i) => i,
            None => {
                errors.push(ResolveError::UnknownPlace(n.clone()));
                return p.clone();
            }
        },
    };
    let place = &net.places()[index];
    if place.role != expected {
        errors.push(ResolveError::RoleMismatch {
            place: place.id.clone(),
            expected,
            actual: place.role,
        });
    }
    PlaceRef::Index(index)
}

fn client(f: &ClientFormula, net: &NuNet, errors: &mut Vec<ResolveError>) -> ClientFormula {
    use ClientFormula as C;
    let mut r = |a: &ClientFormula| Box::new(client(a, net, errors));
    match f {
        C::Atom(p) => C::Atom(bind(p, Role::Client, net, errors)),
        C::Not(a) => C::Not(r(a)),
        C::Next(a) => C::Next(r(a)),
        C::Future(a) => C::Future(r(a)),
        C::Globally(a) => C::Globally(r(a)),
        C::Or(a, b) => C::Or(r(a), r(b)),
        C::And(a, b) => C::And(r(a), r(b)),
        C::Implies(a, b) => C::Implies(r(a), r(b)),
        C::Until(a, b) => C::Until(r(a), r(b)),
    }
}

fn server(f: &ServerFormula, net: &NuNet, errors: &mut Vec<ResolveError>) -> ServerFormula {
    use ServerFormula as S;
    match f {
        S::Atom(p) => S::Atom(bind(p, Role::Server, net, errors)),
        S::Exists(v, c) => S::Exists(*v, client(c, net, errors)),
        S::Forall(v, c) => S::Forall(*v, client(c, net, errors)),
        S::Not(a) => S::Not(Box::new(server(a, net, errors))),
        S::Next(a) => S::Next(Box::new(server(a, net, errors))),
        S::Future(a) => S::Future(Box::new(server(a, net, errors))),
        S::Globally(a) => S::Globally(Box::new(server(a, net, errors))),
        S::Or(a, b) => S::Or(
            Box::new(server(a, net, errors)),
            Box::new(server(b, net, errors)),
        ),
        S::And(a, b) => S::And(
            Box::new(server(a, net, errors)),
            Box::new(server(b, net, errors)),
        ),
        S::Implies(a, b) => S::Implies(
            Box::new(server(a, net, errors)),
            Box::new(server(b, net, errors)),
        ),
        S::Until(a, b) => S::Until(
            Box::new(server(a, net, errors)),
            Box::new(server(b, net, errors)),
        ),
    }
}

/// Replaces every place reference with its index in `net`. Client atoms must
/// name client places and server atoms server places.
pub fn resolve_predicates(
    f: &ServerFormula,
    net: &NuNet,
) -> Result<ServerFormula, Vec<ResolveError>> {
    let mut errors = Vec::new();
    let out = server(f, net, &mut errors);
    if errors.is_empty() {
        Ok(out)
    } else {
        Err(errors)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fotl::parse_formula;
    use crate::net::NetBuilder;

    fn aps_places() -> NuNet {
        let mut b = NetBuilder::new();
        b.place("p_PR", Role::Client, &[1, 2]).unwrap();
        b.place("p_SR", Role::Server, &[0]).unwrap();
        for p in ["p_OP", "p_PU"] {
            b.place(p, Role::Client, &[]).unwrap();
        }
        b.terminal_place("p_ES", &[]).unwrap();
        b.terminal_place("p_EU", &[]).unwrap();
        b.build()
    }

    #[test]
    fn binds_by_index_and_name() {
        let net = aps_places();
        let f = parse_formula("G_s V x ( 'p_PR'(x) => F_c ( p4(x) ) )").unwrap();
        let r = resolve_predicates(&f, &net).unwrap();
        assert_eq!(
            r,
            parse_formula("G_s V x ( p0(x) => F_c ( p4(x) ) )").unwrap()
        );
        assert!(resolve_predicates(&parse_formula("p1").unwrap(), &net).is_ok());
    }

    #[test]
    fn errors() {
        let net = aps_places();
        let e = resolve_predicates(&parse_formula("V x ( p1(x) )").unwrap(), &net).unwrap_err();
        assert!(matches!(e[..], [ResolveError::RoleMismatch { .. }]));
        let e = resolve_predicates(&parse_formula("V x ( p9(x) )").unwrap(), &net).unwrap_err();
        assert_eq!(
            e,
            [ResolveError::IndexOutOfRange {
                index: 9,
                places: 6
            }]
        );
        let e = resolve_predicates(&parse_formula("'nope' & p0").unwrap(), &net).unwrap_err();
        assert_eq!(e.len(), 2);
        assert!(e[0].to_string().starts_with("unknown-place"));
    }
}
