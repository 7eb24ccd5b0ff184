//! Shared helpers for integration tests: random formulas over a net.

#![allow(dead_code)]

pub mod corpora;

use std::collections::BTreeSet;

use nucheck_core::fotl::{ClientFormula, PlaceRef, ServerFormula};
use nucheck_core::net::NuNet;
use rand::Rng;

pub struct FormulaGen {
    server: Vec<usize>,
    client: Vec<usize>,
    /// Only negated atoms, and no `G_s`/`G_c`.
    pub monotone: bool,
}

impl FormulaGen {
    pub fn new(net: &NuNet) -> Self {
        FormulaGen {
            server: net.server_places().collect(),
            client: net.client_places().collect(),
            monotone: false,
        }
    }

    pub fn monotone(net: &NuNet) -> Self {
        FormulaGen {
            monotone: true,
            ..Self::new(net)
        }
    }

    fn server_atom<R: Rng>(&self, rng: &mut R) -> ServerFormula {
        let p = self.server[rng.random_range(0..self.server.len())];
        let a = ServerFormula::Atom(PlaceRef::Index(p));
        if rng.random_bool(0.3) {
            ServerFormula::Not(Box::new(a))
        } else {
            a
        }
    }

    fn client_atom<R: Rng>(&self, rng: &mut R) -> ClientFormula {
        let p = self.client[rng.random_range(0..self.client.len())];
        let a = ClientFormula::Atom(PlaceRef::Index(p));
        if rng.random_bool(0.3) {
            ClientFormula::Not(Box::new(a))
        } else {
            a
        }
    }

    fn quantified<R: Rng>(&self, rng: &mut R, depth: usize) -> ServerFormula {
        let body = self.client(rng, depth.saturating_sub(1));
        if rng.random_bool(0.5) {
            ServerFormula::Exists('x', body)
        } else {
            ServerFormula::Forall('x', body)
        }
    }

    /// A server formula of nesting depth at most `depth`.
    pub fn server<R: Rng>(&self, rng: &mut R, depth: usize) -> ServerFormula {
        use ServerFormula as S;
        if depth == 0 {
            return self.server_atom(rng);
        }
        let b = |f: ServerFormula| Box::new(f);
        let d = depth - 1;
        let choices = if self.monotone { 7 } else { 10 };
        match rng.random_range(0..choices + 3) {
            0 => S::Next(b(self.server(rng, d))),
            1 => S::Future(b(self.server(rng, d))),
            2 => S::Until(b(self.server(rng, d)), b(self.server(rng, d))),
            3 => S::And(b(self.server(rng, d)), b(self.server(rng, d))),
            4 => S::Or(b(self.server(rng, d)), b(self.server(rng, d))),
            5 | 6 => self.server_atom(rng),
            7 if !self.monotone => S::Globally(b(self.server(rng, d))),
            8 if !self.monotone => S::Not(b(self.server(rng, d))),
            9 if !self.monotone => S::Implies(b(self.server(rng, d)), b(self.server(rng, d))),
            // Quantifiers are weighted up so most formulas talk about clients.
            _ => self.quantified(rng, depth),
        }
    }

    /// A client formula of nesting depth at most `depth`.
    pub fn client<R: Rng>(&self, rng: &mut R, depth: usize) -> ClientFormula {
        use ClientFormula as C;
        if depth == 0 {
            return self.client_atom(rng);
        }
        let b = |f: ClientFormula| Box::new(f);
        let d = depth - 1;
        let choices = if self.monotone { 6 } else { 9 };
        match rng.random_range(0..choices) {
            0 => C::Next(b(self.client(rng, d))),
            1 => C::Future(b(self.client(rng, d))),
            2 => C::Until(b(self.client(rng, d)), b(self.client(rng, d))),
            3 => C::And(b(self.client(rng, d)), b(self.client(rng, d))),
            4 => C::Or(b(self.client(rng, d)), b(self.client(rng, d))),
            5 => self.client_atom(rng),
            6 => C::Globally(b(self.client(rng, d))),
            7 => C::Not(b(self.client(rng, d))),
            _ => C::Implies(b(self.client(rng, d)), b(self.client(rng, d))),
        }
    }
}

/// Modalities and quantifiers occurring in `f`, by their concrete symbols.
pub fn operators(f: &ServerFormula) -> BTreeSet<&'static str> {
    fn client(f: &ClientFormula, out: &mut BTreeSet<&'static str>) {
        use ClientFormula as C;
        match f {
            C::Atom(_) => {}
            C::Not(a) => client(a, out),
            C::Or(a, b) | C::And(a, b) | C::Implies(a, b) => {
                client(a, out);
                client(b, out);
            }
            C::Next(a) => {
                out.insert("X_c");
                client(a, out);
            }
            C::Future(a) => {
                out.insert("F_c");
                client(a, out);
            }
            C::Globally(a) => {
                out.insert("G_c");
                client(a, out);
            }
            C::Until(a, b) => {
                out.insert("U_c");
                client(a, out);
                client(b, out);
            }
        }
    }
    fn server(f: &ServerFormula, out: &mut BTreeSet<&'static str>) {
        use ServerFormula as S;
        match f {
            S::Atom(_) => {}
            S::Not(a) => server(a, out),
            S::Or(a, b) | S::And(a, b) | S::Implies(a, b) => {
                server(a, out);
                server(b, out);
            }
            S::Exists(_, c) => {
                out.insert("E");
                client(c, out);
            }
            S::Forall(_, c) => {
                out.insert("V");
                client(c, out);
            }
            S::Next(a) => {
                out.insert("X_s");
                server(a, out);
            }
            S::Future(a) => {
                out.insert("F_s");
                server(a, out);
            }
            S::Globally(a) => {
                out.insert("G_s");
                server(a, out);
            }
            S::Until(a, b) => {
                out.insert("U_s");
                server(a, out);
                server(b, out);
            }
        }
    }
    let mut out = BTreeSet::new();
    server(f, &mut out);
    out
}

/// Syntactic nesting depth (atoms and negated atoms count as 0).
pub fn depth(f: &ServerFormula) -> usize {
    fn client(f: &ClientFormula) -> usize {
        use ClientFormula as C;
        match f {
            C::Atom(_) => 0,
            C::Not(a) if matches!(**a, C::Atom(_)) => 0,
            C::Not(a) | C::Next(a) | C::Future(a) | C::Globally(a) => 1 + client(a),
            C::Or(a, b) | C::And(a, b) | C::Implies(a, b) | C::Until(a, b) => {
                1 + client(a).max(client(b))
            }
        }
    }
    use ServerFormula as S;
    match f {
        S::Atom(_) => 0,
        S::Not(a) if matches!(**a, S::Atom(_)) => 0,
        S::Not(a) | S::Next(a) | S::Future(a) | S::Globally(a) => 1 + depth(a),
        S::Or(a, b) | S::And(a, b) | S::Implies(a, b) | S::Until(a, b) => {
            1 + depth(a).max(depth(b))
        }
        S::Exists(_, c) | S::Forall(_, c) => 1 + client(c),
    }
}
