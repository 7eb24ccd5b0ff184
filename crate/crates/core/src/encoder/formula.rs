//! Property encoding for one run shape: loop-free (`None`) or a lasso
//! closing at `Some(l)`.

use std::collections::HashMap;

use super::Unrolling;
use crate::fotl::{ClientFormula, ServerFormula};
use crate::net::Ident;
use crate::oracle::EvalOptions;
use crate::smt::TermId;

type Key = (usize, Option<Ident>, usize, Option<usize>);

/// Translates formulas into terms over an [`Unrolling`]'s state variables.
pub struct FormulaEncoder<'u, 'a> {
    u: &'u mut Unrolling<'a>,
    opts: EvalOptions,
    memo: HashMap<Key, TermId>,
}

impl<'u, 'a> FormulaEncoder<'u, 'a> {
    pub fn new(u: &'u mut Unrolling<'a>, opts: EvalOptions) -> Self {
        FormulaEncoder {
            u,
            opts,
            memo: HashMap::new(),
        }
    }

    fn lambda(&self) -> usize {
        self.u.lambda
    }

    /// First instant of F/G ranges: `min(l, i)` with a loop, `i` without.
    fn from(i: usize, lp: Option<usize>) -> usize {
        lp.map_or(i, |l| l.min(i))
    }

    /// `i..=λ`, then `l..i` when the loop starts before `i`.
    fn lasso_order(&self, i: usize, lp: Option<usize>) -> Vec<usize> {
        let mut out: Vec<usize> = (i..=self.lambda()).collect();
        if let Some(l) = lp {
            if l < i {
                out.extend(l..i);
            }
        }
        out
    }

    /// `⋁_{j ∈ from..=to} goal(j) ∧ ⋀_{k ∈ from..j} hold(k)`.
    fn until_range(&mut self, from: usize, to: usize, hold: &[TermId], goal: &[TermId]) -> TermId {
        let mut disj = Vec::new();
        for j in from..=to {
            let mut conj = vec![goal[j]];
            conj.extend(hold[from..j].iter().copied());
            disj.push(self.u.pool.and(conj));
        }
        self.u.pool.or(disj)
    }

    /// Forward part on `i..=λ`, and with a loop starting before `i` the
    /// wrap part on `l..i`.
    fn until(&mut self, i: usize, lp: Option<usize>, hold: &[TermId], goal: &[TermId]) -> TermId {
        let lam = self.lambda();
        let forward = self.until_range(i, lam, hold, goal);
        match lp {
            Some(l) if l < i => {
                let wrap = self.until_range(l, i - 1, hold, goal);
                self.u.pool.or2(forward, wrap)
            }
            _ => forward,
        }
    }

    /// Encoding of server formula `f` at instant `i` for shape `lp`.
    pub fn server(&mut self, f: &ServerFormula, i: usize, lp: Option<usize>) -> TermId {
        // The cache is keyed by node address, so it only lives for one call.
        self.memo.clear();
        self.srv(f, i, lp)
    }

    /// Encoding of client formula `f` for identifier `a` at instant `i`.
    pub fn client(&mut self, f: &ClientFormula, a: Ident, i: usize, lp: Option<usize>) -> TermId {
        self.memo.clear();
        self.cli(f, a, i, lp)
    }

    fn srv(&mut self, f: &ServerFormula, i: usize, lp: Option<usize>) -> TermId {
        let key = (f as *const ServerFormula as usize, None, i, lp);
        if let Some(&t) = self.memo.get(&key) {
            return t;
        }
        let t = self.server_uncached(f, i, lp);
        self.memo.insert(key, t);
        t
    }

    fn server_uncached(&mut self, f: &ServerFormula, i: usize, lp: Option<usize>) -> TermId {
        use ServerFormula as S;
        let lam = self.lambda();
        match f {
            S::Atom(p) => self.u.occ(p.index(), 0, i),
            S::Not(a) => {
                let x = self.srv(a, i, lp);
                self.u.pool.not(x)
            }
            S::Or(a, b) => {
                let (x, y) = (self.srv(a, i, lp), self.srv(b, i, lp));
                self.u.pool.or2(x, y)
            }
            S::And(a, b) => {
                let (x, y) = (self.srv(a, i, lp), self.srv(b, i, lp));
                self.u.pool.and2(x, y)
            }
            S::Implies(a, b) => {
                let (x, y) = (self.srv(a, i, lp), self.srv(b, i, lp));
                self.u.pool.implies(x, y)
            }
            S::Exists(_, c) => {
                let mut disj = Vec::new();
                for a in self.domain() {
                    let live = self.u.live(a, i);
                    let body = self.cli(c, a, i, lp);
                    disj.push(self.u.pool.and2(live, body));
                }
                self.u.pool.or(disj)
            }
            S::Forall(_, c) => {
                let mut conj = Vec::new();
                for a in self.domain() {
                    let live = self.u.live(a, i);
                    let body = self.cli(c, a, i, lp);
                    conj.push(self.u.pool.implies(live, body));
                }
                self.u.pool.and(conj)
            }
            S::Next(a) => match (i < lam, lp) {
                (true, _) => self.srv(a, i + 1, lp),
                (false, Some(l)) => self.srv(a, l, lp),
                (false, None) => self.u.pool.ff(),
            },
            S::Future(a) => {
                let parts: Vec<TermId> = (Self::from(i, lp)..=lam)
                    .map(|j| self.srv(a, j, lp))
                    .collect();
                self.u.pool.or(parts)
            }
            S::Globally(a) => match lp {
                None => self.u.pool.ff(),
                Some(_) => {
                    let parts: Vec<TermId> = (Self::from(i, lp)..=lam)
                        .map(|j| self.srv(a, j, lp))
                        .collect();
                    self.u.pool.and(parts)
                }
            },
            S::Until(a, b) => {
                let hold: Vec<TermId> = (0..=lam).map(|j| self.srv(a, j, lp)).collect();
                let goal: Vec<TermId> = (0..=lam).map(|j| self.srv(b, j, lp)).collect();
                self.until(i, lp, &hold, &goal)
            }
        }
    }

    fn domain(&self) -> std::ops::Range<Ident> {
        let start = if self.opts.include_id0 { 0 } else { 1 };
        start.min(self.u.kappa)..self.u.kappa
    }

    fn cli(&mut self, f: &ClientFormula, a: Ident, i: usize, lp: Option<usize>) -> TermId {
        let key = (f as *const ClientFormula as usize, Some(a), i, lp);
        if let Some(&t) = self.memo.get(&key) {
            return t;
        }
        let t = self.client_uncached(f, a, i, lp);
        self.memo.insert(key, t);
        t
    }

    fn live_and(&mut self, g: &ClientFormula, a: Ident, j: usize, lp: Option<usize>) -> TermId {
        let live = self.u.live(a, j);
        let body = self.cli(g, a, j, lp);
        self.u.pool.and2(live, body)
    }

    fn client_uncached(
        &mut self,
        f: &ClientFormula,
        a: Ident,
        i: usize,
        lp: Option<usize>,
    ) -> TermId {
        use ClientFormula as C;
        let lam = self.lambda();
        match f {
            C::Atom(p) => {
                let occ = self.u.occ(p.index(), a, i);
                let dead = self.u.dead(a, i);
                let alive = self.u.pool.not(dead);
                self.u.pool.and2(occ, alive)
            }
            C::Not(g) => {
                let x = self.cli(g, a, i, lp);
                self.u.pool.not(x)
            }
            C::Or(g, h) => {
                let (x, y) = (self.cli(g, a, i, lp), self.cli(h, a, i, lp));
                self.u.pool.or2(x, y)
            }
            C::And(g, h) => {
                let (x, y) = (self.cli(g, a, i, lp), self.cli(h, a, i, lp));
                self.u.pool.and2(x, y)
            }
            C::Implies(g, h) => {
                let (x, y) = (self.cli(g, a, i, lp), self.cli(h, a, i, lp));
                self.u.pool.implies(x, y)
            }
            C::Next(g) => match (i < lam, lp) {
                (true, _) => self.live_and(g, a, i + 1, lp),
                (false, Some(l)) => self.live_and(g, a, l, lp),
                (false, None) => self.u.pool.ff(),
            },
            C::Future(g) => {
                let parts: Vec<TermId> = (Self::from(i, lp)..=lam)
                    .map(|j| self.live_and(g, a, j, lp))
                    .collect();
                self.u.pool.or(parts)
            }
            C::Globally(g) => {
                // ⋀_n (⋀_{k≤n} live(s_k) ⇒ g(s_n)) ∧ live(i) over the lasso order s.
                let order = self.lasso_order(i, lp);
                let mut conj = vec![self.u.live(a, i)];
                let mut prefix = Vec::new();
                for &j in &order {
                    prefix.push(self.u.live(a, j));
                    let guard = self.u.pool.and(prefix.clone());
                    let body = self.cli(g, a, j, lp);
                    conj.push(self.u.pool.implies(guard, body));
                }
                self.u.pool.and(conj)
            }
            C::Until(g, h) if self.opts.strict_until => self.strict_until(g, h, a, i, lp),
            C::Until(g, h) => {
                let hold: Vec<TermId> = (0..=lam).map(|j| self.live_and(g, a, j, lp)).collect();
                let goal: Vec<TermId> = (0..=lam).map(|j| self.live_and(h, a, j, lp)).collect();
                self.until(i, lp, &hold, &goal)
            }
        }
    }

    /// The until rule taken literally; see the oracle's counterpart.
    fn strict_until(
        &mut self,
        g: &ClientFormula,
        h: &ClientFormula,
        a: Ident,
        i: usize,
        lp: Option<usize>,
    ) -> TermId {
        let lam = self.lambda();
        match lp {
            None => {
                let all_h: Vec<TermId> = (i..=lam).map(|k| self.cli(h, a, k, lp)).collect();
                let all_h = self.u.pool.and(all_h);
                let mut some_j = Vec::new();
                for j in i..=lam {
                    let live = self.u.live(a, j);
                    let some_g: Vec<TermId> = (i..j).map(|k| self.cli(g, a, k, lp)).collect();
                    let some_g = self.u.pool.or(some_g);
                    some_j.push(self.u.pool.and2(live, some_g));
                }
                let some_j = self.u.pool.or(some_j);
                self.u.pool.and2(all_h, some_j)
            }
            Some(_) => {
                let hold: Vec<TermId> = (0..=lam).map(|j| self.cli(g, a, j, lp)).collect();
                let goal: Vec<TermId> = (0..=lam).map(|j| self.cli(h, a, j, lp)).collect();
                let plain = self.until(i, lp, &hold, &goal);
                let lives: Vec<TermId> = (Self::from(i, lp)..=lam)
                    .map(|j| self.u.live(a, j))
                    .collect();
                let some_live = self.u.pool.or(lives);
                self.u.pool.and2(plain, some_live)
            }
        }
    }
}
