//! Direct evaluation of formulas on a [`TraceModel`].

use super::{EvalOptions, TraceModel};
use crate::fotl::{ClientFormula, ServerFormula};
use crate::net::Ident;

struct Ctx<'a> {
    m: &'a TraceModel,
    opts: EvalOptions,
}

impl Ctx<'_> {
    fn lambda(&self) -> usize {
        self.m.lambda
    }

    /// First instant of F/G ranges: `min(l, i)` with a loop, `i` without.
    fn from(&self, i: usize) -> usize {
        self.m.loop_start.map_or(i, |l| l.min(i))
    }

    /// Instants `i..=λ` followed, with a loop starting before `i`, by `l..i`.
    fn lasso_order(&self, i: usize) -> Vec<usize> {
        let mut out: Vec<usize> = (i..=self.lambda()).collect();
        if let Some(l) = self.m.loop_start {
            if l < i {
                out.extend(l..i);
            }
        }
        out
    }

    fn live(&self, a: Ident, i: usize) -> bool {
        self.m.live[i].contains(&a)
    }

    /// Some `j` in `from..=to` satisfies `goal`, and `hold` is true on
    /// `from..j`.
    fn until_range(
        &self,
        from: usize,
        to: usize,
        hold: impl Fn(usize) -> bool,
        goal: impl Fn(usize) -> bool,
    ) -> bool {
        for j in from..=to {
            if goal(j) {
                return true;
            }
            if !hold(j) {
                return false;
            }
        }
        false
    }

    /// Until in either regime: forward from `i`, plus the wrap-around part
    /// `l..i` when a loop starts before `i`.
    fn until(
        &self,
        i: usize,
        hold: impl Fn(usize) -> bool + Copy,
        goal: impl Fn(usize) -> bool + Copy,
    ) -> bool {
        if self.until_range(i, self.lambda(), hold, goal) {
            return true;
        }
        match self.m.loop_start {
            Some(l) if l < i => self.until_range(l, i - 1, hold, goal),
            _ => false,
        }
    }

    fn server(&self, f: &ServerFormula, i: usize) -> bool {
        use ServerFormula as S;
        let lam = self.lambda();
        match f {
            S::Atom(p) => self.m.server[i].contains(&p.index()),
            S::Not(a) => !self.server(a, i),
            S::Or(a, b) => self.server(a, i) || self.server(b, i),
            S::And(a, b) => self.server(a, i) && self.server(b, i),
            S::Implies(a, b) => !self.server(a, i) || self.server(b, i),
            S::Exists(_, c) => self.domain(i).any(|a| self.client(c, a, i)),
            S::Forall(_, c) => self.domain(i).all(|a| self.client(c, a, i)),
            S::Next(a) => match (i < lam, self.m.loop_start) {
                (true, _) => self.server(a, i + 1),
                (false, Some(l)) => self.server(a, l),
                (false, None) => false,
            },
            S::Future(a) => (self.from(i)..=lam).any(|j| self.server(a, j)),
            S::Globally(a) => {
                self.m.loop_start.is_some() && (self.from(i)..=lam).all(|j| self.server(a, j))
            }
            S::Until(a, b) => self.until(i, |j| self.server(a, j), |j| self.server(b, j)),
        }
    }

    fn domain(&self, i: usize) -> impl Iterator<Item = Ident> + '_ {
        let include0 = self.opts.include_id0;
        self.m.live[i]
            .iter()
            .copied()
            .filter(move |&a| include0 || a != 0)
    }

    fn client(&self, f: &ClientFormula, a: Ident, i: usize) -> bool {
        use ClientFormula as C;
        let lam = self.lambda();
        let live_and = |j: usize, g: &ClientFormula| self.live(a, j) && self.client(g, a, j);
        match f {
            C::Atom(p) => self.m.xi[i]
                .get(&a)
                .is_some_and(|ps| ps.contains(&p.index())),
            C::Not(g) => !self.client(g, a, i),
            C::Or(g, h) => self.client(g, a, i) || self.client(h, a, i),
            C::And(g, h) => self.client(g, a, i) && self.client(h, a, i),
            C::Implies(g, h) => !self.client(g, a, i) || self.client(h, a, i),
            C::Next(g) => match (i < lam, self.m.loop_start) {
                (true, _) => live_and(i + 1, g),
                (false, Some(l)) => live_and(l, g),
                (false, None) => false,
            },
            C::Future(g) => (self.from(i)..=lam).any(|j| live_and(j, g)),
            C::Globally(g) => {
                if !self.live(a, i) {
                    return false;
                }
                for j in self.lasso_order(i) {
                    if !self.live(a, j) {
                        break;
                    }
                    if !self.client(g, a, j) {
                        return false;
                    }
                }
                true
            }
            C::Until(g, h) if self.opts.strict_until => self.strict_until(g, h, a, i),
            C::Until(g, h) => self.until(i, |j| live_and(j, g), |j| live_and(j, h)),
        }
    }

    /// The until rule taken literally: some live instant `j` in range, every
    /// instant of `i..=λ` satisfies the right operand, and some instant of
    /// `i..j` satisfies the left one. With a loop, the live instant only
    /// gates an ordinary lasso until.
    fn strict_until(&self, g: &ClientFormula, h: &ClientFormula, a: Ident, i: usize) -> bool {
        let lam = self.lambda();
        match self.m.loop_start {
            None => {
                let all_h = (i..=lam).all(|k| self.client(h, a, k));
                all_h && (i..=lam).any(|j| self.live(a, j) && (i..j).any(|k| self.client(g, a, k)))
            }
            Some(_) => {
                let plain = self.until(i, |j| self.client(g, a, j), |j| self.client(h, a, j));
                plain && (self.from(i)..=lam).any(|j| self.live(a, j))
            }
        }
    }
}

/// Whether `f` holds at instant `i`. Panics if `i > λ`.
pub fn eval_bounded(model: &TraceModel, f: &ServerFormula, i: usize, opts: EvalOptions) -> bool {
    assert!(
        i <= model.lambda,
        "instant {i} is beyond the bound {}",
        model.lambda
    );
    Ctx { m: model, opts }.server(f, i)
}

/// Whether the client formula holds for identifier `a` at instant `i`.
pub fn eval_client(
    model: &TraceModel,
    f: &ClientFormula,
    a: Ident,
    i: usize,
    opts: EvalOptions,
) -> bool {
    assert!(
        i <= model.lambda,
        "instant {i} is beyond the bound {}",
        model.lambda
    );
    Ctx { m: model, opts }.client(f, a, i)
}
