//! Unrolls a ν-net and a property into one QF_LIA problem for bounds `(λ, κ)`.
//!
//! State at instant `i` is a boolean per (place, identifier) plus an integer
//! token count per place. Each step fires at most one transition in a mode
//! picked by selector booleans; a step may stutter only when no mode is
//! enabled. Fresh names are the smallest identifier not used so far.
//!
//! The property is encoded once for the loop-free shape and once per loop
//! start `l`, guarded by the selectors `noloop` and `loopsel_l`, exactly one
//! of which holds.

mod formula;
pub mod names;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::fotl::ServerFormula;
use crate::net::{validate_net, Ident, NuNet, Severity, Variable};
use crate::oracle::{CheckMode, EvalOptions};
use crate::smt::{Sort, TermId, TermPool};

pub use formula::FormulaEncoder;

/// Which lasso shapes the encoding admits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LoopPolicy {
    /// The loop-free shape and every loop start.
    #[default]
    Any,
    /// Only the loop-free shape.
    NoLoopOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EncodeOptions {
    pub eval: EvalOptions,
    pub mode: CheckMode,
    pub loops: LoopPolicy,
}

impl Default for EncodeOptions {
    fn default() -> Self {
        EncodeOptions {
            eval: EvalOptions::default(),
            mode: CheckMode::Witness,
            loops: LoopPolicy::Any,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodeError {
    #[error("κ must be at least 1")]
    ZeroKappa,
    #[error("net is invalid: {}", .0.join("; "))]
    InvalidNet(Vec<String>),
    #[error("net can place an identifier in two places at once: {}", .0.join("; "))]
    NotSingleLocation(Vec<String>),
    #[error("symbol `{0}` is produced by two different state variables")]
    SymbolClash(String),
}

/// Size figures of an encoding.
#[derive(Debug, Clone, PartialEq, Eq, Default, serde::Serialize)]
pub struct Metrics {
    /// Top-level conjuncts asserted.
    pub clauses: usize,
    /// Declared constants.
    pub variables: usize,
    /// Distinct term nodes reachable from the assertions.
    pub dag_size: usize,
    /// Clauses per constraint family.
    pub categories: BTreeMap<String, usize>,
}

/// A finished problem.
#[derive(Debug, Clone)]
pub struct Encoding {
    pub pool: TermPool,
    pub asserts: Vec<TermId>,
    pub metrics: Metrics,
    pub lambda: usize,
    pub kappa: u32,
    header: Vec<String>,
}

impl Encoding {
    /// SMT-LIB v2 text; byte-identical for identical inputs.
    pub fn to_smt2(&self) -> String {
        self.pool.script("QF_LIA", &self.header, &self.asserts)
    }
}

/// The net unrolled over `0..=λ` with identifiers `0..κ`, before any
/// property is attached.
pub struct Unrolling<'a> {
    pub net: &'a NuNet,
    pub lambda: usize,
    pub kappa: u32,
    pub pool: TermPool,
    asserts: Vec<TermId>,
    categories: BTreeMap<String, usize>,
    /// occ[i][p][j]
    occ: Vec<Vec<Vec<TermId>>>,
    dead: Vec<Vec<TermId>>,
    live: Vec<Vec<TermId>>,
    /// fire[s][t]
    fire: Vec<Vec<TermId>>,
    noloop: TermId,
    loopsel: Vec<TermId>,
}

impl<'a> Unrolling<'a> {
    /// Declares the state variables and asserts the transition system.
    pub fn new(
        net: &'a NuNet,
        lambda: usize,
        kappa: u32,
        loops: LoopPolicy,
    ) -> Result<Self, EncodeError> {
        if kappa == 0 {
            return Err(EncodeError::ZeroKappa);
        }
        let errors: Vec<String> = validate_net(net)
            .into_iter()
            .filter(|d| d.severity == Severity::Error)
            .map(|d| d.to_string())
            .collect();
        if !errors.is_empty() {
            return Err(EncodeError::InvalidNet(errors));
        }
        let split = net.single_location_violations();
        if !split.is_empty() {
            return Err(EncodeError::NotSingleLocation(split));
        }
        let pool = TermPool::new();
        let unset = pool.ff();
        let mut u = Unrolling {
            net,
            lambda,
            kappa,
            pool,
            asserts: Vec::new(),
            categories: BTreeMap::new(),
            occ: Vec::new(),
            dead: Vec::new(),
            live: Vec::new(),
            fire: Vec::new(),
            noloop: unset,
            loopsel: Vec::new(),
        };
        u.declare_state()?;
        u.initial_marking();
        u.counts();
        let used = u.used();
        for (s, used_s) in used.iter().enumerate().take(lambda) {
            u.step(s, used_s);
        }
        u.dead_and_live();
        u.loops(loops);
        Ok(u)
    }

    fn fresh(&mut self, name: String, sort: Sort) -> Result<TermId, EncodeError> {
        if self.pool.lookup(&name).is_some() {
            return Err(EncodeError::SymbolClash(name));
        }
        Ok(self.pool.var(&name, sort))
    }

    fn assert(&mut self, category: &str, t: TermId) {
        *self.categories.entry(category.to_string()).or_insert(0) += 1;
        self.asserts.push(t);
    }

    fn ids(&self) -> impl Iterator<Item = Ident> {
        0..self.kappa
    }

    fn declare_state(&mut self) -> Result<(), EncodeError> {
        let net = self.net;
        for i in 0..=self.lambda {
            let mut at = Vec::new();
            for p in net.places() {
                let mut row = Vec::new();
                for j in 0..self.kappa {
                    row.push(self.fresh(names::occ(&p.id, j, i), Sort::Bool)?);
                }
                at.push(row);
            }
            self.occ.push(at);
            for p in net.places() {
                self.fresh(names::count(&p.id, i), Sort::Int)?;
            }
            let mut dead = Vec::new();
            let mut live = Vec::new();
            for j in 0..self.kappa {
                dead.push(self.fresh(names::dead(j, i), Sort::Bool)?);
                live.push(self.fresh(names::live(j, i), Sort::Bool)?);
            }
            self.dead.push(dead);
            self.live.push(live);
        }
        for s in 0..self.lambda {
            let mut row = Vec::new();
            for (t, name) in net.transitions().iter().enumerate() {
                row.push(self.fresh(names::fire(name, s), Sort::Bool)?);
                for v in net.vars(t) {
                    for j in 0..self.kappa {
                        self.fresh(names::sel(name, v.label(), j, s), Sort::Bool)?;
                    }
                }
            }
            self.fire.push(row);
        }
        self.noloop = self.fresh(names::NOLOOP.to_string(), Sort::Bool)?;
        for l in 0..=self.lambda {
            let v = self.fresh(names::loopsel(l), Sort::Bool)?;
            self.loopsel.push(v);
        }
        Ok(())
    }

    pub fn occ(&self, p: usize, j: Ident, i: usize) -> TermId {
        self.occ[i][p][j as usize]
    }

    pub fn dead(&self, j: Ident, i: usize) -> TermId {
        self.dead[i][j as usize]
    }

    pub fn live(&self, j: Ident, i: usize) -> TermId {
        self.live[i][j as usize]
    }

    pub fn fires(&self, t: usize, s: usize) -> TermId {
        self.fire[s][t]
    }

    pub fn noloop(&self) -> TermId {
        self.noloop
    }

    pub fn loopsel(&self, l: usize) -> TermId {
        self.loopsel[l]
    }

    fn initial_marking(&mut self) {
        let m0 = self.net.initial_marking_for(self.kappa);
        for p in 0..self.net.places().len() {
            for j in self.ids() {
                let v = self.occ(p, j, 0);
                let lit = if m0.place(p).contains(j) {
                    v
                } else {
                    self.pool.not(v)
                };
                self.assert("init", lit);
            }
        }
    }

    fn count(&mut self, p: usize, i: usize) -> TermId {
        let name = names::count(&self.net.places()[p].id, i);
        self.pool.var(&name, Sort::Int)
    }

    fn counts(&mut self) {
        let one = self.pool.int(1);
        let zero = self.pool.int(0);
        for i in 0..=self.lambda {
            for p in 0..self.net.places().len() {
                let n = self.count(p, i);
                let terms: Vec<TermId> = self
                    .ids()
                    .map(|j| {
                        let o = self.occ(p, j, i);
                        self.pool.ite(o, one, zero)
                    })
                    .collect();
                let sum = self.pool.add(terms);
                let eq = self.pool.int_eq(n, sum);
                self.assert("count", eq);
            }
        }
    }

    /// `used[s][j]`: identifier `j` occurs at some instant `<= s`.
    fn used(&mut self) -> Vec<Vec<TermId>> {
        let mut out: Vec<Vec<TermId>> = Vec::new();
        let places = self.net.places().len();
        for s in 0..self.lambda {
            let mut row = Vec::new();
            for j in self.ids() {
                let v = self.pool.bool_var(&names::used(j, s));
                let present: Vec<TermId> = (0..places).map(|p| self.occ(p, j, s)).collect();
                let mut def = self.pool.or(present);
                if s > 0 {
                    def = self.pool.or2(out[s - 1][j as usize], def);
                }
                let eq = self.pool.iff(v, def);
                self.assert("used", eq);
                row.push(v);
            }
            out.push(row);
        }
        out
    }

    /// `j` is the smallest identifier not yet used at step `s`.
    fn fresh_min(&mut self, used: &[TermId], j: Ident) -> TermId {
        let mut parts = vec![self.pool.not(used[j as usize])];
        parts.extend(used[..j as usize].iter().copied());
        self.pool.and(parts)
    }

    fn sel(&mut self, t: usize, v: &Variable, j: Ident, s: usize) -> TermId {
        let name = names::sel(&self.net.transitions()[t], v.label(), j, s);
        self.pool.bool_var(&name)
    }

    /// Whether mode `sigma` (one identifier per variable of `vars`) enables
    /// `t` at step `s`.
    fn enabled(
        &mut self,
        t: usize,
        vars: &[Variable],
        sigma: &[Ident],
        s: usize,
        used: &[TermId],
    ) -> TermId {
        let net = self.net;
        let mut parts = Vec::new();
        for (&p, insc) in net.input_arcs(t) {
            let mut need: BTreeMap<Ident, u32> = BTreeMap::new();
            for (v, &n) in insc {
                let k = vars
                    .iter()
                    .position(|w| w == v)
                    .expect("arc variable belongs to Var(t)");
                *need.entry(sigma[k]).or_insert(0) += n;
            }
            for (j, n) in need {
                if n > 1 {
                    return self.pool.ff();
                }
                parts.push(self.occ(p, j, s));
            }
        }
        if let Some(k) = vars.iter().position(|v| v.is_nu()) {
            parts.push(self.fresh_min(used, sigma[k]));
        }
        self.pool.and(parts)
    }

    fn step(&mut self, s: usize, used: &[TermId]) {
        let net = self.net;
        let tcount = net.transitions().len();
        let places = net.places().len();
        // removed[p][j] / added[p][j] collect (fire ∧ sel) disjuncts.
        let mut removed = vec![vec![Vec::new(); self.kappa as usize]; places];
        let mut added = vec![vec![Vec::new(); self.kappa as usize]; places];
        let mut enabled_any = Vec::new();
        for t in 0..tcount {
            let ft = self.fires(t, s);
            let vars = net.vars(t);
            let mut sel: BTreeMap<&Variable, Vec<TermId>> = BTreeMap::new();
            for v in &vars {
                let row: Vec<TermId> = self.ids().map(|j| self.sel(t, v, j, s)).collect();
                sel.insert(v, row);
            }
            // Selector domain: exactly one identifier per variable when t fires, none otherwise.
            for v in &vars {
                let row = sel[v].clone();
                let one = self.pool.exactly_one(&row);
                let c = self.pool.implies(ft, one);
                self.assert("mode", c);
                let nf = self.pool.not(ft);
                let negs: Vec<TermId> = row.iter().map(|&x| self.pool.not(x)).collect();
                let none = self.pool.and(negs);
                let c = self.pool.implies(nf, none);
                self.assert("mode", c);
            }
            // Precondition.
            for (&p, insc) in net.input_arcs(t) {
                let mut pre = Vec::new();
                for (v, &n) in insc {
                    if n > 1 {
                        pre.push(self.pool.ff());
                        continue;
                    }
                    for j in self.ids() {
                        let occ = self.occ(p, j, s);
                        pre.push(self.pool.implies(sel[v][j as usize], occ));
                    }
                }
                let labels: Vec<&Variable> = insc.keys().collect();
                for (a, v) in labels.iter().enumerate() {
                    for w in &labels[a + 1..] {
                        for j in self.ids() {
                            let both = self.pool.and2(sel[*v][j as usize], sel[*w][j as usize]);
                            pre.push(self.pool.not(both));
                        }
                    }
                }
                let pre = self.pool.and(pre);
                let c = self.pool.implies(ft, pre);
                self.assert("precondition", c);
            }
            if let Some(row) = sel.get(&Variable::Nu).cloned() {
                let mut fresh = Vec::new();
                for j in self.ids() {
                    let fm = self.fresh_min(used, j);
                    fresh.push(self.pool.implies(row[j as usize], fm));
                }
                let fresh = self.pool.and(fresh);
                let c = self.pool.implies(ft, fresh);
                self.assert("fresh", c);
            }
            // Token counts: Wt on inputs, iWt on outputs.
            let mut touched: BTreeMap<usize, (i64, i64)> = BTreeMap::new();
            for (&p, insc) in net.input_arcs(t) {
                touched.entry(p).or_default().0 += insc.values().map(|&n| n as i64).sum::<i64>();
            }
            for (&p, insc) in net.output_arcs(t) {
                touched.entry(p).or_default().1 += insc.values().map(|&n| n as i64).sum::<i64>();
            }
            for (&p, &(wt, iwt)) in &touched {
                let channel = if net
                    .output_arcs(t)
                    .get(&p)
                    .is_some_and(|i| i.contains_key(&Variable::Nu))
                {
                    "nu"
                } else if net.places()[p].role == crate::net::Role::Server {
                    "server"
                } else {
                    "client"
                };
                let now = self.count(p, s);
                let next = self.count(p, s + 1);
                if wt > 0 {
                    let w = self.pool.int(wt);
                    let ge = self.pool.ge(now, w);
                    let c = self.pool.implies(ft, ge);
                    self.assert(&format!("count-pre-{channel}"), c);
                }
                let w = self.pool.int(wt);
                let iw = self.pool.int(iwt);
                let d = self.pool.sub(now, w);
                let rhs = self.pool.add([d, iw]);
                let eq = self.pool.int_eq(next, rhs);
                let c = self.pool.implies(ft, eq);
                self.assert(&format!("count-post-{channel}"), c);
            }
            for (&p, insc) in net.input_arcs(t) {
                for v in insc.keys() {
                    for j in self.ids() {
                        let x = self.pool.and2(ft, sel[v][j as usize]);
                        removed[p][j as usize].push(x);
                    }
                }
            }
            for (&p, insc) in net.output_arcs(t) {
                for v in insc.keys() {
                    for j in self.ids() {
                        let x = self.pool.and2(ft, sel[v][j as usize]);
                        added[p][j as usize].push(x);
                    }
                }
            }
            // Every candidate mode, for the stutter condition.
            let k = self.kappa;
            let mut sigma = vec![0u32; vars.len()];
            loop {
                let e = self.enabled(t, &vars, &sigma, s, used);
                enabled_any.push(e);
                let mut pos = vars.len();
                let mut done = true;
                while pos > 0 {
                    pos -= 1;
                    sigma[pos] += 1;
                    if sigma[pos] < k {
                        done = false;
                        break;
                    }
                    sigma[pos] = 0;
                }
                if done {
                    break;
                }
            }
        }
        // Frame: the next occupancy is the old one minus consumption plus production.
        for p in 0..places {
            for j in self.ids() {
                let now = self.occ(p, j, s);
                let next = self.occ(p, j, s + 1);
                let rem = self.pool.or(removed[p][j as usize].clone());
                let add = self.pool.or(added[p][j as usize].clone());
                let nrem = self.pool.not(rem);
                let keep = self.pool.and2(now, nrem);
                let def = self.pool.or2(keep, add);
                let eq = self.pool.iff(next, def);
                self.assert("frame", eq);
            }
        }
        let row = self.fire[s].clone();
        let amo = self.pool.at_most_one(&row);
        self.assert("interleave", amo);
        let negs: Vec<TermId> = row.iter().map(|&x| self.pool.not(x)).collect();
        let idle = self.pool.and(negs);
        let en = self.pool.or(enabled_any);
        let nen = self.pool.not(en);
        let c = self.pool.implies(idle, nen);
        self.assert("stutter", c);
    }

    fn dead_and_live(&mut self) {
        let net = self.net;
        let terminal: Vec<usize> = net.terminal_places().collect();
        let client: Vec<usize> = net.client_places().collect();
        for j in self.ids() {
            let d0 = self.dead(j, 0);
            let nd0 = self.pool.not(d0);
            self.assert("dead-init", nd0);
            for i in 0..self.lambda {
                let (now, next) = (self.dead(j, i), self.dead(j, i + 1));
                let mut exits = Vec::new();
                for &p in &terminal {
                    let o = self.occ(p, j, i);
                    exits.push(o);
                    let c = self.pool.implies(o, next);
                    self.assert("dead-termination", c);
                }
                let c = self.pool.implies(now, next);
                self.assert("dead-persistence", c);
                let mut why = vec![now];
                why.extend(exits);
                let why = self.pool.or(why);
                let c = self.pool.implies(next, why);
                self.assert("dead-closure", c);
            }
            for i in 0..=self.lambda {
                let somewhere: Vec<TermId> = client.iter().map(|&p| self.occ(p, j, i)).collect();
                let present = self.pool.or(somewhere);
                let d = self.dead(j, i);
                let nd = self.pool.not(d);
                let def = self.pool.and2(present, nd);
                let l = self.live(j, i);
                let eq = self.pool.iff(l, def);
                self.assert("live", eq);
            }
        }
    }

    fn loops(&mut self, policy: LoopPolicy) {
        let mut all = vec![self.noloop];
        all.extend(self.loopsel.iter().copied());
        let one = self.pool.exactly_one(&all);
        self.assert("loop", one);
        if policy == LoopPolicy::NoLoopOnly {
            let n = self.noloop;
            self.assert("loop", n);
            return;
        }
        let lam = self.lambda;
        let creating: Vec<usize> = (0..self.net.transitions().len())
            .filter(|&t| self.net.creates(t))
            .collect();
        for l in 0..=lam {
            let mut parts = Vec::new();
            for p in 0..self.net.places().len() {
                for j in self.ids() {
                    let (a, b) = (self.occ(p, j, lam), self.occ(p, j, l));
                    parts.push(self.pool.iff(a, b));
                }
            }
            for s in l..lam {
                for &t in &creating {
                    let f = self.fires(t, s);
                    parts.push(self.pool.not(f));
                }
            }
            let body = self.pool.and(parts);
            let c = self.pool.implies(self.loopsel[l], body);
            self.assert("loop", c);
        }
    }

    /// Attaches `f` (or its negation when refuting) and finishes the problem.
    pub fn finish(mut self, f: &ServerFormula, opts: EncodeOptions) -> Encoding {
        let target = match opts.mode {
            CheckMode::Witness => f.clone(),
            CheckMode::Refute => ServerFormula::Not(Box::new(f.clone())),
        };
        let lam = self.lambda;
        let mut fe = FormulaEncoder::new(&mut self, opts.eval);
        let mut shapes = Vec::new();
        let body = fe.server(&target, 0, None);
        shapes.push((None, body));
        if opts.loops == LoopPolicy::Any {
            for l in 0..=lam {
                let body = fe.server(&target, 0, Some(l));
                shapes.push((Some(l), body));
            }
        }
        let mut disj = Vec::new();
        for (shape, body) in shapes {
            let guard = match shape {
                None => self.noloop,
                Some(l) => self.loopsel[l],
            };
            disj.push(self.pool.and2(guard, body));
        }
        let prop = self.pool.or(disj);
        self.assert("property", prop);

        let mut clauses = 0;
        for &a in &self.asserts {
            clauses += match self.pool.node(a) {
                crate::smt::Node::And(xs) => xs.len(),
                crate::smt::Node::True => 0,
                _ => 1,
            };
        }
        let metrics = Metrics {
            clauses,
            variables: self.pool.decls().len(),
            dag_size: self.pool.dag_size(&self.asserts),
            categories: self.categories.clone(),
        };
        let mode = match opts.mode {
            CheckMode::Witness => "witness",
            CheckMode::Refute => "refute",
        };
        let header = vec![
            format!("property: {f}"),
            format!(
                "mode: {mode}, lambda: {}, kappa: {}",
                self.lambda, self.kappa
            ),
        ];
        Encoding {
            pool: self.pool,
            asserts: self.asserts,
            metrics,
            lambda: self.lambda,
            kappa: self.kappa,
            header,
        }
    }
}

/// Encodes `f` over `net` at bounds `(λ, κ)`.
pub fn encode(
    net: &NuNet,
    f: &ServerFormula,
    lambda: usize,
    kappa: u32,
    opts: EncodeOptions,
) -> Result<Encoding, EncodeError> {
    Ok(Unrolling::new(net, lambda, kappa, opts.loops)?.finish(f, opts))
}
