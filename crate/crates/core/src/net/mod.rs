//! In-memory ν-nets: places, transitions, variable-labelled arcs, markings,
//! modes, enabling and firing.
//!
//! Tokens are identifiers (`u32`). Identifier 0 is the server token by
//! convention; clients use 1, 2, .... Arc labels are multisets of
//! variables stored as `variable -> multiplicity` maps.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

pub mod runs;
pub mod trace;

pub use runs::{
    collect_runs, enumerate_runs, successors, EnumerateError, FreshPolicy, RunEnumerator,
    DEFAULT_NODE_LIMIT,
};
pub use trace::{has_successor, Firing, Trace, TraceError};

/// Token identifier.
pub type Ident = u32;

/// Arc label variable. `Nu` is the fresh-name variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Variable {
    Nu,
    Named(String),
}

impl Variable {
    /// Parses a label; `nu` and `ν` map to [`Variable::Nu`].
    pub fn parse(label: &str) -> Option<Variable> {
        match label {
            "" => None,
            "nu" | "ν" => Some(Variable::Nu),
            other => Some(Variable::Named(other.to_string())),
        }
    }

    pub fn named(label: &str) -> Variable {
        Variable::parse(label).expect("nonempty variable label")
    }

    pub fn label(&self) -> &str {
        match self {
            Variable::Nu => "nu",
            Variable::Named(s) => s,
        }
    }

    pub fn is_nu(&self) -> bool {
        matches!(self, Variable::Nu)
    }
}

impl Ord for Variable {
    fn cmp(&self, other: &Self) -> Ordering {
        self.label().cmp(other.label())
    }
}

impl PartialOrd for Variable {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variable::Nu => write!(f, "ν"),
            Variable::Named(s) => write!(f, "{s}"),
        }
    }
}

/// Finite multiset of identifiers.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Multiset(BTreeMap<Ident, u32>);

impl Multiset {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_ids(ids: &[Ident]) -> Self {
        let mut m = Self::new();
        for &id in ids {
            m.insert(id, 1);
        }
        m
    }

    pub fn insert(&mut self, id: Ident, n: u32) {
        if n > 0 {
            *self.0.entry(id).or_insert(0) += n;
        }
    }

    /// Removes `n` copies; returns false (leaving `self` untouched) if fewer are present.
    pub fn remove(&mut self, id: Ident, n: u32) -> bool {
        if n == 0 {
            return true;
        }
        match self.0.get_mut(&id) {
            Some(c) if *c >= n => {
                *c -= n;
                if *c == 0 {
                    self.0.remove(&id);
                }
                true
            }
            _ => false,
        }
    }

    pub fn count(&self, id: Ident) -> u32 {
        self.0.get(&id).copied().unwrap_or(0)
    }

    pub fn contains(&self, id: Ident) -> bool {
        self.count(id) > 0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Total number of tokens, counting repetitions.
    pub fn size(&self) -> u32 {
        self.0.values().sum()
    }

    pub fn support(&self) -> impl Iterator<Item = Ident> + '_ {
        self.0.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Ident, u32)> + '_ {
        self.0.iter().map(|(&k, &v)| (k, v))
    }

    pub fn is_sub_multiset_of(&self, other: &Multiset) -> bool {
        self.iter().all(|(id, n)| other.count(id) >= n)
    }
}

impl fmt::Display for Multiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "∅");
        }
        let parts: Vec<String> = self
            .iter()
            .flat_map(|(id, n)| std::iter::repeat_n(id.to_string(), n as usize))
            .collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// Client or server place.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Client,
    Server,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Client => "client",
            Role::Server => "server",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Place {
    pub id: String,
    pub role: Role,
    /// Clients sitting here have exited; they count as dead from the next instant.
    pub terminal: bool,
    pub initial: Multiset,
}

/// Arc label: variable -> multiplicity.
pub type Inscription = BTreeMap<Variable, u32>;

/// Assignment of identifiers to places, indexed like [`NuNet::places`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Marking(pub Vec<Multiset>);

impl Marking {
    pub fn from_ids(places: &[&[Ident]]) -> Self {
        Marking(places.iter().map(|ids| Multiset::from_ids(ids)).collect())
    }

    pub fn place(&self, p: usize) -> &Multiset {
        &self.0[p]
    }

    /// The marking with every identifier at or above `kappa` removed.
    pub fn below(&self, kappa: u32) -> Marking {
        Marking(
            self.0
                .iter()
                .map(|ms| {
                    let mut out = Multiset::new();
                    for (id, n) in ms.iter().filter(|&(id, _)| id < kappa) {
                        out.insert(id, n);
                    }
                    out
                })
                .collect(),
        )
    }

    /// S(M): every identifier present somewhere.
    pub fn support(&self) -> BTreeSet<Ident> {
        self.0.iter().flat_map(|m| m.support()).collect()
    }
}

impl fmt::Display for Marking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|m| m.to_string()).collect();
        write!(f, "⟨{}⟩", parts.join(","))
    }
}

/// Binding of a transition's variables to identifiers.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mode(pub BTreeMap<Variable, Ident>);

impl Mode {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a mode from `(label, id)` pairs.
    pub fn of(pairs: &[(&str, Ident)]) -> Self {
        Mode(
            pairs
                .iter()
                .map(|&(v, id)| (Variable::named(v), id))
                .collect(),
        )
    }

    pub fn get(&self, v: &Variable) -> Option<Ident> {
        self.0.get(v).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Variable, Ident)> {
        self.0.iter().map(|(v, &id)| (v, id))
    }

    /// σ applied to an arc label.
    pub fn apply(&self, insc: &Inscription) -> Option<Multiset> {
        let mut out = Multiset::new();
        for (v, &n) in insc {
            out.insert(self.get(v)?, n);
        }
        Some(out)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|(v, id)| format!("{v}↦{id}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetError {
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("arc endpoint `{0}` is not a declared place or transition")]
    DanglingEndpoint(String),
    #[error("arc `{from}` -> `{to}` must connect a place and a transition")]
    SameKindArc { from: String, to: String },
    #[error("duplicate arc `{from}` -> `{to}`")]
    DuplicateArc { from: String, to: String },
    #[error("arc `{from}` -> `{to}` has an empty inscription")]
    EmptyInscription { from: String, to: String },
    #[error("unknown transition `{0}`")]
    UnknownTransition(String),
    #[error("unknown place `{0}`")]
    UnknownPlace(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FireError {
    #[error("mode {mode} does not bind exactly the variables of `{transition}`")]
    ModeDomain { transition: String, mode: String },
    #[error("transition `{transition}` is not enabled in mode {mode}")]
    NotEnabled { transition: String, mode: String },
}

/// A single-component ν-net.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NuNet {
    places: Vec<Place>,
    transitions: Vec<String>,
    pre: Vec<BTreeMap<usize, Inscription>>,
    post: Vec<BTreeMap<usize, Inscription>>,
}

/// Incremental construction with structural checks (unique ids, declared endpoints).
#[derive(Debug, Default)]
pub struct NetBuilder {
    net: NuNet,
}

impl NetBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    fn taken(&self, id: &str) -> bool {
        self.net.place_index(id).is_some() || self.net.transition_index(id).is_some()
    }

    pub fn place(
        &mut self,
        id: &str,
        role: Role,
        initial: &[Ident],
    ) -> Result<&mut Self, NetError> {
        self.add_place(Place {
            id: id.to_string(),
            role,
            terminal: false,
            initial: Multiset::from_ids(initial),
        })
    }

    pub fn terminal_place(&mut self, id: &str, initial: &[Ident]) -> Result<&mut Self, NetError> {
        self.add_place(Place {
            id: id.to_string(),
            role: Role::Client,
            terminal: true,
            initial: Multiset::from_ids(initial),
        })
    }

    pub fn add_place(&mut self, place: Place) -> Result<&mut Self, NetError> {
        if self.taken(&place.id) {
            return Err(NetError::DuplicateId(place.id));
        }
        self.net.places.push(place);
        Ok(self)
    }

    pub fn transition(&mut self, id: &str) -> Result<&mut Self, NetError> {
        if self.taken(id) {
            return Err(NetError::DuplicateId(id.to_string()));
        }
        self.net.transitions.push(id.to_string());
        self.net.pre.push(BTreeMap::new());
        self.net.post.push(BTreeMap::new());
        Ok(self)
    }

    /// Adds an arc whose label is a whitespace-separated list of variable labels.
    pub fn arc(&mut self, source: &str, target: &str, labels: &str) -> Result<&mut Self, NetError> {
        let mut insc = Inscription::new();
        for tok in labels.split_whitespace() {
            let v = Variable::parse(tok).expect("split_whitespace yields nonempty tokens");
            *insc.entry(v).or_insert(0) += 1;
        }
        self.add_arc(source, target, insc)
    }

    pub fn add_arc(
        &mut self,
        source: &str,
        target: &str,
        insc: Inscription,
    ) -> Result<&mut Self, NetError> {
        let pair = || (source.to_string(), target.to_string());
        if insc.is_empty() || insc.values().all(|&n| n == 0) {
            let (from, to) = pair();
            return Err(NetError::EmptyInscription { from, to });
        }
        let insc: Inscription = insc.into_iter().filter(|(_, n)| *n > 0).collect();
        let sp = self.net.place_index(source);
        let st = self.net.transition_index(source);
        let tp = self.net.place_index(target);
        let tt = self.net.transition_index(target);
        if sp.is_none() && st.is_none() {
            return Err(NetError::DanglingEndpoint(source.to_string()));
        }
        if tp.is_none() && tt.is_none() {
            return Err(NetError::DanglingEndpoint(target.to_string()));
        }
        let slot = match (sp, st, tp, tt) {
            (Some(p), _, _, Some(t)) => self.net.pre[t].entry(p),
            (_, Some(t), Some(p), _) => self.net.post[t].entry(p),
            _ => {
                let (from, to) = pair();
                return Err(NetError::SameKindArc { from, to });
            }
        };
        match slot {
            std::collections::btree_map::Entry::Occupied(_) => {
                let (from, to) = pair();
                Err(NetError::DuplicateArc { from, to })
            }
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(insc);
                Ok(self)
            }
        }
    }

    pub fn build(&mut self) -> NuNet {
        std::mem::take(&mut self.net)
    }
}

impl NuNet {
    pub fn places(&self) -> &[Place] {
        &self.places
    }

    pub fn transitions(&self) -> &[String] {
        &self.transitions
    }

    pub fn place_index(&self, id: &str) -> Option<usize> {
        self.places.iter().position(|p| p.id == id)
    }

    pub fn transition_index(&self, id: &str) -> Option<usize> {
        self.transitions.iter().position(|t| t == id)
    }

    pub fn require_transition(&self, id: &str) -> Result<usize, NetError> {
        self.transition_index(id)
            .ok_or_else(|| NetError::UnknownTransition(id.to_string()))
    }

    /// Input arcs of `t`: place index -> label.
    pub fn input_arcs(&self, t: usize) -> &BTreeMap<usize, Inscription> {
        &self.pre[t]
    }

    /// Output arcs of `t`: place index -> label.
    pub fn output_arcs(&self, t: usize) -> &BTreeMap<usize, Inscription> {
        &self.post[t]
    }

    /// pre(t): variables on input arcs.
    pub fn pre_vars(&self, t: usize) -> BTreeSet<Variable> {
        self.pre[t]
            .values()
            .flat_map(|i| i.keys().cloned())
            .collect()
    }

    /// post(t): variables on output arcs.
    pub fn post_vars(&self, t: usize) -> BTreeSet<Variable> {
        self.post[t]
            .values()
            .flat_map(|i| i.keys().cloned())
            .collect()
    }

    /// Var(t) = pre(t) ∪ post(t), in label order.
    pub fn vars(&self, t: usize) -> Vec<Variable> {
        let mut all = self.pre_vars(t);
        all.extend(self.post_vars(t));
        all.into_iter().collect()
    }

    /// Whether ν labels one of `t`'s output arcs.
    pub fn creates(&self, t: usize) -> bool {
        self.post[t].values().any(|i| i.contains_key(&Variable::Nu))
    }

    pub fn initial_marking(&self) -> Marking {
        Marking(self.places.iter().map(|p| p.initial.clone()).collect())
    }

    /// Initial marking of the κ-bounded system: identifiers `>= kappa` are
    /// not part of it.
    pub fn initial_marking_for(&self, kappa: u32) -> Marking {
        self.initial_marking().below(kappa)
    }

    pub fn client_places(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.places.len()).filter(|&p| self.places[p].role == Role::Client)
    }

    pub fn server_places(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.places.len()).filter(|&p| self.places[p].role == Role::Server)
    }

    pub fn terminal_places(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.places.len()).filter(|&p| self.places[p].terminal)
    }

    /// post(t)∖{ν} ⊆ pre(t).
    pub fn identifier_preserving(&self, t: usize) -> bool {
        let pre = self.pre_vars(t);
        self.post_vars(t)
            .iter()
            .all(|v| v.is_nu() || pre.contains(v))
    }

    /// Reasons why an identifier could end up in two places (or twice in one).
    ///
    /// Empty means every reachable marking holds each identifier at most once,
    /// which is what per-identifier boolean occupancy encodings rely on.
    pub fn single_location_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut seen: BTreeMap<Ident, usize> = BTreeMap::new();
        for p in &self.places {
            for (id, n) in p.initial.iter() {
                *seen.entry(id).or_insert(0) += n as usize;
            }
        }
        for (id, n) in seen {
            if n > 1 {
                out.push(format!(
                    "identifier {id} occurs {n} times in the initial marking"
                ));
            }
        }
        for t in 0..self.transitions.len() {
            let mut consumed: BTreeMap<&Variable, u32> = BTreeMap::new();
            let mut produced: BTreeMap<&Variable, u32> = BTreeMap::new();
            for insc in self.pre[t].values() {
                for (v, n) in insc {
                    *consumed.entry(v).or_insert(0) += n;
                }
            }
            for insc in self.post[t].values() {
                for (v, n) in insc {
                    *produced.entry(v).or_insert(0) += n;
                }
            }
            for (v, n) in produced {
                let limit = if v.is_nu() {
                    1
                } else {
                    consumed.get(v).copied().unwrap_or(0).min(1)
                };
                if n > limit {
                    out.push(format!(
                        "transition `{}` produces `{}` {} time(s) but can consume it at most {}",
                        self.transitions[t],
                        v.label(),
                        n,
                        limit
                    ));
                }
            }
        }
        out
    }
}

/// Severity of a net diagnostic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetDiagnostic {
    pub severity: Severity,
    pub rule: &'static str,
    pub location: String,
    pub message: String,
}

impl fmt::Display for NetDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(
            f,
            "{}: {sev}[{}]: {}",
            self.location, self.rule, self.message
        )
    }
}

/// Checks the ν-net invariants. Never fails; returns diagnostics instead.
pub fn validate_net(net: &NuNet) -> Vec<NetDiagnostic> {
    let mut out = Vec::new();
    for (t, name) in net.transitions.iter().enumerate() {
        for (&p, insc) in &net.pre[t] {
            if insc.contains_key(&Variable::Nu) {
                out.push(NetDiagnostic {
                    severity: Severity::Error,
                    rule: "nu-in-precondition",
                    location: format!("arc {} -> {}", net.places[p].id, name),
                    message: "ν may only label transition-to-place arcs".into(),
                });
            }
        }
        if !net.identifier_preserving(t) {
            out.push(NetDiagnostic {
                severity: Severity::Warning,
                rule: "not-identifier-preserving",
                location: format!("transition {name}"),
                message: "an output variable other than ν does not occur on any input arc".into(),
            });
        }
    }
    for p in &net.places {
        if p.role == Role::Client && p.initial.contains(0) {
            out.push(NetDiagnostic {
                severity: Severity::Error,
                rule: "server-id-in-client-place",
                location: format!("place {}", p.id),
                message: "identifier 0 is reserved for the server".into(),
            });
        }
        if p.terminal && p.role == Role::Server {
            out.push(NetDiagnostic {
                severity: Severity::Error,
                rule: "terminal-server-place",
                location: format!("place {}", p.id),
                message: "only client places can be terminal".into(),
            });
        }
    }
    out
}

/// Whether `(t, sigma)` is enabled at `m`: σ is total on Var(t), σ(ν) ∉ S(m),
/// and every input arc's instantiated label is a sub-multiset of its place.
pub fn is_enabled(net: &NuNet, m: &Marking, t: usize, sigma: &Mode) -> bool {
    let vars = net.vars(t);
    if sigma.0.len() != vars.len() || vars.iter().any(|v| sigma.get(v).is_none()) {
        return false;
    }
    if let Some(fresh) = sigma.get(&Variable::Nu) {
        if m.0.iter().any(|ms| ms.contains(fresh)) {
            return false;
        }
    }
    net.pre[t].iter().all(|(&p, insc)| {
        sigma
            .apply(insc)
            .is_some_and(|need| need.is_sub_multiset_of(&m.0[p]))
    })
}

/// All enabled modes of `t` over identifiers `0..kappa`, ordered by variable
/// label then identifier.
pub fn enabled_modes(net: &NuNet, m: &Marking, t: &str, kappa: u32) -> Result<Vec<Mode>, NetError> {
    let t = net.require_transition(t)?;
    Ok(enabled_modes_at(net, m, t, kappa))
}

/// Index-based form of [`enabled_modes`].
pub fn enabled_modes_at(net: &NuNet, m: &Marking, t: usize, kappa: u32) -> Vec<Mode> {
    let vars = net.vars(t);
    let mut out = Vec::new();
    let mut choice = vec![0u32; vars.len()];
    if kappa == 0 && !vars.is_empty() {
        return out;
    }
    loop {
        let sigma = Mode(vars.iter().cloned().zip(choice.iter().copied()).collect());
        if is_enabled(net, m, t, &sigma) {
            out.push(sigma);
        }
        // Odometer increment, last variable fastest.
        let mut k = vars.len();
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            choice[k] += 1;
            if choice[k] < kappa {
                break;
            }
            choice[k] = 0;
        }
    }
}

/// Firing rule: M'(p) = M(p) − σ(F(p,t)) + σ(F(t,p)). The input marking is untouched.
pub fn fire(net: &NuNet, m: &Marking, t: &str, sigma: &Mode) -> Result<Marking, FireError> {
    let ti = net
        .transition_index(t)
        .ok_or_else(|| FireError::NotEnabled {
            transition: t.to_string(),
            mode: sigma.to_string(),
        })?;
    fire_at(net, m, ti, sigma)
}

/// Index-based form of [`fire`].
pub fn fire_at(net: &NuNet, m: &Marking, t: usize, sigma: &Mode) -> Result<Marking, FireError> {
    let vars = net.vars(t);
    if sigma.0.len() != vars.len() || vars.iter().any(|v| sigma.get(v).is_none()) {
        return Err(FireError::ModeDomain {
            transition: net.transitions[t].clone(),
            mode: sigma.to_string(),
        });
    }
    if !is_enabled(net, m, t, sigma) {
        return Err(FireError::NotEnabled {
            transition: net.transitions[t].clone(),
            mode: sigma.to_string(),
        });
    }
    let mut next = m.clone();
    for (&p, insc) in &net.pre[t] {
        for (v, &n) in insc {
            let removed = next.0[p].remove(sigma.0[v], n);
            debug_assert!(removed, "enabled firing consumes available tokens");
        }
    }
    for (&p, insc) in &net.post[t] {
        for (v, &n) in insc {
            next.0[p].insert(sigma.0[v], n);
        }
    }
    Ok(next)
}
