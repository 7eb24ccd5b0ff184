//! Exhaustive enumeration of bounded runs.

use std::collections::BTreeSet;

use thiserror::Error;

use super::trace::{Firing, Trace};
use super::{enabled_modes_at, fire_at, Ident, Marking, NuNet, Variable};

/// How ν picks its identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FreshPolicy {
    /// Every identifier below κ never used earlier in the run.
    All,
    /// Only the smallest identifier never used earlier in the run.
    FreshMin,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumerateError {
    #[error("run enumeration exceeded the node limit of {limit}")]
    CapExceeded { limit: usize },
}

/// Default node limit for [`enumerate_runs`].
pub const DEFAULT_NODE_LIMIT: usize = 2_000_000;

struct Frame {
    successors: Vec<(Option<Firing>, Marking)>,
    next: usize,
}

/// Depth-first iterator over every run of exactly λ steps.
///
/// Yields `Err(CapExceeded)` once and then stops if more than `node_limit`
/// search nodes are expanded.
pub struct RunEnumerator<'a> {
    net: &'a NuNet,
    lambda: usize,
    kappa: u32,
    policy: FreshPolicy,
    node_limit: usize,
    nodes: usize,
    markings: Vec<Marking>,
    fired: Vec<Option<Firing>>,
    used: Vec<BTreeSet<Ident>>,
    stack: Vec<Frame>,
    started: bool,
    done: bool,
}

/// Enumerates runs of `net` with λ steps over identifiers `0..kappa`,
/// starting from [`NuNet::initial_marking_for`].
///
/// Runs that reach a marking with no enabled transition are padded with
/// stutter steps.
pub fn enumerate_runs(
    net: &NuNet,
    lambda: usize,
    kappa: u32,
    policy: FreshPolicy,
    node_limit: usize,
) -> RunEnumerator<'_> {
    let m0 = net.initial_marking_for(kappa);
    let used0 = m0.support();
    RunEnumerator {
        net,
        lambda,
        kappa,
        policy,
        node_limit,
        nodes: 0,
        markings: vec![m0],
        fired: Vec::new(),
        used: vec![used0],
        stack: Vec::new(),
        started: false,
        done: false,
    }
}

/// Collects every run, or fails if the node limit is hit.
pub fn collect_runs(
    net: &NuNet,
    lambda: usize,
    kappa: u32,
    policy: FreshPolicy,
    node_limit: usize,
) -> Result<Vec<Trace>, EnumerateError> {
    enumerate_runs(net, lambda, kappa, policy, node_limit).collect()
}

/// Successor steps of `m` in deterministic order (transition, then mode order).
/// A deadlocked marking gets a single stutter successor.
pub fn successors(
    net: &NuNet,
    m: &Marking,
    used: &BTreeSet<Ident>,
    kappa: u32,
    policy: FreshPolicy,
) -> Vec<(Option<Firing>, Marking)> {
    let fresh_min = (0..kappa).find(|id| !used.contains(id));
    let mut out = Vec::new();
    for t in 0..net.transitions().len() {
        for sigma in enabled_modes_at(net, m, t, kappa) {
            if let Some(id) = sigma.get(&Variable::Nu) {
                let ok = match policy {
                    FreshPolicy::All => !used.contains(&id),
                    FreshPolicy::FreshMin => Some(id) == fresh_min,
                };
                if !ok {
                    continue;
                }
            }
            let next = fire_at(net, m, t, &sigma).expect("enabled mode fires");
            out.push((
                Some(Firing {
                    transition: t,
                    mode: sigma,
                }),
                next,
            ));
        }
    }
    if out.is_empty() {
        out.push((None, m.clone()));
    }
    out
}

impl RunEnumerator<'_> {
    fn expand(&mut self) -> bool {
        self.nodes += 1;
        if self.nodes > self.node_limit {
            return false;
        }
        let m = self.markings.last().unwrap();
        let used = self.used.last().unwrap();
        let successors = successors(self.net, m, used, self.kappa, self.policy);
        self.stack.push(Frame {
            successors,
            next: 0,
        });
        true
    }

    fn current(&self) -> Trace {
        Trace {
            markings: self.markings.clone(),
            fired: self.fired.clone(),
            loop_start: None,
        }
    }
}

impl Iterator for RunEnumerator<'_> {
    type Item = Result<Trace, EnumerateError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            if self.lambda == 0 {
                self.done = true;
                return Some(Ok(self.current()));
            }
            if !self.expand() {
                self.done = true;
                return Some(Err(EnumerateError::CapExceeded {
                    limit: self.node_limit,
                }));
            }
        }
        loop {
            let Some(frame) = self.stack.last_mut() else {
                self.done = true;
                return None;
            };
            if frame.next == frame.successors.len() {
                self.stack.pop();
                if !self.stack.is_empty() {
                    self.markings.pop();
                    self.fired.pop();
                    self.used.pop();
                }
                continue;
            }
            let (step, next) = frame.successors[frame.next].clone();
            frame.next += 1;
            let depth = self.fired.len();
            if depth + 1 == self.lambda {
                let mut trace = self.current();
                trace.markings.push(next);
                trace.fired.push(step);
                return Some(Ok(trace));
            }
            let mut used = self.used.last().unwrap().clone();
            used.extend(next.support());
            self.markings.push(next);
            self.fired.push(step);
            self.used.push(used);
            if !self.expand() {
                self.done = true;
                return Some(Err(EnumerateError::CapExceeded {
                    limit: self.node_limit,
                }));
            }
        }
    }
}
