//! Bounded runs: λ+1 markings, the firing (or stutter) of each step, and an
//! optional loop start.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::{enabled_modes_at, fire_at, Ident, Marking, Mode, NuNet, Variable};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Firing {
    pub transition: usize,
    pub mode: Mode,
}

/// A run of exactly `fired.len()` steps. `fired[s] == None` is a stutter step.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Trace {
    pub markings: Vec<Marking>,
    pub fired: Vec<Option<Firing>>,
    pub loop_start: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("trace has {markings} markings for {steps} steps")]
    Shape { markings: usize, steps: usize },
    #[error("marking 0 differs from the initial marking")]
    NotInitial,
    #[error("step {step}: {reason}")]
    Firing { step: usize, reason: String },
    #[error("step {step}: identifier {id} was already used earlier in the run")]
    Reused { step: usize, id: Ident },
    #[error("step {step}: identifier {id} is outside 0..{kappa}")]
    OutOfRange { step: usize, id: Ident, kappa: u32 },
    #[error("step {step}: stutter while a transition is enabled")]
    IllegalStutter { step: usize },
    #[error("step {step}: stutter changed the marking")]
    StutterMoved { step: usize },
    #[error("loop start {l} is not a valid loop: {reason}")]
    BadLoop { l: usize, reason: String },
}

impl Trace {
    /// The zero-step run at `m0`.
    pub fn initial(m0: Marking) -> Trace {
        Trace {
            markings: vec![m0],
            fired: Vec::new(),
            loop_start: None,
        }
    }

    /// Number of steps λ.
    pub fn lambda(&self) -> usize {
        self.fired.len()
    }

    pub fn last(&self) -> &Marking {
        self.markings
            .last()
            .expect("a trace has at least one marking")
    }

    /// Identifiers present at any instant `<= i`.
    pub fn used_up_to(&self, i: usize) -> BTreeSet<Ident> {
        self.markings[..=i]
            .iter()
            .flat_map(|m| m.support())
            .collect()
    }

    /// Loop starts `l` for which this run closes into a lasso: the last marking
    /// equals marking `l` and no identifier is created in steps `l..λ`.
    pub fn loop_candidates(&self, net: &NuNet) -> Vec<usize> {
        let lam = self.lambda();
        (0..=lam)
            .filter(|&l| self.markings[l] == self.markings[lam])
            .filter(|&l| {
                self.fired[l..]
                    .iter()
                    .flatten()
                    .all(|f| !net.creates(f.transition))
            })
            .collect()
    }

    /// Checks the run against the firing rule, freshness (identifiers are never
    /// reused), the loop start, and, when `kappa` is given, the identifier range
    /// and the stutter-only-at-deadlock discipline.
    pub fn validate(&self, net: &NuNet, kappa: Option<u32>) -> Result<(), TraceError> {
        if self.markings.len() != self.fired.len() + 1 {
            return Err(TraceError::Shape {
                markings: self.markings.len(),
                steps: self.fired.len(),
            });
        }
        let m0 = match kappa {
            Some(k) => net.initial_marking_for(k),
            None => net.initial_marking(),
        };
        if self.markings[0] != m0 {
            return Err(TraceError::NotInitial);
        }
        let mut used: BTreeSet<Ident> = self.markings[0].support().into_iter().collect();
        for (s, step) in self.fired.iter().enumerate() {
            let (m, next) = (&self.markings[s], &self.markings[s + 1]);
            match step {
                None => {
                    if next != m {
                        return Err(TraceError::StutterMoved { step: s });
                    }
                    if let Some(k) = kappa {
                        if has_successor(net, m, &used, k) {
                            return Err(TraceError::IllegalStutter { step: s });
                        }
                    }
                }
                Some(f) => {
                    if let Some(k) = kappa {
                        if let Some((_, id)) = f.mode.iter().find(|(_, id)| *id >= k) {
                            return Err(TraceError::OutOfRange {
                                step: s,
                                id,
                                kappa: k,
                            });
                        }
                    }
                    if let Some(id) = f.mode.get(&Variable::Nu) {
                        if used.contains(&id) {
                            return Err(TraceError::Reused { step: s, id });
                        }
                    }
                    let got =
                        fire_at(net, m, f.transition, &f.mode).map_err(|e| TraceError::Firing {
                            step: s,
                            reason: e.to_string(),
                        })?;
                    if &got != next {
                        return Err(TraceError::Firing {
                            step: s,
                            reason: format!("expected {got}, trace has {next}"),
                        });
                    }
                }
            }
            used.extend(next.support());
        }
        if let Some(l) = self.loop_start {
            if l > self.lambda() || !self.loop_candidates(net).contains(&l) {
                return Err(TraceError::BadLoop {
                    l,
                    reason: "last marking differs from marking l, or an identifier is created inside the loop".into(),
                });
            }
        }
        Ok(())
    }

    /// Per client identifier: first and last instant at which it sits in a client place.
    pub fn presence_spans(&self, net: &NuNet) -> BTreeMap<Ident, (usize, usize)> {
        let mut spans: BTreeMap<Ident, (usize, usize)> = BTreeMap::new();
        for (i, m) in self.markings.iter().enumerate() {
            for p in net.client_places() {
                for id in m.0[p].support() {
                    spans.entry(id).and_modify(|s| s.1 = i).or_insert((i, i));
                }
            }
        }
        spans
    }
}

/// Whether some transition can fire at `m` using identifiers below `kappa`,
/// with ν bound to an identifier outside `used`.
pub fn has_successor(net: &NuNet, m: &Marking, used: &BTreeSet<Ident>, kappa: u32) -> bool {
    (0..net.transitions().len()).any(|t| {
        enabled_modes_at(net, m, t, kappa).iter().any(|sigma| {
            sigma
                .get(&Variable::Nu)
                .is_none_or(|id| !used.contains(&id))
        })
    })
}
