//! Reference semantics: a direct evaluator of FOTL₁ on concrete runs and a
//! brute-force bounded model checker built on run enumeration.
//!
//! A run is read as a first-order temporal model. At each instant `i`:
//!
//! * the server propositions are the server places holding identifier 0;
//! * an identifier is *dead* from the instant after it first sits in a
//!   terminal place, and *live* while it sits in a client place and is not
//!   dead;
//! * the live identifiers form `V_i`, and each live identifier is mapped to
//!   the client places holding it.
//!
//! Quantifiers range over live identifiers other than 0 (the server) unless
//! [`EvalOptions::include_id0`] is set. Client modalities only look at
//! instants where their identifier is live; `G_c` constrains the maximal
//! live window starting at the current instant.

mod eval;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::fotl::ServerFormula;
use crate::net::{enumerate_runs, EnumerateError, FreshPolicy, Ident, NuNet, Trace};

pub use eval::{eval_bounded, eval_client};

/// Semantic switches shared by the oracle and the encoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EvalOptions {
    /// Let quantifiers range over identifier 0 as well.
    pub include_id0: bool,
    /// Use the literal until rule for `U_c` instead of the live-window until.
    pub strict_until: bool,
}

/// First-order temporal model read off a run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceModel {
    pub lambda: usize,
    pub loop_start: Option<usize>,
    /// Server places holding identifier 0, per instant.
    pub server: Vec<BTreeSet<usize>>,
    /// Live identifiers, per instant.
    pub live: Vec<BTreeSet<Ident>>,
    /// Client places of each live identifier, per instant.
    pub xi: Vec<BTreeMap<Ident, BTreeSet<usize>>>,
    /// Dead identifiers, per instant.
    pub dead: Vec<BTreeSet<Ident>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error(
        "malformed trace: identifier {id} is in client places {places:?} at instant {instant}"
    )]
    SplitIdentifier {
        id: Ident,
        instant: usize,
        places: Vec<String>,
    },
}

/// Reads the temporal model of a run. The run is not re-validated.
pub fn derive_trace_model(trace: &Trace, net: &NuNet) -> Result<TraceModel, ModelError> {
    let client: Vec<usize> = net.client_places().collect();
    let lambda = trace.lambda();
    let mut model = TraceModel {
        lambda,
        loop_start: trace.loop_start,
        server: Vec::new(),
        live: Vec::new(),
        xi: Vec::new(),
        dead: Vec::new(),
    };
    let mut dead: BTreeSet<Ident> = BTreeSet::new();
    for (i, m) in trace.markings.iter().enumerate() {
        let mut at: BTreeMap<Ident, BTreeSet<usize>> = BTreeMap::new();
        for &p in &client {
            for id in m.place(p).support() {
                at.entry(id).or_default().insert(p);
            }
        }
        if let Some((&id, ps)) = at.iter().find(|(_, ps)| ps.len() > 1) {
            return Err(ModelError::SplitIdentifier {
                id,
                instant: i,
                places: ps.iter().map(|&p| net.places()[p].id.clone()).collect(),
            });
        }
        at.retain(|id, _| !dead.contains(id));
        model.server.push(
            net.server_places()
                .filter(|&q| m.place(q).contains(0))
                .collect(),
        );
        model.live.push(at.keys().copied().collect());
        model.xi.push(at);
        model.dead.push(dead.clone());
        for p in net.terminal_places() {
            dead.extend(m.place(p).support());
        }
    }
    debug_assert_eq!(model.live.len(), lambda + 1);
    Ok(model)
}

/// Which formula the brute-force search looks for a run of.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckMode {
    /// Runs satisfying the formula.
    Witness,
    /// Runs satisfying the negated formula.
    Refute,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleVerdict {
    /// Some run shape satisfies the searched formula.
    pub satisfiable: bool,
    /// The first satisfying run, with its loop start if it was found as a lasso.
    pub trace: Option<Trace>,
    /// Number of (run, shape) pairs evaluated.
    pub shapes_checked: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error(transparent)]
    Enumerate(#[from] EnumerateError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Every shape of a run: without a loop first, then each valid loop start
/// in increasing order.
pub fn run_shapes(trace: &Trace, net: &NuNet) -> Vec<Trace> {
    let mut out = vec![Trace {
        loop_start: None,
        ..trace.clone()
    }];
    for l in trace.loop_candidates(net) {
        out.push(Trace {
            loop_start: Some(l),
            ..trace.clone()
        });
    }
    out
}

/// Searches all runs of `λ` steps over identifiers `0..κ` (fresh identifiers
/// chosen smallest-first) for one whose model satisfies `f` (or `¬f` when
/// refuting) at instant 0.
pub fn brute_force_check(
    net: &NuNet,
    f: &ServerFormula,
    lambda: usize,
    kappa: u32,
    mode: CheckMode,
    opts: EvalOptions,
    node_limit: usize,
) -> Result<OracleVerdict, OracleError> {
    let mut shapes_checked = 0;
    for run in enumerate_runs(net, lambda, kappa, FreshPolicy::FreshMin, node_limit) {
        let run = run?;
        for shape in run_shapes(&run, net) {
            shapes_checked += 1;
            let model = derive_trace_model(&shape, net)?;
            let holds = eval_bounded(&model, f, 0, opts);
            if holds == (mode == CheckMode::Witness) {
                return Ok(OracleVerdict {
                    satisfiable: true,
                    trace: Some(shape),
                    shapes_checked,
                });
            }
        }
    }
    Ok(OracleVerdict {
        satisfiable: false,
        trace: None,
        shapes_checked,
    })
}

#[cfg(test)]
mod tests;
