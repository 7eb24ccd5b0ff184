//! Two-dimensional bounded model checking: walk the `(λ, κ)` grid (λ outer,
//! κ inner) and stop at the first satisfiable cell.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::encoder::{encode, EncodeError, EncodeOptions, LoopPolicy, Metrics};
use crate::fotl::ServerFormula;
use crate::net::{Ident, NuNet, Trace, DEFAULT_NODE_LIMIT};
use crate::oracle::{
    brute_force_check, derive_trace_model, CheckMode, EvalOptions, ModelError, OracleError,
};
use crate::solver::{extract_trace, run_solver, DecodeError, SolverConfig, SolverError, Status};

pub const REPORT_SCHEMA: &str = "nucheck-report/1";

#[derive(Debug, Clone)]
pub enum Engine {
    Smt(SolverConfig),
    Oracle { node_limit: usize },
}

impl Engine {
    pub fn oracle() -> Self {
        Engine::Oracle {
            node_limit: DEFAULT_NODE_LIMIT,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Engine::Smt(_) => "smt",
            Engine::Oracle { .. } => "oracle",
        }
    }
}

#[derive(Debug, Clone)]
pub struct BmcConfig {
    pub lambdas: std::ops::RangeInclusive<usize>,
    pub kappas: std::ops::RangeInclusive<u32>,
    pub mode: CheckMode,
    pub eval: EvalOptions,
    pub loops: LoopPolicy,
    pub engine: Engine,
    /// Directory receiving `cell_l<λ>_k<κ>.smt2` for every SMT cell.
    pub emit_smt: Option<PathBuf>,
}

impl Default for BmcConfig {
    fn default() -> Self {
        BmcConfig {
            lambdas: 1..=5,
            kappas: 2..=3,
            mode: CheckMode::Witness,
            eval: EvalOptions::default(),
            loops: LoopPolicy::Any,
            engine: Engine::Smt(SolverConfig::default()),
            emit_smt: None,
        }
    }
}

#[derive(Debug, Error)]
pub enum DriverError {
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("cell (λ={lambda}, κ={kappa}): {source}")]
    Decode {
        lambda: usize,
        kappa: u32,
        #[source]
        source: DecodeError,
    },
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl DriverError {
    /// Whether the failure lies with the solver rather than the inputs.
    pub fn is_solver_failure(&self) -> bool {
        matches!(self, DriverError::Solver(_) | DriverError::Decode { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CellVerdict {
    Sat,
    Unsat,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellReport {
    pub lambda: usize,
    pub kappa: u32,
    pub verdict: CellVerdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metrics: Option<Metrics>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shapes_checked: Option<usize>,
    pub encode_ms: f64,
    pub solve_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepReport {
    pub step: usize,
    /// `None` for a stutter step.
    pub transition: Option<String>,
    pub mode: BTreeMap<String, Ident>,
}

/// A run in report form: per instant, each non-empty place and its identifiers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceReport {
    pub lambda: usize,
    pub loop_start: Option<usize>,
    pub markings: Vec<BTreeMap<String, Vec<Ident>>>,
    pub steps: Vec<StepReport>,
}

impl TraceReport {
    pub fn new(net: &NuNet, trace: &Trace) -> Self {
        let markings = trace
            .markings
            .iter()
            .map(|m| {
                net.places()
                    .iter()
                    .enumerate()
                    .filter(|(p, _)| !m.place(*p).is_empty())
                    .map(|(p, place)| {
                        let ids = m
                            .place(p)
                            .iter()
                            .flat_map(|(id, n)| std::iter::repeat_n(id, n as usize))
                            .collect();
                        (place.id.clone(), ids)
                    })
                    .collect()
            })
            .collect();
        let steps = trace
            .fired
            .iter()
            .enumerate()
            .map(|(s, f)| StepReport {
                step: s,
                transition: f.as_ref().map(|f| net.transitions()[f.transition].clone()),
                mode: f
                    .as_ref()
                    .map(|f| {
                        f.mode
                            .iter()
                            .map(|(v, id)| (v.label().to_string(), id))
                            .collect()
                    })
                    .unwrap_or_default(),
            })
            .collect();
        TraceReport {
            lambda: trace.lambda(),
            loop_start: trace.loop_start,
            markings,
            steps,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub property: String,
    /// `witness` or `refute`.
    pub mode: &'static str,
    pub engine: &'static str,
    pub include_id0: bool,
    pub strict_until: bool,
    pub no_loop: bool,
    pub lambda_max: usize,
    pub kappa_max: u32,
    /// `sat`, `unsat` (within the bounds) or `unknown`.
    pub verdict: CellVerdict,
    /// Plain-language reading of the verdict.
    pub summary: String,
    pub sat_at: Option<(usize, u32)>,
    pub cells: Vec<CellReport>,
    pub trace: Option<TraceReport>,
    #[serde(skip)]
    pub raw_trace: Option<Trace>,
}

impl Report {
    /// Zeroes every timing so reports can be compared byte for byte.
    pub fn without_timings(mut self) -> Self {
        for c in &mut self.cells {
            c.encode_ms = 0.0;
            c.solve_ms = 0.0;
        }
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn ms(d: Duration) -> f64 {
    (d.as_secs_f64() * 1e6).round() / 1e3
}

/// Result of one grid cell.
pub struct CellOutcome {
    pub report: CellReport,
    pub trace: Option<Trace>,
}

/// Checks a single `(λ, κ)` cell.
pub fn check_cell(
    net: &NuNet,
    f: &ServerFormula,
    lambda: usize,
    kappa: u32,
    cfg: &BmcConfig,
) -> Result<CellOutcome, DriverError> {
    match &cfg.engine {
        Engine::Smt(solver) => {
            let t0 = Instant::now();
            let opts = EncodeOptions {
                eval: cfg.eval,
                mode: cfg.mode,
                loops: cfg.loops,
            };
            let enc = encode(net, f, lambda, kappa, opts)?;
            let script = enc.to_smt2();
            let encode_ms = ms(t0.elapsed());
            if let Some(dir) = &cfg.emit_smt {
                let path = dir.join(format!("cell_l{lambda}_k{kappa}.smt2"));
                std::fs::create_dir_all(dir)
                    .and_then(|_| std::fs::write(&path, &script))
                    .map_err(|source| DriverError::Io {
                        path: path.display().to_string(),
                        source,
                    })?;
            }
            let out = run_solver(&script, solver)?;
            let (verdict, trace) = match out.status {
                Status::Sat(model) => {
                    let trace = extract_trace(net, lambda, kappa, &model).map_err(|source| {
                        DriverError::Decode {
                            lambda,
                            kappa,
                            source,
                        }
                    })?;
                    (CellVerdict::Sat, Some(trace))
                }
                Status::Unsat => (CellVerdict::Unsat, None),
                Status::Unknown => (CellVerdict::Unknown, None),
            };
            Ok(CellOutcome {
                report: CellReport {
                    lambda,
                    kappa,
                    verdict,
                    metrics: Some(enc.metrics),
                    shapes_checked: None,
                    encode_ms,
                    solve_ms: ms(out.elapsed),
                },
                trace,
            })
        }
        Engine::Oracle { node_limit } => {
            let t0 = Instant::now();
            if cfg.loops == LoopPolicy::NoLoopOnly {
                return check_cell_oracle_noloop(net, f, lambda, kappa, cfg, *node_limit, t0);
            }
            let v = brute_force_check(net, f, lambda, kappa, cfg.mode, cfg.eval, *node_limit)?;
            Ok(CellOutcome {
                report: CellReport {
                    lambda,
                    kappa,
                    verdict: if v.satisfiable {
                        CellVerdict::Sat
                    } else {
                        CellVerdict::Unsat
                    },
                    metrics: None,
                    shapes_checked: Some(v.shapes_checked),
                    encode_ms: 0.0,
                    solve_ms: ms(t0.elapsed()),
                },
                trace: v.trace,
            })
        }
    }
}

/// Oracle search over loop-free shapes only.
fn check_cell_oracle_noloop(
    net: &NuNet,
    f: &ServerFormula,
    lambda: usize,
    kappa: u32,
    cfg: &BmcConfig,
    node_limit: usize,
    t0: Instant,
) -> Result<CellOutcome, DriverError> {
    use crate::net::{enumerate_runs, FreshPolicy};
    use crate::oracle::eval_bounded;
    let mut shapes = 0;
    let mut found = None;
    for run in enumerate_runs(net, lambda, kappa, FreshPolicy::FreshMin, node_limit) {
        let run = run.map_err(OracleError::from)?;
        shapes += 1;
        let model = derive_trace_model(&run, net)?;
        if eval_bounded(&model, f, 0, cfg.eval) == (cfg.mode == CheckMode::Witness) {
            found = Some(run);
            break;
        }
    }
    Ok(CellOutcome {
        report: CellReport {
            lambda,
            kappa,
            verdict: if found.is_some() {
                CellVerdict::Sat
            } else {
                CellVerdict::Unsat
            },
            metrics: None,
            shapes_checked: Some(shapes),
            encode_ms: 0.0,
            solve_ms: ms(t0.elapsed()),
        },
        trace: found,
    })
}

/// Runs the grid and builds the report.
pub fn run_2dbmc(net: &NuNet, f: &ServerFormula, cfg: &BmcConfig) -> Result<Report, DriverError> {
    let mut cells = Vec::new();
    let mut found: Option<(usize, u32, Trace)> = None;
    let mut unknown = false;
    'grid: for lambda in cfg.lambdas.clone() {
        for kappa in cfg.kappas.clone() {
            let out = check_cell(net, f, lambda, kappa, cfg)?;
            let verdict = out.report.verdict;
            cells.push(out.report);
            match verdict {
                CellVerdict::Sat => {
                    found = Some((lambda, kappa, out.trace.expect("sat cells carry a run")));
                    break 'grid;
                }
                CellVerdict::Unknown => unknown = true,
                CellVerdict::Unsat => {}
            }
        }
    }
    let (mode, what) = match cfg.mode {
        CheckMode::Witness => ("witness", "run satisfying the property"),
        CheckMode::Refute => ("refute", "run violating the property"),
    };
    let lambda_max = *cfg.lambdas.end();
    let kappa_max = *cfg.kappas.end();
    let (verdict, summary) = match (&found, unknown) {
        (Some((l, k, _)), _) => (CellVerdict::Sat, format!("found a {what} at λ={l}, κ={k}")),
        (None, true) => (
            CellVerdict::Unknown,
            format!("no {what} found; some cells were inconclusive"),
        ),
        (None, false) => (
            CellVerdict::Unsat,
            format!("no {what} up to λ={lambda_max}, κ={kappa_max}"),
        ),
    };
    Ok(Report {
        schema: REPORT_SCHEMA,
        property: f.to_string(),
        mode,
        engine: cfg.engine.name(),
        include_id0: cfg.eval.include_id0,
        strict_until: cfg.eval.strict_until,
        no_loop: cfg.loops == LoopPolicy::NoLoopOnly,
        lambda_max,
        kappa_max,
        verdict,
        summary,
        sat_at: found.as_ref().map(|(l, k, _)| (*l, *k)),
        cells,
        trace: found.as_ref().map(|(_, _, t)| TraceReport::new(net, t)),
        raw_trace: found.map(|(_, _, t)| t),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TraceStyle {
    /// One row per client identifier, one column per instant.
    #[default]
    Gantt,
    /// Markings interleaved with the steps between them.
    Steps,
}

/// Text rendering of a run.
pub fn render_trace(net: &NuNet, trace: &Trace, style: TraceStyle) -> String {
    match style {
        TraceStyle::Gantt => render_gantt(net, trace),
        TraceStyle::Steps => render_steps(net, trace),
    }
}

fn render_gantt(net: &NuNet, trace: &Trace) -> String {
    let lam = trace.lambda();
    let mut rows: BTreeMap<Ident, Vec<String>> = BTreeMap::new();
    for (i, m) in trace.markings.iter().enumerate() {
        for p in net.client_places() {
            for id in m.place(p).support() {
                let row = rows
                    .entry(id)
                    .or_insert_with(|| vec!["–".to_string(); lam + 1]);
                row[i] = if row[i] == "–" {
                    net.places()[p].id.clone()
                } else {
                    format!("{}+{}", row[i], net.places()[p].id)
                };
            }
        }
    }
    let width = rows
        .values()
        .flatten()
        .map(|s| s.chars().count())
        .chain(std::iter::once(1))
        .max()
        .unwrap_or(1);
    let label = rows
        .keys()
        .map(|id| id.to_string().len())
        .max()
        .unwrap_or(1);
    let pad = |s: &str, w: usize| format!("{s}{}", " ".repeat(w.saturating_sub(s.chars().count())));
    let mut out = String::new();
    let header: Vec<String> = (0..=lam).map(|i| pad(&i.to_string(), width)).collect();
    writeln!(
        out,
        "{}  {}",
        " ".repeat(label),
        header.join(" ").trim_end()
    )
    .unwrap();
    let server: Vec<String> = trace
        .markings
        .iter()
        .map(|m| {
            let at: Vec<&str> = net
                .server_places()
                .filter(|&q| m.place(q).contains(0))
                .map(|q| net.places()[q].id.as_str())
                .collect();
            pad(
                &if at.is_empty() {
                    "–".to_string()
                } else {
                    at.join("+")
                },
                width,
            )
        })
        .collect();
    writeln!(out, "{}: {}", pad("s", label), server.join(" ").trim_end()).unwrap();
    for (id, row) in &rows {
        let cells: Vec<String> = row.iter().map(|s| pad(s, width)).collect();
        writeln!(
            out,
            "{}: {}",
            pad(&id.to_string(), label),
            cells.join(" ").trim_end()
        )
        .unwrap();
    }
    let model = derive_trace_model(trace, net);
    out.push_str("live windows:\n");
    if let Ok(model) = model {
        for id in rows.keys() {
            let instants: Vec<usize> = (0..=lam).filter(|&i| model.live[i].contains(id)).collect();
            writeln!(out, "  {id}: {}", spans(&instants)).unwrap();
        }
    }
    match trace.loop_start {
        Some(l) => writeln!(out, "loop: {lam} -> {l}").unwrap(),
        None => out.push_str("loop: none\n"),
    }
    out
}

/// `0..2, 4` style rendering of sorted instants.
fn spans(instants: &[usize]) -> String {
    if instants.is_empty() {
        return "never".into();
    }
    let mut parts = Vec::new();
    let mut start = instants[0];
    let mut prev = start;
    for &i in &instants[1..] {
        if i != prev + 1 {
            parts.push((start, prev));
            start = i;
        }
        prev = i;
    }
    parts.push((start, prev));
    parts
        .iter()
        .map(|&(a, b)| {
            if a == b {
                a.to_string()
            } else {
                format!("{a}..{b}")
            }
        })
        .collect::<Vec<_>>()
        .join(", ")
}

fn render_steps(net: &NuNet, trace: &Trace) -> String {
    let mut out = String::new();
    let marking = |i: usize| {
        let m = &trace.markings[i];
        let parts: Vec<String> = net
            .places()
            .iter()
            .enumerate()
            .filter(|(p, _)| !m.place(*p).is_empty())
            .map(|(p, place)| format!("{}{}", place.id, m.place(p)))
            .collect();
        if parts.is_empty() {
            "∅".to_string()
        } else {
            parts.join(" ")
        }
    };
    for i in 0..=trace.lambda() {
        let mark = if trace.loop_start == Some(i) {
            " <- loop start"
        } else {
            ""
        };
        writeln!(out, "{i}: {}{mark}", marking(i)).unwrap();
        if let Some(step) = trace.fired.get(i) {
            match step {
                Some(f) => writeln!(
                    out,
                    "   --{} {}-->",
                    net.transitions()[f.transition],
                    f.mode
                )
                .unwrap(),
                None => out.push_str("   --stutter-->\n"),
            }
        }
    }
    match trace.loop_start {
        Some(l) => writeln!(out, "loop: {} -> {l}", trace.lambda()).unwrap(),
        None => out.push_str("loop: none\n"),
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::load_case_study;
    use crate::net::{fire, Firing, Mode};

    fn accepted_run() -> (NuNet, Trace) {
        let net = load_case_study("aps").unwrap().net;
        let mut markings = vec![net.initial_marking()];
        let mut fired = Vec::new();
        for (t, mode) in [
            ("t_acc", Mode::of(&[("c", 1), ("s", 0)])),
            ("t_s_exit", Mode::of(&[("c", 1)])),
        ] {
            let next = fire(&net, markings.last().unwrap(), t, &mode).unwrap();
            fired.push(Some(Firing {
                transition: net.transition_index(t).unwrap(),
                mode,
            }));
            markings.push(next);
        }
        (
            net,
            Trace {
                markings,
                fired,
                loop_start: None,
            },
        )
    }

    #[test]
    fn gantt_rendering() {
        let (net, trace) = accepted_run();
        let text = render_trace(&net, &trace, TraceStyle::Gantt);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[1], "s: p_SR p_SR p_SR");
        assert_eq!(lines[2], "1: p_PR p_OP p_ES");
        assert_eq!(lines[3], "2: p_PR p_PR p_PR");
        assert!(text.contains("live windows:\n  1: 0..2\n  2: 0..2\n"));
        assert!(text.ends_with("loop: none\n"));
    }

    #[test]
    fn steps_rendering() {
        let (net, trace) = accepted_run();
        let text = render_trace(&net, &trace, TraceStyle::Steps);
        assert!(text.starts_with("0: p_PR{1,2} p_SR{0}\n   --t_acc {c↦1, s↦0}-->\n"));
    }

    #[test]
    fn spans_compress_runs() {
        assert_eq!(spans(&[0, 1, 2, 5, 7, 8]), "0..2, 5, 7..8");
        assert_eq!(spans(&[]), "never");
    }

    #[test]
    fn oracle_grid_stops_at_first_sat() {
        let study = load_case_study("aps").unwrap();
        let cfg = BmcConfig {
            engine: Engine::oracle(),
            ..Default::default()
        };
        let f = crate::fotl::resolve_predicates(
            &crate::fotl::parse_formula("F_s E x ( p4(x) )").unwrap(),
            &study.net,
        )
        .unwrap();
        let r = run_2dbmc(&study.net, &f, &cfg).unwrap();
        assert_eq!(r.sat_at, Some((2, 2)));
        assert_eq!(r.cells.len(), 3);
        assert_eq!(r.verdict, CellVerdict::Sat);
    }
}
