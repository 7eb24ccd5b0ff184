//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero unless the failing set is exactly the documented one.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use nucheck_core::corpus::{load_case_study, CaseStudy};
use nucheck_core::driver::{check_cell, BmcConfig, CellVerdict, Engine};
use nucheck_core::encoder::{encode, names, EncodeOptions, FormulaEncoder, LoopPolicy, Unrolling};
use nucheck_core::fotl::{parse_formula, resolve_predicates, ServerFormula};
use nucheck_core::net::{enabled_modes, fire, FreshPolicy, Marking, Mode, NuNet, Trace};
use nucheck_core::oracle::{derive_trace_model, eval_bounded, CheckMode, EvalOptions};
use nucheck_core::smt::TermId;
use nucheck_core::{net::successors, solver::SolverConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::corpora::{check_fotl_corpus, check_pnml_corpus};
use common::{depth, operators, FormulaGen};

/// Criteria expected to fail, with the reason printed alongside.
const KNOWN_FAILING: &[u32] = &[2];

const FIRE_BUDGET: Duration = Duration::from_millis(1);
const CELL_BUDGET: Duration = Duration::from_secs(10);
const RANDOM_BUDGET: Duration = Duration::from_secs(15 * 60);
const RANDOM_CASES: usize = 200;
const RANDOM_SEED: u64 = 0x6e75_6368_6563_6b01;
const SHADOW_CASES: usize = 50;
const SHADOW_SEED: u64 = 0x6e75_6368_6563_6b02;
/// Largest allowed ratio between the biggest and smallest per-step clause increment.
const LINEAR_SLACK: f64 = 1.05;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn smt(mode: CheckMode) -> BmcConfig {
    BmcConfig {
        mode,
        ..BmcConfig::default()
    }
}

fn oracle(mode: CheckMode) -> BmcConfig {
    BmcConfig {
        mode,
        engine: Engine::oracle(),
        ..BmcConfig::default()
    }
}

fn mode_name(m: CheckMode) -> &'static str {
    match m {
        CheckMode::Witness => "witness",
        CheckMode::Refute => "refute",
    }
}

/// Sat results collected along the way and re-checked by criterion 5.
struct SatCase {
    net: NuNet,
    formula: ServerFormula,
    kappa: u32,
    mode: CheckMode,
    eval: EvalOptions,
    trace: Trace,
}

#[derive(Default)]
struct Collected {
    sat: Vec<SatCase>,
}

impl Collected {
    fn record(
        &mut self,
        net: &NuNet,
        f: &ServerFormula,
        kappa: u32,
        cfg: &BmcConfig,
        trace: Option<&Trace>,
    ) {
        if let Some(t) = trace {
            self.sat.push(SatCase {
                net: net.clone(),
                formula: f.clone(),
                kappa,
                mode: cfg.mode,
                eval: cfg.eval,
                trace: t.clone(),
            });
        }
    }
}

fn criterion_1() -> Outcome {
    let aps = load_case_study("aps").unwrap().net;
    let m0 = aps.initial_marking();
    let sigma = Mode::of(&[("c", 1), ("s", 0)]);
    let expected = Marking::from_ids(&[&[2], &[0], &[1], &[], &[], &[]]);
    let mut best = Duration::MAX;
    let mut exact = true;
    for _ in 0..100 {
        let t0 = Instant::now();
        let m1 = fire(&aps, &m0, "t_acc", &sigma).unwrap();
        best = best.min(t0.elapsed());
        exact &= m1 == expected;
    }
    let modes = enabled_modes(&aps, &m0, "t_acc", 3).unwrap();
    let want = vec![
        Mode::of(&[("c", 1), ("s", 0)]),
        Mode::of(&[("c", 2), ("s", 0)]),
    ];
    exact &= modes == want;
    // A fresh name is bound by the creating transition.
    let m_new = fire(&aps, &m0, "t_src", &Mode::of(&[("nu", 3)])).unwrap();
    exact &= m_new == Marking::from_ids(&[&[1, 2, 3], &[0], &[], &[], &[], &[]]);
    outcome(
        exact && best < FIRE_BUDGET,
        format!("t_acc {{c:1, s:0}} exact: {exact}, firing time {best:?} (budget {FIRE_BUDGET:?})"),
    )
}

fn criterion_2(aps: &CaseStudy, col: &mut Collected) -> Outcome {
    let mut in_time = true;
    let mut slowest = Duration::ZERO;
    let mut notes = Vec::new();
    let mut witnesses_ok = true;
    for p in &aps.properties {
        for mode in [CheckMode::Witness, CheckMode::Refute] {
            let cfg = smt(mode);
            let t0 = Instant::now();
            let out = check_cell(&aps.net, &p.formula, 5, 3, &cfg).unwrap();
            let took = t0.elapsed();
            slowest = slowest.max(took);
            in_time &= took < CELL_BUDGET && out.report.verdict != CellVerdict::Unknown;
            col.record(&aps.net, &p.formula, 3, &cfg, out.trace.as_ref());
            if mode == CheckMode::Witness {
                let sat = out.report.verdict == CellVerdict::Sat;
                notes.push(format!("{} {}", p.name, if sat { "sat" } else { "unsat" }));
                if matches!(p.name.as_str(), "psi3" | "psi4") && !sat {
                    witnesses_ok = false;
                }
            }
        }
    }
    let mut detail = format!(
        "verdicts in time: {in_time} (slowest {slowest:.2?}); witness mode: {}",
        notes.join(", ")
    );
    if !witnesses_ok {
        detail.push_str(
            "; psi3/psi4 witnesses are unattainable: G_s needs a lasso, and a client waiting \
             at the loop start is still waiting at its end, so it never exits inside the loop",
        );
    }
    outcome(in_time && witnesses_ok, detail)
}

fn criterion_3(travel: &CaseStudy, col: &mut Collected) -> Outcome {
    let mut in_time = true;
    let mut slowest = Duration::ZERO;
    let mut mismatches = Vec::new();
    for p in &travel.properties {
        for mode in [CheckMode::Witness, CheckMode::Refute] {
            let t0 = Instant::now();
            let big = check_cell(&travel.net, &p.formula, 5, 3, &smt(mode)).unwrap();
            let took = t0.elapsed();
            slowest = slowest.max(took);
            in_time &= took < CELL_BUDGET && big.report.verdict != CellVerdict::Unknown;
            col.record(&travel.net, &p.formula, 3, &smt(mode), big.trace.as_ref());

            let s = check_cell(&travel.net, &p.formula, 4, 2, &smt(mode)).unwrap();
            let o = check_cell(&travel.net, &p.formula, 4, 2, &oracle(mode)).unwrap();
            col.record(&travel.net, &p.formula, 2, &smt(mode), s.trace.as_ref());
            let expected = travel
                .expected
                .iter()
                .find(|e| {
                    e.property == p.name
                        && e.lambda == 4
                        && e.kappa == 2
                        && e.mode == mode_name(mode)
                })
                .map(|e| {
                    if e.sat {
                        CellVerdict::Sat
                    } else {
                        CellVerdict::Unsat
                    }
                });
            if s.report.verdict != o.report.verdict || Some(s.report.verdict) != expected {
                mismatches.push(format!("{} {}", p.name, mode_name(mode)));
            }
        }
    }
    outcome(
        in_time && mismatches.is_empty(),
        format!(
            "(5,3) in time: {in_time} (slowest {slowest:.2?}); (4,2) mismatches vs oracle: {}",
            if mismatches.is_empty() {
                "none".to_string()
            } else {
                mismatches.join(", ")
            }
        ),
    )
}

fn criterion_4(nets: &[&CaseStudy], col: &mut Collected) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(RANDOM_SEED);
    let gens: Vec<FormulaGen> = nets.iter().map(|s| FormulaGen::new(&s.net)).collect();
    let t0 = Instant::now();
    let mut agree = 0;
    let mut seen = BTreeSet::new();
    let mut disagreements = Vec::new();
    let mut too_deep = 0;
    for case in 0..RANDOM_CASES {
        let which = case % nets.len();
        let net = &nets[which].net;
        let f = gens[which].server(&mut rng, 3);
        too_deep += usize::from(depth(&f) > 3);
        seen.extend(operators(&f));
        let lambda = rng.random_range(1..=4);
        let kappa = rng.random_range(2..=3);
        let mode = if rng.random_bool(0.5) {
            CheckMode::Witness
        } else {
            CheckMode::Refute
        };
        let eval = EvalOptions {
            include_id0: rng.random_bool(0.2),
            strict_until: rng.random_bool(0.2),
        };
        let cfg = BmcConfig { eval, ..smt(mode) };
        let s = check_cell(net, &f, lambda, kappa, &cfg).unwrap();
        let o = check_cell(
            net,
            &f,
            lambda,
            kappa,
            &BmcConfig {
                eval,
                ..oracle(mode)
            },
        )
        .unwrap();
        col.record(net, &f, kappa, &cfg, s.trace.as_ref());
        if s.report.verdict == o.report.verdict {
            agree += 1;
        } else {
            disagreements.push(format!("{f} at ({lambda},{kappa}) {}", mode_name(mode)));
        }
    }
    let took = t0.elapsed();
    let all_ops = [
        "X_s", "F_s", "G_s", "U_s", "X_c", "F_c", "G_c", "U_c", "E", "V",
    ];
    let missing: Vec<_> = all_ops.iter().filter(|o| !seen.contains(*o)).collect();
    for d in disagreements.iter().take(3) {
        eprintln!("  disagreement: {d}");
    }
    outcome(
        agree == RANDOM_CASES && missing.is_empty() && too_deep == 0 && took < RANDOM_BUDGET,
        format!(
            "{agree}/{RANDOM_CASES} agree in {took:.1?} (budget {RANDOM_BUDGET:?}); operators missing: {missing:?}"
        ),
    )
}

fn criterion_5(col: &Collected) -> Outcome {
    let mut bad = 0;
    for c in &col.sat {
        let valid = c.trace.validate(&c.net, Some(c.kappa)).is_ok();
        let holds = derive_trace_model(&c.trace, &c.net)
            .map(|m| eval_bounded(&m, &c.formula, 0, c.eval) == (c.mode == CheckMode::Witness))
            .unwrap_or(false);
        if !(valid && holds) {
            bad += 1;
        }
    }
    outcome(
        bad == 0 && !col.sat.is_empty(),
        format!(
            "{} sat models decoded, {bad} failed validation or evaluation",
            col.sat.len()
        ),
    )
}

fn resolved(net: &NuNet, src: &str) -> ServerFormula {
    resolve_predicates(&parse_formula(src).unwrap(), net).unwrap()
}

fn criterion_6(aps: &NuNet) -> Outcome {
    let opts = EvalOptions::default();
    let lam = 4;
    let mut u = Unrolling::new(aps, lam, 2, LoopPolicy::Any).unwrap();
    let ff = u.pool.ff();
    let g = resolved(aps, "G_s ( p1 )");
    let next = resolved(aps, "X_s E x ( p0(x) )");
    let inner = resolved(aps, "E x ( p0(x) )");
    let until = resolved(aps, "p1 U_s ~ p1");

    let mut fe = FormulaEncoder::new(&mut u, opts);
    let globally_ok = fe.server(&g, 0, None) == ff;
    let next_noloop_ok = fe.server(&next, lam, None) == ff;
    let mut next_loop_ok = true;
    for l in 0..=lam {
        let at_l = fe.server(&inner, l, Some(l));
        next_loop_ok &= fe.server(&next, lam, Some(l)) == at_l;
    }
    let (l, i) = (1, 3);
    let got = fe.server(&until, i, Some(l));
    let fwd = fe.server(&until, i, None);
    let p = &mut u.pool;
    let h: Vec<TermId> = (0..=lam)
        .map(|j| p.lookup(&names::occ("p_SR", 0, j)).unwrap())
        .collect();
    let n: Vec<TermId> = h.iter().map(|&x| p.not(x)).collect();
    let f4 = p.and([n[4], h[3]]);
    let forward = p.or([n[3], f4]);
    let w2 = p.and([n[2], h[1]]);
    let wrap = p.or([n[1], w2]);
    let both = p.or2(forward, wrap);
    let until_ok = got == both && fwd == forward;
    outcome(
        globally_ok && next_noloop_ok && next_loop_ok && until_ok,
        format!(
            "G_s no-loop false: {globally_ok}; X_s at bound: false without loop {next_noloop_ok}, \
             loop target {next_loop_ok}; U_s wrap shape: {until_ok}"
        ),
    )
}

fn criterion_7() -> Outcome {
    let (np, bad_p) = check_pnml_corpus();
    let (nf, bad_f) = check_fotl_corpus();
    for b in bad_p.iter().chain(&bad_f) {
        eprintln!("  corpus: {b}");
    }
    outcome(
        np == 30 && nf == 40 && bad_p.is_empty() && bad_f.is_empty(),
        format!(
            "PNML {}/{np} and FOTL {}/{nf} as expected, round trips included",
            np - bad_p.len(),
            nf - bad_f.len()
        ),
    )
}

fn criterion_8(nets: &[&CaseStudy]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SHADOW_SEED);
    let gens: Vec<FormulaGen> = nets.iter().map(|s| FormulaGen::monotone(&s.net)).collect();
    let cfg = BmcConfig {
        loops: LoopPolicy::NoLoopOnly,
        ..smt(CheckMode::Witness)
    };
    let mut witnessed = 0;
    let mut extensions = 0;
    let mut broken = Vec::new();
    let mut attempts = 0;
    while witnessed < SHADOW_CASES && attempts < 20 * SHADOW_CASES {
        attempts += 1;
        let which = attempts % nets.len();
        let net = &nets[which].net;
        let f = gens[which].server(&mut rng, 3);
        let lambda = rng.random_range(1..=3);
        let kappa = rng.random_range(2..=3);
        let Some(trace) = check_cell(net, &f, lambda, kappa, &cfg).unwrap().trace else {
            continue;
        };
        witnessed += 1;
        let used = trace.used_up_to(lambda);
        for (firing, next) in successors(net, trace.last(), &used, kappa, FreshPolicy::FreshMin) {
            let mut longer = trace.clone();
            longer.fired.push(firing);
            longer.markings.push(next);
            extensions += 1;
            let model = derive_trace_model(&longer, net).unwrap();
            if !eval_bounded(&model, &f, 0, EvalOptions::default()) {
                broken.push(format!("{f} at ({lambda},{kappa})"));
            }
        }
    }
    for b in broken.iter().take(3) {
        eprintln!("  extension broke: {b}");
    }
    outcome(
        witnessed == SHADOW_CASES && broken.is_empty(),
        format!(
            "{witnessed} G-free witnesses, {extensions} one-step extensions, {} lost satisfaction",
            broken.len()
        ),
    )
}

fn criterion_9(aps: &CaseStudy) -> Outcome {
    let psi1 = &aps.property("psi1").unwrap().formula;
    let counts: Vec<usize> = (2..=8)
        .map(|lam| {
            encode(&aps.net, psi1, lam, 3, EncodeOptions::default())
                .unwrap()
                .metrics
                .clauses
        })
        .collect();
    let incs: Vec<f64> = counts
        .windows(2)
        .map(|w| w[1] as f64 - w[0] as f64)
        .collect();
    let lo = incs.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = incs.iter().cloned().fold(0.0, f64::max);
    outcome(
        lo > 0.0 && hi <= lo * LINEAR_SLACK,
        format!(
            "clauses for λ=2..8: {counts:?}; step increments {lo}..{hi} (slack {LINEAR_SLACK})"
        ),
    )
}

fn main() {
    if SolverConfig::default().program.is_empty() {
        eprintln!("no solver configured");
        std::process::exit(1);
    }
    let aps = load_case_study("aps").unwrap();
    let travel = load_case_study("travel-agency").unwrap();
    let mut col = Collected::default();

    let mut results: Vec<(u32, &str, Outcome)> = Vec::new();
    let t0 = Instant::now();
    results.push((1, "firing example", criterion_1()));
    results.push((
        2,
        "parking properties at (5,3)",
        criterion_2(&aps, &mut col),
    ));
    results.push((
        3,
        "travel properties vs oracle",
        criterion_3(&travel, &mut col),
    ));
    results.push((
        4,
        "random formulas vs oracle",
        criterion_4(&[&aps, &travel], &mut col),
    ));
    results.push((5, "sat models decode and satisfy", criterion_5(&col)));
    results.push((6, "encoding structure", criterion_6(&aps.net)));
    results.push((7, "front-end corpora", criterion_7()));
    results.push((
        8,
        "one-step extension of witnesses",
        criterion_8(&[&aps, &travel]),
    ));
    results.push((9, "linear clause growth", criterion_9(&aps)));

    let mut failing = Vec::new();
    for (n, name, o) in &results {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {n}: {tag} {name}: {}", o.detail);
        if !o.pass {
            failing.push(*n);
        }
    }
    println!("acceptance finished in {:.1?}", t0.elapsed());
    if failing != KNOWN_FAILING {
        eprintln!("failing criteria {failing:?}, expected exactly {KNOWN_FAILING:?}");
        std::process::exit(1);
    }
}
