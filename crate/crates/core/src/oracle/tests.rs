use std::collections::{BTreeMap, BTreeSet};

use super::*;
use crate::corpus::load_case_study;
use crate::fotl::parse_formula;
use crate::net::{fire, Firing, Mode, DEFAULT_NODE_LIMIT};

/// Model from rows `(client, [(instant, place)])`; places are indices.
fn gantt(lambda: usize, rows: &[(Ident, &[(usize, usize)])]) -> TraceModel {
    let mut xi = vec![BTreeMap::new(); lambda + 1];
    for (id, cells) in rows {
        for &(i, p) in *cells {
            xi[i].insert(*id, BTreeSet::from([p]));
        }
    }
    TraceModel {
        lambda,
        loop_start: None,
        server: vec![BTreeSet::new(); lambda + 1],
        live: xi
            .iter()
            .map(|m: &BTreeMap<Ident, BTreeSet<usize>>| m.keys().copied().collect())
            .collect(),
        xi,
        dead: vec![BTreeSet::new(); lambda + 1],
    }
}

/// Two clients over instants 0..=2: client 1 in pc1 then pc2, client 2 in
/// pc1 then pc3. Places pc1..pc4 are indices 1..4.
fn bound2() -> TraceModel {
    gantt(2, &[(1, &[(0, 1), (1, 2)]), (2, &[(1, 1), (2, 3)])])
}

fn bound5() -> TraceModel {
    gantt(
        5,
        &[
            (1, &[(0, 1), (1, 2)]),
            (2, &[(1, 1), (2, 3)]),
            (3, &[(3, 1), (4, 1), (5, 1)]),
            (4, &[(4, 1), (5, 4)]),
        ],
    )
}

fn holds(m: &TraceModel, src: &str, i: usize) -> bool {
    eval_bounded(m, &parse_formula(src).unwrap(), i, EvalOptions::default())
}

#[test]
fn live_window_examples() {
    let m = bound2();
    assert_eq!(m.live[0], BTreeSet::from([1]));
    assert_eq!(m.live[1], BTreeSet::from([1, 2]));
    assert!(holds(&m, "E x ( p1(x) | p2(x) )", 0));
    assert!(!holds(&m, "V x ( p4(x) )", 1));
    assert!(!holds(&m, "F_s E x ( p4(x) )", 0));
    assert!(holds(&bound5(), "F_s E x ( p4(x) )", 0));
    assert!(holds(&bound5(), "E x ( p4(x) )", 5));
    assert!(holds(&m, "E x ( F_c ( p2(x) ) )", 0));
    assert!(holds(&bound5(), "E x ( F_c ( p2(x) ) )", 1));
}

#[test]
fn server_globally_needs_a_loop() {
    let mut m = bound2();
    assert!(!holds(&m, "G_s ( V x ( p1(x) | ~ p1(x) ) )", 0));
    m.loop_start = Some(2);
    assert!(holds(&m, "G_s ( V x ( p1(x) | ~ p1(x) ) )", 0));
}

#[test]
fn next_wraps_only_with_a_loop() {
    let mut m = bound5();
    assert!(!holds(&m, "X_s ( E x ( p1(x) ) )", 5));
    m.loop_start = Some(0);
    assert!(holds(&m, "X_s ( E x ( p1(x) ) )", 5));
    assert!(!holds(&m, "E x ( X_c ( p1(x) ) )", 5));
    m.loop_start = Some(4);
    assert!(holds(&m, "E x ( X_c ( p1(x) ) )", 5));
}

#[test]
fn client_globally_covers_the_live_window() {
    let m = bound5();
    // Client 3 stays in pc1 until the bound.
    assert!(holds(&m, "E x ( G_c ( p1(x) ) )", 3));
    // Client 1's window is 0..=1 and it moves to pc2.
    assert!(!holds(&m, "E x ( G_c ( p1(x) ) )", 0));
    assert!(holds(&m, "E x ( G_c ( p1(x) | p2(x) ) )", 0));
}

#[test]
fn client_until_requires_liveness() {
    let m = bound5();
    assert!(holds(&m, "E x ( p1(x) U_c p4(x) )", 4));
    assert!(holds(&m, "E x ( p1(x) U_c p2(x) )", 0));
    assert!(!holds(&m, "E x ( p1(x) U_c p3(x) )", 0));
    assert!(!holds(&m, "V x ( p2(x) U_c p4(x) )", 0));
}

#[test]
fn initial_model_of_the_parking_system() {
    let aps = load_case_study("aps").unwrap();
    let t = Trace::initial(aps.net.initial_marking());
    let m = derive_trace_model(&t, &aps.net).unwrap();
    assert_eq!(m.live[0], BTreeSet::from([1, 2]));
    assert_eq!(m.xi[0][&1], BTreeSet::from([0]));
    assert_eq!(m.server[0], BTreeSet::from([1]));
}

#[test]
fn dead_from_the_instant_after_a_terminal_place() {
    let aps = load_case_study("aps").unwrap();
    let net = &aps.net;
    let c1 = Mode::of(&[("c", 1), ("s", 0)]);
    let mut markings = vec![net.initial_marking()];
    let mut fired = Vec::new();
    for (t, mode) in [
        ("t_acc", c1.clone()),
        ("t_s_exit", Mode::of(&[("c", 1)])),
        ("t_acc_sink", Mode::of(&[("c", 1)])),
    ] {
        let next = fire(net, markings.last().unwrap(), t, &mode).unwrap();
        fired.push(Some(Firing {
            transition: net.transition_index(t).unwrap(),
            mode,
        }));
        markings.push(next);
    }
    let trace = Trace {
        markings,
        fired,
        loop_start: None,
    };
    trace.validate(net, Some(3)).unwrap();
    let m = derive_trace_model(&trace, net).unwrap();
    assert_eq!(m.xi[1][&1], BTreeSet::from([2]));
    assert!(m.live[2].contains(&1) && m.xi[2][&1].contains(&4));
    assert!(m.dead[3].contains(&1) && !m.dead[2].contains(&1));
    assert!(!m.live[3].contains(&1));
}

#[test]
fn witness_search_over_enumerated_runs() {
    let aps = load_case_study("aps").unwrap();
    let opts = EvalOptions::default();
    let now = parse_formula("E x ( p4(x) )").unwrap();
    let v = brute_force_check(
        &aps.net,
        &now,
        0,
        3,
        CheckMode::Witness,
        opts,
        DEFAULT_NODE_LIMIT,
    )
    .unwrap();
    assert!(!v.satisfiable);
    assert_eq!(v.shapes_checked, 2);
    let later = parse_formula("F_s E x ( p4(x) )").unwrap();
    let v = brute_force_check(
        &aps.net,
        &later,
        1,
        3,
        CheckMode::Witness,
        opts,
        DEFAULT_NODE_LIMIT,
    )
    .unwrap();
    assert!(!v.satisfiable);
    let v = brute_force_check(
        &aps.net,
        &later,
        2,
        3,
        CheckMode::Witness,
        opts,
        DEFAULT_NODE_LIMIT,
    )
    .unwrap();
    assert!(v.satisfiable);
    let trace = v.trace.unwrap();
    trace.validate(&aps.net, Some(3)).unwrap();
    let m = derive_trace_model(&trace, &aps.net).unwrap();
    assert!(eval_bounded(&m, &later, 0, opts));
}

#[test]
fn refute_searches_the_negation() {
    let aps = load_case_study("aps").unwrap();
    let f = parse_formula("E x ( p0(x) )").unwrap();
    let v = brute_force_check(
        &aps.net,
        &f,
        3,
        3,
        CheckMode::Refute,
        EvalOptions::default(),
        DEFAULT_NODE_LIMIT,
    )
    .unwrap();
    assert!(!v.satisfiable);
}
