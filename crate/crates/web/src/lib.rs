//! Browser bindings for the demo page. Every entry point takes plain
//! strings and returns a JSON document, with an `error` field on failure.
//!
//! Model checking here uses the explicit-state engine: there is no SMT
//! solver in the browser.

use nucheck_core::corpus::load_case_study;
use nucheck_core::driver::{render_trace, TraceReport, TraceStyle};
use nucheck_core::fotl::{parse_formula, parse_syntax, resolve_predicates, ServerFormula};
use nucheck_core::net::{successors, FreshPolicy, NuNet, Trace, DEFAULT_NODE_LIMIT};
use nucheck_core::oracle::{brute_force_check, CheckMode, EvalOptions};
use nucheck_core::pnml::{load_net, render_errors};
use serde_json::{json, Value};
use wasm_bindgen::prelude::wasm_bindgen;

/// Largest bounds accepted from the page, to keep the search interactive.
const MAX_LAMBDA: usize = 6;
const MAX_KAPPA: u32 = 4;

fn error(message: impl Into<String>) -> Value {
    json!({ "error": message.into() })
}

/// A bundled study name, or PNML text.
fn load(source: &str) -> Result<NuNet, String> {
    let trimmed = source.trim();
    if trimmed.starts_with('<') {
        load_net(trimmed).map_err(|es| render_errors("net", &es))
    } else {
        load_case_study(trimmed)
            .map(|s| s.net)
            .map_err(|e| e.to_string())
    }
}

fn formula(net: &NuNet, text: &str) -> Result<ServerFormula, String> {
    let parsed = parse_formula(text).map_err(|e| e.render("formula"))?;
    resolve_predicates(&parsed, net).map_err(|es| {
        es.iter()
            .map(|e| e.to_string())
            .collect::<Vec<_>>()
            .join("\n")
    })
}

/// Parses a property against a net: normalised text or diagnostics.
pub fn check_formula_json(source: &str, text: &str) -> Value {
    let net = match load(source) {
        Ok(n) => n,
        Err(e) => return error(e),
    };
    match formula(&net, text) {
        Ok(f) => json!({
            "normalized": parse_syntax(text).map(|s| s.to_string()).unwrap_or_default(),
            "resolved": f.to_string(),
        }),
        Err(e) => error(e),
    }
}

/// Searches all runs of exactly `λ` steps for a witness or counterexample.
pub fn model_check_json(
    source: &str,
    text: &str,
    lambda: usize,
    kappa: u32,
    refute: bool,
) -> Value {
    if lambda > MAX_LAMBDA || kappa == 0 || kappa > MAX_KAPPA {
        return error(format!(
            "bounds must satisfy λ ≤ {MAX_LAMBDA} and 1 ≤ κ ≤ {MAX_KAPPA}"
        ));
    }
    let (net, f) = match load(source).and_then(|n| formula(&n, text).map(|f| (n, f))) {
        Ok(x) => x,
        Err(e) => return error(e),
    };
    let mode = if refute {
        CheckMode::Refute
    } else {
        CheckMode::Witness
    };
    match brute_force_check(
        &net,
        &f,
        lambda,
        kappa,
        mode,
        EvalOptions::default(),
        DEFAULT_NODE_LIMIT,
    ) {
        Ok(v) => json!({
            "sat": v.satisfiable,
            "runs_checked": v.shapes_checked,
            "trace": v.trace.as_ref().map(|t| TraceReport::new(&net, t)),
            "gantt": v.trace.as_ref().map(|t| render_trace(&net, t, TraceStyle::Gantt)),
        }),
        Err(e) => error(e.to_string()),
    }
}

fn named_marking(net: &NuNet, trace: &Trace) -> String {
    let m = trace.last();
    let parts: Vec<String> = net
        .places()
        .iter()
        .enumerate()
        .filter(|(p, _)| !m.place(*p).is_empty())
        .map(|(p, place)| format!("{}{}", place.id, m.place(p)))
        .collect();
    if parts.is_empty() {
        "∅".into()
    } else {
        parts.join(" ")
    }
}

/// Replays `choices` (indices into each step's successor list) from the
/// initial marking and lists the next possible steps.
pub fn simulate_json(source: &str, choices: &[usize], kappa: u32) -> Value {
    if kappa == 0 || kappa > MAX_KAPPA {
        return error(format!("κ must be between 1 and {MAX_KAPPA}"));
    }
    let net = match load(source) {
        Ok(n) => n,
        Err(e) => return error(e),
    };
    let mut trace = Trace::initial(net.initial_marking_for(kappa));
    let options = |t: &Trace| {
        successors(
            &net,
            t.last(),
            &t.used_up_to(t.lambda()),
            kappa,
            FreshPolicy::FreshMin,
        )
    };
    for (s, &c) in choices.iter().enumerate() {
        let mut next = options(&trace);
        if c >= next.len() {
            return error(format!("step {s}: no option {c}"));
        }
        let (firing, m) = next.swap_remove(c);
        trace.fired.push(firing);
        trace.markings.push(m);
    }
    let next: Vec<String> = options(&trace)
        .iter()
        .map(|(f, _)| match f {
            Some(f) => format!("{} {}", net.transitions()[f.transition], f.mode),
            None => "stutter".to_string(),
        })
        .collect();
    json!({
        "marking": named_marking(&net, &trace),
        "options": next,
        "steps": render_trace(&net, &trace, TraceStyle::Steps),
        "gantt": render_trace(&net, &trace, TraceStyle::Gantt),
    })
}

#[wasm_bindgen]
pub fn check_formula(source: &str, text: &str) -> String {
    check_formula_json(source, text).to_string()
}

#[wasm_bindgen]
pub fn model_check(source: &str, text: &str, lambda: usize, kappa: u32, refute: bool) -> String {
    model_check_json(source, text, lambda, kappa, refute).to_string()
}

/// `choices` is a comma-separated list of option indices.
#[wasm_bindgen]
pub fn simulate(source: &str, choices: &str, kappa: u32) -> String {
    let parsed: Result<Vec<usize>, _> = choices
        .split(',')
        .filter(|c| !c.trim().is_empty())
        .map(|c| c.trim().parse::<usize>())
        .collect();
    match parsed {
        Ok(cs) => simulate_json(source, &cs, kappa).to_string(),
        Err(e) => error(format!("bad choice list: {e}")).to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formulas_are_normalised_or_rejected() {
        let v = check_formula_json("aps", "G_s V x(p0(x)=>F_c(p4(x)))");
        assert_eq!(v["resolved"], "G_s V x ( p0(x) => F_c ( p4(x) ) )");
        let v = check_formula_json("aps", "E x E y p0(x)");
        assert!(v["error"].as_str().unwrap().contains("quantifier-depth"));
        assert!(check_formula_json("nowhere", "p1")["error"].is_string());
    }

    #[test]
    fn finds_a_witness_with_the_oracle() {
        let v = model_check_json("aps", "F_s E x ( p4(x) )", 2, 2, false);
        assert_eq!(v["sat"], true, "{v}");
        assert!(v["gantt"].as_str().unwrap().contains("p_ES"));
        let v = model_check_json("aps", "F_s E x ( p4(x) )", 1, 2, false);
        assert_eq!(v["sat"], false);
        assert!(model_check_json("aps", "p1", 9, 2, false)["error"].is_string());
    }

    #[test]
    fn simulation_replays_choices() {
        let v = simulate_json("aps", &[], 4);
        assert_eq!(v["marking"], "p_PR{1,2} p_SR{0}", "{v}");
        let first = v["options"][0].as_str().unwrap().to_string();
        assert!(first.starts_with("t_src"), "{first}");
        let v = simulate_json("aps", &[0], 4);
        assert!(
            v["marking"].as_str().unwrap().contains("p_PR{1,2,3}"),
            "{v}"
        );
        assert!(simulate_json("aps", &[99], 3)["error"].is_string());
    }

    #[test]
    fn pnml_text_is_accepted_as_a_source() {
        let src = include_str!("../../core/tests/corpus/pnml/05-move-transition.pnml");
        let v = simulate_json(src, &[], 2);
        assert!(v["error"].is_null(), "{v}");
    }
}
