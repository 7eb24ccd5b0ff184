//! Accept/reject corpora for both front ends, with print/parse round trips.

use std::fs;
use std::path::PathBuf;

use nucheck_core::fotl::{parse_formula, parse_syntax, FotlError};
use nucheck_core::pnml::{load_net, parse_pnml, print_pnml, tokenize};

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/corpus")
}

fn squash(s: &str) -> String {
    s.chars().filter(|c| !c.is_whitespace()).collect()
}

/// Checks every PNML case; returns one message per mismatch.
pub fn check_pnml_corpus() -> (usize, Vec<String>) {
    let dir = corpus_dir().join("pnml");
    let manifest = fs::read_to_string(dir.join("MANIFEST")).unwrap();
    let mut cases = 0;
    let mut bad = Vec::new();
    for line in manifest
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
    {
        let parts: Vec<&str> = line.split_whitespace().collect();
        let (file, expect) = (parts[0], parts[1]);
        let src = fs::read_to_string(dir.join(file)).unwrap();
        cases += 1;
        match (expect, load_net(&src)) {
            ("accept", Ok(_)) => {
                let doc = parse_pnml(&src).unwrap();
                let printed = print_pnml(&doc);
                match parse_pnml(&printed) {
                    Ok(again) if again.without_positions() == doc.without_positions() => {}
                    _ => bad.push(format!(
                        "{file}: printed form does not parse back to the same tree"
                    )),
                }
                let toks = |s: &str| {
                    tokenize(s)
                        .unwrap()
                        .into_iter()
                        .map(|t| t.tok)
                        .collect::<Vec<_>>()
                };
                if toks(&printed) != toks(&src) {
                    bad.push(format!("{file}: printed form differs beyond whitespace"));
                }
            }
            ("accept", Err(e)) => bad.push(format!("{file}: rejected: {}", e[0])),
            ("reject", Ok(_)) => bad.push(format!("{file}: accepted")),
            ("reject", Err(e)) => {
                let want = parts.get(2).copied().unwrap_or_default();
                if e[0].code != want {
                    bad.push(format!("{file}: expected {want}, got {}", e[0]));
                }
            }
            (other, _) => panic!("bad manifest entry {other}"),
        }
    }
    (cases, bad)
}

/// Checks every FOTL case; returns one message per mismatch.
pub fn check_fotl_corpus() -> (usize, Vec<String>) {
    let text = fs::read_to_string(corpus_dir().join("fotl.txt")).unwrap();
    let mut cases = 0;
    let mut bad = Vec::new();
    for line in text
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
    {
        let (head, src) = line.split_once(" | ").expect("`expectation | formula`");
        let src = src.trim();
        cases += 1;
        let mut head = head.split_whitespace();
        match (head.next().unwrap(), head.next()) {
            ("accept", _) => match parse_formula(src) {
                Ok(_) => {
                    let printed = parse_syntax(src).unwrap().to_string();
                    if squash(&printed) != squash(src) {
                        bad.push(format!("`{src}` printed as `{printed}`"));
                    }
                    if parse_syntax(&printed).unwrap() != parse_syntax(src).unwrap() {
                        bad.push(format!("`{src}` does not reparse from `{printed}`"));
                    }
                }
                Err(e) => bad.push(format!("`{src}` rejected: {e}")),
            },
            ("reject", Some(rule)) => match (rule, parse_formula(src)) {
                (_, Ok(_)) => bad.push(format!("`{src}` accepted")),
                ("syntax", Err(FotlError::Syntax { .. })) => {}
                (rule, Err(FotlError::IllFormed(d))) if d[0].rule == rule => {}
                (rule, Err(e)) => bad.push(format!("`{src}`: expected {rule}, got {e}")),
            },
            (other, _) => panic!("bad corpus entry {other}"),
        }
    }
    (cases, bad)
}
