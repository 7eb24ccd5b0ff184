//! Runs the front-end corpora.

mod common;

use common::corpora::{check_fotl_corpus, check_pnml_corpus};

#[test]
fn pnml_corpus() {
    let (n, bad) = check_pnml_corpus();
    assert_eq!(n, 30);
    assert!(bad.is_empty(), "{bad:#?}");
}

#[test]
fn fotl_corpus() {
    let (n, bad) = check_fotl_corpus();
    assert_eq!(n, 40);
    assert!(bad.is_empty(), "{bad:#?}");
}
