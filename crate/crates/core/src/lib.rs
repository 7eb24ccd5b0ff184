//! Bounded model checking of single-component ν-nets against FOTL₁
//! properties.
//!
//! The pipeline: parse a PNML net ([`pnml`]) and a property ([`fotl`]),
//! unroll both into one SMT-LIB problem ([`encoder`], terms in [`smt`]), run
//! an external solver ([`solver`]) and decode a witness trace. [`driver`]
//! walks the bound grid and renders reports. [`oracle`] evaluates the same
//! bounded semantics directly on enumerated runs and serves as ground truth.

pub mod corpus;
pub mod driver;
pub mod encoder;
pub mod fotl;
pub mod net;
pub mod oracle;
pub mod pnml;
pub mod smt;
pub mod solver;

use std::fmt;

/// 1-based source position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}
