//! Names of the state variables, shared by the encoder and trace decoding.

use crate::net::Ident;

pub const NOLOOP: &str = "noloop";

/// Identifier `id` sits in `place` at instant `i`.
pub fn occ(place: &str, id: Ident, i: usize) -> String {
    format!("p_{place}_{id}_{i}")
}

/// Token count of `place` at instant `i`.
pub fn count(place: &str, i: usize) -> String {
    format!("n_{place}_{i}")
}

/// `transition` fires in step `s`.
pub fn fire(transition: &str, s: usize) -> String {
    format!("T_{transition}_{s}")
}

/// Variable `var` of `transition` is bound to `id` in step `s`.
pub fn sel(transition: &str, var: &str, id: Ident, s: usize) -> String {
    format!("sel_{transition}_{var}_{id}_{s}")
}

/// `id` occurs at some instant `<= s`.
pub fn used(id: Ident, s: usize) -> String {
    format!("used_{id}_{s}")
}

pub fn dead(id: Ident, i: usize) -> String {
    format!("dead_{id}_{i}")
}

pub fn live(id: Ident, i: usize) -> String {
    format!("live_{id}_{i}")
}

/// The run closes into a lasso at instant `l`.
pub fn loopsel(l: usize) -> String {
    format!("loopsel_{l}")
}
