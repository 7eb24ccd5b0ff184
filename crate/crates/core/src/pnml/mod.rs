//! PNML front end: a strict tokenizer and recursive-descent parser for the
//! subset of PNML used to describe ν-nets, and lowering of the parse tree
//! into a [`NuNet`](crate::net::NuNet).
//!
//! Place roles come from an optional `role="server"` attribute (default
//! client); a `terminal="true"` attribute marks a place where clients exit.
//! Arc inscriptions are whitespace-separated variable names with an optional
//! `k*v` multiplicity; `nu` and `ν` denote the fresh-identifier variable.
//! Initial markings are written as identifier sets such as `{1,2}`.

mod lexer;
mod lower;
mod parser;
mod print;

use thiserror::Error;

pub use crate::Pos;

pub use lexer::{tokenize, Tok, Token};
pub use lower::{lower_to_net, parse_inscription, parse_marking};
pub use parser::parse_pnml;
pub use print::print_pnml;

/// A positioned error. `code` is a short stable tag such as `syntax`.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{pos}: {code}: {message}")]
pub struct PnmlError {
    pub pos: Pos,
    pub code: &'static str,
    pub message: String,
}

impl PnmlError {
    pub fn new(pos: Pos, code: &'static str, message: impl Into<String>) -> Self {
        PnmlError {
            pos,
            code,
            message: message.into(),
        }
    }

    pub(crate) fn lex(pos: Pos, message: impl Into<String>) -> Self {
        Self::new(pos, "lex", message)
    }

    pub(crate) fn syntax(pos: Pos, message: impl Into<String>) -> Self {
        Self::new(pos, "syntax", message)
    }

    /// `file:line:col: code: message`
    pub fn render(&self, file: &str) -> String {
        format!("{file}:{self}")
    }
}

/// Renders a list of errors, one per line, prefixed with `file`.
pub fn render_errors(file: &str, errors: &[PnmlError]) -> String {
    errors
        .iter()
        .map(|e| e.render(file))
        .collect::<Vec<_>>()
        .join("\n")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Attribute {
    pub name: String,
    pub value: String,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Header {
    pub name: String,
    pub attributes: Vec<Attribute>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ElementKind {
    Place,
    Transition,
    Arc,
    InitialMarking,
    Inscription,
    Text,
    Generic(String),
}

impl ElementKind {
    pub fn tag(&self) -> &str {
        match self {
            ElementKind::Place => "place",
            ElementKind::Transition => "transition",
            ElementKind::Arc => "arc",
            ElementKind::InitialMarking => "initialMarking",
            ElementKind::Inscription => "inscription",
            ElementKind::Text => "text",
            ElementKind::Generic(name) => name,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Element {
    pub kind: ElementKind,
    pub attributes: Vec<Attribute>,
    pub children: Vec<Node>,
    pub pos: Pos,
}

impl Element {
    pub fn attr(&self, name: &str) -> Option<&Attribute> {
        self.attributes.iter().find(|a| a.name == name)
    }

    /// Character data directly inside this element and inside its `<text>` children.
    pub fn text_content(&self) -> String {
        let mut out = String::new();
        for child in &self.children {
            match child {
                Node::Text(t, _) => out.push_str(t),
                Node::Element(e) if e.kind == ElementKind::Text => out.push_str(&e.text_content()),
                Node::Element(_) => {}
            }
        }
        out
    }

    pub fn child_elements(&self) -> impl Iterator<Item = &Element> {
        self.children.iter().filter_map(|c| match c {
            Node::Element(e) => Some(e),
            Node::Text(..) => None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Node {
    Element(Element),
    Text(String, Pos),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PnmlDocument {
    pub header: Header,
    pub root: Element,
}

impl PnmlDocument {
    /// Every element in document order, depth first.
    pub fn elements(&self) -> Vec<&Element> {
        fn walk<'a>(e: &'a Element, out: &mut Vec<&'a Element>) {
            out.push(e);
            for c in e.child_elements() {
                walk(c, out);
            }
        }
        let mut out = Vec::new();
        walk(&self.root, &mut out);
        out
    }
}

/// Parses and lowers in one go.
pub fn load_net(text: &str) -> Result<crate::net::NuNet, Vec<PnmlError>> {
    let doc = parse_pnml(text).map_err(|e| vec![e])?;
    lower_to_net(&doc)
}
