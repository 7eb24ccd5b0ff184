//! Printing parse trees back to PNML text.
//!
//! Character data is written verbatim, so a printed document tokenizes to
//! the same token sequence as its source whenever the source used the
//! printer's choice between `/>` and an explicit close tag (self-closing
//! for empty generic elements and arcs, explicit otherwise).

use super::{Attribute, Element, ElementKind, Node, PnmlDocument, Pos};

fn quoted(value: &str) -> String {
    if value.contains('"') {
        format!("'{value}'")
    } else {
        format!("\"{value}\"")
    }
}

fn attrs(list: &[Attribute]) -> String {
    list.iter()
        .map(|a| format!(" {}={}", a.name, quoted(&a.value)))
        .collect()
}

fn element(e: &Element, depth: usize, out: &mut String) {
    let indent = "  ".repeat(depth);
    let tag = e.kind.tag();
    out.push_str(&indent);
    out.push('<');
    out.push_str(tag);
    out.push_str(&attrs(&e.attributes));
    let may_self_close = matches!(e.kind, ElementKind::Generic(_) | ElementKind::Arc);
    if e.children.is_empty() && may_self_close {
        out.push_str("/>\n");
        return;
    }
    out.push('>');
    if e.children.iter().any(|c| matches!(c, Node::Text(..))) {
        // Mixed content stays on one line so no whitespace is added to text runs.
        let mut inline = String::new();
        for c in &e.children {
            match c {
                Node::Text(t, _) => inline.push_str(t),
                Node::Element(child) => {
                    let mut s = String::new();
                    element(child, 0, &mut s);
                    inline.push_str(s.trim_end_matches('\n'));
                }
            }
        }
        out.push_str(&inline);
    } else if !e.children.is_empty() {
        out.push('\n');
        for c in e.child_elements() {
            element(c, depth + 1, out);
        }
        out.push_str(&indent);
    }
    out.push_str(&format!("</{tag}>\n"));
}

/// Prints `doc` with two-space indentation.
pub fn print_pnml(doc: &PnmlDocument) -> String {
    let mut out = format!("<?{}{}?>\n", doc.header.name, attrs(&doc.header.attributes));
    element(&doc.root, 0, &mut out);
    out
}

fn strip(e: &Element) -> Element {
    Element {
        kind: e.kind.clone(),
        attributes: e
            .attributes
            .iter()
            .map(|a| Attribute {
                pos: Pos::default(),
                ..a.clone()
            })
            .collect(),
        children: e
            .children
            .iter()
            .map(|c| match c {
                Node::Element(x) => Node::Element(strip(x)),
                Node::Text(t, _) => Node::Text(t.clone(), Pos::default()),
            })
            .collect(),
        pos: Pos::default(),
    }
}

impl PnmlDocument {
    /// The same tree with every position reset, for structural comparison.
    pub fn without_positions(&self) -> PnmlDocument {
        PnmlDocument {
            header: super::Header {
                name: self.header.name.clone(),
                attributes: self
                    .header
                    .attributes
                    .iter()
                    .map(|a| Attribute {
                        pos: Pos::default(),
                        ..a.clone()
                    })
                    .collect(),
            },
            root: strip(&self.root),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pnml::{parse_pnml, tokenize};

    #[test]
    fn round_trip_of_a_bundled_net() {
        let src = include_str!("../../studies/aps/net.pnml");
        let doc = parse_pnml(src).unwrap();
        let printed = print_pnml(&doc);
        let again = parse_pnml(&printed).unwrap();
        assert_eq!(again.without_positions(), doc.without_positions());
        let toks = |s: &str| {
            tokenize(s)
                .unwrap()
                .into_iter()
                .map(|t| t.tok)
                .collect::<Vec<_>>()
        };
        assert_eq!(toks(&printed), toks(src));
    }

    #[test]
    fn quotes_values_containing_double_quotes() {
        let doc = parse_pnml("<?x?><a b='say \"hi\"'><c/></a>").unwrap();
        assert_eq!(
            print_pnml(&doc),
            "<?x?>\n<a b='say \"hi\"'>\n  <c/>\n</a>\n"
        );
    }
}
