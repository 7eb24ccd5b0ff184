//! Recursive-descent parser over the token stream.
//!
//! Besides the grammar proper, the parser insists on matching names for
//! generic close tags, allows extra attributes after the mandatory ones on
//! places, transitions and arcs, and rejects anything after the root element.

use std::collections::BTreeSet;

use super::lexer::{tokenize, Tok, Token};
use super::{Attribute, Element, ElementKind, Header, Node, PnmlDocument, PnmlError, Pos};

/// What may appear between an element's open and close tags.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Content {
    Generic,
    Place,
    Transition,
    Arc,
    Label,
}

struct Parser {
    toks: Vec<Token>,
    i: usize,
    eof: Pos,
}

/// Parses a PNML document.
pub fn parse_pnml(text: &str) -> Result<PnmlDocument, PnmlError> {
    let toks = tokenize(text)?;
    let eof = end_pos(text);
    let mut p = Parser { toks, i: 0, eof };
    let header = p.header()?;
    let root = match p.peek() {
        Some(Tok::Open) => p.element(None)?,
        _ => return Err(p.unexpected("the root element")),
    };
    if p.peek().is_some() {
        return Err(p.unexpected("end of input after the root element"));
    }
    Ok(PnmlDocument { header, root })
}

fn end_pos(text: &str) -> Pos {
    let line = text.matches('\n').count() + 1;
    let col = text.rsplit('\n').next().unwrap_or("").chars().count() + 1;
    Pos { line, col }
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|t| &t.tok)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.i + k).map(|t| &t.tok)
    }

    fn pos(&self) -> Pos {
        self.toks.get(self.i).map_or(self.eof, |t| t.pos)
    }

    fn unexpected(&self, expected: &str) -> PnmlError {
        match self.toks.get(self.i) {
            Some(t) => PnmlError::syntax(
                t.pos,
                format!("unexpected {}, expected {expected}", t.tok.describe()),
            ),
            None => PnmlError::syntax(
                self.eof,
                format!("unexpected end of input, expected {expected}"),
            ),
        }
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> Result<Pos, PnmlError> {
        if self.peek() == Some(&tok) {
            let pos = self.pos();
            self.i += 1;
            Ok(pos)
        } else {
            Err(self.unexpected(expected))
        }
    }

    fn string(&mut self) -> Result<String, PnmlError> {
        match self.peek() {
            Some(Tok::Str(s)) => {
                let s = s.clone();
                self.i += 1;
                Ok(s)
            }
            _ => Err(self.unexpected("a quoted string")),
        }
    }

    fn header(&mut self) -> Result<Header, PnmlError> {
        self.expect(Tok::SpecialOpen, "the `<?` header")?;
        let name = match self.peek() {
            Some(Tok::Name(n)) => n.clone(),
            _ => return Err(self.unexpected("a header name")),
        };
        self.i += 1;
        let attributes = self.attributes(Vec::new())?;
        self.expect(Tok::SpecialClose, "`?>`")?;
        Ok(Header { name, attributes })
    }

    /// `attribute*`, appended to `seen`. Duplicate names are rejected.
    fn attributes(&mut self, mut attrs: Vec<Attribute>) -> Result<Vec<Attribute>, PnmlError> {
        let mut names: BTreeSet<String> = attrs.iter().map(|a| a.name.clone()).collect();
        loop {
            let pos = self.pos();
            let name = match self.peek() {
                Some(Tok::Id) => "id".to_string(),
                Some(Tok::Name(n)) => n.clone(),
                _ => return Ok(attrs),
            };
            self.i += 1;
            self.expect(Tok::Equals, "`=`")?;
            let value = self.string()?;
            if !names.insert(name.clone()) {
                return Err(PnmlError::syntax(
                    pos,
                    format!("duplicate attribute `{name}`"),
                ));
            }
            attrs.push(Attribute { name, value, pos });
        }
    }

    /// `name = STRING` for a keyword attribute.
    fn keyword_attr(&mut self, tok: Tok, name: &str) -> Result<Attribute, PnmlError> {
        let pos = self.expect(tok, &format!("the `{name}` attribute"))?;
        self.expect(Tok::Equals, "`=`")?;
        let value = self.string()?;
        Ok(Attribute {
            name: name.to_string(),
            value,
            pos,
        })
    }

    /// Parses an element starting at `<`. `parent` restricts which keyword
    /// elements may appear; `None` is the document root.
    fn element(&mut self, parent: Option<Content>) -> Result<Element, PnmlError> {
        let pos = self.expect(Tok::Open, "`<`")?;
        let allowed = |c: &[Content]| parent.is_some_and(|p| c.contains(&p));
        let tok = self.peek().cloned();
        match tok {
            Some(Tok::Name(name)) => {
                self.i += 1;
                let attributes = self.attributes(Vec::new())?;
                let kind = ElementKind::Generic(name);
                if self.peek() == Some(&Tok::SlashClose) {
                    self.i += 1;
                    return Ok(Element {
                        kind,
                        attributes,
                        children: Vec::new(),
                        pos,
                    });
                }
                self.expect(Tok::Close, "`>` or `/>`")?;
                let children = self.content(Content::Generic)?;
                self.close_tag(&kind)?;
                Ok(Element {
                    kind,
                    attributes,
                    children,
                    pos,
                })
            }
            Some(Tok::Place) if allowed(&[Content::Generic]) => {
                self.i += 1;
                let id = self.keyword_attr(Tok::Id, "id")?;
                let attributes = self.attributes(vec![id])?;
                self.expect(Tok::Close, "`>`")?;
                let children = self.content(Content::Place)?;
                self.close_tag(&ElementKind::Place)?;
                Ok(Element {
                    kind: ElementKind::Place,
                    attributes,
                    children,
                    pos,
                })
            }
            Some(Tok::Transition) if allowed(&[Content::Generic]) => {
                self.i += 1;
                let id = self.keyword_attr(Tok::Id, "id")?;
                let attributes = self.attributes(vec![id])?;
                self.expect(Tok::Close, "`>`")?;
                let children = self.content(Content::Transition)?;
                self.close_tag(&ElementKind::Transition)?;
                Ok(Element {
                    kind: ElementKind::Transition,
                    attributes,
                    children,
                    pos,
                })
            }
            Some(Tok::Arc) if allowed(&[Content::Generic]) => {
                self.i += 1;
                let id = self.keyword_attr(Tok::Id, "id")?;
                let source = self.keyword_attr(Tok::Source, "source")?;
                let target = self.keyword_attr(Tok::Target, "target")?;
                let attributes = self.attributes(vec![id, source, target])?;
                let children = if self.peek() == Some(&Tok::SlashClose) {
                    self.i += 1;
                    Vec::new()
                } else {
                    self.expect(Tok::Close, "`>` or `/>`")?;
                    let children = self.content(Content::Arc)?;
                    self.close_tag(&ElementKind::Arc)?;
                    children
                };
                Ok(Element {
                    kind: ElementKind::Arc,
                    attributes,
                    children,
                    pos,
                })
            }
            Some(Tok::Initial) if allowed(&[Content::Place]) => {
                self.label(ElementKind::InitialMarking, pos)
            }
            Some(Tok::Inscription) if allowed(&[Content::Arc]) => {
                self.label(ElementKind::Inscription, pos)
            }
            Some(Tok::TextTag) if allowed(&[Content::Generic, Content::Label]) => {
                self.i += 1;
                self.expect(Tok::Close, "`>`")?;
                let text_pos = self.pos();
                let text = match self.peek() {
                    Some(Tok::Digit(t)) | Some(Tok::Text(t)) => t.clone(),
                    _ => return Err(self.unexpected("text or digits inside `<text>`")),
                };
                self.i += 1;
                self.close_tag(&ElementKind::Text)?;
                Ok(Element {
                    kind: ElementKind::Text,
                    attributes: Vec::new(),
                    children: vec![Node::Text(text, text_pos)],
                    pos,
                })
            }
            Some(Tok::Slash) => Err(PnmlError::syntax(
                pos,
                "close tag without a matching open tag",
            )),
            Some(
                t @ (Tok::Place
                | Tok::Transition
                | Tok::Arc
                | Tok::Initial
                | Tok::Inscription
                | Tok::TextTag),
            ) => Err(PnmlError::syntax(
                self.pos(),
                format!("{} element is not allowed here", t.describe()),
            )),
            _ => Err(self.unexpected("an element name")),
        }
    }

    /// `initialMarking` and `inscription`: no attributes, label content.
    fn label(&mut self, kind: ElementKind, pos: Pos) -> Result<Element, PnmlError> {
        self.i += 1;
        self.expect(Tok::Close, "`>`")?;
        let children = self.content(Content::Label)?;
        self.close_tag(&kind)?;
        Ok(Element {
            kind,
            attributes: Vec::new(),
            children,
            pos,
        })
    }

    fn content(&mut self, ctx: Content) -> Result<Vec<Node>, PnmlError> {
        let mut out = Vec::new();
        loop {
            match self.peek() {
                Some(Tok::Open) if self.peek_at(1) == Some(&Tok::Slash) => return Ok(out),
                Some(Tok::Open) => out.push(Node::Element(self.element(Some(ctx))?)),
                Some(Tok::Text(t)) => {
                    out.push(Node::Text(t.clone(), self.pos()));
                    self.i += 1;
                }
                Some(Tok::Digit(_)) => {
                    return Err(PnmlError::syntax(
                        self.pos(),
                        "digits are only allowed inside `<text>`",
                    ));
                }
                _ => return Err(self.unexpected("content or a close tag")),
            }
        }
    }

    fn close_tag(&mut self, kind: &ElementKind) -> Result<(), PnmlError> {
        let expected = format!("`</{}>`", kind.tag());
        self.expect(Tok::Open, &expected)?;
        self.expect(Tok::Slash, &expected)?;
        let pos = self.pos();
        let ok = match (kind, self.peek()) {
            (ElementKind::Generic(n), Some(Tok::Name(m))) => n == m,
            (ElementKind::Place, Some(Tok::Place))
            | (ElementKind::Transition, Some(Tok::Transition))
            | (ElementKind::Arc, Some(Tok::Arc))
            | (ElementKind::InitialMarking, Some(Tok::Initial))
            | (ElementKind::Inscription, Some(Tok::Inscription))
            | (ElementKind::Text, Some(Tok::TextTag)) => true,
            _ => false,
        };
        if !ok {
            let found = self
                .peek()
                .map_or("end of input".to_string(), Tok::describe);
            return Err(PnmlError::syntax(
                pos,
                format!("mismatched close tag: expected {expected}, found {found}"),
            ));
        }
        self.i += 1;
        self.expect(Tok::Close, "`>`")?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const HDR: &str = "<?xml version=\"1.0\"?>\n";

    fn ok(body: &str) -> PnmlDocument {
        parse_pnml(&format!("{HDR}{body}")).unwrap_or_else(|e| panic!("{body}: {e}"))
    }

    fn err(body: &str) -> PnmlError {
        parse_pnml(&format!("{HDR}{body}")).expect_err(body)
    }

    #[test]
    fn minimal_net() {
        let doc = ok(
            r#"<pnml><net id="n"><place id="p"><initialMarking><text>{1}</text></initialMarking></place>
            <transition id="t"></transition><arc id="a" source="p" target="t"/></net></pnml>"#,
        );
        assert_eq!(doc.header.name, "xml");
        let kinds: Vec<_> = doc
            .elements()
            .iter()
            .map(|e| e.kind.tag().to_string())
            .collect();
        assert_eq!(
            kinds,
            [
                "pnml",
                "net",
                "place",
                "initialMarking",
                "text",
                "transition",
                "arc"
            ]
        );
        let place = doc.elements()[2];
        assert_eq!(place.attr("id").unwrap().value, "p");
        assert_eq!(place.child_elements().next().unwrap().text_content(), "{1}");
    }

    #[test]
    fn rejections() {
        assert!(parse_pnml("").is_err());
        assert!(parse_pnml("</place>").is_err());
        assert!(err("</place>").message.contains("close tag"));
        assert!(err("<pnml></pnm>").message.contains("mismatched"));
        assert!(err("<pnml><place/></pnml>").code == "syntax");
        assert!(err("<pnml><place id=\"p\"/></pnml>").code == "syntax");
        assert!(err("<pnml>7</pnml>").message.contains("digits"));
        assert!(err("<pnml/><x/>").message.contains("after the root"));
        assert!(err("<place id=\"p\"></place>").code == "syntax");
        assert!(err("<pnml><arc id=\"a\" target=\"t\" source=\"p\"/></pnml>").code == "syntax");
        assert!(err("<pnml><initialMarking></initialMarking></pnml>")
            .message
            .contains("not allowed"));
    }

    #[test]
    fn error_position() {
        let e = err("<pnml>\n  <place/>\n</pnml>");
        assert_eq!(e.pos, Pos { line: 3, col: 9 });
        assert_eq!(
            e.render("f.pnml"),
            format!("f.pnml:3:9: syntax: {}", e.message)
        );
    }
}
