//! Lowering of a parsed document into a ν-net.

use std::collections::BTreeSet;

use super::{Element, ElementKind, PnmlDocument, PnmlError, Pos};
use crate::net::{
    Ident, Inscription, Multiset, NetBuilder, NetError, NuNet, Place, Role, Variable,
};

/// Parses an arc label: whitespace-separated `v` or `k*v` items, where `v`
/// is an ASCII identifier or `ν`. Repeated variables add up.
pub fn parse_inscription(text: &str) -> Result<Inscription, String> {
    let mut insc = Inscription::new();
    for item in text.split_whitespace() {
        let (k, name) = match item.split_once('*') {
            Some((k, name)) => {
                let k: u32 = k
                    .parse()
                    .ok()
                    .filter(|&k| k > 0)
                    .ok_or_else(|| format!("bad multiplicity in `{item}`"))?;
                (k, name)
            }
            None => (1, item),
        };
        let valid = name == "ν"
            || name.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
                && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !valid {
            return Err(format!("`{name}` is not a variable name"));
        }
        let v = Variable::parse(name).expect("nonempty");
        *insc.entry(v).or_insert(0) += k;
    }
    if insc.is_empty() {
        return Err("empty inscription".into());
    }
    Ok(insc)
}

/// Parses an identifier set such as `{0}`, `{1,2}` or `{}`.
pub fn parse_marking(text: &str) -> Result<Multiset, PnmlError> {
    let t = text.trim();
    if !t.is_empty() && t.chars().all(|c| c.is_ascii_digit()) {
        return Err(PnmlError::new(
            Pos::default(),
            "anonymous-marking",
            format!(
                "anonymous token count `{t}`; ν-net markings must list identifiers, e.g. {{1,2}}"
            ),
        ));
    }
    let bad = || {
        PnmlError::new(
            Pos::default(),
            "bad-marking",
            format!("`{t}` is not an identifier set"),
        )
    };
    let inner = t
        .strip_prefix('{')
        .and_then(|s| s.strip_suffix('}'))
        .ok_or_else(bad)?;
    let mut m = Multiset::new();
    if inner.trim().is_empty() {
        return Ok(m);
    }
    for part in inner.split(',') {
        let id: Ident = part.trim().parse().map_err(|_| bad())?;
        m.insert(id, 1);
    }
    Ok(m)
}

fn net_error(pos: Pos, e: NetError) -> PnmlError {
    let code = match e {
        NetError::DuplicateId(_) => "duplicate-id",
        NetError::DanglingEndpoint(_) => "dangling-endpoint",
        NetError::SameKindArc { .. } => "arc-kind",
        NetError::DuplicateArc { .. } => "duplicate-arc",
        NetError::EmptyInscription { .. } => "missing-inscription",
        NetError::UnknownTransition(_) | NetError::UnknownPlace(_) => "unknown",
    };
    PnmlError::new(pos, code, e.to_string())
}

fn id_of(e: &Element) -> &str {
    &e.attr("id").expect("parser guarantees an id").value
}

fn lower_place(e: &Element, errors: &mut Vec<PnmlError>) -> Option<Place> {
    let mut ok = true;
    let role = match e.attr("role").map(|a| (a.value.as_str(), a.pos)) {
        None | Some(("client", _)) => Role::Client,
        Some(("server", _)) => Role::Server,
        Some((other, pos)) => {
            errors.push(PnmlError::new(
                pos,
                "bad-role",
                format!("role must be `client` or `server`, got `{other}`"),
            ));
            ok = false;
            Role::Client
        }
    };
    let terminal = match e.attr("terminal").map(|a| (a.value.as_str(), a.pos)) {
        None | Some(("false", _)) => false,
        Some(("true", _)) => true,
        Some((other, pos)) => {
            errors.push(PnmlError::new(
                pos,
                "bad-terminal",
                format!("terminal must be `true` or `false`, got `{other}`"),
            ));
            ok = false;
            false
        }
    };
    let markings: Vec<&Element> = e
        .child_elements()
        .filter(|c| c.kind == ElementKind::InitialMarking)
        .collect();
    let mut initial = Multiset::new();
    if let Some(extra) = markings.get(1) {
        errors.push(PnmlError::new(
            extra.pos,
            "duplicate-label",
            "place has more than one initialMarking",
        ));
        ok = false;
    }
    if let Some(m) = markings.first() {
        match parse_marking(&m.text_content()) {
            Ok(ms) => initial = ms,
            Err(mut err) => {
                err.pos = m.pos;
                errors.push(err);
                ok = false;
            }
        }
    }
    ok.then(|| Place {
        id: id_of(e).to_string(),
        role,
        terminal,
        initial,
    })
}

/// Builds the net: places and transitions in document order, then arcs.
/// Graphical and other unknown elements are ignored. All errors found are
/// reported, in document order.
pub fn lower_to_net(doc: &PnmlDocument) -> Result<NuNet, Vec<PnmlError>> {
    let elements = doc.elements();
    let mut errors = Vec::new();
    let mut b = NetBuilder::new();
    for e in &elements {
        let res = match e.kind {
            ElementKind::Place => match lower_place(e, &mut errors) {
                Some(p) => b.add_place(p).map(|_| ()),
                None => continue,
            },
            ElementKind::Transition => b.transition(id_of(e)).map(|_| ()),
            _ => continue,
        };
        if let Err(err) = res {
            errors.push(net_error(e.attr("id").unwrap().pos, err));
        }
    }
    let mut arc_ids = BTreeSet::new();
    let node_ids: BTreeSet<&str> = elements
        .iter()
        .filter(|e| matches!(e.kind, ElementKind::Place | ElementKind::Transition))
        .map(|e| id_of(e))
        .collect();
    for e in elements.iter().filter(|e| e.kind == ElementKind::Arc) {
        let id = id_of(e);
        if node_ids.contains(id) || !arc_ids.insert(id) {
            errors.push(PnmlError::new(
                e.attr("id").unwrap().pos,
                "duplicate-id",
                format!("duplicate id `{id}`"),
            ));
            continue;
        }
        let src = &e.attr("source").unwrap().value;
        let tgt = &e.attr("target").unwrap().value;
        let labels: Vec<&Element> = e
            .child_elements()
            .filter(|c| c.kind == ElementKind::Inscription)
            .collect();
        let insc = match labels.as_slice() {
            [] => {
                errors.push(PnmlError::new(
                    e.pos,
                    "missing-inscription",
                    format!("arc `{id}` ({src} -> {tgt}) has no inscription"),
                ));
                continue;
            }
            [one] => match parse_inscription(&one.text_content()) {
                Ok(insc) => insc,
                Err(msg) => {
                    errors.push(PnmlError::new(
                        one.pos,
                        "bad-inscription",
                        format!("arc `{id}`: {msg}"),
                    ));
                    continue;
                }
            },
            [_, extra, ..] => {
                errors.push(PnmlError::new(
                    extra.pos,
                    "duplicate-label",
                    format!("arc `{id}` has more than one inscription"),
                ));
                continue;
            }
        };
        if let Err(err) = b.add_arc(src, tgt, insc) {
            errors.push(net_error(e.pos, err));
        }
    }
    if errors.is_empty() {
        Ok(b.build())
    } else {
        Err(errors)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pnml::load_net;

    #[test]
    fn inscriptions() {
        let i = parse_inscription("c").unwrap();
        assert_eq!(i.get(&Variable::named("c")), Some(&1));
        assert_eq!(
            parse_inscription("nu").unwrap().get(&Variable::Nu),
            Some(&1)
        );
        assert_eq!(parse_inscription("ν").unwrap().get(&Variable::Nu), Some(&1));
        let i = parse_inscription("2*c s c").unwrap();
        assert_eq!(i.get(&Variable::named("c")), Some(&3));
        assert_eq!(i.get(&Variable::named("s")), Some(&1));
        for bad in ["", "0*c", "c,s", "3", "x*c", "*c", "1c"] {
            assert!(parse_inscription(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn markings() {
        assert_eq!(parse_marking("{0}").unwrap(), Multiset::from_ids(&[0]));
        assert_eq!(
            parse_marking(" { 1 , 2 } ").unwrap(),
            Multiset::from_ids(&[1, 2])
        );
        assert!(parse_marking("{}").unwrap().is_empty());
        assert_eq!(parse_marking("3").unwrap_err().code, "anonymous-marking");
        assert_eq!(parse_marking("{a}").unwrap_err().code, "bad-marking");
        assert_eq!(parse_marking("1,2").unwrap_err().code, "bad-marking");
    }

    #[test]
    fn lowering_reports_every_error() {
        let src = r#"<?xml version="1.0"?>
<pnml><net id="n">
<place id="p" role="boss"></place>
<place id="q"></place>
<transition id="q"></transition>
<transition id="t"></transition>
<arc id="a1" source="p" target="zz"><inscription><text>c</text></inscription></arc>
<arc id="a2" source="q" target="t"></arc>
</net></pnml>"#;
        let errs = load_net(src).unwrap_err();
        let codes: Vec<_> = errs.iter().map(|e| e.code).collect();
        assert_eq!(
            codes,
            [
                "bad-role",
                "duplicate-id",
                "dangling-endpoint",
                "missing-inscription"
            ]
        );
        assert_eq!(errs[0].pos.line, 3);
    }
}
