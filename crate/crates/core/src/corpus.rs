//! Bundled case studies: a parking system and a travel agency, each with a
//! net, a property suite and expected verdicts at small bounds.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fotl::{parse_formula, resolve_predicates, ServerFormula};
use crate::net::NuNet;
use crate::pnml::load_net;

/// Names accepted by [`load_case_study`].
pub const STUDIES: [&str; 2] = ["aps", "travel-agency"];

struct Files {
    net: &'static str,
    props: &'static [(&'static str, &'static str)],
    expected: &'static str,
}

const APS: Files = Files {
    net: include_str!("../studies/aps/net.pnml"),
    props: &[
        ("psi1", include_str!("../studies/aps/props/psi1.fotl")),
        ("psi2", include_str!("../studies/aps/props/psi2.fotl")),
        ("psi3", include_str!("../studies/aps/props/psi3.fotl")),
        ("psi4", include_str!("../studies/aps/props/psi4.fotl")),
    ],
    expected: include_str!("../studies/aps/expected.json"),
};

const TRAVEL: Files = Files {
    net: include_str!("../studies/travel/net.pnml"),
    props: &[
        ("phi1", include_str!("../studies/travel/props/phi1.fotl")),
        ("phi2", include_str!("../studies/travel/props/phi2.fotl")),
        ("phi3", include_str!("../studies/travel/props/phi3.fotl")),
        ("phi4", include_str!("../studies/travel/props/phi4.fotl")),
        ("phi5", include_str!("../studies/travel/props/phi5.fotl")),
        ("phi6", include_str!("../studies/travel/props/phi6.fotl")),
        ("phi7", include_str!("../studies/travel/props/phi7.fotl")),
    ],
    expected: include_str!("../studies/travel/expected.json"),
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Property {
    pub name: String,
    /// Source text, trimmed.
    pub text: String,
    /// Parsed and resolved against the study's net.
    pub formula: ServerFormula,
}

/// Whether a run satisfying the formula exists (`witness`) or one
/// satisfying its negation exists (`refute`), at the given bounds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Expectation {
    pub property: String,
    pub lambda: usize,
    pub kappa: u32,
    pub mode: String,
    pub sat: bool,
}

#[derive(Debug, Clone)]
pub struct CaseStudy {
    pub name: String,
    pub net_text: &'static str,
    pub net: NuNet,
    pub properties: Vec<Property>,
    pub expected: Vec<Expectation>,
}

impl CaseStudy {
    pub fn property(&self, name: &str) -> Option<&Property> {
        self.properties.iter().find(|p| p.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CorpusError {
    #[error("unknown case study `{0}` (known: aps, travel-agency)")]
    Unknown(String),
    #[error("bundled file {file} is invalid: {message}")]
    Invalid { file: String, message: String },
}

/// Loads a bundled study by name.
pub fn load_case_study(name: &str) -> Result<CaseStudy, CorpusError> {
    let files = match name {
        "aps" => &APS,
        "travel-agency" | "travel" => &TRAVEL,
        other => return Err(CorpusError::Unknown(other.to_string())),
    };
    let invalid = |file: &str, message: String| CorpusError::Invalid {
        file: format!("{name}/{file}"),
        message,
    };
    let net = load_net(files.net)
        .map_err(|es| invalid("net.pnml", crate::pnml::render_errors("net.pnml", &es)))?;
    let mut properties = Vec::new();
    for (prop, text) in files.props {
        let file = format!("props/{prop}.fotl");
        let parsed = parse_formula(text).map_err(|e| invalid(&file, e.to_string()))?;
        let formula = resolve_predicates(&parsed, &net).map_err(|es| {
            invalid(
                &file,
                es.iter()
                    .map(|e| e.to_string())
                    .collect::<Vec<_>>()
                    .join("; "),
            )
        })?;
        properties.push(Property {
            name: prop.to_string(),
            text: text.trim().to_string(),
            formula,
        });
    }
    let expected: Vec<Expectation> = serde_json::from_str(files.expected)
        .map_err(|e| invalid("expected.json", e.to_string()))?;
    Ok(CaseStudy {
        name: if name == "travel" {
            "travel-agency".into()
        } else {
            name.to_string()
        },
        net_text: files.net,
        net,
        properties,
        expected,
    })
}
