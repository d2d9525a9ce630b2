//! Namespaces and IRI minting.

use crate::ids::{AnchorId, EloId, LinkId};

pub const RDF: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
pub const DC: &str = "http://purl.org/dc/elements/1.1/";
pub const MIR: &str = "http://www.rz.fhtw-berlin.de/MIR#";

pub fn rdf(local: &str) -> String {
    format!("{RDF}{local}")
}

pub fn dc(local: &str) -> String {
    format!("{DC}{local}")
}

pub fn mir(local: &str) -> String {
    format!("{MIR}{local}")
}

/// Well-known prefixes accepted in authoring input (`mir:BackgroundInfo`).
pub const PREFIXES: [(&str, &str); 3] = [("rdf", RDF), ("dc", DC), ("mir", MIR)];

/// Expands `pfx:local` against [`PREFIXES`]; anything else is returned unchanged.
pub fn expand_curie(s: &str) -> String {
    if let Some((pfx, local)) = s.split_once(':') {
        if !local.starts_with("//") {
            if let Some((_, base)) = PREFIXES.iter().find(|(p, _)| *p == pfx) {
                return format!("{base}{local}");
            }
        }
    }
    s.to_string()
}

/// Shortens an absolute IRI to `pfx:local` when a well-known prefix applies.
pub fn compact(iri: &str) -> String {
    for (pfx, base) in PREFIXES {
        if let Some(local) = iri.strip_prefix(base) {
            return format!("{pfx}:{local}");
        }
    }
    iri.to_string()
}

/// Absolute IRI check: a scheme followed by `://`, or a `urn:` IRI, with no
/// whitespace or angle brackets.
pub fn is_absolute_iri(s: &str) -> bool {
    if s.chars().any(|c| c.is_whitespace() || matches!(c, '<' | '>' | '"')) {
        return false;
    }
    let Some((scheme, rest)) = s.split_once(':') else {
        return false;
    };
    let scheme_ok = scheme
        .chars()
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic())
        && scheme
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'));
    scheme_ok
        && ((rest.starts_with("//") && rest.len() > 2)
            || (scheme.eq_ignore_ascii_case("urn") && !rest.is_empty()))
}

/// Mints resource IRIs from slugs under a configurable base namespace.
///
/// ELOs become `{base}elo-{id}`, anchors `{base}anchor-{id}` and links `{base}{id}`.
/// Arcs of multi-arc links become `{link}/arc-{k}` (1-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IriMinter {
    base: String,
}

impl Default for IriMinter {
    fn default() -> Self {
        Self::new(MIR)
    }
}

impl IriMinter {
    pub fn new(base: impl Into<String>) -> Self {
        Self { base: base.into() }
    }

    pub fn base(&self) -> &str {
        &self.base
    }

    pub fn elo(&self, id: &EloId) -> String {
        format!("{}elo-{}", self.base, id)
    }

    pub fn anchor(&self, id: &AnchorId) -> String {
        format!("{}anchor-{}", self.base, id)
    }

    pub fn link(&self, id: &LinkId) -> String {
        format!("{}{}", self.base, id)
    }

    pub fn arc(&self, link: &LinkId, k: usize) -> String {
        format!("{}/arc-{}", self.link(link), k)
    }

    pub fn elo_id(&self, iri: &str) -> Option<EloId> {
        iri.strip_prefix(&self.base)?
            .strip_prefix("elo-")
            .and_then(|s| EloId::new(s).ok())
    }

    pub fn anchor_id(&self, iri: &str) -> Option<AnchorId> {
        iri.strip_prefix(&self.base)?
            .strip_prefix("anchor-")
            .and_then(|s| AnchorId::new(s).ok())
    }

    /// Link id for a link IRI or one of its arc node IRIs.
    pub fn link_id(&self, iri: &str) -> Option<LinkId> {
        let rest = iri.strip_prefix(&self.base)?;
        let rest = rest.split_once("/arc-").map_or(rest, |(l, _)| l);
        if rest.starts_with("elo-") || rest.starts_with("anchor-") {
            return None;
        }
        LinkId::new(rest).ok()
    }
}
