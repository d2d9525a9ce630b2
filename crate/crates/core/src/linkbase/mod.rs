//! Link base: anchors and links stored apart from content.

mod selector;

use std::collections::BTreeMap;
use std::fmt;

use chrono::NaiveDate;
use serde::Serialize;
use thiserror::Error;

use crate::ids::{AnchorId, EloId, InvalidId, LinkId};
use crate::ns;
use crate::store::Repository;

pub use selector::{resolve_selector, CharRange, FragmentSpan, Selector, Step};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinkBaseError {
    #[error("invalid selector {0}")]
    InvalidSelector(String),
    #[error("selector {0} does not address an element")]
    DanglingSelector(String),
    #[error("character range of {selector} exceeds text length {text_len}")]
    Range { selector: String, text_len: usize },
    #[error("content body is not well-formed XML: {0}")]
    MalformedBody(String),
    #[error("ELO {0} not found")]
    EloNotFound(EloId),
    #[error("anchor {0} not found")]
    AnchorNotFound(AnchorId),
    #[error("link {0} not found")]
    LinkNotFound(LinkId),
    #[error("a link needs at least one arc")]
    EmptyLink,
    #[error("arcrole {0:?} is not an absolute IRI")]
    InvalidArcrole(String),
    #[error("resource {0:?} is neither an ELO id nor an absolute IRI")]
    InvalidResource(String),
    #[error("path space {0:?} is not a slash-separated path")]
    InvalidPathSpace(String),
    #[error("{0} already exists")]
    Duplicate(String),
    #[error("anchor {anchor} is used by links {links:?}")]
    AnchorInUse { anchor: AnchorId, links: Vec<LinkId> },
    #[error("link ids must not start with \"elo-\" or \"anchor-\": {0}")]
    ReservedLinkId(LinkId),
    #[error(transparent)]
    Id(#[from] InvalidId),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum Resource {
    Elo(EloId),
    External(String),
}

impl Resource {
    /// ELO slug or absolute IRI.
    pub fn parse(s: &str) -> Result<Self, LinkBaseError> {
        if let Ok(id) = EloId::new(s) {
            Ok(Resource::Elo(id))
        } else if ns::is_absolute_iri(s) {
            Ok(Resource::External(s.to_string()))
        } else {
            Err(LinkBaseError::InvalidResource(s.to_string()))
        }
    }

    pub fn elo(&self) -> Option<&EloId> {
        match self {
            Resource::Elo(id) => Some(id),
            Resource::External(_) => None,
        }
    }
}

impl fmt::Display for Resource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Resource::Elo(id) => write!(f, "{id}"),
            Resource::External(iri) => f.write_str(iri),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Anchor {
    pub id: AnchorId,
    pub resource: Resource,
    /// `None` for a generic anchor over the whole resource.
    pub selector: Option<Selector>,
    pub title: Option<String>,
    pub label: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Arc {
    pub from: AnchorId,
    pub to: AnchorId,
    /// Absolute IRI.
    pub arcrole: String,
    pub title: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Title {
    pub lang: Option<String>,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Link {
    pub id: LinkId,
    pub arcs: Vec<Arc>,
    pub titles: Vec<Title>,
    pub creator: String,
    pub created: NaiveDate,
    pub path_space: String,
}

impl Link {
    /// First title in `lang`, else the first title without a language, else
    /// the first title at all.
    pub fn title_for(&self, lang: Option<&str>) -> Option<&str> {
        let by_lang = lang.and_then(|l| self.titles.iter().find(|t| t.lang.as_deref() == Some(l)));
        by_lang
            .or_else(|| self.titles.iter().find(|t| t.lang.is_none()))
            .or_else(|| self.titles.first())
            .map(|t| t.text.as_str())
    }
}

/// Input for [`LinkBase::create_anchor`].
#[derive(Debug, Clone, Default)]
pub struct NewAnchor {
    pub id: Option<AnchorId>,
    pub resource: String,
    pub selector: Option<String>,
    pub title: Option<String>,
    pub label: Option<String>,
}

#[derive(Debug, Clone)]
pub struct NewArc {
    pub from: AnchorId,
    pub to: AnchorId,
    /// Absolute IRI or `rdf:`/`dc:`/`mir:` prefixed name.
    pub arcrole: String,
    pub title: Option<String>,
}

/// Input for [`LinkBase::create_link`].
#[derive(Debug, Clone)]
pub struct NewLink {
    pub id: Option<LinkId>,
    pub arcs: Vec<NewArc>,
    pub titles: Vec<Title>,
    pub creator: String,
    pub created: NaiveDate,
    pub path_space: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    From,
    To,
}

/// Filters for [`LinkBase::query_links`]; all given filters must hold.
#[derive(Debug, Clone, Default)]
pub struct LinkQuery<'a> {
    pub path_space_prefix: Option<&'a str>,
    pub touching_anchor: Option<&'a AnchorId>,
    /// Which arc end must be the touching anchor; either end when `None`.
    pub direction: Option<Direction>,
}

fn valid_path_space(s: &str) -> bool {
    !s.is_empty()
        && s.split('/').all(|seg| {
            !seg.is_empty() && seg.chars().all(|c| c.is_alphanumeric() || matches!(c, '-' | '_' | '.'))
        })
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Hash)]
pub struct LinkBase {
    anchors: BTreeMap<AnchorId, Anchor>,
    links: BTreeMap<LinkId, Link>,
}

impl LinkBase {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn anchor(&self, id: &AnchorId) -> Option<&Anchor> {
        self.anchors.get(id)
    }

    pub fn link(&self, id: &LinkId) -> Option<&Link> {
        self.links.get(id)
    }

    pub fn anchors(&self) -> impl Iterator<Item = &Anchor> {
        self.anchors.values()
    }

    pub fn links(&self) -> impl Iterator<Item = &Link> {
        self.links.values()
    }

    pub fn anchors_on<'a>(&'a self, elo: &'a EloId) -> impl Iterator<Item = &'a Anchor> + 'a {
        self.anchors
            .values()
            .filter(move |a| a.resource.elo() == Some(elo))
    }

    fn next_id(prefix: &str, taken: impl Fn(&str) -> bool) -> String {
        (1..)
            .map(|n| format!("{prefix}{n}"))
            .find(|s| !taken(s))
            .expect("unbounded sequence")
    }

    /// Stores an anchor on an existing ELO (or an external IRI) and returns its id.
    pub fn create_anchor(&mut self, repo: &Repository, new: NewAnchor) -> Result<AnchorId, LinkBaseError> {
        let resource = Resource::parse(&new.resource)?;
        let selector = new.selector.as_deref().map(str::parse::<Selector>).transpose()?;
        if let Resource::Elo(elo_id) = &resource {
            let elo = repo
                .get_elo(elo_id)
                .map_err(|_| LinkBaseError::EloNotFound(elo_id.clone()))?;
            if let Some(sel) = &selector {
                resolve_selector(sel, &elo.paragraph.body)?;
            }
        }
        let id = match new.id {
            Some(id) => id,
            None => AnchorId::new(Self::next_id("a", |s| {
                AnchorId::new(s).is_ok_and(|id| self.anchors.contains_key(&id))
            }))?,
        };
        if self.anchors.contains_key(&id) {
            return Err(LinkBaseError::Duplicate(format!("anchor {id}")));
        }
        let anchor = Anchor {
            id: id.clone(),
            resource,
            selector,
            title: new.title.filter(|t| !t.is_empty()),
            label: new.label.filter(|t| !t.is_empty()),
        };
        self.anchors.insert(id.clone(), anchor);
        Ok(id)
    }

    /// Stores a link whose arcs connect existing anchors.
    pub fn create_link(&mut self, new: NewLink) -> Result<LinkId, LinkBaseError> {
        if new.arcs.is_empty() {
            return Err(LinkBaseError::EmptyLink);
        }
        if !valid_path_space(&new.path_space) {
            return Err(LinkBaseError::InvalidPathSpace(new.path_space));
        }
        let mut arcs = Vec::with_capacity(new.arcs.len());
        for arc in new.arcs {
            for end in [&arc.from, &arc.to] {
                if !self.anchors.contains_key(end) {
                    return Err(LinkBaseError::AnchorNotFound(end.clone()));
                }
            }
            let arcrole = ns::expand_curie(&arc.arcrole);
            if !ns::is_absolute_iri(&arcrole) {
                return Err(LinkBaseError::InvalidArcrole(arc.arcrole));
            }
            arcs.push(Arc {
                from: arc.from,
                to: arc.to,
                arcrole,
                title: arc.title.filter(|t| !t.is_empty()),
            });
        }
        let id = match new.id {
            Some(id) => id,
            None => LinkId::new(Self::next_id("link", |s| {
                LinkId::new(s).is_ok_and(|id| self.links.contains_key(&id))
            }))?,
        };
        if id.as_str().starts_with("elo-") || id.as_str().starts_with("anchor-") {
            return Err(LinkBaseError::ReservedLinkId(id));
        }
        if self.links.contains_key(&id) {
            return Err(LinkBaseError::Duplicate(format!("link {id}")));
        }
        let link = Link {
            id: id.clone(),
            arcs,
            titles: new.titles.into_iter().filter(|t| !t.text.is_empty()).collect(),
            creator: new.creator,
            created: new.created,
            path_space: new.path_space,
        };
        self.links.insert(id.clone(), link);
        Ok(id)
    }

    /// Inserts already-validated entities as loaded from disk. Integrity is
    /// checked separately by [`LinkBase::integrity_violations`].
    pub(crate) fn insert_anchor_unchecked(&mut self, anchor: Anchor) -> bool {
        self.anchors.insert(anchor.id.clone(), anchor).is_none()
    }

    pub(crate) fn insert_link_unchecked(&mut self, link: Link) -> bool {
        self.links.insert(link.id.clone(), link).is_none()
    }

    /// Links passing every given filter, ordered by path space then id.
    pub fn query_links(&self, q: &LinkQuery<'_>) -> Vec<&Link> {
        let mut out: Vec<&Link> = self
            .links
            .values()
            .filter(|l| q.path_space_prefix.is_none_or(|p| l.path_space.starts_with(p)))
            .filter(|l| match q.touching_anchor {
                None => true,
                Some(a) => l.arcs.iter().any(|arc| match q.direction {
                    Some(Direction::From) => &arc.from == a,
                    Some(Direction::To) => &arc.to == a,
                    None => &arc.from == a || &arc.to == a,
                }),
            })
            .collect();
        out.sort_by(|a, b| (&a.path_space, &a.id).cmp(&(&b.path_space, &b.id)));
        out
    }

    pub fn links_using(&self, anchor: &AnchorId) -> Vec<LinkId> {
        self.links
            .values()
            .filter(|l| l.arcs.iter().any(|a| &a.from == anchor || &a.to == anchor))
            .map(|l| l.id.clone())
            .collect()
    }

    pub fn remove_link(&mut self, id: &LinkId) -> Result<Link, LinkBaseError> {
        self.links
            .remove(id)
            .ok_or_else(|| LinkBaseError::LinkNotFound(id.clone()))
    }

    /// Removes an anchor. Without `cascade`, anchors used by links are kept
    /// and [`LinkBaseError::AnchorInUse`] is returned.
    pub fn remove_anchor(&mut self, id: &AnchorId, cascade: bool) -> Result<Anchor, LinkBaseError> {
        if !self.anchors.contains_key(id) {
            return Err(LinkBaseError::AnchorNotFound(id.clone()));
        }
        let users = self.links_using(id);
        if !users.is_empty() {
            if !cascade {
                return Err(LinkBaseError::AnchorInUse {
                    anchor: id.clone(),
                    links: users,
                });
            }
            for l in &users {
                self.links.remove(l);
            }
        }
        Ok(self.anchors.remove(id).expect("checked above"))
    }

    /// Every referential-integrity problem against `repo`.
    pub fn integrity_violations(&self, repo: &Repository) -> Vec<String> {
        let mut out = Vec::new();
        for a in self.anchors.values() {
            let Resource::Elo(elo_id) = &a.resource else {
                continue;
            };
            match repo.get_elo(elo_id) {
                Err(_) => out.push(format!("anchor {}: resource {} does not exist", a.id, elo_id)),
                Ok(elo) => {
                    if let Some(sel) = &a.selector {
                        if let Err(e) = resolve_selector(sel, &elo.paragraph.body) {
                            out.push(format!("anchor {}: {e}", a.id));
                        }
                    }
                }
            }
        }
        for l in self.links.values() {
            if l.arcs.is_empty() {
                out.push(format!("link {}: no arcs", l.id));
            }
            for arc in &l.arcs {
                for end in [&arc.from, &arc.to] {
                    if !self.anchors.contains_key(end) {
                        out.push(format!("link {}: anchor {} does not exist", l.id, end));
                    }
                }
                if !ns::is_absolute_iri(&arc.arcrole) {
                    out.push(format!("link {}: arcrole {:?} is not absolute", l.id, arc.arcrole));
                }
            }
        }
        out
    }
}
