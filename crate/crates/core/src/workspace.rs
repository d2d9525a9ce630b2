//! The whole authoring state — content, link base, contexts and config — with
//! the derived statement graph kept current after every mutation.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::context::{self, ContextError, ContextRegistry, ContextSet, LinkContext, SelectedLink};
use crate::elo::{AuthorPresets, Elo, EloError};
use crate::graph::{build_model, Graph};
use crate::ids::{AnchorId, ContextId, EloId, LinkId};
use crate::layout::LayoutError;
use crate::linkbase::{LinkBase, LinkBaseError, NewAnchor, NewLink};
use crate::ns::{self, IriMinter};
use crate::rdql::{self, BindingTable, QueryError};
use crate::render::{self, LinkEnv, Mode, Nav, PageView, RenderError};
use crate::store::{Repository, StoreError};

fn default_namespace() -> String {
    ns::MIR.to_string()
}

/// Repository configuration (`hylos.toml`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    /// Base IRI under which ELOs, anchors and links are named.
    #[serde(default = "default_namespace")]
    pub namespace: String,
    /// Author recorded when metadata is generated at ingest.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub author: Option<String>,
    #[serde(default)]
    pub presets: AuthorPresets,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            namespace: default_namespace(),
            author: None,
            presets: AuthorPresets::default(),
        }
    }
}

/// How a failure should be reported to a client.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    NotFound,
    Invalid,
    Conflict,
    Internal,
}

#[derive(Debug, Error)]
pub enum WorkspaceError {
    #[error("{0} not found")]
    NotFound(String),
    #[error("integrity violations: {}", .0.join("; "))]
    Integrity(Vec<String>),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    LinkBase(#[from] LinkBaseError),
    #[error(transparent)]
    Context(#[from] ContextError),
    #[error(transparent)]
    Query(#[from] QueryError),
    #[error(transparent)]
    Render(#[from] RenderError),
    #[error(transparent)]
    Elo(#[from] EloError),
    #[error(transparent)]
    Layout(#[from] LayoutError),
}

impl WorkspaceError {
    pub fn kind(&self) -> ErrorKind {
        use ErrorKind::*;
        match self {
            WorkspaceError::NotFound(_) => NotFound,
            WorkspaceError::Integrity(_) => Conflict,
            WorkspaceError::Store(e) => store_kind(e),
            WorkspaceError::LinkBase(e) => match e {
                LinkBaseError::LinkNotFound(_) => NotFound,
                LinkBaseError::EloNotFound(_)
                | LinkBaseError::AnchorNotFound(_)
                | LinkBaseError::Duplicate(_)
                | LinkBaseError::AnchorInUse { .. }
                | LinkBaseError::DanglingSelector(_)
                | LinkBaseError::Range { .. } => Conflict,
                _ => Invalid,
            },
            WorkspaceError::Context(e) => match e {
                ContextError::NotFound(_) => NotFound,
                ContextError::Duplicate(_) => Conflict,
                _ => Invalid,
            },
            WorkspaceError::Query(_) | WorkspaceError::Elo(_) => Invalid,
            WorkspaceError::Render(e) => match e {
                RenderError::Store(s) => store_kind(s),
                RenderError::NoOccurrence { .. } | RenderError::Elo(_) => Invalid,
                _ => Conflict,
            },
            WorkspaceError::Layout(e) => match e {
                LayoutError::Integrity(_) => Conflict,
                LayoutError::Parse { .. } => Invalid,
                LayoutError::Io { .. } => Internal,
            },
        }
    }
}

fn store_kind(e: &StoreError) -> ErrorKind {
    match e {
        StoreError::NotFound(_) => ErrorKind::NotFound,
        StoreError::Cycle { .. } | StoreError::DuplicateChild { .. } => ErrorKind::Conflict,
        StoreError::Vocab(_) | StoreError::Elo(_) => ErrorKind::Invalid,
    }
}

/// What to render: an ELO in a mode, decorated by the active contexts, with
/// navigation along the access path of `root` (the first root reaching the
/// ELO when unset) at `occurrence` (its first occurrence when unset).
#[derive(Debug, Clone)]
pub struct PageRequest<'a> {
    pub elo: &'a EloId,
    pub mode: Mode,
    pub contexts: &'a ContextSet,
    pub root: Option<&'a EloId>,
    pub occurrence: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct Workspace {
    pub config: Config,
    pub repo: Repository,
    pub base: LinkBase,
    pub contexts: ContextRegistry,
    minter: IriMinter,
    graph: Graph,
}

impl PartialEq for Workspace {
    fn eq(&self, other: &Self) -> bool {
        self.config == other.config
            && self.repo == other.repo
            && self.base == other.base
            && self.contexts == other.contexts
    }
}

impl Default for Workspace {
    fn default() -> Self {
        Self::new(Config::default())
    }
}

impl Workspace {
    pub fn new(config: Config) -> Self {
        let minter = IriMinter::new(&config.namespace);
        Self {
            config,
            repo: Repository::new(),
            base: LinkBase::new(),
            contexts: ContextRegistry::new(),
            minter,
            graph: Graph::new(),
        }
    }

    /// Assembles a workspace, rejecting it if any integrity check fails.
    pub fn from_parts(
        config: Config,
        repo: Repository,
        base: LinkBase,
        contexts: ContextRegistry,
    ) -> Result<Self, WorkspaceError> {
        let mut ws = Self {
            minter: IriMinter::new(&config.namespace),
            config,
            repo,
            base,
            contexts,
            graph: Graph::new(),
        };
        let violations = ws.integrity_violations();
        if !violations.is_empty() {
            return Err(WorkspaceError::Integrity(violations));
        }
        ws.rebuild();
        Ok(ws)
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn minter(&self) -> &IriMinter {
        &self.minter
    }

    fn rebuild(&mut self) {
        self.graph = build_model(&self.repo, &self.base, &self.minter);
    }

    /// Every problem with content structure, registry references and link
    /// references. Context queries are validated when registered.
    pub fn integrity_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for elo in self.repo.elos() {
            if let Err(e) = elo.check_structure() {
                out.push(format!("ELO {}: {e}", elo.id));
            }
        }
        for d in self.repo.dangling_refs() {
            out.push(format!(
                "ELO {}: {} reference {:?} is not registered",
                d.elo,
                d.kind.name(),
                d.reference
            ));
        }
        out.extend(self.base.integrity_violations(&self.repo));
        out
    }

    /// Applies `f` to a copy of the state and commits it only if it succeeds
    /// and leaves the state consistent.
    fn transact<T>(
        &mut self,
        f: impl FnOnce(&mut Repository, &mut LinkBase, &mut ContextRegistry) -> Result<T, WorkspaceError>,
    ) -> Result<T, WorkspaceError> {
        let mut repo = self.repo.clone();
        let mut base = self.base.clone();
        let mut contexts = self.contexts.clone();
        let out = f(&mut repo, &mut base, &mut contexts)?;
        let saved = (
            std::mem::replace(&mut self.repo, repo),
            std::mem::replace(&mut self.base, base),
            std::mem::replace(&mut self.contexts, contexts),
        );
        let violations = self.integrity_violations();
        if !violations.is_empty() {
            (self.repo, self.base, self.contexts) = saved;
            return Err(WorkspaceError::Integrity(violations));
        }
        self.rebuild();
        Ok(out)
    }

    pub fn elo(&self, id: &EloId) -> Result<&Elo, WorkspaceError> {
        self.repo
            .get_elo(id)
            .map_err(|_| WorkspaceError::NotFound(format!("ELO {id}")))
    }

    /// Adds or replaces an ELO. Replacing content that anchors still point
    /// into fails with an integrity error.
    pub fn put_elo(&mut self, elo: Elo) -> Result<(), WorkspaceError> {
        elo.check_structure()?;
        self.transact(|repo, _, _| Ok(repo.put_elo(elo)?))
    }

    pub fn attach_child(&mut self, parent: &EloId, child: &EloId, position: usize) -> Result<(), WorkspaceError> {
        self.transact(|repo, _, _| Ok(repo.attach_child(parent, child, position)?))
    }

    /// Removes an ELO together with its anchors and every link using them.
    pub fn remove_elo(&mut self, id: &EloId) -> Result<Elo, WorkspaceError> {
        self.elo(id)?;
        self.transact(|repo, base, _| {
            let anchors: Vec<AnchorId> = base.anchors_on(id).map(|a| a.id.clone()).collect();
            for a in anchors {
                base.remove_anchor(&a, true)?;
            }
            Ok(repo.remove_elo(id)?)
        })
    }

    pub fn add_anchor(&mut self, new: NewAnchor) -> Result<AnchorId, WorkspaceError> {
        self.transact(|repo, base, _| Ok(base.create_anchor(repo, new)?))
    }

    pub fn add_link(&mut self, new: NewLink) -> Result<LinkId, WorkspaceError> {
        self.transact(|_, base, _| Ok(base.create_link(new)?))
    }

    pub fn remove_link(&mut self, id: &LinkId) -> Result<(), WorkspaceError> {
        self.transact(|_, base, _| base.remove_link(id).map(|_| ()).map_err(Into::into))
    }

    pub fn remove_anchor(&mut self, id: &AnchorId, cascade: bool) -> Result<(), WorkspaceError> {
        if self.base.anchor(id).is_none() {
            return Err(WorkspaceError::NotFound(format!("anchor {id}")));
        }
        self.transact(|_, base, _| base.remove_anchor(id, cascade).map(|_| ()).map_err(Into::into))
    }

    pub fn add_context(&mut self, ctx: LinkContext) -> Result<(), WorkspaceError> {
        self.transact(|_, _, contexts| Ok(contexts.register(ctx)?))
    }

    pub fn remove_context(&mut self, id: &ContextId) -> Result<LinkContext, WorkspaceError> {
        self.transact(|_, _, contexts| {
            contexts
                .remove(id)
                .ok_or_else(|| WorkspaceError::NotFound(format!("context {id}")))
        })
    }

    /// Adds everything from `other`; any id already present is a conflict.
    pub fn merge(&mut self, other: Workspace) -> Result<(), WorkspaceError> {
        self.transact(|repo, base, contexts| {
            for elo in other.repo.elos() {
                if repo.contains(&elo.id) {
                    return Err(WorkspaceError::Integrity(vec![format!("ELO {} already exists", elo.id)]));
                }
                repo.put_elo(elo.clone())?;
            }
            for (parent, kids) in other.repo.edges() {
                for kid in kids {
                    repo.attach_child(parent, kid, usize::MAX)?;
                }
            }
            for kind in crate::store::RegistryKind::ALL {
                for entry in other.repo.registry(kind) {
                    repo.put_registry_entry(kind, entry.clone());
                }
            }
            for a in other.base.anchors() {
                if !base.insert_anchor_unchecked(a.clone()) {
                    return Err(WorkspaceError::Integrity(vec![format!("anchor {} already exists", a.id)]));
                }
            }
            for l in other.base.links() {
                if !base.insert_link_unchecked(l.clone()) {
                    return Err(WorkspaceError::Integrity(vec![format!("link {} already exists", l.id)]));
                }
            }
            for c in other.contexts.iter() {
                contexts.register(c.clone())?;
            }
            Ok(())
        })
    }

    /// Runs a query against the current graph.
    pub fn query(&self, text: &str) -> Result<BindingTable, WorkspaceError> {
        Ok(rdql::evaluate(&rdql::prepare(text)?, &self.graph))
    }

    pub fn context_set(&self, ids: impl IntoIterator<Item = ContextId>) -> Result<ContextSet, WorkspaceError> {
        Ok(ContextSet::from_ids(ids, &self.contexts)?)
    }

    pub fn links_for_document(&self, doc: &EloId, active: &ContextSet) -> Result<Vec<SelectedLink>, WorkspaceError> {
        self.elo(doc)?;
        Ok(context::links_for_document(doc, active, &self.contexts, &self.graph, &self.minter)?)
    }

    fn nav(&self, req: &PageRequest<'_>) -> Result<Nav, WorkspaceError> {
        let root = match req.root {
            Some(r) => {
                self.elo(r)?;
                r.clone()
            }
            None => {
                let mut found = None;
                for r in self.repo.roots() {
                    if self.repo.linearize(r)?.contains(req.elo) {
                        found = Some(r.clone());
                        break;
                    }
                }
                found.unwrap_or_else(|| req.elo.clone())
            }
        };
        let occurrence = match req.occurrence {
            Some(o) => o,
            None => render::first_occurrence(&self.repo, &root, req.elo)?.ok_or_else(|| {
                RenderError::NoOccurrence {
                    root: root.clone(),
                    occurrence: 0,
                }
            })?,
        };
        let path = self.repo.linearize(&root)?;
        if path.get(occurrence) != Some(req.elo) {
            return Err(RenderError::NoOccurrence { root, occurrence }.into());
        }
        Ok(render::nav_for(&self.repo, &root, occurrence)?)
    }

    /// The single rendering path shared by every front end.
    pub fn render_page(&self, req: &PageRequest<'_>) -> Result<PageView, WorkspaceError> {
        let elo = self.elo(req.elo)?;
        let nav = self.nav(req)?;
        let active = req.contexts.ids();
        let view = match req.mode {
            Mode::Slide => render::render_slide(elo, nav, active)?,
            Mode::Descriptive => {
                let links = self.links_for_document(req.elo, req.contexts)?;
                let env = LinkEnv {
                    base: &self.base,
                    contexts: &self.contexts,
                    minter: &self.minter,
                };
                render::render_descriptive(elo, &links, &env, nav, active)?
            }
        };
        Ok(view)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elo::ParagraphContent;
    use crate::linkbase::{NewArc, Title};
    use chrono::NaiveDate;

    fn id(s: &str) -> EloId {
        EloId::new(s).unwrap()
    }

    fn ws() -> Workspace {
        let mut ws = Workspace::default();
        for (name, body) in [
            ("hamster-text", "<paragraph><p>Hamsters having hay fever</p></paragraph>"),
            ("handbook", "<paragraph><p>Hay fever handbook</p></paragraph>"),
        ] {
            ws.put_elo(Elo::new(
                id(name),
                ParagraphContent {
                    title: name.into(),
                    body: body.into(),
                    ..Default::default()
                },
            ))
            .unwrap();
        }
        for (a, elo, sel) in [("hamster", "hamster-text", Some("/paragraph/p@0+8")), ("handbook", "handbook", None)] {
            ws.add_anchor(NewAnchor {
                id: Some(AnchorId::new(a).unwrap()),
                resource: elo.into(),
                selector: sel.map(String::from),
                ..Default::default()
            })
            .unwrap();
        }
        ws.add_link(NewLink {
            id: Some(LinkId::new("link1").unwrap()),
            arcs: vec![NewArc {
                from: AnchorId::new("hamster").unwrap(),
                to: AnchorId::new("handbook").unwrap(),
                arcrole: "mir:BackgroundInfo".into(),
                title: None,
            }],
            titles: vec![Title {
                lang: None,
                text: "For freshman".into(),
            }],
            creator: "Mr. X".into(),
            created: NaiveDate::from_ymd_opt(2003, 7, 18).unwrap(),
            path_space: "vet".into(),
        })
        .unwrap();
        ws.add_context(
            LinkContext::new(
                ContextId::new("bg").unwrap(),
                None,
                None,
                None,
                "SELECT * WHERE (?link, <rdf:predicate>, <mir:BackgroundInfo>) USING rdf FOR <http://www.w3.org/1999/02/22-rdf-syntax-ns#>, mir FOR <http://www.rz.fhtw-berlin.de/MIR#>",
            )
            .unwrap(),
        )
        .unwrap();
        ws
    }

    #[test]
    fn mutations_keep_graph_current() {
        let mut w = ws();
        let before = w.graph().len();
        assert!(before > 0);
        w.remove_link(&LinkId::new("link1").unwrap()).unwrap();
        assert!(w.graph().len() < before);
        assert!(w.query("SELECT ?l WHERE (?l, <http://www.w3.org/1999/02/22-rdf-syntax-ns#type>, <http://www.w3.org/1999/02/22-rdf-syntax-ns#Statement>)").unwrap().is_empty());
    }

    #[test]
    fn failed_mutation_rolls_back() {
        let mut w = ws();
        let snapshot = w.clone();
        // Shrinking the body breaks the hamster anchor's character range.
        let mut e = w.elo(&id("hamster-text")).unwrap().clone();
        e.paragraph.body = "<paragraph><p>Hi</p></paragraph>".into();
        let err = w.put_elo(e).unwrap_err();
        assert_eq!(err.kind(), ErrorKind::Conflict);
        assert_eq!(w, snapshot);
        assert_eq!(w.graph(), snapshot.graph());
    }

    #[test]
    fn cascade_delete() {
        let mut w = ws();
        w.remove_elo(&id("handbook")).unwrap();
        assert!(w.base.link(&LinkId::new("link1").unwrap()).is_none());
        assert!(w.base.anchor(&AnchorId::new("handbook").unwrap()).is_none());
        assert!(w.integrity_violations().is_empty());
        assert_eq!(w.remove_elo(&id("handbook")).unwrap_err().kind(), ErrorKind::NotFound);
    }

    #[test]
    fn page_follows_context_set() {
        let w = ws();
        let on = w.context_set([ContextId::new("bg").unwrap()]).unwrap();
        let off = ContextSet::new();
        let hamster = id("hamster-text");
        let req = |contexts| PageRequest {
            elo: &hamster,
            mode: Mode::Descriptive,
            contexts,
            root: None,
            occurrence: None,
        };
        let page = w.render_page(&req(&on)).unwrap();
        assert_eq!(page.html.matches("href=\"/elos/handbook\"").count(), 1);
        let page = w.render_page(&req(&off)).unwrap();
        assert_eq!(page.html.matches("href=").count(), 0);
        assert_eq!(
            w.context_set([ContextId::new("nope").unwrap()]).unwrap_err().kind(),
            ErrorKind::Invalid
        );
    }

    #[test]
    fn dangling_link_is_conflict() {
        let mut w = ws();
        let err = w
            .add_link(NewLink {
                id: None,
                arcs: vec![NewArc {
                    from: AnchorId::new("ghost").unwrap(),
                    to: AnchorId::new("handbook").unwrap(),
                    arcrole: "mir:BackgroundInfo".into(),
                    title: None,
                }],
                titles: vec![],
                creator: "x".into(),
                created: NaiveDate::from_ymd_opt(2003, 1, 1).unwrap(),
                path_space: "vet".into(),
            })
            .unwrap_err();
        assert_eq!(err.kind(), ErrorKind::Conflict);
        assert!(err.to_string().contains("ghost"));
    }
}
