//! Link contexts: authored RDQL queries that pick links out of the statement
//! graph, and the per-session set of active contexts.
//!
//! Everything here reads a [`Graph`] snapshot only; selection never touches
//! content or the link base.

use std::collections::{BTreeMap, BTreeSet};

use roxmltree::Node;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{Graph, Pattern, Term};
use crate::ids::{ContextId, EloId};
use crate::ns::{self, IriMinter};
use crate::rdql::{self, ExpandedQuery, QueryError};
use crate::xml;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ContextError {
    #[error("malformed context definition: {0}")]
    Format(String),
    #[error("context query: {0}")]
    Query(#[from] QueryError),
    #[error("unknown context {0}")]
    UnknownContext(ContextId),
    #[error("context {0} is already registered")]
    Duplicate(ContextId),
    #[error("ELO {0} not found")]
    NotFound(EloId),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct LangText {
    pub lang: Option<String>,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinkContext {
    pub id: ContextId,
    pub creator: Option<String>,
    pub title: Option<LangText>,
    pub description: Option<LangText>,
    pub query_text: String,
    #[serde(skip)]
    pub query: ExpandedQuery,
}

impl LinkContext {
    /// Builds a context, validating the query. Creator, title and description
    /// are whitespace-normalized, as they are when read from a file.
    pub fn new(
        id: ContextId,
        creator: Option<String>,
        title: Option<LangText>,
        description: Option<LangText>,
        query_text: &str,
    ) -> Result<Self, ContextError> {
        let query_text = query_text.trim().to_string();
        let query = rdql::prepare(&query_text)?;
        let norm = |t: LangText| LangText {
            lang: t.lang,
            text: xml::normalize_ws(&t.text),
        };
        Ok(Self {
            id,
            creator: creator.map(|c| xml::normalize_ws(&c)),
            title: title.map(norm),
            description: description.map(norm),
            query_text,
            query,
        })
    }

    pub fn title_text(&self) -> Option<&str> {
        self.title.as_ref().map(|t| t.text.as_str())
    }

    /// RDF/XML definition document, readable by [`parse_context`].
    pub fn to_xml(&self) -> String {
        let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        out.push_str(&format!(
            "<rdf:RDF xmlns:rdf=\"{}\"\n         xmlns:mir=\"{}\"\n         xmlns:dc=\"{}\">\n",
            ns::RDF,
            ns::MIR,
            ns::DC
        ));
        out.push_str(&format!("  <rdf:Description rdf:about=\"{}\">\n", self.id));
        if let Some(c) = &self.creator {
            out.push_str(&format!("    <dc:Creator>{}</dc:Creator>\n", xml::escape(c)));
        }
        for (tag, value) in [("Title", &self.title), ("Description", &self.description)] {
            if let Some(v) = value {
                let lang = v
                    .lang
                    .as_ref()
                    .map(|l| format!(" xml:lang=\"{}\"", xml::escape(l)))
                    .unwrap_or_default();
                out.push_str(&format!("    <dc:{tag}{lang}>{}</dc:{tag}>\n", xml::escape(&v.text)));
            }
        }
        // A literal "]]>" has to be split across two CDATA sections.
        let cdata = self.query_text.replace("]]>", "]]]]><![CDATA[>");
        out.push_str(&format!(
            "    <mir:link-context>\n<![CDATA[\n{cdata}\n]]>\n    </mir:link-context>\n"
        ));
        out.push_str("  </rdf:Description>\n</rdf:RDF>\n");
        out
    }
}

/// The MIR namespace is accepted with or without its trailing `#`.
fn in_ns(node: Node<'_, '_>, ns_uri: &str, local: &str) -> bool {
    let tag = node.tag_name();
    let ns_ok = match tag.namespace() {
        Some(n) => n == ns_uri || n.trim_end_matches('#') == ns_uri.trim_end_matches('#'),
        None => false,
    };
    node.is_element() && ns_ok && tag.name().eq_ignore_ascii_case(local)
}

fn lang_text(node: Node<'_, '_>) -> LangText {
    LangText {
        lang: node
            .attribute(("http://www.w3.org/XML/1998/namespace", "lang"))
            .map(str::to_string),
        text: xml::text_content(node),
    }
}

/// Context id from `rdf:about`: a slug as is, or the last segment of an IRI.
fn context_id(about: &str) -> Result<ContextId, ContextError> {
    let tail = about.rsplit(['#', '/']).next().unwrap_or(about);
    ContextId::new(tail).map_err(|_| ContextError::Format(format!("rdf:about {about:?} is not a usable context id")))
}

/// Reads a context definition: an `rdf:RDF` document holding one
/// `rdf:Description` with `dc:Creator`, `dc:Title`, `dc:Description` and the
/// query in `mir:link-context`.
pub fn parse_context(text: &str) -> Result<LinkContext, ContextError> {
    let doc = xml::parse(text).map_err(|e| ContextError::Format(e.to_string()))?;
    let root = doc.root_element();
    let desc = root
        .descendants()
        .find(|n| in_ns(*n, ns::RDF, "Description"))
        .ok_or_else(|| ContextError::Format("no rdf:Description element".into()))?;
    let about = desc
        .attribute((ns::RDF, "about"))
        .ok_or_else(|| ContextError::Format("rdf:Description has no rdf:about".into()))?;
    let id = context_id(about)?;

    let child = |ns_uri: &str, local: &str| desc.children().find(|n| in_ns(*n, ns_uri, local));
    let query_node = child(ns::MIR, "link-context")
        .ok_or_else(|| ContextError::Format("no mir:link-context element".into()))?;
    LinkContext::new(
        id,
        child(ns::DC, "Creator").map(|n| xml::text_content(n)),
        child(ns::DC, "Title").map(lang_text),
        child(ns::DC, "Description").map(lang_text),
        &xml::text_content(query_node),
    )
}

/// Registered, validated contexts by id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ContextRegistry {
    contexts: BTreeMap<ContextId, LinkContext>,
}

impl ContextRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, ctx: LinkContext) -> Result<(), ContextError> {
        if self.contexts.contains_key(&ctx.id) {
            return Err(ContextError::Duplicate(ctx.id));
        }
        self.contexts.insert(ctx.id.clone(), ctx);
        Ok(())
    }

    pub fn get(&self, id: &ContextId) -> Option<&LinkContext> {
        self.contexts.get(id)
    }

    pub fn contains(&self, id: &ContextId) -> bool {
        self.contexts.contains_key(id)
    }

    pub fn iter(&self) -> impl Iterator<Item = &LinkContext> {
        self.contexts.values()
    }

    pub fn len(&self) -> usize {
        self.contexts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.contexts.is_empty()
    }

    pub fn remove(&mut self, id: &ContextId) -> Option<LinkContext> {
        self.contexts.remove(id)
    }
}

/// Ordered, duplicate-free set of active context ids.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct ContextSet(Vec<ContextId>);

impl ContextSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a set from an ordered list, rejecting unregistered ids.
    /// Repeated ids keep their first position.
    pub fn from_ids(ids: impl IntoIterator<Item = ContextId>, registry: &ContextRegistry) -> Result<Self, ContextError> {
        let mut set = Self::new();
        for id in ids {
            set.activate(id, registry)?;
        }
        Ok(set)
    }

    /// Idempotent; appends at the end when newly active.
    pub fn activate(&mut self, id: ContextId, registry: &ContextRegistry) -> Result<(), ContextError> {
        if !registry.contains(&id) {
            return Err(ContextError::UnknownContext(id));
        }
        if !self.0.contains(&id) {
            self.0.push(id);
        }
        Ok(())
    }

    pub fn deactivate(&mut self, id: &ContextId) {
        self.0.retain(|c| c != id);
    }

    pub fn ids(&self) -> &[ContextId] {
        &self.0
    }

    pub fn contains(&self, id: &ContextId) -> bool {
        self.0.contains(id)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// One link (or link arc) picked by a context, with its reified relation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct SelectedLink {
    pub link: String,
    /// Target anchor.
    pub subject: String,
    /// Arcrole.
    pub predicate: String,
    /// Source anchor.
    pub object: String,
    pub title: Option<String>,
    pub via_context: ContextId,
}

fn first_iri(graph: &Graph, s: &str, p: &str) -> Option<String> {
    graph.objects(s, p).find_map(|t| t.as_iri().map(str::to_string))
}

/// Plain title if there is one, else the first (language-tagged) title.
fn title_of(graph: &Graph, node: &str) -> Option<String> {
    let titles: Vec<&Term> = graph.objects(node, &ns::dc("title")).collect();
    let pick = titles
        .iter()
        .find(|t| matches!(t, Term::Literal { lang: None, .. }))
        .or_else(|| titles.first());
    match pick {
        Some(Term::Literal { text, .. }) => Some(text.clone()),
        _ => None,
    }
}

/// Evaluates the context query and keeps every bound term that is a
/// reified statement (`rdf:type rdf:Statement`). An arc node without a title
/// of its own inherits the title of the link it belongs to.
pub fn select_links(ctx: &LinkContext, graph: &Graph) -> Vec<SelectedLink> {
    let table = rdql::evaluate(&ctx.query, graph);
    let rdf_type = Term::iri(ns::rdf("type"));
    let statement = Term::iri(ns::rdf("Statement"));
    let nodes: BTreeSet<&str> = table
        .rows
        .iter()
        .flatten()
        .filter_map(Term::as_iri)
        .collect();

    let mut out = Vec::new();
    for node in nodes {
        let typed = Pattern::new(Some(Term::iri(node)), Some(rdf_type.clone()), Some(statement.clone()));
        if graph.match_pattern(&typed).is_empty() {
            continue;
        }
        let (Some(subject), Some(predicate), Some(object)) = (
            first_iri(graph, node, &ns::rdf("subject")),
            first_iri(graph, node, &ns::rdf("predicate")),
            first_iri(graph, node, &ns::rdf("object")),
        ) else {
            continue;
        };
        let title = title_of(graph, node).or_else(|| {
            let parent = Pattern::new(None, Some(Term::iri(ns::mir("arc"))), Some(Term::iri(node)));
            graph
                .match_pattern(&parent)
                .first()
                .and_then(|t| title_of(graph, t.subject()))
        });
        out.push(SelectedLink {
            link: node.to_string(),
            subject,
            predicate,
            object,
            title,
            via_context: ctx.id.clone(),
        });
    }
    out
}

/// Links of the active contexts whose source anchor lies on `doc`, in
/// activation order and then by link IRI.
pub fn links_for_document(
    doc: &EloId,
    active: &ContextSet,
    registry: &ContextRegistry,
    graph: &Graph,
    minter: &IriMinter,
) -> Result<Vec<SelectedLink>, ContextError> {
    let doc_iri = minter.elo(doc);
    let is_elo = Pattern::new(
        Some(Term::iri(&doc_iri)),
        Some(Term::iri(ns::rdf("type"))),
        Some(Term::iri(ns::mir("ELO"))),
    );
    if graph.match_pattern(&is_elo).is_empty() {
        return Err(ContextError::NotFound(doc.clone()));
    }
    let anchor_of = ns::mir("anchorOf");
    let doc_term = Term::iri(&doc_iri);
    let mut out = Vec::new();
    for id in active.ids() {
        let ctx = registry.get(id).ok_or_else(|| ContextError::UnknownContext(id.clone()))?;
        out.extend(
            select_links(ctx, graph)
                .into_iter()
                .filter(|s| graph.objects(&s.object, &anchor_of).any(|t| *t == doc_term)),
        );
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Triple;

    pub(crate) const BG_CONTEXT_DOC: &str = r#"<?xml version="1.0" encoding="UTF-8"?>
<rdf:RDF xmlns:rdf="http://www.w3.org/1999/02/22-rdf-syntax-ns#"
xmlns:mir="http://www.rz.fhtw-berlin.de/MIR"
xmlns:dc="http://purl.org/dc/elements/1.1/">
<rdf:Description rdf:about="link-context1">
<dc:Creator>Mr. X</dc:Creator>
<dc:Title xml:lang="en">Background Information</dc:Title>
<dc:Description xml:lang="en">Some continuative information
on.</dc:Description>
<mir:link-context>
<![CDATA[
SELECT * WHERE (?link, <rdf:predicate>, <mir:BackgroundInfo>) USING
rdf FOR <http://www.w3.org/1999/02/22-rdf-syntax-ns#>,
mir FOR <http://www.rz.fhtw-berlin.de/MIR#>
]]>
</mir:link-context>
</rdf:Description>
</rdf:RDF>
"#;

    fn hamster_graph() -> Graph {
        let l = ns::mir("link1");
        let iri = |s: &str| Term::iri(ns::mir(s));
        [
            Triple::new(ns::mir("elo-hamster-text"), ns::rdf("type"), iri("ELO")),
            Triple::new(ns::mir("elo-handbook"), ns::rdf("type"), iri("ELO")),
            Triple::new(ns::mir("anchor-hamster"), ns::mir("anchorOf"), iri("elo-hamster-text")),
            Triple::new(ns::mir("anchor-handbook"), ns::mir("anchorOf"), iri("elo-handbook")),
            Triple::new(&l, ns::rdf("type"), Term::iri(ns::rdf("Statement"))),
            Triple::new(&l, ns::rdf("subject"), iri("anchor-handbook")),
            Triple::new(&l, ns::rdf("predicate"), iri("BackgroundInfo")),
            Triple::new(&l, ns::rdf("object"), iri("anchor-hamster")),
            Triple::new(&l, ns::dc("title"), Term::literal("For freshman")),
        ]
        .into_iter()
        .collect()
    }

    fn registry() -> ContextRegistry {
        let mut r = ContextRegistry::new();
        r.register(parse_context(BG_CONTEXT_DOC).unwrap()).unwrap();
        r
    }

    fn cid(s: &str) -> ContextId {
        ContextId::new(s).unwrap()
    }

    #[test]
    fn parses_definition() {
        let c = parse_context(BG_CONTEXT_DOC).unwrap();
        assert_eq!(c.id.as_str(), "link-context1");
        assert_eq!(c.creator.as_deref(), Some("Mr. X"));
        assert_eq!(
            c.title,
            Some(LangText {
                lang: Some("en".into()),
                text: "Background Information".into()
            })
        );
        assert_eq!(c.description.unwrap().text, "Some continuative information on.");
        assert_eq!(c.query.patterns.len(), 1);
        assert!(c.query_text.starts_with("SELECT"));
    }

    #[test]
    fn format_and_query_errors() {
        let missing = BG_CONTEXT_DOC.replace("mir:link-context", "mir:other");
        assert!(matches!(parse_context(&missing), Err(ContextError::Format(_))));
        let no_about = BG_CONTEXT_DOC.replace("rdf:about", "rdf:ID");
        assert!(matches!(parse_context(&no_about), Err(ContextError::Format(_))));
        // dc:Description must not be taken for rdf:Description
        let dc_only = BG_CONTEXT_DOC.replace("rdf:Description", "dc:Description");
        assert!(matches!(parse_context(&dc_only), Err(ContextError::Format(_))));
        let start = BG_CONTEXT_DOC.find("SELECT").unwrap();
        let end = BG_CONTEXT_DOC.find("]]>").unwrap();
        let bad = format!("{}SELECT WHERE\n{}", &BG_CONTEXT_DOC[..start], &BG_CONTEXT_DOC[end..]);
        assert!(matches!(parse_context(&bad), Err(ContextError::Query(_))));
        assert!(matches!(parse_context("<a"), Err(ContextError::Format(_))));
    }

    #[test]
    fn xml_round_trip() {
        let c = parse_context(BG_CONTEXT_DOC).unwrap();
        assert_eq!(parse_context(&c.to_xml()).unwrap(), c);
        let tricky = LinkContext::new(
            cid("t"),
            Some("A & <B>".into()),
            None,
            None,
            "SELECT ?x WHERE (?x, <http://x/p>, \"]]>\")",
        )
        .unwrap();
        assert_eq!(parse_context(&tricky.to_xml()).unwrap(), tricky);
    }

    #[test]
    fn selects_reified_link() {
        let r = registry();
        let got = select_links(r.get(&cid("link-context1")).unwrap(), &hamster_graph());
        assert_eq!(
            got,
            vec![SelectedLink {
                link: ns::mir("link1"),
                subject: ns::mir("anchor-handbook"),
                predicate: ns::mir("BackgroundInfo"),
                object: ns::mir("anchor-hamster"),
                title: Some("For freshman".into()),
                via_context: cid("link-context1"),
            }]
        );
    }

    #[test]
    fn statement_gate_excludes_decoys() {
        let mut g = hamster_graph();
        g.insert(Triple::new(
            ns::mir("elo-hamster-text"),
            ns::rdf("predicate"),
            Term::iri(ns::mir("BackgroundInfo")),
        ));
        let r = registry();
        let ctx = r.get(&cid("link-context1")).unwrap();
        assert_eq!(rdql::evaluate(&ctx.query, &g).rows.len(), 2);
        assert_eq!(select_links(ctx, &g).len(), 1);
    }

    #[test]
    fn document_filter_uses_source_anchor() {
        let r = registry();
        let g = hamster_graph();
        let m = IriMinter::default();
        let mut set = ContextSet::new();
        let hamster = EloId::new("hamster-text").unwrap();
        assert!(links_for_document(&hamster, &set, &r, &g, &m).unwrap().is_empty());
        set.activate(cid("link-context1"), &r).unwrap();
        assert_eq!(links_for_document(&hamster, &set, &r, &g, &m).unwrap().len(), 1);
        let handbook = EloId::new("handbook").unwrap();
        assert!(links_for_document(&handbook, &set, &r, &g, &m).unwrap().is_empty());
        let nope = EloId::new("nope").unwrap();
        assert_eq!(
            links_for_document(&nope, &set, &r, &g, &m),
            Err(ContextError::NotFound(nope))
        );
    }

    #[test]
    fn context_set_contract() {
        let mut r = registry();
        let other = LinkContext::new(cid("b"), None, None, None, "SELECT * WHERE (?s, ?p, ?o)").unwrap();
        r.register(other.clone()).unwrap();
        assert_eq!(r.register(other), Err(ContextError::Duplicate(cid("b"))));

        let mut s = ContextSet::new();
        s.activate(cid("link-context1"), &r).unwrap();
        s.activate(cid("link-context1"), &r).unwrap();
        assert_eq!(s.ids().len(), 1);
        s.activate(cid("b"), &r).unwrap();
        assert_eq!(s.ids(), &[cid("link-context1"), cid("b")]);
        let before = s.clone();
        s.deactivate(&cid("zzz"));
        assert_eq!(s, before);
        assert_eq!(s.activate(cid("zzz"), &r), Err(ContextError::UnknownContext(cid("zzz"))));
    }

    #[test]
    fn arc_nodes_inherit_link_title() {
        let l = ns::mir("link2");
        let node = format!("{l}/arc-1");
        let g: Graph = [
            Triple::new(&l, ns::mir("arc"), Term::iri(&node)),
            Triple::new(&l, ns::dc("title"), Term::lang_literal("Hintergrund", "de")),
            Triple::new(&node, ns::rdf("type"), Term::iri(ns::rdf("Statement"))),
            Triple::new(&node, ns::rdf("subject"), Term::iri(ns::mir("anchor-b"))),
            Triple::new(&node, ns::rdf("predicate"), Term::iri(ns::mir("BackgroundInfo"))),
            Triple::new(&node, ns::rdf("object"), Term::iri(ns::mir("anchor-a"))),
        ]
        .into_iter()
        .collect();
        let r = registry();
        let got = select_links(r.get(&cid("link-context1")).unwrap(), &g);
        assert_eq!(got.len(), 1);
        assert_eq!(got[0].link, node);
        assert_eq!(got[0].title.as_deref(), Some("Hintergrund"));
    }
}
