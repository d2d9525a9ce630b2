//! HTML views of ELOs, decorated with the links selected by active contexts.
//!
//! Pages are XHTML-compatible HTML5. Stable class names: `elo-body`,
//! `elo-anchor-link`, `elo-related`, `elo-nav`, `elo-badge`. Hyperlinks to
//! other ELOs point at `/elos/{id}`; navigation controls carry their target in
//! `data-elo` instead of `href`, so the hrefs of a page are exactly its
//! decorated links.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::str::FromStr;

use roxmltree::{Node, NodeId};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::context::{ContextRegistry, SelectedLink};
use crate::elo::{derive_standard_slide, Elo, EloError};
use crate::ids::{ContextId, EloId};
use crate::linkbase::{LinkBase, Resource};
use crate::ns::{self, IriMinter};
use crate::store::{Repository, StoreError};
use crate::xml;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RenderError {
    #[error("anchor {anchor} no longer resolves: {reason}")]
    Stale { anchor: String, reason: String },
    #[error("unknown anchor {0}")]
    UnknownAnchor(String),
    #[error("anchor {anchor} does not lie on ELO {elo}")]
    ForeignAnchor { anchor: String, elo: EloId },
    #[error("occurrence {occurrence} is outside the access path of {root}")]
    NoOccurrence { root: EloId, occurrence: usize },
    #[error(transparent)]
    Elo(#[from] EloError),
    #[error(transparent)]
    Store(#[from] StoreError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Descriptive,
    Slide,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "descriptive" => Ok(Mode::Descriptive),
            "slide" => Ok(Mode::Slide),
            other => Err(format!("unknown mode {other:?} (descriptive|slide)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct Nav {
    pub prev: Option<EloId>,
    pub next: Option<EloId>,
    pub up: Option<EloId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct Badges {
    pub difficulty: Option<String>,
    #[serde(rename = "semanticDensity")]
    pub semantic_density: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PageView {
    pub elo: EloId,
    pub mode: Mode,
    pub html: String,
    pub nav: Nav,
    pub active_contexts: Vec<ContextId>,
    pub badges: Badges,
}

/// Lookups the descriptive renderer needs to turn selected links into markup.
#[derive(Debug, Clone, Copy)]
pub struct LinkEnv<'a> {
    pub base: &'a LinkBase,
    pub contexts: &'a ContextRegistry,
    pub minter: &'a IriMinter,
}

/// Neighbours of the `occurrence`-th position in the access path of `root`.
pub fn nav_for(repo: &Repository, root: &EloId, occurrence: usize) -> Result<Nav, RenderError> {
    let view = repo.tree_view(root, None)?;
    let flat = view.flatten();
    let node = flat.get(occurrence).ok_or_else(|| RenderError::NoOccurrence {
        root: root.clone(),
        occurrence,
    })?;
    let up = node.path.split_last().and_then(|(_, parent)| {
        flat.iter()
            .find(|n| n.path == parent)
            .map(|n| n.id.clone())
    });
    Ok(Nav {
        prev: occurrence.checked_sub(1).map(|i| flat[i].id.clone()),
        next: flat.get(occurrence + 1).map(|n| n.id.clone()),
        up,
    })
}

/// Position of the first occurrence of `elo` in the access path of `root`.
pub fn first_occurrence(repo: &Repository, root: &EloId, elo: &EloId) -> Result<Option<usize>, RenderError> {
    Ok(repo.linearize(root)?.iter().position(|id| id == elo))
}

pub(crate) fn escape_html(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            c => out.push(c),
        }
    }
    out
}

/// A decorated hyperlink over characters `start..end` of the body text.
#[derive(Debug)]
struct Span {
    start: usize,
    end: usize,
    link: String,
    open_tag: String,
}

/// One hyperlink per link IRI; contexts that selected the same link share it.
struct Decoration {
    link: String,
    source: String,
    href: String,
    title: Option<String>,
    label: String,
}

fn target_href(target: &Resource) -> String {
    match target {
        Resource::Elo(id) => format!("/elos/{id}"),
        Resource::External(iri) => iri.clone(),
    }
}

fn decorations(links: &[SelectedLink], env: &LinkEnv<'_>) -> Result<Vec<Decoration>, RenderError> {
    let mut grouped: BTreeMap<&str, Vec<&SelectedLink>> = BTreeMap::new();
    for s in links {
        grouped.entry(s.link.as_str()).or_default().push(s);
    }
    let mut out = Vec::new();
    for (link, picks) in grouped {
        let first = picks[0];
        let target_id = env
            .minter
            .anchor_id(&first.subject)
            .ok_or_else(|| RenderError::UnknownAnchor(first.subject.clone()))?;
        let target = env
            .base
            .anchor(&target_id)
            .ok_or_else(|| RenderError::UnknownAnchor(first.subject.clone()))?;
        let mut ctx_titles: Vec<String> = Vec::new();
        for p in &picks {
            let t = env
                .contexts
                .get(&p.via_context)
                .and_then(|c| c.title_text())
                .map(str::to_string);
            if let Some(t) = t {
                if !ctx_titles.contains(&t) {
                    ctx_titles.push(t);
                }
            }
        }
        let ctx_part = (!ctx_titles.is_empty()).then(|| ctx_titles.join(", "));
        let title = match (first.title.clone(), ctx_part) {
            (Some(l), Some(c)) => Some(format!("{l} \u{2014} {c}")),
            (l, c) => l.or(c),
        };
        let href = target_href(&target.resource);
        let label = first
            .title
            .clone()
            .or_else(|| target.title.clone())
            .unwrap_or_else(|| href.clone());
        out.push(Decoration {
            link: link.to_string(),
            source: first.object.clone(),
            href,
            title,
            label,
        });
    }
    Ok(out)
}

fn anchor_open_tag(d: &Decoration) -> String {
    let mut tag = format!(
        "<a class=\"elo-anchor-link\" href=\"{}\" data-link=\"{}\"",
        escape_html(&d.href),
        escape_html(&ns::compact(&d.link))
    );
    if let Some(t) = &d.title {
        let _ = write!(tag, " title=\"{}\"", escape_html(t));
    }
    tag.push('>');
    tag
}

fn html_name(node: Node<'_, '_>) -> (&'static str, Option<String>) {
    let name = node.tag_name().name();
    let mapped = match name {
        "p" | "para" => "p",
        "emphasis" | "em" | "i" => "em",
        "strong" | "b" => "strong",
        "code" => "code",
        "list" | "ul" => "ul",
        "ol" => "ol",
        "item" | "li" => "li",
        "title" | "heading" => "h2",
        "section" => "section",
        "br" => "br",
        _ if node.children().any(|c| c.is_element()) => "div",
        _ => "span",
    };
    let class = (!matches!(mapped, "br") && mapped != name).then(|| format!("elo-{name}"));
    (mapped, class)
}

struct BodyWriter<'s> {
    out: String,
    spans: &'s [Span],
    /// Open spans as (span index, element depth they were opened at).
    open: Vec<(usize, usize)>,
    pos: usize,
}

impl BodyWriter<'_> {
    fn close_to(&mut self, len: usize) {
        while self.open.len() > len {
            self.open.pop();
            self.out.push_str("</a>");
        }
    }

    /// Opens `wanted` (span indexes, sorted) on top of the longest prefix of
    /// the open stack that is still wanted.
    fn sync(&mut self, wanted: &[usize], depth: usize) {
        let keep = self
            .open
            .iter()
            .take_while(|(i, _)| wanted.contains(i))
            .count();
        self.close_to(keep);
        for &i in wanted {
            if !self.open.iter().any(|(j, _)| *j == i) {
                self.out.push_str(&self.spans[i].open_tag);
                self.open.push((i, depth));
            }
        }
    }

    fn covering(&self, from: usize, to: usize) -> Vec<usize> {
        (0..self.spans.len())
            .filter(|&i| self.spans[i].start <= from && to <= self.spans[i].end && from < to)
            .collect()
    }

    fn text(&mut self, text: &str, depth: usize) {
        let start = self.pos;
        let len = text.chars().count();
        let end = start + len;
        let mut cuts: Vec<usize> = vec![start, end];
        for s in self.spans {
            cuts.extend([s.start, s.end].into_iter().filter(|&c| c > start && c < end));
        }
        cuts.sort_unstable();
        cuts.dedup();
        let byte_at = |char_idx: usize| {
            text.char_indices()
                .nth(char_idx - start)
                .map_or(text.len(), |(b, _)| b)
        };
        for w in cuts.windows(2) {
            let wanted = self.covering(w[0], w[1]);
            self.sync(&wanted, depth);
            self.out.push_str(&escape_html(&text[byte_at(w[0])..byte_at(w[1])]));
        }
        self.pos = end;
    }

    fn element(&mut self, node: Node<'_, '_>, depth: usize, ranges: &HashMap<NodeId, (usize, usize)>) {
        let (cs, ce) = ranges[&node.id()];
        // Spans not covering this element must not stay open across its tags.
        let keep = self
            .open
            .iter()
            .take_while(|(i, _)| self.spans[*i].start <= cs && ce <= self.spans[*i].end)
            .count();
        self.close_to(keep);
        let (name, class) = html_name(node);
        if name == "br" {
            self.out.push_str("<br/>");
            return;
        }
        match class {
            Some(c) => {
                let _ = write!(self.out, "<{name} class=\"{c}\">");
            }
            None => {
                let _ = write!(self.out, "<{name}>");
            }
        }
        let wanted: Vec<usize> = self
            .open
            .iter()
            .map(|(i, _)| *i)
            .chain(self.covering(cs, ce).into_iter().filter(|i| !self.open.iter().any(|(j, _)| j == i)))
            .collect();
        self.sync(&wanted, depth);
        self.children(node, depth, ranges);
        let inner = self.open.iter().take_while(|(_, d)| *d < depth).count();
        self.close_to(inner);
        let _ = write!(self.out, "</{name}>");
    }

    fn children(&mut self, node: Node<'_, '_>, depth: usize, ranges: &HashMap<NodeId, (usize, usize)>) {
        for child in node.children() {
            if child.is_element() {
                self.element(child, depth + 1, ranges);
            } else if let Some(t) = child.text().filter(|_| child.is_text()) {
                self.text(t, depth);
            }
        }
    }
}

/// Character range of every element's text content, in body coordinates.
fn element_ranges(root: Node<'_, '_>) -> HashMap<NodeId, (usize, usize)> {
    fn walk(n: Node<'_, '_>, pos: &mut usize, out: &mut HashMap<NodeId, (usize, usize)>) {
        let start = *pos;
        for c in n.children() {
            if c.is_element() {
                walk(c, pos, out);
            } else if c.is_text() {
                *pos += c.text().unwrap_or_default().chars().count();
            }
        }
        out.insert(n.id(), (start, *pos));
    }
    let mut out = HashMap::new();
    walk(root, &mut 0, &mut out);
    out
}

/// Converts a content body to HTML, wrapping `spans` (sorted by start, then
/// longest first, then link IRI) as nested hyperlinks. Crossing spans are
/// split into several elements with the same target.
fn body_html(body: &str, spans: &[Span]) -> Result<String, String> {
    let wrapped = xml::wrap_fragment(body);
    let doc = xml::parse(&wrapped).map_err(|e| e.to_string())?;
    let root = doc.root_element();
    let ranges = element_ranges(root);
    let mut w = BodyWriter {
        out: String::new(),
        spans,
        open: Vec::new(),
        pos: 0,
    };
    w.children(root, 0, &ranges);
    w.close_to(0);
    Ok(w.out)
}

fn badges(elo: &Elo) -> Badges {
    Badges {
        difficulty: elo.metadata.difficulty.clone(),
        semantic_density: elo.metadata.semantic_density.clone(),
    }
}

fn page_title(elo: &Elo) -> &str {
    elo.metadata.title.as_deref().unwrap_or(&elo.paragraph.title)
}

fn document(elo: &Elo, mode: Mode, main: &str, nav: &Nav, badges: &Badges) -> String {
    let title = escape_html(page_title(elo));
    let mode_name = match mode {
        Mode::Descriptive => "descriptive",
        Mode::Slide => "slide",
    };
    let mut html = String::new();
    let _ = write!(
        html,
        "<!DOCTYPE html>\n<html xmlns=\"http://www.w3.org/1999/xhtml\">\n<head><meta charset=\"utf-8\"/><title>{title}</title></head>\n<body>\n<article class=\"elo-page elo-{mode_name}\" data-elo=\"{}\">\n<h1>{title}</h1>\n",
        elo.id
    );
    if badges.difficulty.is_some() || badges.semantic_density.is_some() {
        html.push_str("<div class=\"elo-badges\">");
        for (field, value) in [("difficulty", &badges.difficulty), ("semanticDensity", &badges.semantic_density)] {
            if let Some(v) = value {
                let _ = write!(
                    html,
                    "<span class=\"elo-badge\" data-field=\"{field}\">{field}: {}</span>",
                    escape_html(v)
                );
            }
        }
        html.push_str("</div>\n");
    }
    html.push_str(main);
    html.push_str("<nav class=\"elo-nav\">");
    for (rel, target) in [("up", &nav.up), ("prev", &nav.prev), ("next", &nav.next)] {
        match target {
            Some(id) => {
                let _ = write!(
                    html,
                    "<button type=\"button\" class=\"elo-nav-{rel}\" data-elo=\"{id}\">{rel}</button>"
                );
            }
            None => {
                let _ = write!(
                    html,
                    "<button type=\"button\" class=\"elo-nav-{rel}\" disabled=\"disabled\">{rel}</button>"
                );
            }
        }
    }
    html.push_str("</nav>\n</article>\n</body>\n</html>\n");
    html
}

/// Descriptive page of `elo` with every selected link rendered at its
/// source anchor. Links from whole-document anchors (and anchors on elements
/// without text) are listed under "Related" after the body.
pub fn render_descriptive(
    elo: &Elo,
    selected: &[SelectedLink],
    env: &LinkEnv<'_>,
    nav: Nav,
    active_contexts: &[ContextId],
) -> Result<PageView, RenderError> {
    let wrapped = xml::wrap_fragment(&elo.paragraph.body);
    let doc = xml::parse(&wrapped).map_err(|e| RenderError::Stale {
        anchor: "*".into(),
        reason: e.to_string(),
    })?;
    let root = doc.root_element();
    let ranges = element_ranges(root);

    let mut spans = Vec::new();
    let mut related = Vec::new();
    for d in decorations(selected, env)? {
        let anchor_id = env
            .minter
            .anchor_id(&d.source)
            .ok_or_else(|| RenderError::UnknownAnchor(d.source.clone()))?;
        let anchor = env
            .base
            .anchor(&anchor_id)
            .ok_or_else(|| RenderError::UnknownAnchor(d.source.clone()))?;
        if anchor.resource.elo() != Some(&elo.id) {
            return Err(RenderError::ForeignAnchor {
                anchor: anchor_id.to_string(),
                elo: elo.id.clone(),
            });
        }
        let Some(selector) = &anchor.selector else {
            related.push(d);
            continue;
        };
        let located = selector.locate(root).map_err(|e| RenderError::Stale {
            anchor: anchor_id.to_string(),
            reason: e.to_string(),
        })?;
        let (el_start, el_end) = ranges[&located.node.id()];
        let (start, end) = match located.range {
            Some((a, b)) => (el_start + a, el_start + b),
            None => (el_start, el_end),
        };
        if start == end {
            related.push(d);
            continue;
        }
        spans.push(Span {
            start,
            end,
            open_tag: anchor_open_tag(&d),
            link: d.link,
        });
    }
    spans.sort_by(|a, b| {
        a.start
            .cmp(&b.start)
            .then(b.end.cmp(&a.end))
            .then_with(|| a.link.cmp(&b.link))
    });

    let body = body_html(&elo.paragraph.body, &spans).map_err(|reason| RenderError::Stale {
        anchor: "*".into(),
        reason,
    })?;
    let mut main = format!("<div class=\"elo-body\">{body}</div>\n");
    if !related.is_empty() {
        main.push_str("<section class=\"elo-related\"><h2>Related</h2><ul>");
        for d in &related {
            let _ = write!(main, "<li>{}{}</a></li>", anchor_open_tag(d), escape_html(&d.label));
        }
        main.push_str("</ul></section>\n");
    }
    let badges = badges(elo);
    Ok(PageView {
        elo: elo.id.clone(),
        mode: Mode::Descriptive,
        html: document(elo, Mode::Descriptive, &main, &nav, &badges),
        nav,
        active_contexts: active_contexts.to_vec(),
        badges,
    })
}

/// Slide view: the authored slide, or one derived from titles and headwords.
pub fn render_slide(elo: &Elo, nav: Nav, active_contexts: &[ContextId]) -> Result<PageView, RenderError> {
    let slide = match &elo.slide {
        Some(s) => s.clone(),
        None => derive_standard_slide(&elo.paragraph)?,
    };
    let mut main = format!("<div class=\"elo-slide-content\">\n<h2>{}</h2>\n", escape_html(&slide.title));
    if !slide.bullets.is_empty() {
        main.push_str("<ul class=\"elo-bullets\">");
        for b in &slide.bullets {
            let _ = write!(main, "<li>{}</li>", escape_html(b));
        }
        main.push_str("</ul>\n");
    }
    if let Some(body) = slide.body.as_deref().filter(|b| !b.trim().is_empty()) {
        let html = body_html(body, &[]).map_err(EloError::MalformedSlide)?;
        let _ = writeln!(main, "<div class=\"elo-body\">{html}</div>");
    }
    main.push_str("</div>\n");
    let badges = badges(elo);
    Ok(PageView {
        elo: elo.id.clone(),
        mode: Mode::Slide,
        html: document(elo, Mode::Slide, &main, &nav, &badges),
        nav,
        active_contexts: active_contexts.to_vec(),
        badges,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::LinkContext;
    use crate::elo::{ParagraphContent, SlideContent};
    use crate::linkbase::NewAnchor;

    fn id(s: &str) -> EloId {
        EloId::new(s).unwrap()
    }

    fn elo(name: &str, body: &str) -> Elo {
        Elo::new(
            id(name),
            ParagraphContent {
                title: format!("{name} title"),
                headwords: vec![],
                sectional_titles: vec![],
                body: body.into(),
            },
        )
    }

    struct Fixture {
        repo: Repository,
        base: LinkBase,
        contexts: ContextRegistry,
        minter: IriMinter,
    }

    impl Fixture {
        fn new(body: &str) -> Self {
            let mut repo = Repository::new();
            repo.put_elo(elo("doc", body)).unwrap();
            repo.put_elo(elo("target", "<p>t</p>")).unwrap();
            let mut base = LinkBase::new();
            base.create_anchor(
                &repo,
                NewAnchor {
                    id: Some(crate::AnchorId::new("t").unwrap()),
                    resource: "target".into(),
                    ..Default::default()
                },
            )
            .unwrap();
            let mut contexts = ContextRegistry::new();
            contexts
                .register(
                    LinkContext::new(
                        crate::ContextId::new("ctx").unwrap(),
                        None,
                        Some(crate::context::LangText {
                            lang: None,
                            text: "Background Information".into(),
                        }),
                        None,
                        "SELECT * WHERE (?l, ?p, ?o)",
                    )
                    .unwrap(),
                )
                .unwrap();
            Self {
                repo,
                base,
                contexts,
                minter: IriMinter::default(),
            }
        }

        fn anchor(&mut self, name: &str, selector: Option<&str>) {
            self.base
                .create_anchor(
                    &self.repo,
                    NewAnchor {
                        id: Some(crate::AnchorId::new(name).unwrap()),
                        resource: "doc".into(),
                        selector: selector.map(String::from),
                        ..Default::default()
                    },
                )
                .unwrap();
        }

        fn env(&self) -> LinkEnv<'_> {
            LinkEnv {
                base: &self.base,
                contexts: &self.contexts,
                minter: &self.minter,
            }
        }

        fn selected(&self, link: &str, from: &str, title: Option<&str>) -> SelectedLink {
            SelectedLink {
                link: ns::mir(link),
                subject: ns::mir("anchor-t"),
                predicate: ns::mir("BackgroundInfo"),
                object: ns::mir(&format!("anchor-{from}")),
                title: title.map(String::from),
                via_context: crate::ContextId::new("ctx").unwrap(),
            }
        }

        fn body(&self, selected: &[SelectedLink]) -> String {
            let page = render_descriptive(
                self.repo.get_elo(&id("doc")).unwrap(),
                selected,
                &self.env(),
                Nav::default(),
                &[],
            )
            .unwrap();
            let html = page.html;
            xml::parse(&html).expect("well-formed page");
            let start = html.find("<div class=\"elo-body\">").unwrap() + "<div class=\"elo-body\">".len();
            let end = html[start..].find("</div>\n").unwrap() + start;
            html[start..end].to_string()
        }
    }

    #[test]
    fn decorates_char_range() {
        let mut f = Fixture::new("<p>Hamsters having hay fever</p>");
        f.anchor("h", Some("/p@0+8"));
        let body = f.body(&[f.selected("link1", "h", Some("For freshman"))]);
        assert_eq!(
            body,
            "<p><a class=\"elo-anchor-link\" href=\"/elos/target\" data-link=\"mir:link1\" title=\"For freshman \u{2014} Background Information\">Hamsters</a> having hay fever</p>"
        );
    }

    #[test]
    fn undecorated_is_plain_transform() {
        let f = Fixture::new("<p>a &amp; <emphasis>b</emphasis></p><list><item>x</item></list>");
        assert_eq!(
            f.body(&[]),
            "<p>a &amp; <em class=\"elo-emphasis\">b</em></p><ul class=\"elo-list\"><li class=\"elo-item\">x</li></ul>"
        );
    }

    #[test]
    fn nested_and_identical_spans() {
        let mut f = Fixture::new("<p>abcdefgh</p>");
        f.anchor("outer", Some("/p@0+6"));
        f.anchor("inner", Some("/p@2+2"));
        let body = f.body(&[f.selected("l2", "inner", None), f.selected("l1", "outer", None)]);
        let a = |l: &str| format!("<a class=\"elo-anchor-link\" href=\"/elos/target\" data-link=\"mir:{l}\" title=\"Background Information\">");
        assert_eq!(body, format!("<p>{}ab{}cd</a>ef</a>gh</p>", a("l1"), a("l2")));

        let mut f = Fixture::new("<p>abcdefgh</p>");
        f.anchor("x", Some("/p@0+3"));
        let body = f.body(&[f.selected("lb", "x", None), f.selected("la", "x", None)]);
        assert_eq!(body, format!("<p>{}{}abc</a></a>defgh</p>", a("la"), a("lb")));
    }

    #[test]
    fn crossing_spans_stay_well_formed() {
        let mut f = Fixture::new("<p>abcdefgh</p>");
        f.anchor("x", Some("/p@0+4"));
        f.anchor("y", Some("/p@2+4"));
        let body = f.body(&[f.selected("lx", "x", None), f.selected("ly", "y", None)]);
        assert_eq!(body.matches("data-link=\"mir:ly\"").count(), 2);
        assert_eq!(body.matches("data-link=\"mir:lx\"").count(), 1);
    }

    #[test]
    fn whole_element_and_range_across_children() {
        let mut f = Fixture::new("<p>one <emphasis>two</emphasis> three</p><p>four</p>");
        f.anchor("w", Some("/p"));
        f.anchor("r", Some("/p@2+6"));
        let body = f.body(&[f.selected("lw", "w", None), f.selected("lr", "r", None)]);
        assert!(body.starts_with("<p><a class=\"elo-anchor-link\" href=\"/elos/target\" data-link=\"mir:lw\""));
        assert!(body.ends_with("</a></p><p>four</p>"));
        assert_eq!(body.matches("data-link=\"mir:lw\"").count(), 1);
    }

    #[test]
    fn generic_anchor_goes_to_related() {
        let mut f = Fixture::new("<p>text</p>");
        f.anchor("g", None);
        let page = render_descriptive(
            f.repo.get_elo(&id("doc")).unwrap(),
            &[f.selected("lg", "g", Some("See also"))],
            &f.env(),
            Nav::default(),
            &[],
        )
        .unwrap();
        assert!(page.html.contains("<section class=\"elo-related\">"));
        assert!(page.html.contains(">See also</a></li>"));
        assert_eq!(page.html.matches("href=").count(), 1);
    }

    #[test]
    fn stale_selector_is_an_error() {
        let mut f = Fixture::new("<p>text</p><p>more</p>");
        f.anchor("s", Some("/p[2]"));
        let mut e = f.repo.get_elo(&id("doc")).unwrap().clone();
        e.paragraph.body = "<p>text</p>".into();
        let err = render_descriptive(&e, &[f.selected("l", "s", None)], &f.env(), Nav::default(), &[]).unwrap_err();
        assert!(matches!(err, RenderError::Stale { .. }));
    }

    #[test]
    fn slides() {
        let mut e = elo("s", "<p>x</p>");
        assert!(matches!(render_slide(&e, Nav::default(), &[]), Err(RenderError::Elo(EloError::EmptySource))));
        e.paragraph.sectional_titles = vec!["Intro".into(), "Symptoms".into()];
        let v = render_slide(&e, Nav::default(), &[]).unwrap();
        assert!(v.html.contains("<li>Intro</li><li>Symptoms</li>"));
        e.slide = Some(SlideContent {
            title: "Authored".into(),
            bullets: vec!["only".into()],
            body: None,
        });
        let v = render_slide(&e, Nav::default(), &[]).unwrap();
        assert!(v.html.contains("<h2>Authored</h2>"));
        assert!(!v.html.contains("Intro"));
        xml::parse(&v.html).unwrap();
    }

    #[test]
    fn navigation() {
        let mut repo = Repository::new();
        for n in ["a", "b", "c", "d"] {
            repo.put_elo(elo(n, "<p/>")).unwrap();
        }
        repo.attach_child(&id("a"), &id("b"), usize::MAX).unwrap();
        repo.attach_child(&id("a"), &id("c"), usize::MAX).unwrap();
        repo.attach_child(&id("b"), &id("d"), usize::MAX).unwrap();
        assert_eq!(
            nav_for(&repo, &id("a"), 2).unwrap(),
            Nav {
                prev: Some(id("b")),
                next: Some(id("c")),
                up: Some(id("b"))
            }
        );
        assert_eq!(
            nav_for(&repo, &id("a"), 0).unwrap(),
            Nav {
                prev: None,
                next: Some(id("b")),
                up: None
            }
        );
        assert!(matches!(nav_for(&repo, &id("a"), 4), Err(RenderError::NoOccurrence { .. })));
        assert_eq!(nav_for(&repo, &id("d"), 0).unwrap(), Nav::default());
        assert_eq!(first_occurrence(&repo, &id("a"), &id("c")).unwrap(), Some(3));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn metadata_text_is_escaped(title in "[<>&\"' a-z]{1,20}", diff in "[<>&\"'a-z]{1,8}") {
                let mut e = elo("x", "<p>body</p>");
                e.metadata.title = Some(title.clone());
                e.metadata.difficulty = Some(diff);
                let f = Fixture::new("<p/>");
                let page = render_descriptive(&e, &[], &f.env(), Nav::default(), &[]).unwrap();
                let doc = xml::parse(&page.html).unwrap();
                let h1 = doc.descendants().find(|n| n.has_tag_name(("http://www.w3.org/1999/xhtml", "h1"))).unwrap();
                prop_assert_eq!(h1.text().unwrap_or_default(), title.as_str());
            }

            #[test]
            fn random_spans_render_well_formed(ranges in proptest::collection::vec((0usize..12, 1usize..6), 0..5)) {
                let mut f = Fixture::new("<p>abcdef<emphasis>ghij</emphasis>klmnop</p>");
                let mut sel = Vec::new();
                for (k, (start, len)) in ranges.into_iter().enumerate() {
                    let len = len.min(16 - start);
                    let name = format!("s{k}");
                    f.anchor(&name, Some(&format!("/p@{start}+{len}")));
                    sel.push(f.selected(&format!("l{k}"), &name, None));
                }
                let page = render_descriptive(f.repo.get_elo(&id("doc")).unwrap(), &sel, &f.env(), Nav::default(), &[]).unwrap();
                let doc = xml::parse(&page.html).unwrap();
                let body = doc.descendants().find(|n| n.attribute("class") == Some("elo-body")).unwrap();
                prop_assert_eq!(xml::text_content(body), "abcdefghijklmnop");
                for s in &sel {
                    let tag = format!("data-link=\"{}\"", ns::compact(&s.link));
                    prop_assert!(page.html.contains(&tag));
                }
            }
        }
    }
}
