//! On-disk repository layout.
//!
//! ```text
//! <root>/hylos.toml            configuration (namespace, author, presets)
//! <root>/elos/<id>.xml         one ELO per file
//! <root>/structure.xml         ordered parent → child edges
//! <root>/linkbase.xml          anchors and links
//! <root>/contexts/<id>.xml     one link-context definition per file
//! <root>/registries/<kind>.xml glossary, bibliography, taxonomy, person
//! ```
//!
//! Every file is optional; a missing directory loads as an empty repository.
//! ELO files without a `<metadata>` element get generated metadata on load.

use std::fs;
use std::path::{Path, PathBuf};

use chrono::{DateTime, NaiveDate, Utc};
use roxmltree::{Document, Node};
use thiserror::Error;

use crate::context::{self, ContextError, ContextRegistry};
use crate::elo::{
    autogen_metadata, Elo, LomMetadata, ParagraphContent, References, SlideContent, TechFacts, Technical,
    VocabField,
};
use crate::ids::{AnchorId, EloId, LinkId};
use crate::linkbase::{Anchor, Arc, Link, LinkBase, Resource, Selector, Title};
use crate::store::{RegistryEntry, RegistryKind, Repository};
use crate::workspace::{Config, Workspace, WorkspaceError};
use crate::xml;

pub const CONFIG_FILE: &str = "hylos.toml";
pub const STRUCTURE_FILE: &str = "structure.xml";
pub const LINKBASE_FILE: &str = "linkbase.xml";
pub const ELO_DIR: &str = "elos";
pub const CONTEXT_DIR: &str = "contexts";
pub const REGISTRY_DIR: &str = "registries";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LayoutError {
    #[error("{}: {message}", path.display())]
    Io { path: PathBuf, message: String },
    #[error("{}:{line}: {message}", file.display())]
    Parse { file: PathBuf, line: u32, message: String },
    #[error("integrity violations:\n  {}", .0.join("\n  "))]
    Integrity(Vec<String>),
}

fn io_err(path: &Path, e: std::io::Error) -> LayoutError {
    LayoutError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

/// Text content escaping; carriage returns are kept as character references
/// so that parsers do not normalize them away.
fn esc(s: &str) -> String {
    xml::escape(s).replace('\r', "&#13;")
}

/// Attribute escaping; literal whitespace other than spaces would be
/// normalized by the parser.
fn esc_attr(s: &str) -> String {
    esc(s).replace('\n', "&#10;").replace('\t', "&#9;")
}

const XML_DECL: &str = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";

// ---------------------------------------------------------------- writing

fn elem(out: &mut String, indent: usize, name: &str, text: &str) {
    out.push_str(&format!("{:indent$}<{name}>{}</{name}>\n", "", esc(text)));
}

pub fn elo_to_xml(elo: &Elo) -> String {
    let mut out = String::from(XML_DECL);
    out.push_str(&format!("<elo id=\"{}\">\n", elo.id));
    let m = &elo.metadata;
    out.push_str("  <metadata>\n");
    let opt = |out: &mut String, name: &str, v: &Option<String>| {
        if let Some(v) = v {
            elem(out, 4, name, v);
        }
    };
    opt(&mut out, "title", &m.title);
    opt(&mut out, "description", &m.description);
    for k in &m.keywords {
        elem(&mut out, 4, "keyword", k);
    }
    for c in &m.coverage {
        elem(&mut out, 4, "coverage", c);
    }
    opt(&mut out, "language", &m.language);
    if let Some(level) = m.aggregation_level {
        elem(&mut out, 4, "aggregationLevel", &level.to_string());
    }
    if let Some(t) = &m.technical {
        out.push_str(&format!(
            "    <technical format=\"{}\" size=\"{}\" created=\"{}\" modified=\"{}\">\n",
            esc_attr(&t.format),
            t.size,
            t.created,
            t.modified
        ));
        elem(&mut out, 6, "location", &t.location);
        out.push_str("    </technical>\n");
    }
    opt(&mut out, "author", &m.author);
    for field in VocabField::ALL {
        if let Some(v) = m.vocab(field) {
            elem(&mut out, 4, field.name(), v);
        }
    }
    out.push_str("  </metadata>\n");

    let p = &elo.paragraph;
    out.push_str("  <paragraph>\n");
    elem(&mut out, 4, "title", &p.title);
    for h in &p.headwords {
        elem(&mut out, 4, "headword", h);
    }
    for s in &p.sectional_titles {
        elem(&mut out, 4, "sectionalTitle", s);
    }
    out.push_str(&format!("    <body>{}</body>\n", p.body));
    out.push_str("  </paragraph>\n");

    if let Some(s) = &elo.slide {
        out.push_str("  <slide>\n");
        elem(&mut out, 4, "title", &s.title);
        for b in &s.bullets {
            elem(&mut out, 4, "bullet", b);
        }
        if let Some(body) = &s.body {
            out.push_str(&format!("    <body>{body}</body>\n"));
        }
        out.push_str("  </slide>\n");
    }

    if !elo.refs.is_empty() {
        out.push_str("  <references>\n");
        for kind in RegistryKind::ALL {
            for r in refs_of(&elo.refs, kind) {
                out.push_str(&format!("    <{} ref=\"{}\"/>\n", kind.name(), esc_attr(r)));
            }
        }
        out.push_str("  </references>\n");
    }
    out.push_str("</elo>\n");
    out
}

fn refs_of(refs: &References, kind: RegistryKind) -> &Vec<String> {
    match kind {
        RegistryKind::Glossary => &refs.glossary,
        RegistryKind::Bibliography => &refs.bibliography,
        RegistryKind::Taxonomy => &refs.taxonomy,
        RegistryKind::Person => &refs.person,
    }
}

fn refs_of_mut(refs: &mut References, kind: RegistryKind) -> &mut Vec<String> {
    match kind {
        RegistryKind::Glossary => &mut refs.glossary,
        RegistryKind::Bibliography => &mut refs.bibliography,
        RegistryKind::Taxonomy => &mut refs.taxonomy,
        RegistryKind::Person => &mut refs.person,
    }
}

pub fn linkbase_to_xml(base: &LinkBase) -> String {
    let mut out = String::from(XML_DECL);
    out.push_str("<linkbase>\n");
    for a in base.anchors() {
        out.push_str(&format!(
            "  <anchor id=\"{}\" resource=\"{}\"",
            a.id,
            esc_attr(&a.resource.to_string())
        ));
        if let Some(sel) = &a.selector {
            out.push_str(&format!(" selector=\"{}\"", esc_attr(&sel.to_string())));
        }
        if a.title.is_none() && a.label.is_none() {
            out.push_str("/>\n");
            continue;
        }
        out.push_str(">\n");
        if let Some(t) = &a.title {
            elem(&mut out, 4, "title", t);
        }
        if let Some(l) = &a.label {
            elem(&mut out, 4, "label", l);
        }
        out.push_str("  </anchor>\n");
    }
    for l in base.links() {
        out.push_str(&format!(
            "  <link id=\"{}\" created=\"{}\" pathSpace=\"{}\">\n",
            l.id,
            l.created,
            esc_attr(&l.path_space)
        ));
        elem(&mut out, 4, "creator", &l.creator);
        for t in &l.titles {
            match &t.lang {
                Some(lang) => out.push_str(&format!(
                    "    <title xml:lang=\"{}\">{}</title>\n",
                    esc_attr(lang),
                    esc(&t.text)
                )),
                None => elem(&mut out, 4, "title", &t.text),
            }
        }
        for arc in &l.arcs {
            out.push_str(&format!(
                "    <arc from=\"{}\" to=\"{}\" arcrole=\"{}\"",
                arc.from,
                arc.to,
                esc_attr(&arc.arcrole)
            ));
            match &arc.title {
                Some(t) => out.push_str(&format!("><title>{}</title></arc>\n", esc(t))),
                None => out.push_str("/>\n"),
            }
        }
        out.push_str("  </link>\n");
    }
    out.push_str("</linkbase>\n");
    out
}

pub fn structure_to_xml(repo: &Repository) -> String {
    let mut out = String::from(XML_DECL);
    out.push_str("<structure>\n");
    for (parent, kids) in repo.edges() {
        out.push_str(&format!("  <node id=\"{parent}\">\n"));
        for k in kids {
            out.push_str(&format!("    <child id=\"{k}\"/>\n"));
        }
        out.push_str("  </node>\n");
    }
    out.push_str("</structure>\n");
    out
}

pub fn registry_to_xml(repo: &Repository, kind: RegistryKind) -> String {
    let mut out = String::from(XML_DECL);
    out.push_str(&format!("<registry kind=\"{}\">\n", kind.name()));
    for e in repo.registry(kind) {
        out.push_str(&format!("  <entry id=\"{}\">{}</entry>\n", esc_attr(&e.id), esc(&e.label)));
    }
    out.push_str("</registry>\n");
    out
}

fn write(path: &Path, contents: &str) -> Result<(), LayoutError> {
    fs::write(path, contents).map_err(|e| io_err(path, e))
}

/// Removes `*.xml` files in `dir` that are not in `keep`.
fn prune(dir: &Path, keep: &[String]) -> Result<(), LayoutError> {
    for entry in fs::read_dir(dir).map_err(|e| io_err(dir, e))? {
        let path = entry.map_err(|e| io_err(dir, e))?.path();
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default().to_string();
        if name.ends_with(".xml") && !keep.contains(&name) {
            fs::remove_file(&path).map_err(|e| io_err(&path, e))?;
        }
    }
    Ok(())
}

/// Writes the canonical serialization of `ws` to `root`, replacing any
/// previous content of the layout files.
pub fn save(ws: &Workspace, root: &Path) -> Result<(), LayoutError> {
    let violations = ws.integrity_violations();
    if !violations.is_empty() {
        return Err(LayoutError::Integrity(violations));
    }
    for dir in [ELO_DIR, CONTEXT_DIR, REGISTRY_DIR] {
        let d = root.join(dir);
        fs::create_dir_all(&d).map_err(|e| io_err(&d, e))?;
    }
    let config = toml::to_string(&ws.config).map_err(|e| LayoutError::Io {
        path: root.join(CONFIG_FILE),
        message: e.to_string(),
    })?;
    write(&root.join(CONFIG_FILE), &config)?;

    let mut names = Vec::new();
    for elo in ws.repo.elos() {
        let name = format!("{}.xml", elo.id);
        write(&root.join(ELO_DIR).join(&name), &elo_to_xml(elo))?;
        names.push(name);
    }
    prune(&root.join(ELO_DIR), &names)?;

    let mut names = Vec::new();
    for ctx in ws.contexts.iter() {
        let name = format!("{}.xml", ctx.id);
        write(&root.join(CONTEXT_DIR).join(&name), &ctx.to_xml())?;
        names.push(name);
    }
    prune(&root.join(CONTEXT_DIR), &names)?;

    let mut names = Vec::new();
    for kind in RegistryKind::ALL {
        if ws.repo.registry(kind).next().is_some() {
            let name = format!("{}.xml", kind.name());
            write(&root.join(REGISTRY_DIR).join(&name), &registry_to_xml(&ws.repo, kind))?;
            names.push(name);
        }
    }
    prune(&root.join(REGISTRY_DIR), &names)?;

    write(&root.join(STRUCTURE_FILE), &structure_to_xml(&ws.repo))?;
    write(&root.join(LINKBASE_FILE), &linkbase_to_xml(&ws.base))?;
    Ok(())
}

// ---------------------------------------------------------------- reading

struct Reader<'a, 'i> {
    file: &'a Path,
    doc: &'a Document<'i>,
}

impl<'a, 'i> Reader<'a, 'i> {
    fn err(&self, node: Node<'_, '_>, message: impl Into<String>) -> LayoutError {
        LayoutError::Parse {
            file: self.file.to_path_buf(),
            line: self.doc.text_pos_at(node.range().start).row,
            message: message.into(),
        }
    }

    fn attr(&self, node: Node<'a, 'i>, name: &str) -> Result<&'a str, LayoutError> {
        node.attribute(name)
            .ok_or_else(|| self.err(node, format!("<{}> needs a {name} attribute", node.tag_name().name())))
    }

    fn parsed<T: std::str::FromStr>(&self, node: Node<'a, 'i>, name: &str) -> Result<T, LayoutError>
    where
        T::Err: std::fmt::Display,
    {
        let raw = self.attr(node, name)?;
        raw.parse()
            .map_err(|e| self.err(node, format!("{name}={raw:?}: {e}")))
    }

    fn unexpected(&self, node: Node<'_, '_>, parent: &str) -> LayoutError {
        self.err(node, format!("unexpected <{}> in <{parent}>", node.tag_name().name()))
    }

    fn root(&self, name: &str) -> Result<Node<'a, 'i>, LayoutError> {
        let root = self.doc.root_element();
        if root.tag_name().name() != name {
            return Err(self.err(root, format!("expected <{name}> root element")));
        }
        Ok(root)
    }
}

fn elements<'a, 'i>(node: Node<'a, 'i>) -> impl Iterator<Item = Node<'a, 'i>> {
    node.children().filter(|n| n.is_element())
}

fn read_file(path: &Path) -> Result<String, LayoutError> {
    fs::read_to_string(path).map_err(|e| io_err(path, e))
}

fn parse_doc<'i>(path: &Path, text: &'i str) -> Result<Document<'i>, LayoutError> {
    xml::parse(text).map_err(|e| LayoutError::Parse {
        file: path.to_path_buf(),
        line: e.pos().row,
        message: e.to_string(),
    })
}

fn read_paragraph(r: &Reader<'_, '_>, src: &str, node: Node<'_, '_>) -> Result<ParagraphContent, LayoutError> {
    let mut p = ParagraphContent::default();
    let mut seen_title = false;
    let mut seen_body = false;
    for c in elements(node) {
        match c.tag_name().name() {
            "title" => {
                p.title = xml::text_content(c);
                seen_title = true;
            }
            "headword" => p.headwords.push(xml::text_content(c)),
            "sectionalTitle" => p.sectional_titles.push(xml::text_content(c)),
            "body" => {
                p.body = xml::inner_xml(src, c).to_string();
                seen_body = true;
            }
            _ => return Err(r.unexpected(c, "paragraph")),
        }
    }
    if !seen_title || !seen_body {
        return Err(r.err(node, "<paragraph> needs <title> and <body>"));
    }
    Ok(p)
}

fn read_slide(r: &Reader<'_, '_>, src: &str, node: Node<'_, '_>) -> Result<SlideContent, LayoutError> {
    let mut s = SlideContent::default();
    for c in elements(node) {
        match c.tag_name().name() {
            "title" => s.title = xml::text_content(c),
            "bullet" => s.bullets.push(xml::text_content(c)),
            "body" => s.body = Some(xml::inner_xml(src, c).to_string()),
            _ => return Err(r.unexpected(c, "slide")),
        }
    }
    Ok(s)
}

fn read_metadata<'a, 'i>(r: &Reader<'a, 'i>, node: Node<'a, 'i>) -> Result<LomMetadata, LayoutError> {
    let mut m = LomMetadata::default();
    for c in elements(node) {
        let text = xml::text_content(c);
        let name = c.tag_name().name();
        match name {
            "title" => m.title = Some(text),
            "description" => m.description = Some(text),
            "keyword" => m.keywords.push(text),
            "coverage" => m.coverage.push(text),
            "language" => m.language = Some(text),
            "author" => m.author = Some(text),
            "aggregationLevel" => {
                m.aggregation_level = Some(
                    text.trim()
                        .parse()
                        .map_err(|_| r.err(c, format!("aggregationLevel {text:?} is not a number")))?,
                )
            }
            "technical" => {
                let location = elements(c)
                    .find(|n| n.has_tag_name("location"))
                    .map(xml::text_content)
                    .ok_or_else(|| r.err(c, "<technical> needs <location>"))?;
                m.technical = Some(Technical {
                    format: r.attr(c, "format")?.to_string(),
                    size: r.parsed(c, "size")?,
                    location,
                    created: r.parsed(c, "created")?,
                    modified: r.parsed(c, "modified")?,
                });
            }
            _ => match VocabField::ALL.into_iter().find(|f| f.name() == name) {
                Some(field) => m.set_vocab(field, Some(text)),
                None => return Err(r.unexpected(c, "metadata")),
            },
        }
    }
    Ok(m)
}

fn file_date(path: &Path) -> NaiveDate {
    let modified = fs::metadata(path)
        .and_then(|m| m.modified())
        .unwrap_or_else(|_| std::time::SystemTime::now());
    DateTime::<Utc>::from(modified).date_naive()
}

fn read_elo(path: &Path, config: &Config) -> Result<Elo, LayoutError> {
    let src = read_file(path)?;
    let doc = parse_doc(path, &src)?;
    let r = Reader { file: path, doc: &doc };
    let root = r.root("elo")?;
    let id_raw = r.attr(root, "id")?;
    let id = EloId::new(id_raw).map_err(|e| r.err(root, e.to_string()))?;

    let mut metadata = None;
    let mut paragraph = None;
    let mut slide = None;
    let mut refs = References::default();
    for c in elements(root) {
        match c.tag_name().name() {
            "metadata" => metadata = Some(read_metadata(&r, c)?),
            "paragraph" => paragraph = Some(read_paragraph(&r, &src, c)?),
            "slide" => slide = Some(read_slide(&r, &src, c)?),
            "references" => {
                for rc in elements(c) {
                    let kind = RegistryKind::from_name(rc.tag_name().name())
                        .ok_or_else(|| r.unexpected(rc, "references"))?;
                    refs_of_mut(&mut refs, kind).push(r.attr(rc, "ref")?.to_string());
                }
            }
            _ => return Err(r.unexpected(c, "elo")),
        }
    }
    let paragraph = paragraph.ok_or_else(|| r.err(root, "<elo> needs a <paragraph>"))?;
    let metadata = match metadata {
        Some(m) => m,
        None => {
            let date = file_date(path);
            let tech = TechFacts {
                technical: Technical {
                    format: "text/xml".into(),
                    size: src.len() as u64,
                    location: format!("{ELO_DIR}/{id}.xml"),
                    created: date,
                    modified: date,
                },
                aggregation_level: 1,
            };
            let author = root
                .attribute("author")
                .map(str::to_string)
                .or_else(|| config.author.clone())
                .unwrap_or_default();
            autogen_metadata(&paragraph, &tech, &author, &config.presets)
                .map_err(|e| r.err(root, e.to_string()))?
        }
    };
    Ok(Elo {
        id,
        metadata,
        paragraph,
        slide,
        refs,
    })
}

fn read_linkbase(path: &Path, base: &mut LinkBase, violations: &mut Vec<String>) -> Result<(), LayoutError> {
    let src = read_file(path)?;
    let doc = parse_doc(path, &src)?;
    let r = Reader { file: path, doc: &doc };
    let root = r.root("linkbase")?;
    for node in elements(root) {
        match node.tag_name().name() {
            "anchor" => {
                let id = AnchorId::new(r.attr(node, "id")?).map_err(|e| r.err(node, e.to_string()))?;
                let resource = Resource::parse(r.attr(node, "resource")?).map_err(|e| r.err(node, e.to_string()))?;
                let selector = node
                    .attribute("selector")
                    .map(|s| s.parse::<Selector>())
                    .transpose()
                    .map_err(|e| r.err(node, e.to_string()))?;
                let mut anchor = Anchor {
                    id,
                    resource,
                    selector,
                    title: None,
                    label: None,
                };
                for c in elements(node) {
                    match c.tag_name().name() {
                        "title" => anchor.title = Some(xml::text_content(c)),
                        "label" => anchor.label = Some(xml::text_content(c)),
                        _ => return Err(r.unexpected(c, "anchor")),
                    }
                }
                let id = anchor.id.clone();
                if !base.insert_anchor_unchecked(anchor) {
                    violations.push(format!("anchor {id} defined twice"));
                }
            }
            "link" => {
                let id = LinkId::new(r.attr(node, "id")?).map_err(|e| r.err(node, e.to_string()))?;
                let mut link = Link {
                    id,
                    arcs: Vec::new(),
                    titles: Vec::new(),
                    creator: String::new(),
                    created: r.parsed(node, "created")?,
                    path_space: r.attr(node, "pathSpace")?.to_string(),
                };
                for c in elements(node) {
                    match c.tag_name().name() {
                        "creator" => link.creator = xml::text_content(c),
                        "title" => link.titles.push(Title {
                            lang: c
                                .attribute(("http://www.w3.org/XML/1998/namespace", "lang"))
                                .map(str::to_string),
                            text: xml::text_content(c),
                        }),
                        "arc" => {
                            let end = |name| {
                                AnchorId::new(r.attr(c, name)?).map_err(|e| r.err(c, e.to_string()))
                            };
                            let title = match elements(c).next() {
                                Some(t) if t.has_tag_name("title") => Some(xml::text_content(t)),
                                Some(other) => return Err(r.unexpected(other, "arc")),
                                None => None,
                            };
                            link.arcs.push(Arc {
                                from: end("from")?,
                                to: end("to")?,
                                arcrole: r.attr(c, "arcrole")?.to_string(),
                                title,
                            });
                        }
                        _ => return Err(r.unexpected(c, "link")),
                    }
                }
                let id = link.id.clone();
                if !base.insert_link_unchecked(link) {
                    violations.push(format!("link {id} defined twice"));
                }
            }
            _ => return Err(r.unexpected(node, "linkbase")),
        }
    }
    Ok(())
}

fn read_structure(path: &Path, repo: &mut Repository, violations: &mut Vec<String>) -> Result<(), LayoutError> {
    let src = read_file(path)?;
    let doc = parse_doc(path, &src)?;
    let r = Reader { file: path, doc: &doc };
    let root = r.root("structure")?;
    for node in elements(root) {
        if !node.has_tag_name("node") {
            return Err(r.unexpected(node, "structure"));
        }
        let parent = EloId::new(r.attr(node, "id")?).map_err(|e| r.err(node, e.to_string()))?;
        for c in elements(node) {
            if !c.has_tag_name("child") {
                return Err(r.unexpected(c, "node"));
            }
            let child = EloId::new(r.attr(c, "id")?).map_err(|e| r.err(c, e.to_string()))?;
            if let Err(e) = repo.attach_child(&parent, &child, usize::MAX) {
                violations.push(format!("structure: {e}"));
            }
        }
    }
    Ok(())
}

fn read_registry(path: &Path, repo: &mut Repository) -> Result<(), LayoutError> {
    let src = read_file(path)?;
    let doc = parse_doc(path, &src)?;
    let r = Reader { file: path, doc: &doc };
    let root = r.root("registry")?;
    let kind_raw = r.attr(root, "kind")?;
    let kind = RegistryKind::from_name(kind_raw).ok_or_else(|| r.err(root, format!("unknown registry kind {kind_raw:?}")))?;
    for e in elements(root) {
        if !e.has_tag_name("entry") {
            return Err(r.unexpected(e, "registry"));
        }
        repo.put_registry_entry(
            kind,
            RegistryEntry {
                id: r.attr(e, "id")?.to_string(),
                label: xml::text_content(e),
            },
        );
    }
    Ok(())
}

fn xml_files(dir: &Path) -> Result<Vec<PathBuf>, LayoutError> {
    if !dir.is_dir() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| io_err(dir, e))? {
        let path = entry.map_err(|e| io_err(dir, e))?.path();
        if path.extension().is_some_and(|x| x == "xml") && path.is_file() {
            out.push(path);
        }
    }
    out.sort();
    Ok(out)
}

fn read_config(root: &Path) -> Result<Config, LayoutError> {
    let path = root.join(CONFIG_FILE);
    if !path.exists() {
        return Ok(Config::default());
    }
    let text = read_file(&path)?;
    toml::from_str(&text).map_err(|e| {
        let line = e
            .span()
            .map_or(1, |s| text[..s.start].matches('\n').count() as u32 + 1);
        LayoutError::Parse {
            file: path,
            line,
            message: e.message().to_string(),
        }
    })
}

/// Loads a repository directory and checks its integrity as a whole.
pub fn load(root: &Path) -> Result<Workspace, LayoutError> {
    if !root.is_dir() {
        return Err(LayoutError::Io {
            path: root.to_path_buf(),
            message: "not a directory".into(),
        });
    }
    let config = read_config(root)?;
    let mut violations = Vec::new();

    let mut repo = Repository::new();
    for path in xml_files(&root.join(ELO_DIR))? {
        let elo = read_elo(&path, &config)?;
        if repo.contains(&elo.id) {
            violations.push(format!("ELO {} defined twice ({})", elo.id, path.display()));
            continue;
        }
        if let Err(e) = repo.put_elo(elo) {
            violations.push(format!("{}: {e}", path.display()));
        }
    }
    for path in xml_files(&root.join(REGISTRY_DIR))? {
        read_registry(&path, &mut repo)?;
    }
    let structure = root.join(STRUCTURE_FILE);
    if structure.exists() {
        read_structure(&structure, &mut repo, &mut violations)?;
    }

    let mut base = LinkBase::new();
    let linkbase = root.join(LINKBASE_FILE);
    if linkbase.exists() {
        read_linkbase(&linkbase, &mut base, &mut violations)?;
    }

    let mut contexts = ContextRegistry::new();
    for path in xml_files(&root.join(CONTEXT_DIR))? {
        let text = read_file(&path)?;
        parse_doc(&path, &text)?;
        match context::parse_context(&text) {
            Ok(ctx) => {
                if let Err(e) = contexts.register(ctx) {
                    violations.push(format!("{}: {e}", path.display()));
                }
            }
            Err(ContextError::Query(e)) => violations.push(format!("{}: {e}", path.display())),
            Err(e) => {
                return Err(LayoutError::Parse {
                    file: path,
                    line: 1,
                    message: e.to_string(),
                })
            }
        }
    }

    match Workspace::from_parts(config, repo, base, contexts) {
        Ok(ws) if violations.is_empty() => Ok(ws),
        Ok(_) => Err(LayoutError::Integrity(violations)),
        Err(WorkspaceError::Integrity(more)) => {
            violations.extend(more);
            Err(LayoutError::Integrity(violations))
        }
        Err(other) => Err(LayoutError::Integrity(vec![other.to_string()])),
    }
}
