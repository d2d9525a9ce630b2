//! Translation of ELOs, anchors and links into statements.

use crate::elo::Elo;
use crate::linkbase::{Anchor, Arc, LinkBase, Link, Resource};
use crate::ns::{self, IriMinter};
use crate::store::Repository;

use super::{Graph, Term, Triple};

/// Content statements of an ELO: one triple per set metadata value plus its type.
pub fn elo_statements(elo: &Elo, minter: &IriMinter) -> Vec<Triple> {
    let s = minter.elo(&elo.id);
    let m = &elo.metadata;
    let mut out = vec![Triple::new(&s, ns::rdf("type"), Term::iri(ns::mir("ELO")))];
    let mut lit = |p: String, v: &str| out.push(Triple::new(&s, p, Term::literal(v)));

    if let Some(v) = &m.title {
        lit(ns::dc("title"), v);
    }
    if let Some(v) = &m.description {
        lit(ns::dc("description"), v);
    }
    for k in &m.keywords {
        lit(ns::dc("subject"), k);
    }
    for c in &m.coverage {
        lit(ns::dc("coverage"), c);
    }
    if let Some(v) = &m.language {
        lit(ns::dc("language"), v);
    }
    if let Some(v) = &m.author {
        lit(ns::dc("creator"), v);
    }
    if let Some(t) = &m.technical {
        lit(ns::dc("format"), &t.format);
        lit(ns::mir("size"), &t.size.to_string());
        lit(ns::mir("location"), &t.location);
        lit(ns::mir("created"), &t.created.to_string());
        lit(ns::mir("modified"), &t.modified.to_string());
    }
    if let Some(v) = m.aggregation_level {
        lit(ns::mir("aggregationLevel"), &v.to_string());
    }
    for field in crate::elo::VocabField::ALL {
        if let Some(v) = m.vocab(field) {
            lit(ns::mir(field.name()), v);
        }
    }
    out
}

fn resource_iri(resource: &Resource, minter: &IriMinter) -> String {
    match resource {
        Resource::Elo(id) => minter.elo(id),
        Resource::External(iri) => iri.clone(),
    }
}

/// Anchor descriptors: the owning ELO's content statements re-subjected to
/// the anchor, the anchor's own title and label, and its resource.
///
/// `owning_elo_triples` are the [`elo_statements`] of the anchored ELO, empty
/// for external resources.
pub fn anchor_statements(anchor: &Anchor, owning_elo_triples: &[Triple], minter: &IriMinter) -> Vec<Triple> {
    let a = minter.anchor(&anchor.id);
    let rdf_type = ns::rdf("type");
    let mut out: Vec<Triple> = owning_elo_triples
        .iter()
        .filter(|t| t.predicate() != rdf_type)
        .map(|t| t.with_subject(&a))
        .collect();
    if let Resource::Elo(id) = &anchor.resource {
        if !owning_elo_triples.is_empty() {
            out.push(Triple::new(&a, ns::mir("inheritedFrom"), Term::iri(minter.elo(id))));
        }
    }
    if let Some(title) = &anchor.title {
        out.push(Triple::new(&a, ns::dc("title"), Term::literal(title)));
    }
    if let Some(label) = &anchor.label {
        out.push(Triple::new(&a, ns::mir("label"), Term::literal(label)));
    }
    out.push(Triple::new(
        &a,
        ns::mir("anchorOf"),
        Term::iri(resource_iri(&anchor.resource, minter)),
    ));
    out
}

/// Reification of one arc on `node`: the target anchor is the statement's
/// subject and the source anchor its object.
fn reify(node: &str, arc: &Arc, minter: &IriMinter, out: &mut Vec<Triple>) {
    out.push(Triple::new(node, ns::rdf("type"), Term::iri(ns::rdf("Statement"))));
    out.push(Triple::new(node, ns::rdf("subject"), Term::iri(minter.anchor(&arc.to))));
    out.push(Triple::new(node, ns::rdf("predicate"), Term::iri(&arc.arcrole)));
    out.push(Triple::new(node, ns::rdf("object"), Term::iri(minter.anchor(&arc.from))));
    if let Some(title) = &arc.title {
        out.push(Triple::new(node, ns::dc("title"), Term::literal(title)));
    }
}

/// Higher-order statements for a link. A single-arc link is itself the
/// reification node; each arc of a multi-arc link gets its own node joined to
/// the link by `mir:arc`.
pub fn link_statements(link: &Link, minter: &IriMinter) -> Vec<Triple> {
    let l = minter.link(&link.id);
    let mut out = Vec::new();
    match link.arcs.as_slice() {
        [arc] => reify(&l, arc, minter, &mut out),
        arcs => {
            for (k, arc) in arcs.iter().enumerate() {
                let node = minter.arc(&link.id, k + 1);
                out.push(Triple::new(&l, ns::mir("arc"), Term::iri(&node)));
                reify(&node, arc, minter, &mut out);
            }
        }
    }
    for t in &link.titles {
        let lit = match &t.lang {
            Some(lang) => Term::lang_literal(&t.text, lang),
            None => Term::literal(&t.text),
        };
        out.push(Triple::new(&l, ns::dc("title"), lit));
    }
    out.push(Triple::new(&l, ns::dc("creator"), Term::literal(&link.creator)));
    out.push(Triple::new(&l, ns::mir("pathSpace"), Term::literal(&link.path_space)));
    out
}

/// The full statement graph of a repository and its link base.
pub fn build_model(repo: &Repository, base: &LinkBase, minter: &IriMinter) -> Graph {
    let mut triples = Vec::new();
    for elo in repo.elos() {
        triples.extend(elo_statements(elo, minter));
    }
    for anchor in base.anchors() {
        let owning = anchor
            .resource
            .elo()
            .and_then(|id| repo.get_elo(id).ok())
            .map(|e| elo_statements(e, minter))
            .unwrap_or_default();
        triples.extend(anchor_statements(anchor, &owning, minter));
    }
    for link in base.links() {
        triples.extend(link_statements(link, minter));
    }
    triples.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elo::{LomMetadata, ParagraphContent};
    use crate::ids::{AnchorId, EloId, LinkId};
    use crate::linkbase::Title;
    use chrono::NaiveDate;

    fn minter() -> IriMinter {
        IriMinter::default()
    }

    fn elo(id: &str, meta: LomMetadata) -> Elo {
        let mut e = Elo::new(
            EloId::new(id).unwrap(),
            ParagraphContent {
                title: id.into(),
                ..Default::default()
            },
        );
        e.metadata = meta;
        e
    }

    fn arc(from: &str, to: &str) -> Arc {
        Arc {
            from: AnchorId::new(from).unwrap(),
            to: AnchorId::new(to).unwrap(),
            arcrole: ns::mir("BackgroundInfo"),
            title: None,
        }
    }

    fn link(arcs: Vec<Arc>) -> Link {
        Link {
            id: LinkId::new("link1").unwrap(),
            arcs,
            titles: vec![Title {
                lang: None,
                text: "For freshman".into(),
            }],
            creator: "Mr. X".into(),
            created: NaiveDate::from_ymd_opt(2003, 7, 18).unwrap(),
            path_space: "vet".into(),
        }
    }

    #[test]
    fn description_statement() {
        let e = elo(
            "hamster",
            LomMetadata {
                description: Some("about hamster diseases".into()),
                ..Default::default()
            },
        );
        let ts = elo_statements(&e, &minter());
        assert!(ts.contains(&Triple::new(
            ns::mir("elo-hamster"),
            ns::dc("description"),
            Term::literal("about hamster diseases")
        )));
    }

    #[test]
    fn list_fields_and_empty_record() {
        let e = elo(
            "h",
            LomMetadata {
                keywords: vec!["hamster".into(), "allergy".into()],
                ..Default::default()
            },
        );
        let subj = elo_statements(&e, &minter())
            .into_iter()
            .filter(|t| t.predicate() == ns::dc("subject"))
            .count();
        assert_eq!(subj, 2);

        let bare = elo("h", LomMetadata::default());
        assert_eq!(
            elo_statements(&bare, &minter()),
            vec![Triple::new(ns::mir("elo-h"), ns::rdf("type"), Term::iri(ns::mir("ELO")))]
        );
    }

    #[test]
    fn anchors_inherit_and_specialise() {
        let e = elo(
            "hamster-text",
            LomMetadata {
                description: Some("about hamster diseases".into()),
                ..Default::default()
            },
        );
        let owning = elo_statements(&e, &minter());
        let a = Anchor {
            id: AnchorId::new("hamster").unwrap(),
            resource: Resource::Elo(e.id.clone()),
            selector: None,
            title: Some("hamster having hay fever".into()),
            label: None,
        };
        let ts = anchor_statements(&a, &owning, &minter());
        let ai = ns::mir("anchor-hamster");
        assert!(ts.contains(&Triple::new(&ai, ns::dc("title"), Term::literal("hamster having hay fever"))));
        assert!(ts.contains(&Triple::new(&ai, ns::dc("description"), Term::literal("about hamster diseases"))));
        assert!(ts.contains(&Triple::new(&ai, ns::mir("inheritedFrom"), Term::iri(ns::mir("elo-hamster-text")))));
        assert!(!ts.iter().any(|t| t.predicate() == ns::rdf("type")));

        let generic = Anchor { title: None, ..a.clone() };
        let ts = anchor_statements(&generic, &owning, &minter());
        assert_eq!(ts.len(), 3); // description, inheritedFrom, anchorOf

        let ext = Anchor {
            resource: Resource::External("http://example.org/handbook".into()),
            ..a
        };
        let ts = anchor_statements(&ext, &[], &minter());
        assert_eq!(ts.len(), 2);
        assert!(ts.contains(&Triple::new(&ai, ns::mir("anchorOf"), Term::iri("http://example.org/handbook"))));
    }

    #[test]
    fn single_arc_link_is_its_own_statement() {
        let ts = link_statements(&link(vec![arc("hamster", "handbook")]), &minter());
        let l = ns::mir("link1");
        for t in [
            Triple::new(&l, ns::rdf("type"), Term::iri(ns::rdf("Statement"))),
            Triple::new(&l, ns::rdf("subject"), Term::iri(ns::mir("anchor-handbook"))),
            Triple::new(&l, ns::rdf("predicate"), Term::iri(ns::mir("BackgroundInfo"))),
            Triple::new(&l, ns::rdf("object"), Term::iri(ns::mir("anchor-hamster"))),
            Triple::new(&l, ns::dc("title"), Term::literal("For freshman")),
        ] {
            assert!(ts.contains(&t), "missing {t}");
        }
    }

    #[test]
    fn two_arc_link_counts() {
        let ts = link_statements(&link(vec![arc("a", "b"), arc("b", "a")]), &minter());
        let l = ns::mir("link1");
        // 2 x 4 reification + 2 mir:arc + title, creator, pathSpace
        assert_eq!(ts.len(), 2 * 4 + 2 + 3);
        let on_l: Vec<_> = ts.iter().filter(|t| t.subject() == l).collect();
        assert!(!on_l.iter().any(|t| t.predicate().starts_with(ns::RDF)));
        assert_eq!(on_l.iter().filter(|t| t.predicate() == ns::mir("arc")).count(), 2);
        assert!(ts.contains(&Triple::new(
            format!("{l}/arc-2"),
            ns::rdf("subject"),
            Term::iri(ns::mir("anchor-a"))
        )));
    }

    #[test]
    fn empty_model() {
        assert!(build_model(&Repository::new(), &LinkBase::new(), &minter()).is_empty());
    }
}
