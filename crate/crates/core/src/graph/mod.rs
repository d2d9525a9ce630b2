//! RDF statement graph with subject/predicate/object indexes.

mod build;
pub mod ntriples;

use std::cmp::Ordering;
use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::hash::{Hash, Hasher};

pub use build::{anchor_statements, build_model, elo_statements, link_statements};

/// An RDF term. Blank nodes and typed literals are not modeled.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Iri(String),
    Literal { text: String, lang: Option<String> },
}

impl Term {
    pub fn iri(s: impl Into<String>) -> Self {
        Term::Iri(s.into())
    }

    pub fn literal(s: impl Into<String>) -> Self {
        Term::Literal {
            text: s.into(),
            lang: None,
        }
    }

    pub fn lang_literal(s: impl Into<String>, lang: impl Into<String>) -> Self {
        Term::Literal {
            text: s.into(),
            lang: Some(lang.into()),
        }
    }

    pub fn as_iri(&self) -> Option<&str> {
        match self {
            Term::Iri(s) => Some(s),
            Term::Literal { .. } => None,
        }
    }

    /// N-Triples serialization of the term.
    pub fn to_nt(&self) -> String {
        let mut out = String::new();
        ntriples::write_term(self, &mut out);
        out
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_nt())
    }
}

impl Ord for Term {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Term::Iri(a), Term::Iri(b)) if ntriples::iri_is_plain(a) && ntriples::iri_is_plain(b) => {
                // "<a>" vs "<b>" without allocating
                a.bytes().chain(*b">").cmp(b.bytes().chain(*b">"))
            }
            _ => self.to_nt().cmp(&other.to_nt()),
        }
    }
}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A statement. Subject and predicate are IRIs.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    subject: Term,
    predicate: Term,
    pub object: Term,
}

impl Triple {
    pub fn new(subject: impl Into<String>, predicate: impl Into<String>, object: Term) -> Self {
        Self {
            subject: Term::Iri(subject.into()),
            predicate: Term::Iri(predicate.into()),
            object,
        }
    }

    /// Builds a triple from three terms; `None` unless subject and predicate
    /// are IRIs.
    pub fn from_terms(subject: Term, predicate: Term, object: Term) -> Option<Self> {
        match (&subject, &predicate) {
            (Term::Iri(_), Term::Iri(_)) => Some(Self {
                subject,
                predicate,
                object,
            }),
            _ => None,
        }
    }

    pub fn subject(&self) -> &str {
        self.subject.as_iri().expect("subject is an IRI")
    }

    pub fn predicate(&self) -> &str {
        self.predicate.as_iri().expect("predicate is an IRI")
    }

    pub fn subject_term(&self) -> &Term {
        &self.subject
    }

    pub fn predicate_term(&self) -> &Term {
        &self.predicate
    }

    pub fn terms(&self) -> [&Term; 3] {
        [&self.subject, &self.predicate, &self.object]
    }

    pub fn with_subject(&self, subject: impl Into<String>) -> Self {
        Self {
            subject: Term::Iri(subject.into()),
            ..self.clone()
        }
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.subject, self.predicate, self.object)
    }
}

/// Triple pattern; `None` components match anything.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Pattern {
    pub subject: Option<Term>,
    pub predicate: Option<Term>,
    pub object: Option<Term>,
}

impl Pattern {
    pub fn new(subject: Option<Term>, predicate: Option<Term>, object: Option<Term>) -> Self {
        Self {
            subject,
            predicate,
            object,
        }
    }

    pub fn matches(&self, t: &Triple) -> bool {
        self.subject.as_ref().is_none_or(|s| s == t.subject_term())
            && self.predicate.as_ref().is_none_or(|p| p == t.predicate_term())
            && self.object.as_ref().is_none_or(|o| o == &t.object)
    }
}

/// An immutable-by-default set of triples, kept sorted by serialized form.
#[derive(Debug, Clone, Default)]
pub struct Graph {
    triples: Vec<Triple>,
    by_subject: HashMap<Term, Vec<usize>>,
    by_predicate: HashMap<Term, Vec<usize>>,
    by_object: HashMap<Term, Vec<usize>>,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    fn from_sorted(triples: Vec<Triple>) -> Self {
        let mut g = Graph {
            triples,
            ..Graph::default()
        };
        for (i, t) in g.triples.iter().enumerate() {
            g.by_subject.entry(t.subject.clone()).or_default().push(i);
            g.by_predicate.entry(t.predicate.clone()).or_default().push(i);
            g.by_object.entry(t.object.clone()).or_default().push(i);
        }
        g
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Triple> {
        self.triples.iter()
    }

    pub fn contains(&self, t: &Triple) -> bool {
        self.triples.binary_search(t).is_ok()
    }

    /// Adds a triple, rebuilding the indexes. Returns false if it was present.
    pub fn insert(&mut self, t: Triple) -> bool {
        match self.triples.binary_search(&t) {
            Ok(_) => false,
            Err(pos) => {
                let mut triples = std::mem::take(&mut self.triples);
                triples.insert(pos, t);
                *self = Graph::from_sorted(triples);
                true
            }
        }
    }

    /// Triples agreeing with every bound component, in serialized order.
    pub fn match_pattern(&self, pattern: &Pattern) -> Vec<&Triple> {
        let candidates = [
            (pattern.subject.as_ref(), &self.by_subject),
            (pattern.predicate.as_ref(), &self.by_predicate),
            (pattern.object.as_ref(), &self.by_object),
        ]
        .into_iter()
        .filter_map(|(term, index)| term.map(|t| index.get(t).map(Vec::as_slice).unwrap_or_default()))
        .min_by_key(|c| c.len());
        match candidates {
            None => self.triples.iter().collect(),
            Some(idx) => idx
                .iter()
                .map(|&i| &self.triples[i])
                .filter(|t| pattern.matches(t))
                .collect(),
        }
    }

    /// Objects of `(subject, predicate, ?)`.
    pub fn objects<'a>(&'a self, subject: &str, predicate: &str) -> impl Iterator<Item = &'a Term> + 'a {
        let p = Pattern::new(Some(Term::iri(subject)), Some(Term::iri(predicate)), None);
        self.match_pattern(&p).into_iter().map(|t| &t.object)
    }

    /// Every distinct term of the graph.
    pub fn terms(&self) -> BTreeSet<&Term> {
        self.triples.iter().flat_map(|t| t.terms()).collect()
    }

    pub fn to_ntriples(&self) -> String {
        ntriples::serialize(self.iter())
    }

    /// Stable hash of the triple set.
    pub fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.triples.hash(&mut h);
        h.finish()
    }
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.triples == other.triples
    }
}

impl Eq for Graph {}

impl FromIterator<Triple> for Graph {
    fn from_iter<I: IntoIterator<Item = Triple>>(iter: I) -> Self {
        let set: BTreeSet<Triple> = iter.into_iter().collect();
        Graph::from_sorted(set.into_iter().collect())
    }
}

impl Extend<Triple> for Graph {
    fn extend<I: IntoIterator<Item = Triple>>(&mut self, iter: I) {
        let mut set: BTreeSet<Triple> = std::mem::take(&mut self.triples).into_iter().collect();
        set.extend(iter);
        *self = Graph::from_sorted(set.into_iter().collect());
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str, p: &str, o: Term) -> Triple {
        Triple::new(format!("http://x/{s}"), format!("http://x/{p}"), o)
    }

    #[test]
    fn set_semantics_and_order() {
        let g: Graph = [
            t("b", "p", Term::literal("1")),
            t("a", "p", Term::iri("http://x/b")),
            t("b", "p", Term::literal("1")),
        ]
        .into_iter()
        .collect();
        assert_eq!(g.len(), 2);
        assert_eq!(g.iter().next().unwrap().subject(), "http://x/a");
    }

    #[test]
    fn ordering_follows_serialization() {
        let a = Term::iri("http://x/a");
        let ab = Term::iri("http://x/a#");
        assert_eq!(a.cmp(&ab), a.to_nt().cmp(&ab.to_nt()));
        let lit = Term::literal("z");
        assert_eq!(lit.cmp(&a), lit.to_nt().cmp(&a.to_nt()));
    }

    #[test]
    fn matching() {
        let g: Graph = [
            t("l", "predicate", Term::iri("http://x/BackgroundInfo")),
            t("l", "type", Term::iri("http://x/Statement")),
            t("m", "type", Term::iri("http://x/Statement")),
        ]
        .into_iter()
        .collect();
        let p = Pattern::new(None, Some(Term::iri("http://x/predicate")), None);
        assert_eq!(g.match_pattern(&p).len(), 1);
        assert_eq!(g.match_pattern(&Pattern::default()).len(), 3);
        let p = Pattern::new(Some(Term::iri("http://x/unknown")), None, None);
        assert!(g.match_pattern(&p).is_empty());
        let p = Pattern::new(Some(Term::iri("http://x/l")), Some(Term::iri("http://x/type")), None);
        assert_eq!(g.match_pattern(&p).len(), 1);
    }

    #[test]
    fn insert_keeps_indexes() {
        let mut g = Graph::new();
        assert!(g.insert(t("a", "p", Term::literal("x"))));
        assert!(!g.insert(t("a", "p", Term::literal("x"))));
        assert!(g.insert(t("0", "p", Term::literal("y"))));
        let p = Pattern::new(Some(Term::iri("http://x/a")), None, None);
        assert_eq!(g.match_pattern(&p).len(), 1);
        assert!(g.contains(&t("0", "p", Term::literal("y"))));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn term() -> impl Strategy<Value = Term> {
            prop_oneof![
                (0u8..5).prop_map(|i| Term::iri(format!("http://x/{i}"))),
                (0u8..3).prop_map(|i| Term::literal(format!("v{i}"))),
            ]
        }

        fn triple() -> impl Strategy<Value = Triple> {
            (0u8..5, 0u8..3, term()).prop_map(|(s, p, o)| t(&s.to_string(), &format!("p{p}"), o))
        }

        proptest! {
            #[test]
            fn match_agrees_with_scan(triples in proptest::collection::vec(triple(), 0..40),
                                      s in proptest::option::of(0u8..5),
                                      p in proptest::option::of(0u8..3),
                                      o in proptest::option::of(term())) {
                let g: Graph = triples.into_iter().collect();
                let pat = Pattern::new(
                    s.map(|s| Term::iri(format!("http://x/{s}"))),
                    p.map(|p| Term::iri(format!("http://x/p{p}"))),
                    o,
                );
                let fast: Vec<&Triple> = g.match_pattern(&pat);
                let slow: Vec<&Triple> = g.iter().filter(|t| pat.matches(t)).collect();
                prop_assert_eq!(fast, slow);
                prop_assert_eq!(g.match_pattern(&Pattern::default()).len(), g.len());
            }
        }
    }
}
