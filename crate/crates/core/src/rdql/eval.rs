use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::Serialize;

use super::{ExpandedQuery, IriRef, PatternTerm, TriplePattern};
use crate::graph::{Graph, Pattern, Term};

/// Query result: one column per output variable, rows sorted and distinct.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BindingTable {
    pub columns: Vec<String>,
    #[serde(serialize_with = "rows_as_nt")]
    pub rows: Vec<Vec<Term>>,
}

fn rows_as_nt<S: serde::Serializer>(rows: &[Vec<Term>], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(rows.len()))?;
    for row in rows {
        let cells: Vec<String> = row.iter().map(Term::to_nt).collect();
        seq.serialize_element(&cells)?;
    }
    seq.end()
}

impl BindingTable {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Header of `?name` cells, then one N-Triples term per cell.
    pub fn to_tsv(&self) -> String {
        let mut out = self
            .columns
            .iter()
            .map(|c| format!("?{c}"))
            .collect::<Vec<_>>()
            .join("\t");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Term::to_nt).collect();
            let _ = writeln!(out, "{}", cells.join("\t"));
        }
        out
    }
}

enum Slot {
    Fixed(Term),
    Var(usize),
}

fn compile(term: &PatternTerm, vars: &[&str]) -> Slot {
    match term {
        PatternTerm::Var(v) => Slot::Var(vars.iter().position(|x| x == v).expect("collected above")),
        PatternTerm::Iri(IriRef::Absolute(iri)) => Slot::Fixed(Term::iri(iri)),
        // Expansion leaves no prefixed names behind; keep the text so it can
        // only match an identical IRI.
        PatternTerm::Iri(IriRef::Prefixed { prefix, local }) => Slot::Fixed(Term::iri(format!("{prefix}:{local}"))),
        PatternTerm::Literal { text, lang } => Slot::Fixed(Term::Literal {
            text: text.clone(),
            lang: lang.clone(),
        }),
    }
}

fn join<'g>(
    graph: &'g Graph,
    patterns: &[[Slot; 3]],
    binding: &mut Vec<Option<&'g Term>>,
    out: &mut Vec<Vec<&'g Term>>,
) {
    let Some((first, rest)) = patterns.split_first() else {
        out.push(binding.iter().map(|b| b.expect("every variable occurs in a pattern")).collect());
        return;
    };
    let bound = |slot: &Slot, binding: &[Option<&Term>]| match slot {
        Slot::Fixed(t) => Some(t.clone()),
        Slot::Var(i) => binding[*i].cloned(),
    };
    let pattern = Pattern::new(
        bound(&first[0], binding),
        bound(&first[1], binding),
        bound(&first[2], binding),
    );
    for triple in graph.match_pattern(&pattern) {
        let mut newly = Vec::new();
        let mut consistent = true;
        for (slot, term) in first.iter().zip(triple.terms()) {
            if let Slot::Var(i) = slot {
                match binding[*i] {
                    None => {
                        binding[*i] = Some(term);
                        newly.push(*i);
                    }
                    Some(existing) if existing != term => {
                        consistent = false;
                        break;
                    }
                    Some(_) => {}
                }
            }
        }
        if consistent {
            join(graph, rest, binding, out);
        }
        for i in newly {
            binding[i] = None;
        }
    }
}

/// Evaluates a conjunctive query by left-to-right nested-loop join.
pub fn evaluate(query: &ExpandedQuery, graph: &Graph) -> BindingTable {
    let vars = query.variables();
    let compiled: Vec<[Slot; 3]> = query
        .patterns
        .iter()
        .map(|p: &TriplePattern| {
            [
                compile(&p.subject, &vars),
                compile(&p.predicate, &vars),
                compile(&p.object, &vars),
            ]
        })
        .collect();
    let mut solutions = Vec::new();
    join(graph, &compiled, &mut vec![None; vars.len()], &mut solutions);

    let columns: Vec<String> = query.columns().into_iter().map(String::from).collect();
    let projection: Vec<usize> = columns
        .iter()
        .map(|c| vars.iter().position(|v| v == c).expect("checked at parse time"))
        .collect();
    let rows: BTreeSet<Vec<Term>> = solutions
        .into_iter()
        .map(|s| projection.iter().map(|&i| s[i].clone()).collect())
        .collect();
    BindingTable {
        columns,
        rows: rows.into_iter().collect(),
    }
}
