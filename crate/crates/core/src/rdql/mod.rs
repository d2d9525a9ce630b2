//! A small RDQL dialect: conjunctive triple patterns with prefix bindings.
//!
//! ```text
//! query   := "SELECT" ("*" | var+) "WHERE" pattern+ ["USING" binding ("," binding)*]
//! pattern := "(" term "," term "," term ")"
//! binding := name "FOR" "<" absolute-iri ">"
//! term    := var | "<" (prefixed-name | absolute-iri) ">" | quoted-literal ["@" lang]
//! ```
//!
//! Keywords are case-insensitive. Inside angle brackets a token containing
//! `://` is an absolute IRI; anything else is a prefixed name resolved against
//! the query's own `USING` table. Constraint clauses (`AND`) and optional
//! patterns are not supported.

mod eval;
mod lexer;
mod parser;

use std::fmt;
use std::ops::Deref;

use thiserror::Error;

pub use eval::{evaluate, BindingTable};
pub use parser::parse;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        offset: usize,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown prefix {0:?}")]
    UnknownPrefix(String),
    #[error("prefix {0:?} bound twice")]
    DuplicatePrefix(String),
    #[error("selected variable ?{0} does not occur in any pattern")]
    UnboundSelect(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Select {
    Star,
    Vars(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IriRef {
    Prefixed { prefix: String, local: String },
    Absolute(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PatternTerm {
    Var(String),
    Iri(IriRef),
    Literal { text: String, lang: Option<String> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriplePattern {
    pub subject: PatternTerm,
    pub predicate: PatternTerm,
    pub object: PatternTerm,
}

impl TriplePattern {
    pub fn terms(&self) -> [&PatternTerm; 3] {
        [&self.subject, &self.predicate, &self.object]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixBinding {
    pub name: String,
    pub iri: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub select: Select,
    pub patterns: Vec<TriplePattern>,
    pub prefixes: Vec<PrefixBinding>,
}

impl Query {
    /// Variables in order of first occurrence across the patterns.
    pub fn variables(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for p in &self.patterns {
            for t in p.terms() {
                if let PatternTerm::Var(v) = t {
                    if !out.contains(&v.as_str()) {
                        out.push(v);
                    }
                }
            }
        }
        out
    }

    /// Output columns: the selected variables, or every variable for `*`.
    pub fn columns(&self) -> Vec<&str> {
        match &self.select {
            Select::Star => self.variables(),
            Select::Vars(vs) => vs.iter().map(String::as_str).collect(),
        }
    }

    pub(crate) fn check(&self) -> Result<(), QueryError> {
        let vars = self.variables();
        if let Select::Vars(vs) = &self.select {
            if let Some(v) = vs.iter().find(|v| !vars.contains(&v.as_str())) {
                return Err(QueryError::UnboundSelect(v.clone()));
            }
        }
        for (i, p) in self.prefixes.iter().enumerate() {
            if self.prefixes[..i].iter().any(|q| q.name == p.name) {
                return Err(QueryError::DuplicatePrefix(p.name.clone()));
            }
        }
        Ok(())
    }

    /// Resolves every prefixed name against the `USING` table.
    pub fn expand(&self) -> Result<ExpandedQuery, QueryError> {
        let resolve = |t: &PatternTerm| -> Result<PatternTerm, QueryError> {
            match t {
                PatternTerm::Iri(IriRef::Prefixed { prefix, local }) => {
                    let base = self
                        .prefixes
                        .iter()
                        .find(|b| &b.name == prefix)
                        .ok_or_else(|| QueryError::UnknownPrefix(prefix.clone()))?;
                    Ok(PatternTerm::Iri(IriRef::Absolute(format!("{}{}", base.iri, local))))
                }
                other => Ok(other.clone()),
            }
        };
        let patterns = self
            .patterns
            .iter()
            .map(|p| {
                Ok(TriplePattern {
                    subject: resolve(&p.subject)?,
                    predicate: resolve(&p.predicate)?,
                    object: resolve(&p.object)?,
                })
            })
            .collect::<Result<_, QueryError>>()?;
        Ok(ExpandedQuery(Query {
            select: self.select.clone(),
            patterns,
            prefixes: self.prefixes.clone(),
        }))
    }
}

/// A query whose IRIs are all absolute.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpandedQuery(Query);

impl Deref for ExpandedQuery {
    type Target = Query;

    fn deref(&self) -> &Query {
        &self.0
    }
}

impl ExpandedQuery {
    pub fn into_inner(self) -> Query {
        self.0
    }
}

/// Parses and expands in one step.
pub fn prepare(text: &str) -> Result<ExpandedQuery, QueryError> {
    parse(text)?.expand()
}

fn write_literal(f: &mut fmt::Formatter<'_>, text: &str, lang: Option<&str>) -> fmt::Result {
    f.write_str("\"")?;
    for c in text.chars() {
        match c {
            '"' => f.write_str("\\\"")?,
            '\\' => f.write_str("\\\\")?,
            '\n' => f.write_str("\\n")?,
            '\r' => f.write_str("\\r")?,
            '\t' => f.write_str("\\t")?,
            c => write!(f, "{c}")?,
        }
    }
    f.write_str("\"")?;
    if let Some(lang) = lang {
        write!(f, "@{lang}")?;
    }
    Ok(())
}

impl fmt::Display for PatternTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PatternTerm::Var(v) => write!(f, "?{v}"),
            PatternTerm::Iri(IriRef::Absolute(iri)) => write!(f, "<{iri}>"),
            PatternTerm::Iri(IriRef::Prefixed { prefix, local }) => write!(f, "<{prefix}:{local}>"),
            PatternTerm::Literal { text, lang } => write_literal(f, text, lang.as_deref()),
        }
    }
}

impl fmt::Display for TriplePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.subject, self.predicate, self.object)
    }
}

/// Canonical form; [`parse`] reads it back to an identical AST.
impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("SELECT")?;
        match &self.select {
            Select::Star => f.write_str(" *")?,
            Select::Vars(vs) => {
                for v in vs {
                    write!(f, " ?{v}")?;
                }
            }
        }
        f.write_str(" WHERE")?;
        for p in &self.patterns {
            write!(f, " {p}")?;
        }
        for (i, b) in self.prefixes.iter().enumerate() {
            let lead = if i == 0 { " USING " } else { ", " };
            write!(f, "{lead}{} FOR <{}>", b.name, b.iri)?;
        }
        Ok(())
    }
}
