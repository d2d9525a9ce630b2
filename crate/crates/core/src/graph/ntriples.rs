//! N-Triples reading and writing for the IRI/plain-literal subset.

use std::fmt::Write as _;

use thiserror::Error;

use super::{Graph, Term, Triple};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct NTriplesError {
    pub line: usize,
    pub message: String,
}

fn iri_needs_escape(c: char) -> bool {
    c <= ' ' || matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\')
}

pub(crate) fn iri_is_plain(iri: &str) -> bool {
    !iri.chars().any(iri_needs_escape)
}

pub(crate) fn write_term(term: &Term, out: &mut String) {
    match term {
        Term::Iri(iri) => {
            out.push('<');
            for c in iri.chars() {
                if iri_needs_escape(c) {
                    let _ = write!(out, "\\u{:04X}", c as u32);
                } else {
                    out.push(c);
                }
            }
            out.push('>');
        }
        Term::Literal { text, lang } => {
            out.push('"');
            for c in text.chars() {
                match c {
                    '\\' => out.push_str("\\\\"),
                    '"' => out.push_str("\\\""),
                    '\n' => out.push_str("\\n"),
                    '\r' => out.push_str("\\r"),
                    '\t' => out.push_str("\\t"),
                    c if (c as u32) < 0x20 || c == '\u{7f}' => {
                        let _ = write!(out, "\\u{:04X}", c as u32);
                    }
                    c => out.push(c),
                }
            }
            out.push('"');
            if let Some(lang) = lang {
                out.push('@');
                out.push_str(lang);
            }
        }
    }
}

/// One triple per line, each terminated by ` .`.
pub fn serialize<'a>(triples: impl IntoIterator<Item = &'a Triple>) -> String {
    let mut out = String::new();
    for t in triples {
        for term in t.terms() {
            write_term(term, &mut out);
            out.push(' ');
        }
        out.push_str(".\n");
    }
    out
}

struct Cursor<'a> {
    rest: &'a str,
    line: usize,
}

impl<'a> Cursor<'a> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T, NTriplesError> {
        Err(NTriplesError {
            line: self.line,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        self.rest = self.rest.trim_start_matches([' ', '\t']);
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.rest.chars().next()?;
        self.rest = &self.rest[c.len_utf8()..];
        Some(c)
    }

    fn escape(&mut self, allow_short: bool) -> Result<char, NTriplesError> {
        let Some(c) = self.bump() else {
            return self.err("dangling escape");
        };
        let hex = |cur: &mut Self, n: usize| -> Result<char, NTriplesError> {
            if cur.rest.len() < n || !cur.rest.is_char_boundary(n) {
                return cur.err("short unicode escape");
            }
            let (digits, rest) = cur.rest.split_at(n);
            cur.rest = rest;
            u32::from_str_radix(digits, 16)
                .ok()
                .and_then(char::from_u32)
                .map_or_else(|| cur.err("bad unicode escape"), Ok)
        };
        match c {
            'u' => hex(self, 4),
            'U' => hex(self, 8),
            't' if allow_short => Ok('\t'),
            'n' if allow_short => Ok('\n'),
            'r' if allow_short => Ok('\r'),
            'b' if allow_short => Ok('\u{8}'),
            'f' if allow_short => Ok('\u{c}'),
            '"' | '\'' | '\\' if allow_short => Ok(c),
            _ => self.err(format!("unknown escape \\{c}")),
        }
    }

    fn term(&mut self) -> Result<Term, NTriplesError> {
        self.skip_ws();
        match self.bump() {
            Some('<') => {
                let mut iri = String::new();
                loop {
                    match self.bump() {
                        None => return self.err("unterminated IRI"),
                        Some('>') => break,
                        Some('\\') => iri.push(self.escape(false)?),
                        Some(c) => iri.push(c),
                    }
                }
                Ok(Term::Iri(iri))
            }
            Some('"') => {
                let mut text = String::new();
                loop {
                    match self.bump() {
                        None => return self.err("unterminated literal"),
                        Some('"') => break,
                        Some('\\') => text.push(self.escape(true)?),
                        Some(c) => text.push(c),
                    }
                }
                let lang = if let Some(rest) = self.rest.strip_prefix('@') {
                    let end = rest
                        .find(|c: char| !(c.is_ascii_alphanumeric() || c == '-'))
                        .unwrap_or(rest.len());
                    if end == 0 {
                        return self.err("empty language tag");
                    }
                    self.rest = &rest[end..];
                    Some(rest[..end].to_string())
                } else if self.rest.starts_with("^^") {
                    return self.err("typed literals are not supported");
                } else {
                    None
                };
                Ok(Term::Literal { text, lang })
            }
            Some('_') => self.err("blank nodes are not supported"),
            _ => self.err("expected a term"),
        }
    }
}

/// Parses an N-Triples document into a graph.
pub fn parse(input: &str) -> Result<Graph, NTriplesError> {
    let mut triples = Vec::new();
    for (i, raw) in input.lines().enumerate() {
        let mut cur = Cursor { rest: raw, line: i + 1 };
        cur.skip_ws();
        if cur.rest.is_empty() || cur.rest.starts_with('#') {
            continue;
        }
        let s = cur.term()?;
        let p = cur.term()?;
        let o = cur.term()?;
        cur.skip_ws();
        if cur.bump() != Some('.') {
            return cur.err("expected '.'");
        }
        cur.skip_ws();
        if !(cur.rest.is_empty() || cur.rest.starts_with('#')) {
            return cur.err("trailing content");
        }
        match Triple::from_terms(s, p, o) {
            Some(t) => triples.push(t),
            None => return cur.err("subject and predicate must be IRIs"),
        }
    }
    Ok(triples.into_iter().collect())
}
