use super::lexer::{syntax_error, tokenize, Spanned, Tok};
use super::{IriRef, PatternTerm, PrefixBinding, Query, QueryError, Select, TriplePattern};
use crate::ns;

struct Parser<'a> {
    src: &'a str,
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.src.len(), |s| s.offset)
    }

    fn error(&self, message: impl Into<String>) -> QueryError {
        syntax_error(self.src, self.offset(), message)
    }

    fn unexpected(&self, wanted: &str) -> QueryError {
        match self.peek() {
            Some(t) => self.error(format!("expected {wanted}, found {}", t.describe())),
            None => self.error(format!("expected {wanted}, found end of query")),
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &Tok, wanted: &str) -> Result<(), QueryError> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.unexpected(wanted))
        }
    }

    fn query(&mut self) -> Result<Query, QueryError> {
        self.expect(&Tok::Select, "SELECT")?;
        let select = if self.eat(&Tok::Star) {
            Select::Star
        } else {
            let mut vars = Vec::new();
            while let Some(Tok::Var(v)) = self.peek() {
                vars.push(v.clone());
                self.pos += 1;
                if matches!(self.toks.get(self.pos + 1).map(|s| &s.tok), Some(Tok::Var(_))) {
                    self.eat(&Tok::Comma);
                }
            }
            if vars.is_empty() {
                return Err(self.unexpected("'*' or a variable"));
            }
            Select::Vars(vars)
        };
        self.expect(&Tok::Where, "WHERE")?;

        let mut patterns = vec![self.pattern()?];
        loop {
            let comma = self.eat(&Tok::Comma);
            if self.peek() == Some(&Tok::LParen) {
                patterns.push(self.pattern()?);
            } else if comma {
                return Err(self.unexpected("'('"));
            } else {
                break;
            }
        }

        let mut prefixes = Vec::new();
        if self.eat(&Tok::Using) {
            loop {
                prefixes.push(self.binding()?);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        if self.peek().is_some() {
            return Err(self.unexpected("end of query"));
        }
        Ok(Query {
            select,
            patterns,
            prefixes,
        })
    }

    fn pattern(&mut self) -> Result<TriplePattern, QueryError> {
        self.expect(&Tok::LParen, "'(' to open a triple pattern")?;
        let subject = self.term()?;
        self.expect(&Tok::Comma, "','")?;
        let predicate = self.term()?;
        self.expect(&Tok::Comma, "','")?;
        let object = self.term()?;
        self.expect(&Tok::RParen, "')' to close the triple pattern")?;
        Ok(TriplePattern {
            subject,
            predicate,
            object,
        })
    }

    fn term(&mut self) -> Result<PatternTerm, QueryError> {
        let term = match self.peek() {
            Some(Tok::Var(v)) => PatternTerm::Var(v.clone()),
            Some(Tok::Str { text, lang }) => PatternTerm::Literal {
                text: text.clone(),
                lang: lang.clone(),
            },
            Some(Tok::Angle(body)) => PatternTerm::Iri(self.iri_ref(body)?),
            _ => return Err(self.unexpected("a variable, <IRI> or string literal")),
        };
        self.pos += 1;
        Ok(term)
    }

    fn iri_ref(&self, body: &str) -> Result<IriRef, QueryError> {
        if body.contains("://") {
            return Ok(IriRef::Absolute(body.to_string()));
        }
        match body.split_once(':') {
            Some((prefix, local))
                if !prefix.is_empty()
                    && prefix.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                    && prefix.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') =>
            {
                Ok(IriRef::Prefixed {
                    prefix: prefix.to_string(),
                    local: local.to_string(),
                })
            }
            _ => Err(self.error(format!("<{body}> is neither a prefixed name nor an absolute IRI"))),
        }
    }

    fn binding(&mut self) -> Result<PrefixBinding, QueryError> {
        let name = match self.peek() {
            Some(Tok::Ident(n)) => n.clone(),
            _ => return Err(self.unexpected("a prefix name")),
        };
        self.pos += 1;
        self.expect(&Tok::For, "FOR")?;
        let iri = match self.peek() {
            Some(Tok::Angle(body)) if ns::is_absolute_iri(body) => body.clone(),
            Some(Tok::Angle(body)) => return Err(self.error(format!("<{body}> is not an absolute IRI"))),
            _ => return Err(self.unexpected("<absolute IRI>")),
        };
        self.pos += 1;
        Ok(PrefixBinding { name, iri })
    }
}

/// Parses query text into an AST. Prefixed names are kept as written; see
/// [`Query::expand`].
pub fn parse(text: &str) -> Result<Query, QueryError> {
    let mut p = Parser {
        src: text,
        toks: tokenize(text)?,
        pos: 0,
    };
    let q = p.query()?;
    q.check()?;
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::super::tests::BG_QUERY;
    use super::*;

    fn syntax(text: &str) -> String {
        match parse(text) {
            Err(QueryError::Syntax { message, .. }) => message,
            other => panic!("expected syntax error for {text:?}, got {other:?}"),
        }
    }

    #[test]
    fn verbatim_context_query() {
        let q = parse(BG_QUERY).unwrap();
        assert_eq!(q.select, Select::Star);
        assert_eq!(q.patterns.len(), 1);
        assert_eq!(q.patterns[0].subject, PatternTerm::Var("link".into()));
        assert_eq!(
            q.patterns[0].predicate,
            PatternTerm::Iri(IriRef::Prefixed {
                prefix: "rdf".into(),
                local: "predicate".into()
            })
        );
        assert_eq!(
            q.patterns[0].object,
            PatternTerm::Iri(IriRef::Prefixed {
                prefix: "mir".into(),
                local: "BackgroundInfo".into()
            })
        );
        assert_eq!(q.prefixes.len(), 2);
    }

    #[test]
    fn named_select() {
        let q = parse("SELECT ?x WHERE (?x, <rdf:type>, <mir:ELO>) USING rdf FOR <http://www.w3.org/1999/02/22-rdf-syntax-ns#>, mir FOR <http://www.rz.fhtw-berlin.de/MIR#>").unwrap();
        assert_eq!(q.select, Select::Vars(vec!["x".into()]));
        assert_eq!(q.patterns.len(), 1);
    }

    #[test]
    fn keywords_are_case_insensitive_and_separators_flexible() {
        let q = parse("select ?a, ?b where (?a, <http://x/p>, ?b), (?b, <http://x/q>, \"v\") (?a, ?p, ?b)").unwrap();
        assert_eq!(q.patterns.len(), 3);
        assert_eq!(q.select, Select::Vars(vec!["a".into(), "b".into()]));
    }

    #[test]
    fn syntax_errors() {
        assert!(syntax("SELECT * (?a,?b,?c)").contains("WHERE"));
        assert!(syntax("SELECT * WHERE").contains("'('"));
        assert!(syntax("SELECT * WHERE (?a, ?b, ?c").contains("')'"));
        assert!(syntax("SELECT * WHERE (?a, ?b)").contains("','"));
        assert!(syntax("SELECT * WHERE (?a, <rdf:type, ?c)").contains("'<'"));
        assert!(syntax("SELECT WHERE").contains("variable"));
        assert!(syntax("SELECT * WHERE (?a, <predicate>, ?c)").contains("prefixed"));
        assert!(syntax("SELECT * WHERE (?a, ?b, ?c) USING rdf FOR <rdf>").contains("absolute"));
        assert!(syntax("SELECT * WHERE (?a, ?b, ?c) extra").contains("end of query"));
    }

    #[test]
    fn error_positions() {
        match parse("SELECT *\n  (?a, ?b, ?c)") {
            Err(QueryError::Syntax { line, column, .. }) => assert_eq!((line, column), (2, 3)),
            other => panic!("{other:?}"),
        }
    }
}
