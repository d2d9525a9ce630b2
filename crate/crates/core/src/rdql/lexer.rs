use super::QueryError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(super) enum Tok {
    Select,
    Where,
    Using,
    For,
    Star,
    Comma,
    LParen,
    RParen,
    Var(String),
    Angle(String),
    Str { text: String, lang: Option<String> },
    Ident(String),
}

impl Tok {
    pub(super) fn describe(&self) -> String {
        match self {
            Tok::Select => "SELECT".into(),
            Tok::Where => "WHERE".into(),
            Tok::Using => "USING".into(),
            Tok::For => "FOR".into(),
            Tok::Star => "'*'".into(),
            Tok::Comma => "','".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Var(v) => format!("?{v}"),
            Tok::Angle(a) => format!("<{a}>"),
            Tok::Str { .. } => "string literal".into(),
            Tok::Ident(i) => format!("identifier {i:?}"),
        }
    }
}

#[derive(Debug, Clone)]
pub(super) struct Spanned {
    pub tok: Tok,
    pub offset: usize,
}

pub(super) fn syntax_error(src: &str, offset: usize, message: impl Into<String>) -> QueryError {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    QueryError::Syntax {
        offset,
        line,
        column,
        message: message.into(),
    }
}

fn is_word(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

pub(super) fn tokenize(src: &str) -> Result<Vec<Spanned>, QueryError> {
    let mut out = Vec::new();
    let mut chars = src.char_indices().peekable();
    while let Some(&(start, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        let simple = match c {
            '*' => Some(Tok::Star),
            ',' => Some(Tok::Comma),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(tok) = simple {
            chars.next();
            out.push(Spanned { tok, offset: start });
            continue;
        }
        let tok = match c {
            '?' => {
                chars.next();
                let mut name = String::new();
                while let Some(&(_, c)) = chars.peek().filter(|(_, c)| is_word(*c)) {
                    name.push(c);
                    chars.next();
                }
                if name.is_empty() {
                    return Err(syntax_error(src, start, "empty variable name"));
                }
                Tok::Var(name)
            }
            '<' => {
                chars.next();
                let mut body = String::new();
                loop {
                    match chars.next() {
                        Some((_, '>')) => break,
                        Some((at, c)) if c.is_whitespace() || c == '<' => {
                            return Err(syntax_error(src, at, "unterminated '<'"));
                        }
                        Some((_, c)) => body.push(c),
                        None => return Err(syntax_error(src, start, "unterminated '<'")),
                    }
                }
                if body.is_empty() {
                    return Err(syntax_error(src, start, "empty IRI reference"));
                }
                Tok::Angle(body)
            }
            '"' => {
                chars.next();
                let mut text = String::new();
                loop {
                    match chars.next() {
                        Some((_, '"')) => break,
                        Some((at, '\\')) => match chars.next() {
                            Some((_, 'n')) => text.push('\n'),
                            Some((_, 'r')) => text.push('\r'),
                            Some((_, 't')) => text.push('\t'),
                            Some((_, c @ ('"' | '\\'))) => text.push(c),
                            _ => return Err(syntax_error(src, at, "invalid escape in string")),
                        },
                        Some((_, c)) => text.push(c),
                        None => return Err(syntax_error(src, start, "unterminated string")),
                    }
                }
                let mut lang = None;
                if chars.peek().is_some_and(|(_, c)| *c == '@') {
                    chars.next();
                    let mut tag = String::new();
                    while let Some(&(_, c)) = chars.peek().filter(|(_, c)| c.is_ascii_alphanumeric() || *c == '-') {
                        tag.push(c);
                        chars.next();
                    }
                    if tag.is_empty() {
                        return Err(syntax_error(src, start, "empty language tag"));
                    }
                    lang = Some(tag);
                }
                Tok::Str { text, lang }
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut word = String::new();
                while let Some(&(_, c)) = chars.peek().filter(|(_, c)| is_word(*c) || *c == '-') {
                    word.push(c);
                    chars.next();
                }
                match word.to_ascii_uppercase().as_str() {
                    "SELECT" => Tok::Select,
                    "WHERE" => Tok::Where,
                    "USING" => Tok::Using,
                    "FOR" => Tok::For,
                    _ => Tok::Ident(word),
                }
            }
            other => return Err(syntax_error(src, start, format!("unexpected character {other:?}"))),
        };
        out.push(Spanned { tok, offset: start });
    }
    Ok(out)
}
