//! Small helpers over `roxmltree` for embedded XML fragments.

use std::borrow::Cow;

use roxmltree::{Document, Node, ParsingOptions};

/// Synthetic element wrapped around content bodies so that fragments with
/// several top-level nodes parse as one document.
pub(crate) const FRAGMENT_ROOT: &str = "hylos-fragment";

pub(crate) fn wrap_fragment(body: &str) -> String {
    format!("<{FRAGMENT_ROOT}>{body}</{FRAGMENT_ROOT}>")
}

pub(crate) fn parse(text: &str) -> Result<Document<'_>, roxmltree::Error> {
    Document::parse_with_options(
        text,
        ParsingOptions {
            allow_dtd: true,
            ..ParsingOptions::default()
        },
    )
}

/// Well-formedness check for a content body.
pub fn check_fragment(body: &str) -> Result<(), String> {
    let wrapped = wrap_fragment(body);
    parse(&wrapped).map(|_| ()).map_err(|e| e.to_string())
}

/// Concatenated descendant text of `node`, in document order.
pub(crate) fn text_content(node: Node<'_, '_>) -> String {
    node.descendants()
        .filter(|n| n.is_text())
        .filter_map(|n| n.text())
        .collect()
}

/// Collapses runs of whitespace to single spaces and trims the ends.
pub(crate) fn normalize_ws(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

pub(crate) fn escape(s: &str) -> Cow<'_, str> {
    quick_xml::escape::escape(s)
}

/// Raw inner markup of an element, exactly as written in the source text.
pub(crate) fn inner_xml<'a>(source: &'a str, node: Node<'_, '_>) -> &'a str {
    match (node.first_child(), node.last_child()) {
        (Some(first), Some(last)) => &source[first.range().start..last.range().end],
        _ => "",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fragments() {
        assert!(check_fragment("<paragraph><p>x</p></paragraph>").is_ok());
        assert!(check_fragment("plain text").is_ok());
        assert!(check_fragment("<p>a</p><p>b</p>").is_ok());
        assert!(check_fragment("<p>unclosed").is_err());
        assert!(check_fragment("<p>a</q>").is_err());
    }

    #[test]
    fn inner_markup_is_verbatim() {
        let src = "<body><p a=\"1\">x &amp; y</p>\n<q/></body>";
        let doc = parse(src).unwrap();
        assert_eq!(inner_xml(src, doc.root_element()), "<p a=\"1\">x &amp; y</p>\n<q/>");
    }
}
