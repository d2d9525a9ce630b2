//! Absolute child-step selectors with an optional character range.
//!
//! Textual form: `/paragraph/section[2]@0+7` selects the second `section` child
//! of the top-level `paragraph` element, then characters `0..7` of its text
//! content. Positions are 1-based and default to 1.

use std::fmt;
use std::str::FromStr;

use roxmltree::Node;
use serde::Serialize;

use super::LinkBaseError;
use crate::xml;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Step {
    pub name: String,
    pub position: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct CharRange {
    pub start: usize,
    pub length: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Selector {
    pub steps: Vec<Step>,
    pub char_range: Option<CharRange>,
}

fn is_name(s: &str) -> bool {
    let mut chars = s.chars();
    chars
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
}

impl Selector {
    pub fn new(steps: Vec<Step>, char_range: Option<CharRange>) -> Result<Self, LinkBaseError> {
        let s = Self { steps, char_range };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), LinkBaseError> {
        let bad = |why: &str| Err(LinkBaseError::InvalidSelector(format!("{self}: {why}")));
        if self.steps.is_empty() {
            return bad("no steps");
        }
        for step in &self.steps {
            if !is_name(&step.name) {
                return bad("invalid element name");
            }
            if step.position == 0 {
                return bad("positions are 1-based");
            }
        }
        if self.char_range.is_some_and(|r| r.length == 0) {
            return bad("empty character range");
        }
        Ok(())
    }

    /// Locates the addressed element below the synthetic fragment root.
    pub(crate) fn locate<'a, 'i>(&self, fragment_root: Node<'a, 'i>) -> Result<Located<'a, 'i>, LinkBaseError> {
        let mut node = fragment_root;
        for step in &self.steps {
            node = node
                .children()
                .filter(|c| c.is_element() && c.tag_name().name() == step.name)
                .nth(step.position - 1)
                .ok_or_else(|| LinkBaseError::DanglingSelector(self.to_string()))?;
        }
        let text_len = xml::text_content(node).chars().count();
        let range = match self.char_range {
            None => None,
            Some(r) => {
                if r.start + r.length > text_len {
                    return Err(LinkBaseError::Range {
                        selector: self.to_string(),
                        text_len,
                    });
                }
                Some((r.start, r.start + r.length))
            }
        };
        Ok(Located { node, range })
    }
}

pub(crate) struct Located<'a, 'i> {
    pub node: Node<'a, 'i>,
    /// Character range within the element's text content.
    pub range: Option<(usize, usize)>,
}

impl fmt::Display for Selector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for step in &self.steps {
            write!(f, "/{}", step.name)?;
            if step.position != 1 {
                write!(f, "[{}]", step.position)?;
            }
        }
        if let Some(r) = self.char_range {
            write!(f, "@{}+{}", r.start, r.length)?;
        }
        Ok(())
    }
}

impl FromStr for Selector {
    type Err = LinkBaseError;

    fn from_str(s: &str) -> Result<Self, LinkBaseError> {
        let invalid = || LinkBaseError::InvalidSelector(s.to_string());
        let (path, range) = match s.split_once('@') {
            Some((p, r)) => (p, Some(r)),
            None => (s, None),
        };
        let path = path.strip_prefix('/').ok_or_else(invalid)?;
        let steps = path
            .split('/')
            .map(|seg| match seg.split_once('[') {
                None => Ok::<_, LinkBaseError>(Step {
                    name: seg.to_string(),
                    position: 1,
                }),
                Some((name, rest)) => {
                    let pos = rest.strip_suffix(']').ok_or_else(invalid)?;
                    Ok(Step {
                        name: name.to_string(),
                        position: pos.parse().map_err(|_| invalid())?,
                    })
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        let char_range = range
            .map(|r| {
                let (start, length) = r.split_once('+').ok_or_else(invalid)?;
                Ok::<_, LinkBaseError>(CharRange {
                    start: start.parse().map_err(|_| invalid())?,
                    length: length.parse().map_err(|_| invalid())?,
                })
            })
            .transpose()?;
        Selector::new(steps, char_range)
    }
}

/// The fragment addressed by a selector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FragmentSpan {
    /// Canonical element path, positions always explicit.
    pub element_path: String,
    pub text_range: Option<(usize, usize)>,
    /// The selected text: the character range, or the element's whole text.
    pub text: String,
}

/// Resolves `selector` against a content body.
pub fn resolve_selector(selector: &Selector, body: &str) -> Result<FragmentSpan, LinkBaseError> {
    let wrapped = xml::wrap_fragment(body);
    let doc = xml::parse(&wrapped).map_err(|e| LinkBaseError::MalformedBody(e.to_string()))?;
    let located = selector.locate(doc.root_element())?;
    let full = xml::text_content(located.node);
    let text = match located.range {
        Some((a, b)) => full.chars().skip(a).take(b - a).collect(),
        None => full,
    };
    let element_path = selector
        .steps
        .iter()
        .map(|s| format!("/{}[{}]", s.name, s.position))
        .collect();
    Ok(FragmentSpan {
        element_path,
        text_range: located.range,
        text,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        let s: Selector = "/paragraph/section[2]@0+7".parse().unwrap();
        assert_eq!(s.steps.len(), 2);
        assert_eq!(s.steps[1].position, 2);
        assert_eq!(s.char_range, Some(CharRange { start: 0, length: 7 }));
        assert_eq!(s.to_string(), "/paragraph/section[2]@0+7");
        let s: Selector = "/paragraph[1]/p".parse().unwrap();
        assert_eq!(s.to_string(), "/paragraph/p");
    }

    #[test]
    fn structural_errors() {
        for bad in ["", "paragraph", "/paragraph/section[0]", "/p@0+0", "/p[x]", "/p@3", "/1p", "/p//q"] {
            assert!(
                matches!(bad.parse::<Selector>(), Err(LinkBaseError::InvalidSelector(_))),
                "{bad}"
            );
        }
    }

    #[test]
    fn resolves_second_section() {
        let body = "<paragraph><section>one</section><section>two</section></paragraph>";
        let span = resolve_selector(&"/paragraph/section[2]".parse().unwrap(), body).unwrap();
        assert_eq!(span.text, "two");
        assert_eq!(span.element_path, "/paragraph[1]/section[2]");

        let empty = "<paragraph><section/><section/></paragraph>";
        let span = resolve_selector(&"/paragraph/section[2]".parse().unwrap(), empty).unwrap();
        assert_eq!(span.element_path, "/paragraph[1]/section[2]");
        assert_eq!(span.text, "");
    }

    #[test]
    fn dangling_and_range_errors() {
        let body = "<paragraph><section/><section/></paragraph>";
        assert!(matches!(
            resolve_selector(&"/paragraph/section[5]".parse().unwrap(), body),
            Err(LinkBaseError::DanglingSelector(_))
        ));
        let text = "<paragraph><p>Hamster diseases</p></paragraph>";
        let span = resolve_selector(&"/paragraph/p@0+7".parse().unwrap(), text).unwrap();
        assert_eq!(span.text, "Hamster");
        assert_eq!(span.text_range, Some((0, 7)));
        assert!(matches!(
            resolve_selector(&"/paragraph/p@10+7".parse().unwrap(), text),
            Err(LinkBaseError::Range { text_len: 16, .. })
        ));
    }

    #[test]
    fn positions_count_same_name_siblings_only() {
        let body = "<paragraph><p>a</p><section>s</section><p>b</p></paragraph>";
        let span = resolve_selector(&"/paragraph/p[2]".parse().unwrap(), body).unwrap();
        assert_eq!(span.text, "b");
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn selector() -> impl Strategy<Value = Selector> {
            (
                proptest::collection::vec(("[a-z][a-z0-9]{0,5}", 1usize..5), 1..4),
                proptest::option::of((0usize..20, 1usize..20)),
            )
                .prop_map(|(steps, r)| Selector {
                    steps: steps.into_iter().map(|(name, position)| Step { name, position }).collect(),
                    char_range: r.map(|(start, length)| CharRange { start, length }),
                })
        }

        proptest! {
            #[test]
            fn print_parse_round_trip(s in selector()) {
                prop_assert_eq!(s.to_string().parse::<Selector>().unwrap(), s);
            }

            #[test]
            fn resolution_is_a_function(s in selector(), n in 1usize..4) {
                let body = format!("<a>{}</a>", "<b>text</b>".repeat(n));
                let first = resolve_selector(&s, &body);
                prop_assert_eq!(first, resolve_selector(&s, &body));
            }
        }
    }
}
