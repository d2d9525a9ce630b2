//! Caller-supplied identifiers.
//!
//! Every entity in the engine is named by a slug matching `[a-z0-9-]+`. IRIs are
//! minted from slugs by [`crate::ns::IriMinter`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid identifier {0:?}: expected [a-z0-9-]+")]
pub struct InvalidId(pub String);

pub(crate) fn is_slug(s: &str) -> bool {
    !s.is_empty()
        && s
            .bytes()
            .all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'-')
}

macro_rules! slug_id {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(try_from = "String", into = "String")]
        pub struct $name(String);

        impl $name {
            pub fn new(s: impl Into<String>) -> Result<Self, InvalidId> {
                let s = s.into();
                if is_slug(&s) {
                    Ok(Self(s))
                } else {
                    Err(InvalidId(s))
                }
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl FromStr for $name {
            type Err = InvalidId;
            fn from_str(s: &str) -> Result<Self, InvalidId> {
                Self::new(s)
            }
        }

        impl TryFrom<String> for $name {
            type Error = InvalidId;
            fn try_from(s: String) -> Result<Self, InvalidId> {
                Self::new(s)
            }
        }

        impl From<$name> for String {
            fn from(id: $name) -> String {
                id.0
            }
        }

        impl AsRef<str> for $name {
            fn as_ref(&self) -> &str {
                &self.0
            }
        }
    };
}

slug_id!(
    /// Identifier of an eLearning object.
    EloId
);
slug_id!(
    /// Identifier of an anchor in the link base.
    AnchorId
);
slug_id!(
    /// Identifier of a link in the link base.
    LinkId
);
slug_id!(
    /// Identifier of a registered link context (the `rdf:about` of its definition).
    ContextId
);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slugs() {
        assert!(EloId::new("hamster-text").is_ok());
        assert!(EloId::new("a1").is_ok());
        assert!(EloId::new("").is_err());
        assert!(EloId::new("Hamster").is_err());
        assert!(EloId::new("a b").is_err());
        assert!(EloId::new("a/b").is_err());
    }

    #[test]
    fn serde_rejects_bad_slug() {
        let id = toml::from_str::<std::collections::BTreeMap<String, EloId>>("x = \"UP\"");
        assert!(id.is_err());
    }
}
