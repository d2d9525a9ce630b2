//! Vocabulary tables for the closed LOM fields.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::LazyLock;

static TABLES: LazyLock<BTreeMap<String, Vec<String>>> = LazyLock::new(|| {
    toml::from_str(include_str!("vocab.toml")).expect("bundled vocab.toml is valid")
});

/// A metadata field whose values come from a closed vocabulary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VocabField {
    Structure,
    DocumentStatus,
    SemanticDensity,
    Difficulty,
    Context,
    LearningResourceType,
    IntendedEndUserRole,
}

impl VocabField {
    pub const ALL: [VocabField; 7] = [
        VocabField::Structure,
        VocabField::DocumentStatus,
        VocabField::SemanticDensity,
        VocabField::Difficulty,
        VocabField::Context,
        VocabField::LearningResourceType,
        VocabField::IntendedEndUserRole,
    ];

    /// LOM field name, also the key in the vocabulary table.
    pub fn name(self) -> &'static str {
        match self {
            VocabField::Structure => "structure",
            VocabField::DocumentStatus => "documentStatus",
            VocabField::SemanticDensity => "semanticDensity",
            VocabField::Difficulty => "difficulty",
            VocabField::Context => "context",
            VocabField::LearningResourceType => "learningResourceType",
            VocabField::IntendedEndUserRole => "intendedEndUserRole",
        }
    }

    pub fn values(self) -> &'static [String] {
        TABLES
            .get(self.name())
            .map(Vec::as_slice)
            .unwrap_or_default()
    }

    pub fn is_valid(self, value: &str) -> bool {
        self.values().iter().any(|v| v == value)
    }

    /// Position of `value` on the field's ordinal scale.
    pub fn rank(self, value: &str) -> Option<usize> {
        self.values().iter().position(|v| v == value)
    }
}

impl fmt::Display for VocabField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}
