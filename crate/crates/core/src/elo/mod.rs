//! The eLearning Object information model and its metadata acquisition rules.
//!
//! An [`Elo`] pairs paragraph content (and optionally an authored slide) with a
//! conformal subset of LOM metadata. Most metadata is generated from the content
//! and from technical facts ([`autogen_metadata`]); seven fields must be supplied
//! by the author before an object is publishable ([`validate_for_publication`]).

mod vocab;

use std::fmt;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ids::EloId;
use crate::xml;

pub use vocab::VocabField;

/// Maximum length of a generated description, in characters.
pub const DESCRIPTION_LIMIT: usize = 500;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EloError {
    #[error("paragraph body is not well-formed XML: {0}")]
    MalformedBody(String),
    #[error("slide body is not well-formed XML: {0}")]
    MalformedSlide(String),
    #[error("no sectional titles or headwords to derive a slide from")]
    EmptySource,
    #[error("{0}: invalid vocabulary value")]
    Vocab(String),
    #[error("invalid ELO: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ParagraphContent {
    pub title: String,
    pub headwords: Vec<String>,
    pub sectional_titles: Vec<String>,
    /// Well-formed XML fragment.
    pub body: String,
}

impl ParagraphContent {
    pub fn validate(&self) -> Result<(), EloError> {
        if self.title.trim().is_empty() {
            return Err(EloError::Invalid("paragraph title is empty".into()));
        }
        xml::check_fragment(&self.body).map_err(EloError::MalformedBody)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SlideContent {
    pub title: String,
    pub bullets: Vec<String>,
    pub body: Option<String>,
}

impl SlideContent {
    pub fn validate(&self) -> Result<(), EloError> {
        let body = self.body.as_deref().unwrap_or_default();
        if self.bullets.is_empty() && body.trim().is_empty() {
            return Err(EloError::Invalid("slide has neither bullets nor body".into()));
        }
        xml::check_fragment(body).map_err(EloError::MalformedSlide)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Technical {
    /// Media type, e.g. `text/xml`.
    pub format: String,
    pub size: u64,
    pub location: String,
    pub created: NaiveDate,
    pub modified: NaiveDate,
}

/// Technical facts provided by the store when generating metadata.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TechFacts {
    pub technical: Technical,
    pub aggregation_level: u8,
}

/// LOM subset. Unset fields are `None` (or empty lists), never empty strings.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LomMetadata {
    pub title: Option<String>,
    pub description: Option<String>,
    pub keywords: Vec<String>,
    pub coverage: Vec<String>,
    pub language: Option<String>,
    pub structure: Option<String>,
    pub aggregation_level: Option<u8>,
    pub technical: Option<Technical>,
    pub author: Option<String>,
    pub document_status: Option<String>,
    pub semantic_density: Option<String>,
    pub difficulty: Option<String>,
    pub context: Option<String>,
    pub learning_resource_type: Option<String>,
    pub intended_end_user_role: Option<String>,
}

impl LomMetadata {
    pub fn vocab(&self, field: VocabField) -> Option<&str> {
        match field {
            VocabField::Structure => self.structure.as_deref(),
            VocabField::DocumentStatus => self.document_status.as_deref(),
            VocabField::SemanticDensity => self.semantic_density.as_deref(),
            VocabField::Difficulty => self.difficulty.as_deref(),
            VocabField::Context => self.context.as_deref(),
            VocabField::LearningResourceType => self.learning_resource_type.as_deref(),
            VocabField::IntendedEndUserRole => self.intended_end_user_role.as_deref(),
        }
    }

    fn vocab_mut(&mut self, field: VocabField) -> &mut Option<String> {
        match field {
            VocabField::Structure => &mut self.structure,
            VocabField::DocumentStatus => &mut self.document_status,
            VocabField::SemanticDensity => &mut self.semantic_density,
            VocabField::Difficulty => &mut self.difficulty,
            VocabField::Context => &mut self.context,
            VocabField::LearningResourceType => &mut self.learning_resource_type,
            VocabField::IntendedEndUserRole => &mut self.intended_end_user_role,
        }
    }

    /// Sets a vocabulary field, normalizing empty strings to unset.
    pub fn set_vocab(&mut self, field: VocabField, value: Option<String>) {
        *self.vocab_mut(field) = value.filter(|v| !v.is_empty());
    }

    fn obligatory_is_set(&self, field: ObligatoryField) -> bool {
        match field.vocab() {
            None => !self.keywords.is_empty(),
            Some(v) => self.vocab(v).is_some(),
        }
    }
}

/// Reference identifiers into the repository registries.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct References {
    pub glossary: Vec<String>,
    pub bibliography: Vec<String>,
    pub taxonomy: Vec<String>,
    pub person: Vec<String>,
}

impl References {
    pub fn is_empty(&self) -> bool {
        self.glossary.is_empty()
            && self.bibliography.is_empty()
            && self.taxonomy.is_empty()
            && self.person.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Elo {
    pub id: EloId,
    pub metadata: LomMetadata,
    pub paragraph: ParagraphContent,
    pub slide: Option<SlideContent>,
    pub refs: References,
}

impl Elo {
    pub fn new(id: EloId, paragraph: ParagraphContent) -> Self {
        Self {
            id,
            metadata: LomMetadata::default(),
            paragraph,
            slide: None,
            refs: References::default(),
        }
    }

    /// Structural validity required for storage; publishability is checked
    /// separately by [`validate_for_publication`].
    pub fn check_structure(&self) -> Result<(), EloError> {
        self.paragraph.validate()?;
        if let Some(slide) = &self.slide {
            slide.validate()?;
        }
        if let Some(level) = self.metadata.aggregation_level {
            if !(1..=4).contains(&level) {
                return Err(EloError::Invalid(format!("aggregationLevel {level} not in 1..4")));
            }
        }
        if let Some(t) = &self.metadata.technical {
            if t.modified < t.created {
                return Err(EloError::Invalid("modified date precedes created date".into()));
            }
        }
        Ok(())
    }
}

/// The seven fields an author must provide before publication.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ObligatoryField {
    Keywords,
    SemanticDensity,
    Difficulty,
    Context,
    LearningResourceType,
    Structure,
    DocumentStatus,
}

impl ObligatoryField {
    pub const ALL: [ObligatoryField; 7] = [
        ObligatoryField::Keywords,
        ObligatoryField::SemanticDensity,
        ObligatoryField::Difficulty,
        ObligatoryField::Context,
        ObligatoryField::LearningResourceType,
        ObligatoryField::Structure,
        ObligatoryField::DocumentStatus,
    ];

    pub fn name(self) -> &'static str {
        match self.vocab() {
            Some(v) => v.name(),
            None => "keywords",
        }
    }

    pub fn vocab(self) -> Option<VocabField> {
        match self {
            ObligatoryField::Keywords => None,
            ObligatoryField::SemanticDensity => Some(VocabField::SemanticDensity),
            ObligatoryField::Difficulty => Some(VocabField::Difficulty),
            ObligatoryField::Context => Some(VocabField::Context),
            ObligatoryField::LearningResourceType => Some(VocabField::LearningResourceType),
            ObligatoryField::Structure => Some(VocabField::Structure),
            ObligatoryField::DocumentStatus => Some(VocabField::DocumentStatus),
        }
    }
}

impl fmt::Display for ObligatoryField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Partial record of the seven obligatory fields; `None` leaves a field alone.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ObligatoryFields {
    pub keywords: Option<Vec<String>>,
    pub semantic_density: Option<String>,
    pub difficulty: Option<String>,
    pub context: Option<String>,
    pub learning_resource_type: Option<String>,
    pub structure: Option<String>,
    pub document_status: Option<String>,
}

impl ObligatoryFields {
    fn vocab_entries(&self) -> [(VocabField, Option<&String>); 6] {
        [
            (VocabField::SemanticDensity, self.semantic_density.as_ref()),
            (VocabField::Difficulty, self.difficulty.as_ref()),
            (VocabField::Context, self.context.as_ref()),
            (VocabField::LearningResourceType, self.learning_resource_type.as_ref()),
            (VocabField::Structure, self.structure.as_ref()),
            (VocabField::DocumentStatus, self.document_status.as_ref()),
        ]
    }
}

/// Per-author defaults applied by [`autogen_metadata`].
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct AuthorPresets {
    pub language: Option<String>,
    pub intended_end_user_role: Option<String>,
    pub context: Option<String>,
    /// Last-used values of the seven obligatory fields.
    pub obligatory: ObligatoryFields,
}

impl AuthorPresets {
    pub fn validate(&self) -> Result<(), EloError> {
        if let Some(role) = &self.intended_end_user_role {
            check_vocab(VocabField::IntendedEndUserRole, role)?;
        }
        if let Some(ctx) = &self.context {
            check_vocab(VocabField::Context, ctx)?;
        }
        if let Some(lang) = &self.language {
            if !is_language_tag(lang) {
                return Err(EloError::Invalid(format!("language tag {lang:?}")));
            }
        }
        for (field, value) in self.obligatory.vocab_entries() {
            if let Some(value) = value {
                check_vocab(field, value)?;
            }
        }
        Ok(())
    }
}

fn check_vocab(field: VocabField, value: &str) -> Result<(), EloError> {
    if field.is_valid(value) {
        Ok(())
    } else {
        Err(EloError::Vocab(field.name().to_string()))
    }
}

/// BCP-47-style tag: a 2–8 letter primary subtag and alphanumeric subtags.
pub fn is_language_tag(tag: &str) -> bool {
    let mut parts = tag.split('-');
    let primary_ok = parts
        .next()
        .is_some_and(|p| (2..=8).contains(&p.len()) && p.chars().all(|c| c.is_ascii_alphabetic()));
    primary_ok && parts.all(|p| (1..=8).contains(&p.len()) && p.chars().all(|c| c.is_ascii_alphanumeric()))
}

/// Generates the metadata record for a paragraph.
///
/// Title and coverage come from the paragraph's title and sectional titles; the
/// description is the first paragraph-level text block of the body with markup
/// stripped, whitespace collapsed and the result cut at a word boundary within
/// [`DESCRIPTION_LIMIT`] characters. Obligatory fields are taken from the presets
/// when present.
pub fn autogen_metadata(
    paragraph: &ParagraphContent,
    tech: &TechFacts,
    author: &str,
    presets: &AuthorPresets,
) -> Result<LomMetadata, EloError> {
    let description = first_text_block(&paragraph.body)?;
    if tech.technical.modified < tech.technical.created {
        return Err(EloError::Invalid("modified date precedes created date".into()));
    }
    if !(1..=4).contains(&tech.aggregation_level) {
        return Err(EloError::Invalid(format!(
            "aggregationLevel {} not in 1..4",
            tech.aggregation_level
        )));
    }

    let mut meta = LomMetadata {
        title: non_empty(paragraph.title.clone()),
        description: non_empty(truncate_at_word(&description, DESCRIPTION_LIMIT)),
        coverage: paragraph.sectional_titles.clone(),
        language: presets.language.clone(),
        aggregation_level: Some(tech.aggregation_level),
        technical: Some(tech.technical.clone()),
        author: non_empty(author.to_string()),
        intended_end_user_role: presets.intended_end_user_role.clone(),
        context: presets.context.clone(),
        ..LomMetadata::default()
    };
    // Obligatory presets are copied as given; validation reports bad values.
    let ob = &presets.obligatory;
    if let Some(k) = &ob.keywords {
        meta.keywords = k.clone();
    }
    for (field, value) in ob.vocab_entries() {
        if let Some(value) = value {
            meta.set_vocab(field, Some(value.clone()));
        }
    }
    Ok(meta)
}

fn non_empty(s: String) -> Option<String> {
    (!s.is_empty()).then_some(s)
}

/// Text of the first `<p>`/`<para>` element of a body, or of the whole body
/// when it has none, whitespace-normalized.
pub(crate) fn first_text_block(body: &str) -> Result<String, EloError> {
    let wrapped = xml::wrap_fragment(body);
    let doc = xml::parse(&wrapped).map_err(|e| EloError::MalformedBody(e.to_string()))?;
    let root = doc.root_element();
    let block = root
        .descendants()
        .find(|n| n.is_element() && matches!(n.tag_name().name(), "p" | "para"))
        .unwrap_or(root);
    Ok(xml::normalize_ws(&xml::text_content(block)))
}

/// Cuts `text` to at most `limit` characters, ending on a word boundary when
/// one exists inside the limit.
pub fn truncate_at_word(text: &str, limit: usize) -> String {
    let Some((cut, _)) = text.char_indices().nth(limit) else {
        return text.to_string();
    };
    if text[cut..].starts_with(char::is_whitespace) {
        return text[..cut].trim_end().to_string();
    }
    match text[..cut].rfind(char::is_whitespace) {
        Some(space) => text[..space].trim_end().to_string(),
        None => text[..cut].to_string(),
    }
}

/// One problem found by [`validate_for_publication`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValidationIssue {
    Missing(&'static str),
    InvalidVocabulary(&'static str),
    Invalid { field: &'static str, reason: String },
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationIssue::Missing(field) => f.write_str(field),
            ValidationIssue::InvalidVocabulary(field) => {
                write!(f, "{field}: invalid vocabulary value")
            }
            ValidationIssue::Invalid { field, reason } => write!(f, "{field}: {reason}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub issues: Vec<ValidationIssue>,
}

impl ValidationReport {
    pub fn is_publishable(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn messages(&self) -> Vec<String> {
        self.issues.iter().map(ToString::to_string).collect()
    }
}

/// Lists the unset obligatory fields and every invalid value in the record.
pub fn validate_for_publication(elo: &Elo) -> ValidationReport {
    let meta = &elo.metadata;
    let mut issues = Vec::new();
    for field in ObligatoryField::ALL {
        match field.vocab() {
            Some(v) if meta.vocab(v).is_some_and(|value| !v.is_valid(value)) => {
                issues.push(ValidationIssue::InvalidVocabulary(v.name()));
            }
            _ if !meta.obligatory_is_set(field) => issues.push(ValidationIssue::Missing(field.name())),
            _ => {}
        }
    }
    let role = VocabField::IntendedEndUserRole;
    if meta.vocab(role).is_some_and(|value| !role.is_valid(value)) {
        issues.push(ValidationIssue::InvalidVocabulary(role.name()));
    }
    if let Some(lang) = &meta.language {
        if !is_language_tag(lang) {
            issues.push(ValidationIssue::Invalid {
                field: "language",
                reason: "invalid language tag".into(),
            });
        }
    }
    if let Some(level) = meta.aggregation_level {
        if !(1..=4).contains(&level) {
            issues.push(ValidationIssue::Invalid {
                field: "aggregationLevel",
                reason: "out of range".into(),
            });
        }
    }
    if let Some(t) = &meta.technical {
        if t.modified < t.created {
            issues.push(ValidationIssue::Invalid {
                field: "modified",
                reason: "precedes created".into(),
            });
        }
    }
    ValidationReport { issues }
}

/// Builds the "standard" slide from the paragraph's descriptive strings.
pub fn derive_standard_slide(paragraph: &ParagraphContent) -> Result<SlideContent, EloError> {
    let bullets = if !paragraph.sectional_titles.is_empty() {
        paragraph.sectional_titles.clone()
    } else if !paragraph.headwords.is_empty() {
        paragraph.headwords.clone()
    } else {
        return Err(EloError::EmptySource);
    };
    Ok(SlideContent {
        title: paragraph.title.clone(),
        bullets,
        body: None,
    })
}

/// Replaces the supplied obligatory fields, leaving everything else untouched.
pub fn set_obligatory_fields(
    meta: &LomMetadata,
    fields: &ObligatoryFields,
) -> Result<LomMetadata, EloError> {
    for (field, value) in fields.vocab_entries() {
        if let Some(value) = value {
            check_vocab(field, value)?;
        }
    }
    let mut out = meta.clone();
    if let Some(k) = &fields.keywords {
        out.keywords = k.iter().filter(|k| !k.is_empty()).cloned().collect();
    }
    for (field, value) in fields.vocab_entries() {
        if let Some(value) = value {
            out.set_vocab(field, Some(value.clone()));
        }
    }
    Ok(out)
}
