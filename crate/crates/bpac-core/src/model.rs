//! Typed representation of a BPA canvas.
//!
//! A [`Canvas`] aggregates the artifacts produced while analysing one
//! business process: the signature, the narrative texts, the AAO matrix,
//! the glossary and the OPAAL lexicon. All types are immutable after
//! construction and may be shared freely across threads.
//!
//! Constructors enforce local, syntactic invariants (term spelling,
//! non-empty bodies, no self-links). Cross-artifact rules such as category
//! disjointness or glossary coverage are representable here and reported
//! by the `consistency` module instead, so that a partially edited canvas
//! can still be loaded and inspected.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// Validation failures raised by the model constructors.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("term surface is empty")]
    EmptySurface,
    #[error("term {0:?} contains characters other than letters and digits")]
    InvalidCharacters(String),
    #[error("action {0:?} is not a gerund phrase (every verb must end in \"ing\")")]
    InvalidAction(String),
    #[error("narrative body is empty")]
    EmptyBody,
    #[error("user story is missing its story id")]
    MissingStoryId,
    #[error("story id {0:?} may only contain letters, digits, '-' and '_'")]
    InvalidStoryId(String),
    #[error("glossary entry for {0} has an empty description")]
    EmptyDescription(String),
    #[error("glossary entry for {term} lists duplicate or self synonym {synonym:?}")]
    BadSynonym { term: String, synonym: String },
    #[error("link from {0} to itself is not allowed")]
    SelfLink(String),
    #[error("duplicate owner {owner} on attribute {attr}")]
    DuplicateOwner { attr: String, owner: String },
    #[error("the first AAO row must carry an explicit actor")]
    ImplicitFirstActor,
}

// ---------------------------------------------------------------------------
// Terms
// ---------------------------------------------------------------------------

/// A canonical domain term in UpperCamelCase, e.g. `DeliveryBoy`.
///
/// Two ids are equal when their canonical texts match case-insensitively;
/// ordering and hashing follow the same folding. `Display` renders the
/// canonical spelling.
#[derive(Clone)]
pub struct TermId {
    canonical: String,
    folded: String,
}

impl TermId {
    /// Accepts an already-canonical spelling: non-empty, leading uppercase
    /// letter, letters and digits only.
    pub fn new(canonical: &str) -> Result<TermId, ModelError> {
        if canonical.is_empty() {
            return Err(ModelError::EmptySurface);
        }
        let mut chars = canonical.chars();
        let first = chars.next().expect("non-empty");
        if !(first.is_alphabetic() && first.is_uppercase()) {
            return Err(ModelError::InvalidCharacters(canonical.to_string()));
        }
        if !canonical.chars().all(|c| c.is_alphanumeric()) {
            return Err(ModelError::InvalidCharacters(canonical.to_string()));
        }
        Ok(TermId {
            canonical: canonical.to_string(),
            folded: canonical.to_lowercase(),
        })
    }

    pub fn as_str(&self) -> &str {
        &self.canonical
    }

    /// Case-folded form used for equality and ordering.
    pub fn folded(&self) -> &str {
        &self.folded
    }

    /// Splits the canonical text at lowercase/digit-to-uppercase boundaries
    /// and lowercases the words: `DeliveryBoy` becomes `["delivery", "boy"]`.
    pub fn words(&self) -> Vec<String> {
        split_camel_words(&self.canonical)
    }

    /// The same spelling with a leading lowercase letter, used for
    /// ontology property names: `PlacingOrder` becomes `placingOrder`.
    pub fn lower_camel(&self) -> String {
        let mut chars = self.canonical.chars();
        match chars.next() {
            Some(first) => first.to_lowercase().collect::<String>() + chars.as_str(),
            None => String::new(),
        }
    }
}

impl fmt::Display for TermId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical)
    }
}

impl fmt::Debug for TermId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TermId({})", self.canonical)
    }
}

impl PartialEq for TermId {
    fn eq(&self, other: &Self) -> bool {
        self.folded == other.folded
    }
}

impl Eq for TermId {}

impl PartialOrd for TermId {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for TermId {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.folded.cmp(&other.folded)
    }
}

impl std::hash::Hash for TermId {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.folded.hash(state);
    }
}

fn split_camel_words(canonical: &str) -> Vec<String> {
    let mut words = Vec::new();
    let mut current = String::new();
    let mut prev_lower_or_digit = false;
    for c in canonical.chars() {
        if c.is_uppercase() && prev_lower_or_digit && !current.is_empty() {
            words.push(current.to_lowercase());
            current = String::new();
        }
        prev_lower_or_digit = c.is_lowercase() || c.is_numeric();
        current.push(c);
    }
    if !current.is_empty() {
        words.push(current.to_lowercase());
    }
    words
}

/// Normalises an arbitrary surface form into a [`TermId`].
///
/// The surface is split on whitespace, hyphens, underscores and camelCase
/// boundaries; each word is capitalised and the words are concatenated.
/// Idempotent on spellings that are already canonical.
pub fn canonicalize(surface: &str) -> Result<TermId, ModelError> {
    let trimmed = surface.trim();
    if trimmed.is_empty() {
        return Err(ModelError::EmptySurface);
    }
    let mut out = String::new();
    for token in trimmed.split(|c: char| c.is_whitespace() || c == '-' || c == '_') {
        if token.is_empty() {
            continue;
        }
        if !token.chars().all(|c| c.is_alphanumeric()) {
            return Err(ModelError::InvalidCharacters(surface.trim().to_string()));
        }
        for word in split_camel_chunks(token) {
            let mut chars = word.chars();
            if let Some(first) = chars.next() {
                out.extend(first.to_uppercase());
                out.push_str(chars.as_str());
            }
        }
    }
    TermId::new(&out).map_err(|_| ModelError::InvalidCharacters(surface.trim().to_string()))
}

/// Lowercased words of an arbitrary surface form, split on whitespace,
/// hyphens, underscores and camelCase boundaries. `"ProducingDough"` and
/// `"producing dough"` both yield `["producing", "dough"]`.
pub fn surface_words(surface: &str) -> Vec<String> {
    surface
        .split(|c: char| c.is_whitespace() || c == '-' || c == '_')
        .filter(|t| !t.is_empty())
        .flat_map(split_camel_words)
        .collect()
}

/// CamelCase split that keeps the original casing of each chunk.
fn split_camel_chunks(token: &str) -> Vec<String> {
    let mut chunks = Vec::new();
    let mut current = String::new();
    let mut prev_lower_or_digit = false;
    for c in token.chars() {
        if c.is_uppercase() && prev_lower_or_digit && !current.is_empty() {
            chunks.push(current);
            current = String::new();
        }
        prev_lower_or_digit = c.is_lowercase() || c.is_numeric();
        current.push(c);
    }
    if !current.is_empty() {
        chunks.push(current);
    }
    chunks
}

// ---------------------------------------------------------------------------
// Canvas sections
// ---------------------------------------------------------------------------

/// Tabular synopsis of the business process under analysis.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BpSignature {
    pub name: String,
    pub trigger: String,
    pub key_actors: Vec<TermId>,
    pub key_objects: Vec<TermId>,
    pub input: String,
    pub objective: String,
    pub output: String,
}

impl BpSignature {
    /// Number of the seven signature fields that carry a value.
    pub fn filled_fields(&self) -> usize {
        [
            !self.name.is_empty(),
            !self.trigger.is_empty(),
            !self.key_actors.is_empty(),
            !self.key_objects.is_empty(),
            !self.input.is_empty(),
            !self.objective.is_empty(),
            !self.output.is_empty(),
        ]
        .iter()
        .filter(|b| **b)
        .count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NarrativeKind {
    Statement,
    UserStory,
}

/// A free-text artifact: the process statement or one user story.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NarrativeText {
    pub kind: NarrativeKind,
    pub story_id: Option<String>,
    pub body: String,
}

impl NarrativeText {
    pub fn statement(body: impl Into<String>) -> Result<NarrativeText, ModelError> {
        let body = body.into();
        if body.trim().is_empty() {
            return Err(ModelError::EmptyBody);
        }
        Ok(NarrativeText {
            kind: NarrativeKind::Statement,
            story_id: None,
            body,
        })
    }

    pub fn user_story(
        story_id: impl Into<String>,
        body: impl Into<String>,
    ) -> Result<NarrativeText, ModelError> {
        let story_id = story_id.into();
        let body = body.into();
        if story_id.is_empty() {
            return Err(ModelError::MissingStoryId);
        }
        if !story_id
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
        {
            return Err(ModelError::InvalidStoryId(story_id));
        }
        if body.trim().is_empty() {
            return Err(ModelError::EmptyBody);
        }
        Ok(NarrativeText {
            kind: NarrativeKind::UserStory,
            story_id: Some(story_id),
            body,
        })
    }
}

/// One row of the AAO matrix: who does what, yielding which result.
///
/// `explicit_actor` is false when the actor column was blank in the stored
/// matrix and the value was inherited from the preceding row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AaoTriple {
    pub actor: TermId,
    pub action: String,
    pub outcome: TermId,
    pub explicit_actor: bool,
}

impl AaoTriple {
    pub fn new(
        actor: TermId,
        action: &str,
        outcome: TermId,
        explicit_actor: bool,
    ) -> Result<AaoTriple, ModelError> {
        let action = action.trim().to_lowercase();
        if !is_gerund_phrase(&action) {
            return Err(ModelError::InvalidAction(action));
        }
        Ok(AaoTriple {
            actor,
            action,
            outcome,
            explicit_actor,
        })
    }

    /// The gerunds of the action, e.g. `"filling and submitting"` yields
    /// `["filling", "submitting"]`.
    pub fn gerunds(&self) -> Vec<&str> {
        self.action.split_whitespace().filter(|w| *w != "and").collect()
    }
}

/// Actions are gerund phrases: one or more "-ing" words joined by "and".
pub fn is_gerund_phrase(action: &str) -> bool {
    let words: Vec<&str> = action.split_whitespace().collect();
    if words.is_empty() || words.first() == Some(&"and") || words.last() == Some(&"and") {
        return false;
    }
    words
        .iter()
        .all(|w| *w == "and" || (w.len() > 3 && w.ends_with("ing") && w.chars().all(char::is_alphanumeric)))
}

/// The ordered AAO matrix. The first row always names its actor.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AaoMatrix {
    pub rows: Vec<AaoTriple>,
}

impl AaoMatrix {
    pub fn new(rows: Vec<AaoTriple>) -> Result<AaoMatrix, ModelError> {
        if let Some(first) = rows.first() {
            if !first.explicit_actor {
                return Err(ModelError::ImplicitFirstActor);
            }
        }
        Ok(AaoMatrix { rows })
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// A described term, optionally with synonyms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlossaryEntry {
    pub term: TermId,
    pub synonyms: Vec<String>,
    pub description: String,
}

impl GlossaryEntry {
    pub fn new(
        term: TermId,
        synonyms: Vec<String>,
        description: impl Into<String>,
    ) -> Result<GlossaryEntry, ModelError> {
        let description = description.into();
        if description.trim().is_empty() {
            return Err(ModelError::EmptyDescription(term.to_string()));
        }
        let mut seen = BTreeSet::new();
        for synonym in &synonyms {
            let folded = synonym.to_lowercase();
            if folded == term.folded() {
                return Err(ModelError::BadSynonym {
                    term: term.to_string(),
                    synonym: synonym.clone(),
                });
            }
            if !seen.insert(folded) {
                return Err(ModelError::BadSynonym {
                    term: term.to_string(),
                    synonym: synonym.clone(),
                });
            }
        }
        Ok(GlossaryEntry {
            term,
            synonyms,
            description,
        })
    }
}

// ---------------------------------------------------------------------------
// OPAAL lexicon
// ---------------------------------------------------------------------------

/// The four term categories of the lexicon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Category {
    Object,
    Process,
    Actor,
    Attribute,
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Category::Object => "Object",
            Category::Process => "Process",
            Category::Actor => "Actor",
            Category::Attribute => "Attribute",
        };
        f.write_str(s)
    }
}

/// Kind of a lexicon link.
///
/// `Isa` and `PartOf` are structural; `Functional` carries the process term
/// naming the action, e.g. `PlacingOrder`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LinkKind {
    Isa,
    PartOf,
    Functional(TermId),
}

/// A directed relation between two terms.
///
/// Direction is significant: `X isa Y` makes X the more specific term,
/// `X partof Y` makes X a component of Y, and functional links point from
/// the acting actor to the acted-on entity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Link {
    pub kind: LinkKind,
    pub source: TermId,
    pub target: TermId,
}

impl Link {
    pub fn new(kind: LinkKind, source: TermId, target: TermId) -> Result<Link, ModelError> {
        if source == target {
            return Err(ModelError::SelfLink(source.to_string()));
        }
        Ok(Link {
            kind,
            source,
            target,
        })
    }
}

/// An attribute term together with the terms that own it. Unowned
/// attributes are legal; generators skip them and the validator warns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeDecl {
    pub attr: TermId,
    pub owners: Vec<TermId>,
}

impl AttributeDecl {
    pub fn new(attr: TermId, owners: Vec<TermId>) -> Result<AttributeDecl, ModelError> {
        let mut seen = BTreeSet::new();
        for owner in &owners {
            if !seen.insert(owner.clone()) {
                return Err(ModelError::DuplicateOwner {
                    attr: attr.to_string(),
                    owner: owner.to_string(),
                });
            }
        }
        Ok(AttributeDecl { attr, owners })
    }
}

/// Categorised terminology of the analysed domain.
///
/// The category sets are expected to be pairwise disjoint and every link
/// endpoint an actor or object; violations are representable and reported
/// as diagnostics by the validator rather than rejected here.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OpaalLexicon {
    pub objects: BTreeSet<TermId>,
    pub processes: BTreeSet<TermId>,
    pub actors: BTreeSet<TermId>,
    pub attributes: Vec<AttributeDecl>,
    pub links: Vec<Link>,
}

impl OpaalLexicon {
    /// The unique category containing `term`, if any. When the disjointness
    /// rule is violated the first category in Object, Process, Actor,
    /// Attribute order wins, keeping the result a function.
    pub fn category_of(&self, term: &TermId) -> Option<Category> {
        if self.objects.contains(term) {
            Some(Category::Object)
        } else if self.processes.contains(term) {
            Some(Category::Process)
        } else if self.actors.contains(term) {
            Some(Category::Actor)
        } else if self.attributes.iter().any(|a| &a.attr == term) {
            Some(Category::Attribute)
        } else {
            None
        }
    }

    pub fn is_actor(&self, term: &TermId) -> bool {
        self.actors.contains(term)
    }

    pub fn is_object(&self, term: &TermId) -> bool {
        self.objects.contains(term)
    }

    pub fn is_process(&self, term: &TermId) -> bool {
        self.processes.contains(term)
    }

    /// All category members, attribute terms included.
    pub fn all_terms(&self) -> BTreeSet<TermId> {
        let mut terms: BTreeSet<TermId> = BTreeSet::new();
        terms.extend(self.objects.iter().cloned());
        terms.extend(self.processes.iter().cloned());
        terms.extend(self.actors.iter().cloned());
        terms.extend(self.attributes.iter().map(|a| a.attr.clone()));
        terms
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
            && self.processes.is_empty()
            && self.actors.is_empty()
            && self.attributes.is_empty()
            && self.links.is_empty()
    }
}

/// The complete canvas for one business process.
///
/// `statement` is absent while the analyst has not written one yet; the
/// validator reports the gap as a warning.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Canvas {
    pub signature: BpSignature,
    pub statement: Option<NarrativeText>,
    pub stories: Vec<NarrativeText>,
    pub aao: AaoMatrix,
    pub glossary: Vec<GlossaryEntry>,
    pub lexicon: OpaalLexicon,
}

// ---------------------------------------------------------------------------
// Source locations
// ---------------------------------------------------------------------------

/// Line positions of canvas elements inside their stored files, collected
/// by the parser so that the validator can anchor its diagnostics.
///
/// A default (empty) map is valid for canvases built in memory; lookups
/// then fall back to line 0, meaning "whole file".
#[derive(Debug, Clone, Default)]
pub struct SourceMap {
    pub signature_keys: BTreeMap<String, u32>,
    pub category_decls: BTreeMap<(Category, TermId), u32>,
    pub attribute_lines: Vec<u32>,
    pub link_lines: Vec<u32>,
    pub glossary_lines: Vec<u32>,
    pub aao_lines: Vec<u32>,
}

impl SourceMap {
    pub fn signature_key(&self, key: &str) -> u32 {
        self.signature_keys.get(key).copied().unwrap_or(0)
    }

    pub fn category_decl(&self, category: Category, term: &TermId) -> u32 {
        self.category_decls
            .get(&(category, term.clone()))
            .copied()
            .unwrap_or(0)
    }

    pub fn attribute(&self, index: usize) -> u32 {
        self.attribute_lines.get(index).copied().unwrap_or(0)
    }

    pub fn link(&self, index: usize) -> u32 {
        self.link_lines.get(index).copied().unwrap_or(0)
    }

    pub fn glossary(&self, index: usize) -> u32 {
        self.glossary_lines.get(index).copied().unwrap_or(0)
    }

    pub fn aao(&self, index: usize) -> u32 {
        self.aao_lines.get(index).copied().unwrap_or(0)
    }
}
