//! Core library of the BPA Canvas toolkit.
//!
//! A canvas is a directory of plain-text artifacts describing one business
//! process: a signature, a statement, user stories, an AAO matrix, a
//! glossary and an OPAAL lexicon. This crate provides:
//!
//! - the typed [`model`] those artifacts parse into,
//! - the directory [`io`] format with precise [`diagnostics`],
//! - rule-based candidate extraction from the narrative texts ([`mining`]),
//! - the alignment rule catalog ([`consistency`]),
//! - class-diagram generation and DOT output ([`diagram`]),
//! - ontology generation, Turtle output and structural checks
//!   ([`ontology`] and [`turtle`]).

pub mod consistency;
pub mod diagnostics;
pub mod diagram;
mod graph;
pub mod io;
pub mod mining;
pub mod model;
pub mod morphology;
pub mod ontology;
pub mod turtle;

pub use diagnostics::{Diagnostic, Level};
pub use model::{
    AaoMatrix, AaoTriple, AttributeDecl, BpSignature, Canvas, Category, GlossaryEntry, Link,
    LinkKind, NarrativeKind, NarrativeText, OpaalLexicon, SourceMap, TermId, canonicalize,
};
