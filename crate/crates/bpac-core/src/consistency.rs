//! Alignment checks across the canvas artifacts.
//!
//! The analysis spiral keeps the signature, AAO matrix, glossary and
//! lexicon in step; [`check`] evaluates the full rule catalog over a
//! parsed canvas and reports every violation as a diagnostic with a
//! stable code.
//!
//! Errors:
//!
//! - E001 AAO actor term not in the Actor category
//! - E002 link endpoint categories outside Actor/Object, or a functional
//!   link whose source is not an actor
//! - E003 ISA link between terms of different categories
//! - E004 functional link label not in the Process category
//! - E005 cycle in the ISA graph
//! - E006 cycle in the partOf graph
//! - E007 duplicate canonical term across the glossary (duplicates inside
//!   one lexicon category are caught at parse time)
//! - E008 term present in two OPAAL categories
//! - E009 lexicon term absent from the glossary
//! - E010 attribute owner not an Object or Actor term
//!
//! Warnings:
//!
//! - W001 glossary term unused by lexicon, AAO or signature
//! - W002 signature key actor/object categorised differently in the lexicon
//! - W003 AAO action not traceable to any Process term
//! - W004 AAO outcome outside the Object and Actor categories
//! - W005 attribute with no owner
//! - W010 missing statement, W011 empty AAO matrix
//!
//! `check` is pure and deterministic: equal canvases yield byte-equal
//! sorted reports.

use std::collections::{BTreeMap, BTreeSet};

use crate::diagnostics::{self, Diagnostic};
use crate::io::{
    empty_aao_warning, missing_statement_warning, AAO_FILE, GLOSSARY_FILE, LEXICON_FILE,
    SIGNATURE_FILE,
};
use crate::model::{
    surface_words, Canvas, Category, Link, LinkKind, OpaalLexicon, SourceMap, TermId,
};

/// The outcome of a [`check`] run: sorted diagnostics plus per-code hit
/// counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleReport {
    pub diagnostics: Vec<Diagnostic>,
    pub stats: BTreeMap<String, usize>,
}

impl RuleReport {
    fn new(mut diagnostics: Vec<Diagnostic>) -> RuleReport {
        diagnostics::sort_and_dedup(&mut diagnostics);
        let stats = diagnostics::stats(&diagnostics);
        RuleReport { diagnostics, stats }
    }

    pub fn has_errors(&self) -> bool {
        diagnostics::has_errors(&self.diagnostics)
    }
}

/// Runs the whole rule catalog over `canvas`.
///
/// `sources` anchors diagnostics to the lines the offending elements came
/// from; pass a default map for canvases built in memory (lines fall back
/// to 0).
pub fn check(canvas: &Canvas, sources: &SourceMap) -> RuleReport {
    let mut out = Vec::new();
    check_structure(canvas, &mut out);
    check_aao(canvas, sources, &mut out);
    check_links(&canvas.lexicon, sources, &mut out);
    check_cycles(&canvas.lexicon, sources, &mut out);
    check_categories(&canvas.lexicon, sources, &mut out);
    check_glossary(canvas, sources, &mut out);
    check_attributes(&canvas.lexicon, sources, &mut out);
    check_signature(canvas, sources, &mut out);
    RuleReport::new(out)
}

fn check_structure(canvas: &Canvas, out: &mut Vec<Diagnostic>) {
    if canvas.statement.is_none() {
        out.push(missing_statement_warning());
    }
    if canvas.aao.is_empty() {
        out.push(empty_aao_warning());
    }
}

fn check_aao(canvas: &Canvas, sources: &SourceMap, out: &mut Vec<Diagnostic>) {
    let lexicon = &canvas.lexicon;
    let traceable_words = process_word_index(canvas);
    for (i, row) in canvas.aao.rows.iter().enumerate() {
        let line = sources.aao(i);
        if !lexicon.is_actor(&row.actor) {
            out.push(Diagnostic::error(
                "E001",
                AAO_FILE,
                line,
                format!("AAO actor {} is not in the Actor category", row.actor),
            ));
        }
        if !row
            .gerunds()
            .iter()
            .any(|g| traceable_words.contains(&g.to_lowercase()))
        {
            out.push(Diagnostic::warning(
                "W003",
                AAO_FILE,
                line,
                format!(
                    "action {:?} is not traceable to any Process term",
                    row.action
                ),
            ));
        }
        if !lexicon.is_object(&row.outcome) && !lexicon.is_actor(&row.outcome) {
            out.push(Diagnostic::warning(
                "W004",
                AAO_FILE,
                line,
                format!(
                    "AAO outcome {} is not in the Object or Actor category",
                    row.outcome
                ),
            ));
        }
    }
}

/// Words an AAO action gerund may match: the camelCase-split words of
/// every Process term, plus the words of glossary synonyms attached to
/// Process terms (which is how variant verbs like "baking" for `Cooking`
/// stay traceable).
fn process_word_index(canvas: &Canvas) -> BTreeSet<String> {
    let mut words = BTreeSet::new();
    for process in &canvas.lexicon.processes {
        words.extend(process.words());
    }
    for entry in &canvas.glossary {
        if canvas.lexicon.is_process(&entry.term) {
            for synonym in &entry.synonyms {
                words.extend(surface_words(synonym));
            }
        }
    }
    words
}

fn check_links(lexicon: &OpaalLexicon, sources: &SourceMap, out: &mut Vec<Diagnostic>) {
    for (i, link) in lexicon.links.iter().enumerate() {
        let line = sources.link(i);
        let source_ok = lexicon.is_actor(&link.source) || lexicon.is_object(&link.source);
        let target_ok = lexicon.is_actor(&link.target) || lexicon.is_object(&link.target);
        if !(source_ok && target_ok) {
            out.push(Diagnostic::error(
                "E002",
                LEXICON_FILE,
                line,
                format!(
                    "link {} -> {} must connect Actor or Object terms",
                    link.source, link.target
                ),
            ));
        } else {
            match &link.kind {
                LinkKind::Isa => {
                    let s = lexicon.category_of(&link.source);
                    let t = lexicon.category_of(&link.target);
                    if s != t {
                        out.push(Diagnostic::error(
                            "E003",
                            LEXICON_FILE,
                            line,
                            format!(
                                "ISA link {} -> {} connects terms of different categories",
                                link.source, link.target
                            ),
                        ));
                    }
                }
                LinkKind::PartOf => {}
                LinkKind::Functional(_) => {
                    if !lexicon.is_actor(&link.source) {
                        out.push(Diagnostic::error(
                            "E002",
                            LEXICON_FILE,
                            line,
                            format!(
                                "functional link {} -> {} must originate at an Actor",
                                link.source, link.target
                            ),
                        ));
                    }
                }
            }
        }
        if let LinkKind::Functional(label) = &link.kind {
            if !lexicon.is_process(label) {
                out.push(Diagnostic::error(
                    "E004",
                    LEXICON_FILE,
                    line,
                    format!("functional link label {label} is not in the Process category"),
                ));
            }
        }
    }
}

fn check_cycles(lexicon: &OpaalLexicon, sources: &SourceMap, out: &mut Vec<Diagnostic>) {
    for (kind, code, name) in [
        (LinkKind::Isa, "E005", "ISA"),
        (LinkKind::PartOf, "E006", "partOf"),
    ] {
        let edges: Vec<(&Link, u32)> = lexicon
            .links
            .iter()
            .enumerate()
            .filter(|(_, l)| l.kind == kind)
            .map(|(i, l)| (l, sources.link(i)))
            .collect();
        for cycle in cycles(&edges) {
            let members = cycle
                .terms
                .iter()
                .map(TermId::as_str)
                .collect::<Vec<_>>()
                .join(", ");
            out.push(Diagnostic::error(
                code,
                LEXICON_FILE,
                cycle.line,
                format!("{name} cycle involving {members}"),
            ));
        }
    }
}

struct Cycle {
    terms: Vec<TermId>,
    line: u32,
}

/// One entry per cycle among `edges`, anchored at the smallest source
/// line among the edges inside the cycle.
fn cycles(edges: &[(&Link, u32)]) -> Vec<Cycle> {
    let pairs: Vec<(TermId, TermId)> = edges
        .iter()
        .map(|(l, _)| (l.source.clone(), l.target.clone()))
        .collect();
    crate::graph::cycle_components(&pairs)
        .into_iter()
        .map(|terms| {
            let member_set: BTreeSet<&TermId> = terms.iter().collect();
            let line = edges
                .iter()
                .filter(|(l, _)| {
                    member_set.contains(&l.source) && member_set.contains(&l.target)
                })
                .map(|(_, line)| *line)
                .min()
                .unwrap_or(0);
            Cycle { terms, line }
        })
        .collect()
}

fn check_categories(lexicon: &OpaalLexicon, sources: &SourceMap, out: &mut Vec<Diagnostic>) {
    let sets: [(Category, BTreeSet<TermId>); 4] = [
        (Category::Object, lexicon.objects.clone()),
        (Category::Process, lexicon.processes.clone()),
        (Category::Actor, lexicon.actors.clone()),
        (
            Category::Attribute,
            lexicon.attributes.iter().map(|a| a.attr.clone()).collect(),
        ),
    ];
    for i in 0..sets.len() {
        for j in (i + 1)..sets.len() {
            let (cat_a, set_a) = &sets[i];
            let (cat_b, set_b) = &sets[j];
            for term in set_a.intersection(set_b) {
                let line = sources
                    .category_decl(*cat_a, term)
                    .max(sources.category_decl(*cat_b, term));
                out.push(Diagnostic::error(
                    "E008",
                    LEXICON_FILE,
                    line,
                    format!("term {term} appears in both the {cat_a} and {cat_b} categories"),
                ));
            }
        }
    }
}

fn check_glossary(canvas: &Canvas, sources: &SourceMap, out: &mut Vec<Diagnostic>) {
    let lexicon = &canvas.lexicon;
    let glossary_terms: BTreeSet<TermId> =
        canvas.glossary.iter().map(|e| e.term.clone()).collect();

    // E007: the same canonical term described twice.
    let mut seen: BTreeSet<TermId> = BTreeSet::new();
    for (i, entry) in canvas.glossary.iter().enumerate() {
        if !seen.insert(entry.term.clone()) {
            out.push(Diagnostic::error(
                "E007",
                GLOSSARY_FILE,
                sources.glossary(i),
                format!("duplicate glossary term {}", entry.term),
            ));
        }
    }

    // E009: every lexicon term needs a glossary entry, which in turn
    // guarantees that every label on a generated diagram is described.
    for term in lexicon.all_terms() {
        if !glossary_terms.contains(&term) {
            let category = lexicon
                .category_of(&term)
                .expect("term drawn from the category sets");
            out.push(Diagnostic::error(
                "E009",
                LEXICON_FILE,
                sources.category_decl(category, &term),
                format!("lexicon term {term} has no glossary entry"),
            ));
        }
    }

    // W001: a described term nothing refers to.
    let mut used: BTreeSet<TermId> = lexicon.all_terms();
    for link in &lexicon.links {
        used.insert(link.source.clone());
        used.insert(link.target.clone());
        if let LinkKind::Functional(label) = &link.kind {
            used.insert(label.clone());
        }
    }
    for row in &canvas.aao.rows {
        used.insert(row.actor.clone());
        used.insert(row.outcome.clone());
    }
    used.extend(canvas.signature.key_actors.iter().cloned());
    used.extend(canvas.signature.key_objects.iter().cloned());
    for (i, entry) in canvas.glossary.iter().enumerate() {
        if !used.contains(&entry.term) {
            out.push(Diagnostic::warning(
                "W001",
                GLOSSARY_FILE,
                sources.glossary(i),
                format!("glossary term {} is not used by lexicon, AAO or signature", entry.term),
            ));
        }
    }
}

fn check_attributes(lexicon: &OpaalLexicon, sources: &SourceMap, out: &mut Vec<Diagnostic>) {
    for (i, attr) in lexicon.attributes.iter().enumerate() {
        let line = sources.attribute(i);
        if attr.owners.is_empty() {
            out.push(Diagnostic::warning(
                "W005",
                LEXICON_FILE,
                line,
                format!("attribute {} has no owner and will be skipped by generators", attr.attr),
            ));
        }
        for owner in &attr.owners {
            if !lexicon.is_object(owner) && !lexicon.is_actor(owner) {
                out.push(Diagnostic::error(
                    "E010",
                    LEXICON_FILE,
                    line,
                    format!(
                        "attribute {} owner {owner} is not an Object or Actor term",
                        attr.attr
                    ),
                ));
            }
        }
    }
}

/// W002 flags signature terms the lexicon has categorised differently;
/// terms the lexicon does not know at all are left alone, since the
/// signature is written before the lexicon exists.
fn check_signature(canvas: &Canvas, sources: &SourceMap, out: &mut Vec<Diagnostic>) {
    let lexicon = &canvas.lexicon;
    let mut check_list = |terms: &[TermId], key: &str, want: Category| {
        for term in terms {
            if let Some(actual) = lexicon.category_of(term) {
                if actual != want {
                    out.push(Diagnostic::warning(
                        "W002",
                        SIGNATURE_FILE,
                        sources.signature_key(key),
                        format!("signature {key} term {term} is categorised as {actual} in the lexicon"),
                    ));
                }
            }
        }
    };
    check_list(&canvas.signature.key_actors, "key-actors", Category::Actor);
    check_list(&canvas.signature.key_objects, "key-objects", Category::Object);
}

/// Renders a report in the plain-text line format `LEVEL CODE file:line
/// message`, one diagnostic per line.
pub fn render_text(diagnostics: &[Diagnostic]) -> String {
    let mut out = String::new();
    for d in diagnostics {
        out.push_str(&d.to_string());
        out.push('\n');
    }
    out
}

/// Structured single-document rendering, used by `--format json`.
pub fn render_json(diagnostics: &[Diagnostic]) -> String {
    diagnostics::to_json(diagnostics)
}
