//! The on-disk canvas directory format.
//!
//! A canvas root holds line-oriented, diff-friendly text files so business
//! experts can edit every artifact in any editor:
//!
//! - `signature.bpac`   one `key: value` per line
//! - `statement.txt`    free text
//! - `stories/<id>.txt` one file per user story
//! - `aao.tsv`          tab-separated actor/action/outcome rows
//! - `glossary.tsv`     tab-separated term/synonyms/description rows
//! - `lexicon.bpac`     one lexicon directive per line
//!
//! Everything is UTF-8 with LF line endings; a trailing newline is written
//! and tolerated on read. Lines starting with `#` are comments in the
//! `.bpac` and `.tsv` files. Parsing reports malformed input as `E9xx`
//! diagnostics carrying file and line; a canvas value is produced whenever
//! no such fatal diagnostic occurred.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::diagnostics::{self, Diagnostic};
use crate::model::{
    canonicalize, AaoMatrix, AaoTriple, AttributeDecl, BpSignature, Canvas, Category,
    GlossaryEntry, Link, LinkKind, NarrativeText, OpaalLexicon, SourceMap, TermId,
};

pub const SIGNATURE_FILE: &str = "signature.bpac";
pub const STATEMENT_FILE: &str = "statement.txt";
pub const AAO_FILE: &str = "aao.tsv";
pub const GLOSSARY_FILE: &str = "glossary.tsv";
pub const LEXICON_FILE: &str = "lexicon.bpac";
pub const STORIES_DIR: &str = "stories";

const AAO_HEADER: &str = "actor\taction\toutcome";
const GLOSSARY_HEADER: &str = "term\tsynonyms\tdescription";
const SIGNATURE_KEYS: [&str; 7] = [
    "name",
    "trigger",
    "key-actors",
    "key-objects",
    "input",
    "objective",
    "output",
];

/// Failure writing a canvas or generated artifact to disk.
#[derive(Debug, Error)]
pub enum WriteError {
    #[error("failed to write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Outcome of [`parse_canvas`]: the canvas (absent after a fatal parse
/// error), all diagnostics, and the source locations of canvas elements
/// for later rule anchoring.
#[derive(Debug)]
pub struct ParseResult {
    pub canvas: Option<Canvas>,
    pub diagnostics: Vec<Diagnostic>,
    pub sources: SourceMap,
}

pub fn missing_statement_warning() -> Diagnostic {
    Diagnostic::warning("W010", STATEMENT_FILE, 0, "statement is missing")
}

pub fn empty_aao_warning() -> Diagnostic {
    Diagnostic::warning("W011", AAO_FILE, 0, "AAO matrix is empty")
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

struct Parser {
    root: PathBuf,
    diagnostics: Vec<Diagnostic>,
    sources: SourceMap,
}

/// Reads a canvas directory.
///
/// Missing optional files yield empty sections (with W010/W011 warnings
/// for the statement and the AAO matrix); malformed lines yield `E9xx`
/// errors with file and line. The returned diagnostics are sorted by
/// (file, line, code).
pub fn parse_canvas(root: &Path) -> ParseResult {
    let mut parser = Parser {
        root: root.to_path_buf(),
        diagnostics: Vec::new(),
        sources: SourceMap::default(),
    };

    let signature = parser.parse_signature();
    let statement = parser.parse_statement();
    let stories = parser.parse_stories();
    let aao = parser.parse_aao();
    let glossary = parser.parse_glossary();
    let lexicon = parser.parse_lexicon();

    let Parser {
        mut diagnostics,
        sources,
        ..
    } = parser;
    diagnostics::sort_and_dedup(&mut diagnostics);

    let canvas = if diagnostics::has_fatal(&diagnostics) {
        None
    } else {
        Some(Canvas {
            signature,
            statement,
            stories,
            aao,
            glossary,
            lexicon,
        })
    };
    ParseResult {
        canvas,
        diagnostics,
        sources,
    }
}

/// A file's lines with comment and blank lines stripped, keeping 1-based
/// line numbers. Returns `None` when the file does not exist.
fn read_lines(path: &Path) -> Option<Vec<(u32, String)>> {
    let content = read_text(path)?;
    let mut lines = Vec::new();
    for (i, raw) in content.lines().enumerate() {
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        lines.push((i as u32 + 1, line.to_string()));
    }
    Some(lines)
}

fn read_text(path: &Path) -> Option<String> {
    let content = fs::read_to_string(path).ok()?;
    let content = content.strip_prefix('\u{feff}').unwrap_or(&content);
    Some(content.replace("\r\n", "\n"))
}

impl Parser {
    fn error(&mut self, code: &str, file: impl Into<String>, line: u32, message: impl Into<String>) {
        self.diagnostics
            .push(Diagnostic::error(code, file, line, message));
    }

    fn warn(&mut self, diagnostic: Diagnostic) {
        self.diagnostics.push(diagnostic);
    }

    fn parse_signature(&mut self) -> BpSignature {
        let path = self.root.join(SIGNATURE_FILE);
        let Some(lines) = read_lines(&path) else {
            self.error("E901", SIGNATURE_FILE, 0, "signature.bpac is missing");
            return BpSignature::default();
        };
        let mut signature = BpSignature::default();
        let mut seen: BTreeSet<String> = BTreeSet::new();
        for (line_no, line) in lines {
            let Some((key, value)) = line.split_once(':') else {
                self.error(
                    "E902",
                    SIGNATURE_FILE,
                    line_no,
                    format!("expected \"key: value\", got {line:?}"),
                );
                continue;
            };
            let key = key.trim().to_lowercase();
            let value = value.trim().to_string();
            if !SIGNATURE_KEYS.contains(&key.as_str()) {
                self.error(
                    "E902",
                    SIGNATURE_FILE,
                    line_no,
                    format!("unknown signature key {key:?}"),
                );
                continue;
            }
            if !seen.insert(key.clone()) {
                self.error(
                    "E902",
                    SIGNATURE_FILE,
                    line_no,
                    format!("duplicate signature key {key:?}"),
                );
                continue;
            }
            self.sources.signature_keys.insert(key.clone(), line_no);
            match key.as_str() {
                "name" => signature.name = value,
                "trigger" => signature.trigger = value,
                "input" => signature.input = value,
                "objective" => signature.objective = value,
                "output" => signature.output = value,
                "key-actors" => {
                    signature.key_actors = self.parse_term_list(&value, SIGNATURE_FILE, line_no)
                }
                "key-objects" => {
                    signature.key_objects = self.parse_term_list(&value, SIGNATURE_FILE, line_no)
                }
                _ => unreachable!("key checked against SIGNATURE_KEYS"),
            }
        }
        signature
    }

    /// Comma-separated surface forms, canonicalized and de-duplicated.
    fn parse_term_list(&mut self, value: &str, file: &str, line_no: u32) -> Vec<TermId> {
        let mut terms = Vec::new();
        for part in value.split(',') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            match canonicalize(part) {
                Ok(term) => {
                    if !terms.contains(&term) {
                        terms.push(term);
                    }
                }
                Err(err) => self.error("E905", file.to_string(), line_no, err.to_string()),
            }
        }
        terms
    }

    fn parse_statement(&mut self) -> Option<NarrativeText> {
        let path = self.root.join(STATEMENT_FILE);
        let body = read_text(&path).map(|c| strip_final_newline(&c));
        match body {
            Some(body) if !body.trim().is_empty() => {
                Some(NarrativeText::statement(body).expect("non-empty body"))
            }
            _ => {
                self.warn(missing_statement_warning());
                None
            }
        }
    }

    fn parse_stories(&mut self) -> Vec<NarrativeText> {
        let dir = self.root.join(STORIES_DIR);
        let Ok(entries) = fs::read_dir(&dir) else {
            return Vec::new();
        };
        let mut files: Vec<(String, PathBuf)> = entries
            .flatten()
            .filter_map(|entry| {
                let path = entry.path();
                if !path.is_file() || path.extension().and_then(|e| e.to_str()) != Some("txt") {
                    return None;
                }
                let id = path.file_stem()?.to_str()?.to_string();
                Some((id, path))
            })
            .collect();
        files.sort_by(|a, b| a.0.cmp(&b.0));

        let mut stories = Vec::new();
        let mut seen_ids: BTreeSet<String> = BTreeSet::new();
        for (id, path) in files {
            let rel = format!("{STORIES_DIR}/{id}.txt");
            let Some(body) = read_text(&path).map(|c| strip_final_newline(&c)) else {
                continue;
            };
            if body.trim().is_empty() {
                continue;
            }
            if !seen_ids.insert(id.to_lowercase()) {
                self.error("E906", rel, 0, format!("duplicate story id {id:?}"));
                continue;
            }
            match NarrativeText::user_story(&id, body) {
                Ok(story) => stories.push(story),
                Err(err) => self.error("E905", rel, 0, err.to_string()),
            }
        }
        stories
    }

    fn parse_aao(&mut self) -> AaoMatrix {
        let path = self.root.join(AAO_FILE);
        let Some(lines) = read_lines(&path) else {
            self.warn(empty_aao_warning());
            return AaoMatrix::default();
        };
        let mut lines = lines.into_iter();
        match lines.next() {
            Some((line_no, header)) => {
                if header.trim() != AAO_HEADER {
                    self.error(
                        "E903",
                        AAO_FILE,
                        line_no,
                        format!("expected header {AAO_HEADER:?}"),
                    );
                    return AaoMatrix::default();
                }
            }
            None => {
                self.warn(empty_aao_warning());
                return AaoMatrix::default();
            }
        }

        let mut rows = Vec::new();
        let mut row_lines = Vec::new();
        let mut prev_actor: Option<TermId> = None;
        for (line_no, line) in lines {
            let cells: Vec<&str> = line.split('\t').collect();
            if cells.len() != 3 {
                self.error(
                    "E903",
                    AAO_FILE,
                    line_no,
                    format!("expected 3 tab-separated columns, got {}", cells.len()),
                );
                continue;
            }
            let actor_cell = cells[0].trim();
            let (actor, explicit) = if actor_cell.is_empty() {
                match prev_actor.clone() {
                    Some(actor) => (actor, false),
                    None => {
                        self.error(
                            "E905",
                            AAO_FILE,
                            line_no,
                            "empty actor with no previous row to inherit from",
                        );
                        continue;
                    }
                }
            } else {
                match canonicalize(actor_cell) {
                    Ok(actor) => (actor, true),
                    Err(err) => {
                        self.error("E905", AAO_FILE, line_no, err.to_string());
                        continue;
                    }
                }
            };
            prev_actor = Some(actor.clone());
            let outcome = match canonicalize(cells[2].trim()) {
                Ok(outcome) => outcome,
                Err(err) => {
                    self.error("E905", AAO_FILE, line_no, err.to_string());
                    continue;
                }
            };
            match AaoTriple::new(actor, cells[1], outcome, explicit) {
                Ok(triple) => {
                    rows.push(triple);
                    row_lines.push(line_no);
                }
                Err(err) => self.error("E905", AAO_FILE, line_no, err.to_string()),
            }
        }
        if rows.is_empty() {
            self.warn(empty_aao_warning());
        }
        self.sources.aao_lines = row_lines;
        AaoMatrix::new(rows).expect("first parsed row always carries an explicit actor")
    }

    fn parse_glossary(&mut self) -> Vec<GlossaryEntry> {
        let path = self.root.join(GLOSSARY_FILE);
        let Some(lines) = read_lines(&path) else {
            return Vec::new();
        };
        let mut lines = lines.into_iter();
        if let Some((line_no, header)) = lines.next() {
            if header.trim() != GLOSSARY_HEADER {
                self.error(
                    "E903",
                    GLOSSARY_FILE,
                    line_no,
                    format!("expected header {GLOSSARY_HEADER:?}"),
                );
                return Vec::new();
            }
        }

        let mut entries = Vec::new();
        let mut entry_lines = Vec::new();
        for (line_no, line) in lines {
            let cells: Vec<&str> = line.split('\t').collect();
            if cells.len() != 3 {
                self.error(
                    "E903",
                    GLOSSARY_FILE,
                    line_no,
                    format!("expected 3 tab-separated columns, got {}", cells.len()),
                );
                continue;
            }
            let term = match canonicalize(cells[0].trim()) {
                Ok(term) => term,
                Err(err) => {
                    self.error("E905", GLOSSARY_FILE, line_no, err.to_string());
                    continue;
                }
            };
            let mut synonyms: Vec<String> = Vec::new();
            let mut seen: BTreeSet<String> = BTreeSet::new();
            for synonym in cells[1].split(';') {
                let synonym = synonym.trim();
                if synonym.is_empty() || synonym.to_lowercase() == term.folded() {
                    continue;
                }
                if seen.insert(synonym.to_lowercase()) {
                    synonyms.push(synonym.to_string());
                }
            }
            let description = cells[2].trim();
            if description.is_empty() {
                self.error("E905", GLOSSARY_FILE, line_no, "empty description");
                continue;
            }
            entries.push(
                GlossaryEntry::new(term, synonyms, description)
                    .expect("synonyms pre-filtered, description non-empty"),
            );
            entry_lines.push(line_no);
        }
        self.sources.glossary_lines = entry_lines;
        entries
    }

    fn parse_lexicon(&mut self) -> OpaalLexicon {
        let path = self.root.join(LEXICON_FILE);
        let Some(lines) = read_lines(&path) else {
            return OpaalLexicon::default();
        };
        let mut lexicon = OpaalLexicon::default();
        for (line_no, line) in lines {
            let Some((head, rest)) = line.split_once(':') else {
                self.error(
                    "E902",
                    LEXICON_FILE,
                    line_no,
                    format!("expected \"directive: ...\", got {line:?}"),
                );
                continue;
            };
            let head = head.trim().to_lowercase();
            let rest = rest.trim();
            match head.as_str() {
                "object" => self.add_category_term(&mut lexicon, Category::Object, rest, line_no),
                "process" => self.add_category_term(&mut lexicon, Category::Process, rest, line_no),
                "actor" => self.add_category_term(&mut lexicon, Category::Actor, rest, line_no),
                "attribute" => self.add_attribute(&mut lexicon, rest, line_no),
                "link" => self.add_link(&mut lexicon, rest, line_no),
                _ => self.error(
                    "E904",
                    LEXICON_FILE,
                    line_no,
                    format!("unknown lexicon directive {head:?}"),
                ),
            }
        }
        lexicon
    }

    fn add_category_term(
        &mut self,
        lexicon: &mut OpaalLexicon,
        category: Category,
        rest: &str,
        line_no: u32,
    ) {
        let term = match canonicalize(rest) {
            Ok(term) => term,
            Err(err) => {
                self.error("E905", LEXICON_FILE, line_no, err.to_string());
                return;
            }
        };
        let set = match category {
            Category::Object => &mut lexicon.objects,
            Category::Process => &mut lexicon.processes,
            Category::Actor => &mut lexicon.actors,
            Category::Attribute => unreachable!("attributes handled separately"),
        };
        if !set.insert(term.clone()) {
            self.error(
                "E007",
                LEXICON_FILE,
                line_no,
                format!("duplicate {category} term {term}"),
            );
            return;
        }
        self.sources.category_decls.insert((category, term), line_no);
    }

    fn add_attribute(&mut self, lexicon: &mut OpaalLexicon, rest: &str, line_no: u32) {
        let (term_part, owners_part) = match rest.split_once(" of ") {
            Some((t, o)) => (t.trim(), Some(o)),
            None => (rest, None),
        };
        let attr = match canonicalize(term_part) {
            Ok(term) => term,
            Err(err) => {
                self.error("E905", LEXICON_FILE, line_no, err.to_string());
                return;
            }
        };
        if lexicon.attributes.iter().any(|a| a.attr == attr) {
            self.error(
                "E007",
                LEXICON_FILE,
                line_no,
                format!("duplicate Attribute term {attr}"),
            );
            return;
        }
        let owners = match owners_part {
            Some(list) => self.parse_term_list(list, LEXICON_FILE, line_no),
            None => Vec::new(),
        };
        self.sources
            .category_decls
            .insert((Category::Attribute, attr.clone()), line_no);
        self.sources.attribute_lines.push(line_no);
        lexicon
            .attributes
            .push(AttributeDecl::new(attr, owners).expect("owners de-duplicated"));
    }

    fn add_link(&mut self, lexicon: &mut OpaalLexicon, rest: &str, line_no: u32) {
        let parts: Vec<&str> = rest.split_whitespace().collect();
        let (kind, source, target) = match parts.as_slice() {
            ["isa", source, target] => (LinkKind::Isa, *source, *target),
            ["partof", source, target] => (LinkKind::PartOf, *source, *target),
            ["fn", label, source, target] => match canonicalize(label) {
                Ok(label) => (LinkKind::Functional(label), *source, *target),
                Err(err) => {
                    self.error("E905", LEXICON_FILE, line_no, err.to_string());
                    return;
                }
            },
            _ => {
                self.error(
                    "E904",
                    LEXICON_FILE,
                    line_no,
                    format!("malformed link directive {rest:?}"),
                );
                return;
            }
        };
        let (source, target) = match (canonicalize(source), canonicalize(target)) {
            (Ok(s), Ok(t)) => (s, t),
            (Err(err), _) | (_, Err(err)) => {
                self.error("E905", LEXICON_FILE, line_no, err.to_string());
                return;
            }
        };
        match Link::new(kind, source, target) {
            Ok(link) => {
                self.sources.link_lines.push(line_no);
                lexicon.links.push(link);
            }
            Err(err) => self.error("E904", LEXICON_FILE, line_no, err.to_string()),
        }
    }
}

fn strip_final_newline(content: &str) -> String {
    content.strip_suffix('\n').unwrap_or(content).to_string()
}

// ---------------------------------------------------------------------------
// Writing
// ---------------------------------------------------------------------------

/// Writes `canvas` under `root` in the exact directory format, atomically
/// per file (write to a temp name, then rename).
///
/// Output is byte-deterministic: list-valued sections keep their input
/// order, lexicon sets are written sorted case-insensitively.
pub fn write_canvas(canvas: &Canvas, root: &Path) -> Result<(), WriteError> {
    create_dir(root)?;
    write_file(&root.join(SIGNATURE_FILE), &render_signature(&canvas.signature))?;
    if let Some(statement) = &canvas.statement {
        write_file(&root.join(STATEMENT_FILE), &format!("{}\n", statement.body))?;
    }
    if !canvas.stories.is_empty() {
        let dir = root.join(STORIES_DIR);
        create_dir(&dir)?;
        for story in &canvas.stories {
            let id = story.story_id.as_deref().expect("user stories carry ids");
            write_file(&dir.join(format!("{id}.txt")), &format!("{}\n", story.body))?;
        }
    }
    write_file(&root.join(AAO_FILE), &render_aao(&canvas.aao))?;
    write_file(&root.join(GLOSSARY_FILE), &render_glossary(&canvas.glossary))?;
    write_file(&root.join(LEXICON_FILE), &render_lexicon(&canvas.lexicon))?;
    Ok(())
}

fn render_signature(signature: &BpSignature) -> String {
    let mut out = String::new();
    {
        let mut push = |key: &str, value: &str| {
            if value.is_empty() {
                if key == "name" {
                    out.push_str("name:\n");
                }
            } else {
                out.push_str(&format!("{key}: {value}\n"));
            }
        };
        push("name", &signature.name);
        push("trigger", &signature.trigger);
        push("key-actors", &join_terms(&signature.key_actors));
        push("key-objects", &join_terms(&signature.key_objects));
        push("input", &signature.input);
        push("objective", &signature.objective);
        push("output", &signature.output);
    }
    out
}

fn join_terms(terms: &[TermId]) -> String {
    terms
        .iter()
        .map(TermId::as_str)
        .collect::<Vec<_>>()
        .join(", ")
}

fn render_aao(aao: &AaoMatrix) -> String {
    let mut out = format!("{AAO_HEADER}\n");
    for row in &aao.rows {
        let actor = if row.explicit_actor {
            row.actor.as_str()
        } else {
            ""
        };
        out.push_str(&format!("{actor}\t{}\t{}\n", row.action, row.outcome));
    }
    out
}

fn render_glossary(glossary: &[GlossaryEntry]) -> String {
    let mut out = format!("{GLOSSARY_HEADER}\n");
    for entry in glossary {
        out.push_str(&format!(
            "{}\t{}\t{}\n",
            entry.term,
            entry.synonyms.join("; "),
            entry.description
        ));
    }
    out
}

fn render_lexicon(lexicon: &OpaalLexicon) -> String {
    let mut out = String::new();
    for term in &lexicon.objects {
        out.push_str(&format!("object: {term}\n"));
    }
    for term in &lexicon.processes {
        out.push_str(&format!("process: {term}\n"));
    }
    for term in &lexicon.actors {
        out.push_str(&format!("actor: {term}\n"));
    }
    for attr in &lexicon.attributes {
        if attr.owners.is_empty() {
            out.push_str(&format!("attribute: {}\n", attr.attr));
        } else {
            out.push_str(&format!(
                "attribute: {} of {}\n",
                attr.attr,
                join_terms(&attr.owners)
            ));
        }
    }
    for link in &lexicon.links {
        match &link.kind {
            LinkKind::Isa => {
                out.push_str(&format!("link: isa {} {}\n", link.source, link.target))
            }
            LinkKind::PartOf => {
                out.push_str(&format!("link: partof {} {}\n", link.source, link.target))
            }
            LinkKind::Functional(label) => out.push_str(&format!(
                "link: fn {label} {} {}\n",
                link.source, link.target
            )),
        }
    }
    out
}

fn create_dir(path: &Path) -> Result<(), WriteError> {
    fs::create_dir_all(path).map_err(|source| WriteError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Writes via a temp file in the same directory plus rename, so a failed
/// run never leaves a truncated artifact behind.
pub fn write_file(path: &Path, content: &str) -> Result<(), WriteError> {
    let io_err = |source: std::io::Error| WriteError::Io {
        path: path.display().to_string(),
        source,
    };
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(io_err)?;
        }
    }
    let file_name = path
        .file_name()
        .and_then(|n| n.to_str())
        .unwrap_or("artifact");
    let tmp = path.with_file_name(format!(".{file_name}.tmp"));
    fs::write(&tmp, content).map_err(io_err)?;
    fs::rename(&tmp, path).map_err(io_err)?;
    Ok(())
}
