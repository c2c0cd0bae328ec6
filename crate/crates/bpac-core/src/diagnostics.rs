//! Diagnostics shared by the parser, the validator and the ontology checks.
//!
//! Every finding carries a stable code (`E` or `W` plus three digits), the
//! relative path of the file it concerns and a 1-based line number, with 0
//! standing for "whole file". Codes starting with `E9` are parse-fatal: a
//! canvas is only produced when none of them occurred.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Error,
    Warning,
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Level::Error => f.write_str("ERROR"),
            Level::Warning => f.write_str("WARNING"),
        }
    }
}

/// A single finding, renderable as `LEVEL CODE file:line message`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub level: Level,
    pub code: String,
    pub file: String,
    pub line: u32,
    pub message: String,
}

impl Diagnostic {
    pub fn error(code: &str, file: impl Into<String>, line: u32, message: impl Into<String>) -> Self {
        debug_assert!(is_valid_code(code));
        Diagnostic {
            level: Level::Error,
            code: code.to_string(),
            file: file.into(),
            line,
            message: message.into(),
        }
    }

    pub fn warning(code: &str, file: impl Into<String>, line: u32, message: impl Into<String>) -> Self {
        debug_assert!(is_valid_code(code));
        Diagnostic {
            level: Level::Warning,
            code: code.to_string(),
            file: file.into(),
            line,
            message: message.into(),
        }
    }

    /// Parse-fatal errors prevent a canvas from being produced.
    pub fn is_fatal(&self) -> bool {
        self.level == Level::Error && self.code.starts_with("E9")
    }

    /// Sort key used everywhere a report is rendered.
    pub fn sort_key(&self) -> (String, u32, String) {
        (self.file.clone(), self.line, self.code.clone())
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {}:{} {}",
            self.level, self.code, self.file, self.line, self.message
        )
    }
}

fn is_valid_code(code: &str) -> bool {
    let bytes = code.as_bytes();
    bytes.len() == 4
        && (bytes[0] == b'E' || bytes[0] == b'W')
        && bytes[1..].iter().all(u8::is_ascii_digit)
}

/// Sorts by (file, line, code) and drops exact duplicates, the canonical
/// presentation order for every report.
pub fn sort_and_dedup(diagnostics: &mut Vec<Diagnostic>) {
    diagnostics.sort_by(|a, b| {
        a.sort_key()
            .cmp(&b.sort_key())
            .then_with(|| a.message.cmp(&b.message))
    });
    diagnostics.dedup();
}

pub fn has_errors(diagnostics: &[Diagnostic]) -> bool {
    diagnostics.iter().any(|d| d.level == Level::Error)
}

pub fn has_fatal(diagnostics: &[Diagnostic]) -> bool {
    diagnostics.iter().any(Diagnostic::is_fatal)
}

/// Per-code hit counts, used in structured report output.
pub fn stats(diagnostics: &[Diagnostic]) -> BTreeMap<String, usize> {
    let mut counts = BTreeMap::new();
    for d in diagnostics {
        *counts.entry(d.code.clone()).or_insert(0) += 1;
    }
    counts
}

/// Structured single-document form of a report, for `--format json`.
#[derive(Debug, Clone, Serialize)]
pub struct JsonReport<'a> {
    pub diagnostics: &'a [Diagnostic],
    pub stats: BTreeMap<String, usize>,
}

pub fn to_json(diagnostics: &[Diagnostic]) -> String {
    let report = JsonReport {
        diagnostics,
        stats: stats(diagnostics),
    };
    serde_json::to_string_pretty(&report).expect("report serialization cannot fail")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_matches_the_report_line_format() {
        let d = Diagnostic::warning("W003", "aao.tsv", 2, "action not traceable");
        assert_eq!(d.to_string(), "WARNING W003 aao.tsv:2 action not traceable");
    }

    #[test]
    fn fatal_is_limited_to_e9_errors() {
        assert!(Diagnostic::error("E903", "aao.tsv", 4, "x").is_fatal());
        assert!(!Diagnostic::error("E009", "lexicon.bpac", 1, "x").is_fatal());
        assert!(!Diagnostic::warning("W010", "statement.txt", 0, "x").is_fatal());
    }

    #[test]
    fn sorting_orders_by_file_line_code_and_dedups() {
        let mut list = vec![
            Diagnostic::warning("W004", "aao.tsv", 9, "b"),
            Diagnostic::warning("W003", "aao.tsv", 9, "a"),
            Diagnostic::warning("W005", "lexicon.bpac", 1, "c"),
            Diagnostic::warning("W003", "aao.tsv", 2, "d"),
            Diagnostic::warning("W003", "aao.tsv", 2, "d"),
        ];
        sort_and_dedup(&mut list);
        let codes: Vec<(&str, u32)> = list.iter().map(|d| (d.code.as_str(), d.line)).collect();
        assert_eq!(
            codes,
            vec![("W003", 2), ("W003", 9), ("W004", 9), ("W005", 1)]
        );
    }

    #[test]
    fn stats_counts_per_code() {
        let list = vec![
            Diagnostic::warning("W005", "lexicon.bpac", 1, "a"),
            Diagnostic::warning("W005", "lexicon.bpac", 2, "b"),
            Diagnostic::error("E009", "lexicon.bpac", 3, "c"),
        ];
        let s = stats(&list);
        assert_eq!(s.get("W005"), Some(&2));
        assert_eq!(s.get("E009"), Some(&1));
    }

    #[test]
    fn json_report_carries_diagnostics_and_stats() {
        let list = vec![Diagnostic::error("E009", "lexicon.bpac", 3, "missing")];
        let json = to_json(&list);
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(value["diagnostics"][0]["level"], "error");
        assert_eq!(value["diagnostics"][0]["code"], "E009");
        assert_eq!(value["stats"]["E009"], 1);
    }
}
