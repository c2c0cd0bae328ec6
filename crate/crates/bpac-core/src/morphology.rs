//! Verb morphology and the stopword list used by the extraction pipeline.
//!
//! Everything here is table-driven: the irregular-verb map, the
//! consonant-doubling list and the stopwords ship as plain text files
//! compiled into the library, and can be replaced at runtime from a data
//! directory (see [`MiningData::load`]).

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use thiserror::Error;

const STOPWORDS: &str = include_str!("../data/stopwords.txt");
const IRREGULAR_VERBS: &str = include_str!("../data/irregular_verbs.tsv");
const DOUBLING_VERBS: &str = include_str!("../data/doubling_verbs.txt");

#[derive(Debug, Error)]
pub enum DataError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: expected \"inflected<TAB>base\"")]
    BadRow { path: String, line: usize },
    #[error("{path} is empty")]
    Empty { path: String },
    #[error("{path}:{line}: entries must be lowercase")]
    NotLowercase { path: String, line: usize },
}

/// Inflection tables for English verbs.
#[derive(Debug, Clone)]
pub struct Morphology {
    irregular_lemmas: BTreeMap<String, String>,
    doubling_verbs: BTreeSet<String>,
}

impl Morphology {
    pub fn new(
        irregular_lemmas: BTreeMap<String, String>,
        doubling_verbs: BTreeSet<String>,
    ) -> Morphology {
        assert!(
            !irregular_lemmas.is_empty() && !doubling_verbs.is_empty(),
            "morphology tables must be non-empty"
        );
        Morphology {
            irregular_lemmas,
            doubling_verbs,
        }
    }

    /// The tables compiled into the library.
    pub fn builtin() -> Morphology {
        Morphology::new(
            parse_irregular("builtin irregular_verbs.tsv", IRREGULAR_VERBS)
                .expect("builtin irregular verb table is well-formed"),
            parse_wordlist("builtin doubling_verbs.txt", DOUBLING_VERBS)
                .expect("builtin doubling verb list is well-formed"),
        )
    }

    pub fn irregular_base(&self, token: &str) -> Option<&str> {
        self.irregular_lemmas.get(token).map(String::as_str)
    }

    pub fn doubles_final_consonant(&self, base: &str) -> bool {
        self.doubling_verbs.contains(base)
    }

    /// Strips third-person inflection: irregular lookup first, then
    /// `-ies` to `y`, `-es` after a sibilant, and a trailing `-s`.
    pub fn lemmatize_verb(&self, token: &str) -> String {
        let token = token.to_lowercase();
        if let Some(base) = self.irregular_lemmas.get(&token) {
            return base.clone();
        }
        if let Some(stem) = token.strip_suffix("ies") {
            if stem.len() >= 2 {
                return format!("{stem}y");
            }
        }
        if let Some(stem) = token.strip_suffix("es") {
            if stem.ends_with("ss")
                || stem.ends_with('x')
                || stem.ends_with('z')
                || stem.ends_with("ch")
                || stem.ends_with("sh")
            {
                return stem.to_string();
            }
        }
        if token.len() >= 4 && !token.ends_with("ss") {
            if let Some(stem) = token.strip_suffix('s') {
                return stem.to_string();
            }
        }
        token
    }

    /// Builds the `-ing` form of a base verb.
    pub fn gerund(&self, base: &str) -> String {
        let base = base.to_lowercase();
        if self.doubling_verbs.contains(&base) {
            if let Some(last) = base.chars().last() {
                return format!("{base}{last}ing");
            }
        }
        if let Some(stem) = base.strip_suffix("ie") {
            return format!("{stem}ying");
        }
        if base.len() > 2 && base.ends_with('e') && !base.ends_with("ee") {
            return format!("{}ing", &base[..base.len() - 1]);
        }
        format!("{base}ing")
    }

    /// Rewrites a past participle straight into a gerund, used when a
    /// passive clause is turned active ("issued by" becomes "issuing").
    pub fn participle_to_gerund(&self, participle: &str) -> String {
        let participle = participle.to_lowercase();
        if let Some(base) = self.irregular_lemmas.get(&participle) {
            return self.gerund(base);
        }
        if let Some(stem) = participle.strip_suffix("ied") {
            return format!("{stem}ying");
        }
        if let Some(stem) = participle.strip_suffix("eed") {
            // "agreed" keeps both e's: agree -> agreeing
            return self.gerund(&format!("{stem}ee"));
        }
        if let Some(stem) = participle.strip_suffix("ed") {
            if !stem.is_empty() {
                return format!("{stem}ing");
            }
        }
        self.gerund(&self.lemmatize_verb(&participle))
    }
}

/// Words ignored while scanning text: articles, pronouns, prepositions,
/// auxiliaries and conjunctions.
#[derive(Debug, Clone)]
pub struct Stopwords(BTreeSet<String>);

impl Stopwords {
    pub fn builtin() -> Stopwords {
        Stopwords(
            parse_wordlist("builtin stopwords.txt", STOPWORDS)
                .expect("builtin stopword list is well-formed"),
        )
    }

    pub fn contains(&self, word: &str) -> bool {
        self.0.contains(word)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// The morphology tables and stopword list as one override unit.
#[derive(Debug, Clone)]
pub struct MiningData {
    pub morphology: Morphology,
    pub stopwords: Stopwords,
}

impl MiningData {
    pub fn builtin() -> MiningData {
        MiningData {
            morphology: Morphology::builtin(),
            stopwords: Stopwords::builtin(),
        }
    }

    /// Loads `stopwords.txt`, `irregular_verbs.tsv` and
    /// `doubling_verbs.txt` from `dir`.
    pub fn load(dir: &Path) -> Result<MiningData, DataError> {
        let read = |name: &str| -> Result<String, DataError> {
            let path = dir.join(name);
            std::fs::read_to_string(&path).map_err(|source| DataError::Io {
                path: path.display().to_string(),
                source,
            })
        };
        let stopwords = parse_wordlist("stopwords.txt", &read("stopwords.txt")?)?;
        let irregular = parse_irregular("irregular_verbs.tsv", &read("irregular_verbs.tsv")?)?;
        let doubling = parse_wordlist("doubling_verbs.txt", &read("doubling_verbs.txt")?)?;
        Ok(MiningData {
            morphology: Morphology::new(irregular, doubling),
            stopwords: Stopwords(stopwords),
        })
    }
}

fn parse_wordlist(path: &str, content: &str) -> Result<BTreeSet<String>, DataError> {
    let mut words = BTreeSet::new();
    for (i, line) in content.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line != line.to_lowercase() {
            return Err(DataError::NotLowercase {
                path: path.to_string(),
                line: i + 1,
            });
        }
        words.insert(line.to_string());
    }
    if words.is_empty() {
        return Err(DataError::Empty {
            path: path.to_string(),
        });
    }
    Ok(words)
}

fn parse_irregular(path: &str, content: &str) -> Result<BTreeMap<String, String>, DataError> {
    let mut map = BTreeMap::new();
    for (i, line) in content.lines().enumerate() {
        let line = line.trim_end();
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split('\t');
        let (inflected, base) = match (parts.next(), parts.next(), parts.next()) {
            (Some(a), Some(b), None) if !a.trim().is_empty() && !b.trim().is_empty() => {
                (a.trim(), b.trim())
            }
            _ => {
                return Err(DataError::BadRow {
                    path: path.to_string(),
                    line: i + 1,
                })
            }
        };
        if inflected != inflected.to_lowercase() || base != base.to_lowercase() {
            return Err(DataError::NotLowercase {
                path: path.to_string(),
                line: i + 1,
            });
        }
        map.insert(inflected.to_string(), base.to_string());
    }
    if map.is_empty() {
        return Err(DataError::Empty {
            path: path.to_string(),
        });
    }
    Ok(map)
}
