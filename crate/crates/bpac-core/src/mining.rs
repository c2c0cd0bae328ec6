//! Candidate extraction from the narrative texts.
//!
//! Both operations are assistive: they propose glossary terms and AAO
//! triples for the analyst to curate, they never edit stored artifacts.
//! The pipeline is a deterministic rule-and-gazetteer design: no
//! statistical models: so every proposal can be traced back to a rule:
//!
//! 1. sentences split on `.`/`!`/`?`, clauses on commas and "then";
//! 2. known terminology is located by longest case-insensitive gazetteer
//!    match (camelCase terms match their space-separated form, plural
//!    surface forms match their singular term, and a multi-word actor
//!    term like `PizzaShop` also matches "the shop");
//! 3. within a clause the leftmost actor match anchors the subject, the
//!    first verb-looking token after it the action, the next Object or
//!    Actor match (or a resolved "it"/"them") the outcome; clauses with
//!    no actor in scope are skipped;
//! 4. a clause with no actor of its own inherits the sentence subject,
//!    or failing that the most recently mentioned actor;
//! 5. passives are turned active: "the order is issued by the customer"
//!    proposes (Customer, issuing, Order), and a participle clause like
//!    "dough, produced in-house" attributes the action to the inherited
//!    actor;
//! 6. verbs are normalised to the gerund, coordinated verbs sharing a
//!    subject and outcome merge into one action ("filling and
//!    submitting"), and transfer verbs ("submits it to the shop")
//!    additionally propose the receiving side.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::Range;

use crate::model::{
    canonicalize, surface_words, AaoTriple, Category, GlossaryEntry, OpaalLexicon, TermId,
};
use crate::morphology::{MiningData, Morphology, Stopwords};

const DETERMINERS: [&str; 10] = [
    "the", "a", "an", "our", "my", "his", "her", "their", "this", "that",
];

/// Verbs whose direct object travels to a recipient; "X submits Y to Z"
/// also proposes (Z, receiving, Y).
const TRANSFER_VERBS: [&str; 7] = ["submit", "send", "give", "hand", "pass", "forward", "deliver"];

/// How a candidate triple was grounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Confidence {
    /// Actor and outcome both matched lexicon or glossary terminology
    /// directly in the clause.
    Gazetteer,
    /// The actor was inherited or the outcome resolved indirectly.
    Heuristic,
}

impl fmt::Display for Confidence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Confidence::Gazetteer => f.write_str("gazetteer"),
            Confidence::Heuristic => f.write_str("heuristic"),
        }
    }
}

/// A proposed AAO row, tagged with the sentence it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateTriple {
    pub triple: AaoTriple,
    pub sentence_index: usize,
    pub confidence: Confidence,
}

/// A proposed glossary term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermCandidate {
    pub surface: String,
    pub count: usize,
    /// Whether the canonicalized surface already exists in the glossary
    /// or lexicon.
    pub known: bool,
}

// ---------------------------------------------------------------------------
// Tokenization
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
struct Word {
    lower: String,
    capitalized: bool,
    sentence_initial: bool,
    ends_clause: bool,
}

fn split_sentences(body: &str) -> Vec<String> {
    let mut sentences = Vec::new();
    let mut current = String::new();
    let mut chars = body.chars().peekable();
    while let Some(c) = chars.next() {
        if matches!(c, '.' | '!' | '?') {
            while matches!(chars.peek(), Some('.' | '!' | '?')) {
                chars.next();
            }
            match chars.peek() {
                Some(next) if !next.is_whitespace() => current.push(c), // e.g. "3.5"
                _ => {
                    if !current.trim().is_empty() {
                        sentences.push(std::mem::take(&mut current));
                    }
                    current.clear();
                }
            }
        } else {
            current.push(c);
        }
    }
    if !current.trim().is_empty() {
        sentences.push(current);
    }
    sentences
}

fn tokenize_sentence(sentence: &str) -> Vec<Word> {
    let mut words: Vec<Word> = Vec::new();
    for raw in sentence.split_whitespace() {
        let trailing_clause = raw
            .chars()
            .rev()
            .take_while(|c| !c.is_alphanumeric())
            .any(|c| matches!(c, ',' | ';' | ':'));
        let cleaned: &str = raw
            .trim_start_matches(|c: char| !c.is_alphanumeric())
            .trim_end_matches(|c: char| !c.is_alphanumeric());
        // Possessives: keep the head noun.
        let cleaned = cleaned
            .split_once(['\'', '\u{2019}'])
            .map(|(head, _)| head)
            .unwrap_or(cleaned);
        if cleaned.is_empty() {
            // A lone punctuation token still closes the clause before it.
            if let Some(last) = words.last_mut() {
                last.ends_clause |= trailing_clause;
            }
            continue;
        }
        words.push(Word {
            lower: cleaned.to_lowercase(),
            capitalized: cleaned.chars().next().is_some_and(char::is_uppercase),
            sentence_initial: words.is_empty(),
            ends_clause: trailing_clause,
        });
    }
    words
}

/// Clause ranges within a sentence: breaks after trailing commas and at
/// (dropped) standalone "then".
fn split_clauses(words: &[Word]) -> Vec<Range<usize>> {
    let mut ranges = Vec::new();
    let mut start = 0usize;
    for (i, word) in words.iter().enumerate() {
        if word.lower == "then" {
            if start < i {
                ranges.push(start..i);
            }
            start = i + 1;
        } else if word.ends_clause {
            ranges.push(start..i + 1);
            start = i + 1;
        }
    }
    if start < words.len() {
        ranges.push(start..words.len());
    }
    ranges
}

// ---------------------------------------------------------------------------
// Gazetteer
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
struct GazEntry {
    words: Vec<String>,
    term: TermId,
    category: Option<Category>,
}

#[derive(Debug, Clone)]
struct Match {
    term: TermId,
    category: Option<Category>,
    len: usize,
}

struct Gazetteer {
    entries: Vec<GazEntry>,
}

impl Gazetteer {
    fn build(lexicon: &OpaalLexicon, glossary: &[GlossaryEntry]) -> Gazetteer {
        let mut entries = Vec::new();
        let mut seen: BTreeSet<Vec<String>> = BTreeSet::new();
        let mut add = |words: Vec<String>, term: TermId, category: Option<Category>| {
            if !words.is_empty() && seen.insert(words.clone()) {
                entries.push(GazEntry {
                    words,
                    term,
                    category,
                });
            }
        };
        for term in &lexicon.objects {
            add(term.words(), term.clone(), Some(Category::Object));
        }
        for term in &lexicon.processes {
            add(term.words(), term.clone(), Some(Category::Process));
        }
        for term in &lexicon.actors {
            add(term.words(), term.clone(), Some(Category::Actor));
        }
        for attr in &lexicon.attributes {
            add(attr.attr.words(), attr.attr.clone(), Some(Category::Attribute));
        }
        for entry in glossary {
            let category = lexicon.category_of(&entry.term);
            add(entry.term.words(), entry.term.clone(), category);
            for synonym in &entry.synonyms {
                add(surface_words(synonym), entry.term.clone(), category);
            }
        }
        Gazetteer { entries }
    }

    /// Longest match per start position, greedy left to right: positions
    /// covered by an earlier match stay `None`.
    fn scan(&self, words: &[Word]) -> Vec<Option<Match>> {
        let mut out: Vec<Option<Match>> = vec![None; words.len()];
        let mut i = 0usize;
        while i < words.len() {
            if let Some(m) = self.match_at(words, i) {
                let len = m.len;
                out[i] = Some(m);
                i += len;
            } else {
                i += 1;
            }
        }
        out
    }

    fn match_at(&self, words: &[Word], i: usize) -> Option<Match> {
        let mut best: Option<Match> = None;
        for entry in &self.entries {
            let len = entry.words.len();
            if i + len > words.len() {
                continue;
            }
            if best.as_ref().is_some_and(|b| b.len >= len) {
                continue;
            }
            let all = entry.words.iter().enumerate().all(|(k, target)| {
                let word = &words[i + k].lower;
                if k + 1 == len {
                    fold_matches(word, target)
                } else {
                    word == target
                }
            });
            if all {
                best = Some(Match {
                    term: entry.term.clone(),
                    category: entry.category,
                    len,
                });
            }
        }
        if best.is_some() {
            return best;
        }
        // Determiner-guarded fallback: "the shop" names the PizzaShop.
        if i > 0 && DETERMINERS.contains(&words[i - 1].lower.as_str()) {
            for entry in &self.entries {
                if entry.category == Some(Category::Actor) && entry.words.len() > 1 {
                    let last = entry.words.last().expect("non-empty entry");
                    if fold_matches(&words[i].lower, last) {
                        return Some(Match {
                            term: entry.term.clone(),
                            category: entry.category,
                            len: 1,
                        });
                    }
                }
            }
        }
        None
    }
}

/// Number-folded comparison: the surface word matches the target word
/// directly or after stripping a plural suffix.
fn fold_matches(word: &str, target: &str) -> bool {
    if word == target {
        return true;
    }
    if let Some(stem) = word.strip_suffix("ies") {
        if stem.len() >= 2 && format!("{stem}y") == target {
            return true;
        }
    }
    if let Some(stem) = word.strip_suffix("es") {
        if (stem.ends_with("ss")
            || stem.ends_with('x')
            || stem.ends_with('z')
            || stem.ends_with("ch")
            || stem.ends_with("sh"))
            && stem == target
        {
            return true;
        }
    }
    if word.len() >= 4 && !word.ends_with("ss") {
        if let Some(stem) = word.strip_suffix('s') {
            if stem == target {
                return true;
            }
        }
    }
    false
}

fn outcome_eligible(category: Option<Category>) -> bool {
    matches!(category, Some(Category::Object) | Some(Category::Actor) | None)
}

// ---------------------------------------------------------------------------
// Term extraction
// ---------------------------------------------------------------------------

/// Ranked unigram and bigram candidates over several texts, stopwords
/// removed, case variants merged, ordered by frequency then alphabet.
pub fn extract_terms_multi(
    bodies: &[&str],
    lexicon: &OpaalLexicon,
    glossary: &[GlossaryEntry],
    data: &MiningData,
) -> Vec<TermCandidate> {
    let stop = &data.stopwords;
    let keep = |w: &Word| {
        !stop.contains(&w.lower) && w.lower.len() >= 2 && w.lower.chars().any(char::is_alphabetic)
    };
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for body in bodies {
        for sentence in split_sentences(body) {
            let words = tokenize_sentence(&sentence);
            for word in &words {
                if keep(word) {
                    *counts.entry(word.lower.clone()).or_insert(0) += 1;
                }
            }
            for pair in words.windows(2) {
                if keep(&pair[0]) && keep(&pair[1]) && !pair[0].ends_clause {
                    let bigram = format!("{} {}", pair[0].lower, pair[1].lower);
                    *counts.entry(bigram).or_insert(0) += 1;
                }
            }
        }
    }

    let mut known_terms: BTreeSet<TermId> = lexicon.all_terms();
    for entry in glossary {
        known_terms.insert(entry.term.clone());
        for synonym in &entry.synonyms {
            if let Ok(term) = canonicalize(synonym) {
                known_terms.insert(term);
            }
        }
    }

    let mut out: Vec<TermCandidate> = counts
        .into_iter()
        .map(|(surface, count)| {
            let known = canonicalize(&surface)
                .map(|term| known_terms.contains(&term))
                .unwrap_or(false);
            TermCandidate {
                surface,
                count,
                known,
            }
        })
        .collect();
    out.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.surface.cmp(&b.surface)));
    out
}

/// Single-text variant of [`extract_terms_multi`].
pub fn extract_terms(
    body: &str,
    lexicon: &OpaalLexicon,
    glossary: &[GlossaryEntry],
    data: &MiningData,
) -> Vec<TermCandidate> {
    extract_terms_multi(&[body], lexicon, glossary, data)
}

// ---------------------------------------------------------------------------
// AAO extraction
// ---------------------------------------------------------------------------

struct AaoState<'a> {
    morph: &'a Morphology,
    stop: &'a Stopwords,
    candidates: Vec<CandidateTriple>,
    /// Index of the last main-scan candidate, the only kind coordinated
    /// verbs may merge into.
    merge_anchor: Option<usize>,
    recent_actor: Option<TermId>,
    recent_outcome: Option<TermId>,
    prev_clause_np: Option<String>,
}

/// Proposes AAO triples from one narrative text.
pub fn extract_aao(
    body: &str,
    lexicon: &OpaalLexicon,
    glossary: &[GlossaryEntry],
    data: &MiningData,
) -> Vec<CandidateTriple> {
    let gazetteer = Gazetteer::build(lexicon, glossary);
    let mut state = AaoState {
        morph: &data.morphology,
        stop: &data.stopwords,
        candidates: Vec::new(),
        merge_anchor: None,
        recent_actor: None,
        recent_outcome: None,
        prev_clause_np: None,
    };

    for (sentence_index, sentence) in split_sentences(body).iter().enumerate() {
        let words = tokenize_sentence(sentence);
        let mut sentence_subject: Option<TermId> = None;
        for range in split_clauses(&words) {
            let clause = &words[range];
            let matches = gazetteer.scan(clause);
            process_clause(&mut state, clause, &matches, sentence_index, &mut sentence_subject);

            // Clause bookkeeping for inheritance in later clauses.
            for m in matches.iter().flatten() {
                if m.category == Some(Category::Actor) {
                    state.recent_actor = Some(m.term.clone());
                }
            }
            if let Some(last_np) = clause
                .iter()
                .rev()
                .find(|w| !state.stop.contains(&w.lower))
            {
                state.prev_clause_np = Some(last_np.lower.clone());
            }
        }
    }
    state.candidates
}

fn process_clause(
    state: &mut AaoState,
    clause: &[Word],
    matches: &[Option<Match>],
    sentence_index: usize,
    sentence_subject: &mut Option<TermId>,
) {
    if try_passive(state, clause, matches, sentence_index) {
        return;
    }
    if try_reduced_passive(state, clause, matches, sentence_index, sentence_subject) {
        return;
    }

    let mut subject_explicit: Option<TermId> = None;
    let mut verb: Option<String> = None;
    let mut verb_end = 0usize;
    let mut outcome: Option<(TermId, bool)> = None;

    let mut i = 0usize;
    while i < clause.len() {
        if let Some(m) = &matches[i] {
            if verb.is_none() {
                match m.category {
                    Some(Category::Actor) => subject_explicit = Some(m.term.clone()),
                    // A gerund process mention reads as the clause's
                    // action ("a careful baking of the pizza").
                    Some(Category::Process)
                        if m.len == 1
                            && clause[i].lower.ends_with("ing")
                            && subject_available(state, &subject_explicit, sentence_subject) =>
                    {
                        verb = Some(clause[i].lower.clone());
                        verb_end = i + 1;
                    }
                    _ => {}
                }
            } else if outcome.is_none() && outcome_eligible(m.category) {
                outcome = Some((m.term.clone(), true));
            }
            i += m.len;
            continue;
        }
        let word = &clause[i];
        if verb.is_none() {
            if is_verbish(word, state.morph, state.stop)
                && subject_available(state, &subject_explicit, sentence_subject)
            {
                verb = Some(word.lower.clone());
                verb_end = i + 1;
            }
        } else if outcome.is_none() && matches!(word.lower.as_str(), "it" | "them") {
            if let Some(recent) = state.recent_outcome.clone() {
                outcome = Some((recent, false));
            }
        }
        i += 1;
    }

    let (Some(verb), Some((outcome_term, direct))) = (verb, outcome) else {
        return;
    };
    let subject = subject_explicit
        .clone()
        .or_else(|| sentence_subject.clone())
        .or_else(|| state.recent_actor.clone())
        .expect("verb is only anchored when a subject is in scope");
    let explicit = subject_explicit.is_some();
    let action = to_action(state.morph, &verb);
    let confidence = if explicit && direct {
        Confidence::Gazetteer
    } else {
        Confidence::Heuristic
    };

    let merged = state.merge_anchor.is_some_and(|anchor| {
        let previous = &mut state.candidates[anchor];
        if previous.sentence_index == sentence_index
            && previous.triple.actor == subject
            && previous.triple.outcome == outcome_term
        {
            if !previous.triple.gerunds().contains(&action.as_str()) {
                previous.triple.action = format!("{} and {}", previous.triple.action, action);
            }
            if confidence == Confidence::Heuristic {
                previous.confidence = Confidence::Heuristic;
            }
            true
        } else {
            false
        }
    });
    if !merged {
        let triple = AaoTriple::new(subject.clone(), &action, outcome_term.clone(), explicit)
            .expect("extraction always builds gerund actions");
        state.candidates.push(CandidateTriple {
            triple,
            sentence_index,
            confidence,
        });
        state.merge_anchor = Some(state.candidates.len() - 1);
    }
    if explicit {
        *sentence_subject = subject_explicit;
    }
    state.recent_outcome = Some(outcome_term.clone());

    try_transfer_inverse(
        state,
        clause,
        matches,
        sentence_index,
        &verb,
        verb_end,
        &outcome_term,
    );
}

fn subject_available(
    state: &AaoState,
    subject_explicit: &Option<TermId>,
    sentence_subject: &Option<TermId>,
) -> bool {
    subject_explicit.is_some() || sentence_subject.is_some() || state.recent_actor.is_some()
}

/// "<NP1> is/are/was/were <participle> by <NP2>" proposes the active
/// triple (NP2, gerund, NP1).
fn try_passive(
    state: &mut AaoState,
    clause: &[Word],
    matches: &[Option<Match>],
    sentence_index: usize,
) -> bool {
    let aux = clause.iter().position(|w| {
        matches!(w.lower.as_str(), "is" | "are" | "was" | "were")
    });
    let Some(aux) = aux else { return false };
    let Some(participle) = clause.get(aux + 1) else {
        return false;
    };
    if !is_participle(&participle.lower, state.morph) {
        return false;
    }
    let Some(by) = clause[aux + 1..].iter().position(|w| w.lower == "by") else {
        return false;
    };
    let by = aux + 1 + by;

    let np1 = (0..aux)
        .rev()
        .filter_map(|i| matches[i].as_ref())
        .find(|m| outcome_eligible(m.category));
    let np2 = (by + 1..clause.len())
        .filter_map(|i| matches[i].as_ref())
        .find(|m| outcome_eligible(m.category));
    let (Some(np1), Some(np2)) = (np1, np2) else {
        return false;
    };

    let action = state.morph.participle_to_gerund(&participle.lower);
    let triple = AaoTriple::new(np2.term.clone(), &action, np1.term.clone(), true)
        .expect("participle rewriting yields a gerund");
    state.candidates.push(CandidateTriple {
        triple,
        sentence_index,
        confidence: Confidence::Gazetteer,
    });
    state.merge_anchor = None;
    state.recent_outcome = Some(np1.term.clone());
    true
}

/// A clause opening with a bare participle ("produced in-house") is a
/// reduced passive describing the previous clause's trailing noun.
fn try_reduced_passive(
    state: &mut AaoState,
    clause: &[Word],
    matches: &[Option<Match>],
    sentence_index: usize,
    sentence_subject: &Option<TermId>,
) -> bool {
    let Some(first) = clause.iter().position(|w| !state.stop.contains(&w.lower)) else {
        return false;
    };
    let word = &clause[first];
    if matches[first].is_some() || (word.capitalized && !word.sentence_initial) {
        return false;
    }
    // A plausible "-ed" participle: base verbs that merely end in "ed"
    // ("need") leave a stem too short to be one.
    match word.lower.strip_suffix("ed") {
        Some(stem) if stem.len() >= 3 => {}
        _ => return false,
    }
    let Some(np) = state.prev_clause_np.clone() else {
        return false;
    };
    let Ok(outcome) = canonicalize(&np) else {
        return false;
    };
    let Some(subject) = sentence_subject.clone().or_else(|| state.recent_actor.clone()) else {
        return false;
    };

    let action = state.morph.participle_to_gerund(&word.lower);
    let triple = AaoTriple::new(subject, &action, outcome.clone(), false)
        .expect("participle rewriting yields a gerund");
    state.candidates.push(CandidateTriple {
        triple,
        sentence_index,
        confidence: Confidence::Heuristic,
    });
    state.merge_anchor = None;
    state.recent_outcome = Some(outcome);
    true
}

/// For "submits it to the shop", additionally propose
/// (PizzaShop, receiving, Order).
fn try_transfer_inverse(
    state: &mut AaoState,
    clause: &[Word],
    matches: &[Option<Match>],
    sentence_index: usize,
    verb: &str,
    verb_end: usize,
    outcome: &TermId,
) {
    if verb.ends_with("ing") {
        return;
    }
    let base = state.morph.lemmatize_verb(verb);
    if !TRANSFER_VERBS.contains(&base.as_str()) {
        return;
    }
    let Some(to) = clause[verb_end..].iter().position(|w| w.lower == "to") else {
        return;
    };
    let to = verb_end + to;
    let recipient = (to + 1..clause.len())
        .filter_map(|i| matches[i].as_ref())
        .find(|m| outcome_eligible(m.category));
    let Some(recipient) = recipient else { return };
    if &recipient.term == outcome {
        return;
    }

    let triple = AaoTriple::new(recipient.term.clone(), "receiving", outcome.clone(), true)
        .expect("receiving is a gerund");
    state.candidates.push(CandidateTriple {
        triple,
        sentence_index,
        confidence: Confidence::Heuristic,
    });
    state.merge_anchor = None;
}

fn is_verbish(word: &Word, morph: &Morphology, stop: &Stopwords) -> bool {
    let s = &word.lower;
    if stop.contains(s) || (word.capitalized && !word.sentence_initial) {
        return false;
    }
    if morph.irregular_base(s).is_some() {
        return true;
    }
    if !s.chars().all(|c| c.is_ascii_alphabetic()) {
        return false;
    }
    (s.len() >= 5 && s.ends_with("ing"))
        || (s.len() >= 4 && s.ends_with("ed"))
        || (s.len() >= 4
            && s.ends_with('s')
            && !s.ends_with("ss")
            && !s.ends_with("us")
            && !s.ends_with("is"))
}

fn is_participle(word: &str, morph: &Morphology) -> bool {
    (word.len() >= 4 && word.ends_with("ed")) || morph.irregular_base(word).is_some()
}

fn to_action(morph: &Morphology, verb: &str) -> String {
    if verb.ends_with("ing") {
        verb.to_string()
    } else {
        morph.gerund(&morph.lemmatize_verb(verb))
    }
}
