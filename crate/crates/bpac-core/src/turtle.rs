//! A minimal Turtle reader for the documents this toolkit emits.
//!
//! Covers exactly the subset produced by `ontology::emit_turtle`: prefix
//! declarations, `a` typing, `rdfs:subClassOf`, `rdfs:domain`,
//! `rdfs:range`, `owl:disjointWith`, and anonymous union classes
//! `[ a owl:Class ; owl:unionOf ( :A :B ) ]`. Enough for round-trip
//! verification and for loading a previously generated ontology back in.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::model::TermId;
use crate::ontology::{DatatypeProperty, ObjectProperty, OntologyGraph};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TurtleError {
    #[error("unexpected end of document")]
    UnexpectedEnd,
    #[error("unexpected token {0:?}")]
    UnexpectedToken(String),
    #[error("unknown prefix in {0:?}")]
    UnknownPrefix(String),
    #[error("invalid class name {0:?}")]
    InvalidClassName(String),
    #[error("{0} is referenced but never declared as a class")]
    UndeclaredTerm(String),
    #[error("unsupported predicate {0:?}")]
    UnsupportedPredicate(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    AtPrefix,
    Iri(String),
    /// `pfx:local`, with the default prefix stored as an empty string.
    QName(String, String),
    A,
    Semicolon,
    Dot,
    OpenBracket,
    CloseBracket,
    OpenParen,
    CloseParen,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::AtPrefix => write!(f, "@prefix"),
            Token::Iri(iri) => write!(f, "<{iri}>"),
            Token::QName(p, l) => write!(f, "{p}:{l}"),
            Token::A => write!(f, "a"),
            Token::Semicolon => write!(f, ";"),
            Token::Dot => write!(f, "."),
            Token::OpenBracket => write!(f, "["),
            Token::CloseBracket => write!(f, "]"),
            Token::OpenParen => write!(f, "("),
            Token::CloseParen => write!(f, ")"),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<Token>, TurtleError> {
    let mut tokens = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            _ if c.is_whitespace() => {
                chars.next();
            }
            '#' => {
                for next in chars.by_ref() {
                    if next == '\n' {
                        break;
                    }
                }
            }
            '<' => {
                chars.next();
                let mut iri = String::new();
                loop {
                    match chars.next() {
                        Some('>') => break,
                        Some(ch) => iri.push(ch),
                        None => return Err(TurtleError::UnexpectedEnd),
                    }
                }
                tokens.push(Token::Iri(iri));
            }
            ';' => {
                chars.next();
                tokens.push(Token::Semicolon);
            }
            '.' => {
                chars.next();
                tokens.push(Token::Dot);
            }
            '[' => {
                chars.next();
                tokens.push(Token::OpenBracket);
            }
            ']' => {
                chars.next();
                tokens.push(Token::CloseBracket);
            }
            '(' => {
                chars.next();
                tokens.push(Token::OpenParen);
            }
            ')' => {
                chars.next();
                tokens.push(Token::CloseParen);
            }
            '@' => {
                chars.next();
                let mut word = String::new();
                while let Some(&ch) = chars.peek() {
                    if ch.is_ascii_alphabetic() {
                        word.push(ch);
                        chars.next();
                    } else {
                        break;
                    }
                }
                if word != "prefix" {
                    return Err(TurtleError::UnexpectedToken(format!("@{word}")));
                }
                tokens.push(Token::AtPrefix);
            }
            _ if c.is_alphanumeric() || c == ':' || c == '_' => {
                let mut word = String::new();
                while let Some(&ch) = chars.peek() {
                    if ch.is_alphanumeric() || ch == ':' || ch == '_' {
                        word.push(ch);
                        chars.next();
                    } else {
                        break;
                    }
                }
                if word == "a" {
                    tokens.push(Token::A);
                } else if let Some((prefix, local)) = word.split_once(':') {
                    tokens.push(Token::QName(prefix.to_string(), local.to_string()));
                } else {
                    return Err(TurtleError::UnexpectedToken(word));
                }
            }
            other => return Err(TurtleError::UnexpectedToken(other.to_string())),
        }
    }
    Ok(tokens)
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Object {
    Named(String),
    Union(Vec<String>),
    Type(String),
}

#[derive(Debug, Default)]
struct Subject {
    is_class: bool,
    is_object_property: bool,
    is_datatype_property: bool,
    superclasses: Vec<String>,
    domains: Vec<Object>,
    ranges: Vec<Object>,
    disjoint_with: Vec<String>,
}

/// Parses a Turtle document produced by this toolkit back into an
/// [`OntologyGraph`]. The `partof_pairs` provenance is not serialised and
/// comes back empty; graph equality ignores it.
pub fn parse_ontology(text: &str) -> Result<OntologyGraph, TurtleError> {
    let tokens = tokenize(text)?;
    let mut pos = 0usize;
    let mut subjects: Vec<(String, Subject)> = Vec::new();

    while pos < tokens.len() {
        match &tokens[pos] {
            Token::AtPrefix => {
                // @prefix pfx: <iri> .
                let name = expect_qname(&tokens, pos + 1)?;
                if !name.1.is_empty() {
                    return Err(TurtleError::UnexpectedToken(format!("{}:{}", name.0, name.1)));
                }
                match tokens.get(pos + 2) {
                    Some(Token::Iri(_)) => {}
                    other => return err_token(other),
                }
                match tokens.get(pos + 3) {
                    Some(Token::Dot) => {}
                    other => return err_token(other),
                }
                pos += 4;
            }
            Token::QName(prefix, local) => {
                if !prefix.is_empty() {
                    return Err(TurtleError::UnknownPrefix(format!("{prefix}:{local}")));
                }
                let mut subject = Subject::default();
                pos += 1;
                parse_predicates(&tokens, &mut pos, &mut subject)?;
                subjects.push((local.clone(), subject));
            }
            other => return Err(TurtleError::UnexpectedToken(other.to_string())),
        }
    }

    assemble(subjects)
}

fn err_token<T>(token: Option<&Token>) -> Result<T, TurtleError> {
    match token {
        Some(t) => Err(TurtleError::UnexpectedToken(t.to_string())),
        None => Err(TurtleError::UnexpectedEnd),
    }
}

fn expect_qname(tokens: &[Token], pos: usize) -> Result<(String, String), TurtleError> {
    match tokens.get(pos) {
        Some(Token::QName(p, l)) => Ok((p.clone(), l.clone())),
        other => err_token(other),
    }
}

/// Parses `predicate object (; predicate object)* .` into `subject`,
/// leaving `pos` just past the closing dot.
fn parse_predicates(
    tokens: &[Token],
    pos: &mut usize,
    subject: &mut Subject,
) -> Result<(), TurtleError> {
    loop {
        let predicate = match tokens.get(*pos) {
            Some(Token::A) => {
                *pos += 1;
                None
            }
            Some(Token::QName(p, l)) => {
                *pos += 1;
                Some(format!("{p}:{l}"))
            }
            other => return err_token(other),
        };
        let object = parse_object(tokens, pos)?;
        match (predicate.as_deref(), object) {
            (None, Object::Type(t)) => match t.as_str() {
                "owl:Class" => subject.is_class = true,
                "owl:ObjectProperty" => subject.is_object_property = true,
                "owl:DatatypeProperty" => subject.is_datatype_property = true,
                other => return Err(TurtleError::UnexpectedToken(other.to_string())),
            },
            (Some("rdfs:subClassOf"), Object::Named(name)) => subject.superclasses.push(name),
            (Some("owl:disjointWith"), Object::Named(name)) => subject.disjoint_with.push(name),
            (Some("rdfs:domain"), object @ (Object::Named(_) | Object::Union(_))) => {
                subject.domains.push(object)
            }
            (Some("rdfs:range"), object @ (Object::Named(_) | Object::Union(_))) => {
                subject.ranges.push(object)
            }
            (Some(other), _) => return Err(TurtleError::UnsupportedPredicate(other.to_string())),
            (None, other) => {
                return Err(TurtleError::UnexpectedToken(format!("{other:?}")))
            }
        }
        match tokens.get(*pos) {
            Some(Token::Semicolon) => {
                *pos += 1;
            }
            Some(Token::Dot) => {
                *pos += 1;
                return Ok(());
            }
            other => return err_token(other),
        }
    }
}

fn parse_object(tokens: &[Token], pos: &mut usize) -> Result<Object, TurtleError> {
    match tokens.get(*pos) {
        Some(Token::QName(prefix, local)) => {
            *pos += 1;
            if prefix.is_empty() {
                Ok(Object::Named(local.clone()))
            } else {
                Ok(Object::Type(format!("{prefix}:{local}")))
            }
        }
        Some(Token::OpenBracket) => {
            // [ a owl:Class ; owl:unionOf ( :A :B ) ]
            *pos += 1;
            match tokens.get(*pos) {
                Some(Token::A) => *pos += 1,
                other => return err_token(other),
            }
            match tokens.get(*pos) {
                Some(Token::QName(p, l)) if p == "owl" && l == "Class" => *pos += 1,
                other => return err_token(other),
            }
            match tokens.get(*pos) {
                Some(Token::Semicolon) => *pos += 1,
                other => return err_token(other),
            }
            match tokens.get(*pos) {
                Some(Token::QName(p, l)) if p == "owl" && l == "unionOf" => *pos += 1,
                other => return err_token(other),
            }
            match tokens.get(*pos) {
                Some(Token::OpenParen) => *pos += 1,
                other => return err_token(other),
            }
            let mut members = Vec::new();
            loop {
                match tokens.get(*pos) {
                    Some(Token::QName(p, l)) if p.is_empty() => {
                        members.push(l.clone());
                        *pos += 1;
                    }
                    Some(Token::CloseParen) => {
                        *pos += 1;
                        break;
                    }
                    other => return err_token(other),
                }
            }
            match tokens.get(*pos) {
                Some(Token::CloseBracket) => *pos += 1,
                other => return err_token(other),
            }
            Ok(Object::Union(members))
        }
        other => err_token(other),
    }
}

fn assemble(subjects: Vec<(String, Subject)>) -> Result<OntologyGraph, TurtleError> {
    let mut graph = OntologyGraph::default();
    let to_term = |name: &str| -> Result<TermId, TurtleError> {
        TermId::new(name).map_err(|_| TurtleError::InvalidClassName(name.to_string()))
    };

    for (name, subject) in &subjects {
        if subject.is_class {
            graph.classes.insert(to_term(name)?);
        }
    }

    let check_declared = |term: &TermId, graph: &OntologyGraph| -> Result<(), TurtleError> {
        if graph.classes.contains(term) {
            Ok(())
        } else {
            Err(TurtleError::UndeclaredTerm(term.to_string()))
        }
    };

    let expand = |object: &Object, graph: &OntologyGraph| -> Result<BTreeSet<TermId>, TurtleError> {
        let names = match object {
            Object::Named(name) => vec![name.clone()],
            Object::Union(members) => members.clone(),
            Object::Type(t) => return Err(TurtleError::UnexpectedToken(t.clone())),
        };
        let mut terms = BTreeSet::new();
        for name in names {
            let term = to_term(&name)?;
            check_declared(&term, graph)?;
            terms.insert(term);
        }
        Ok(terms)
    };

    for (name, subject) in &subjects {
        if subject.is_class {
            let class = to_term(name)?;
            for superclass in &subject.superclasses {
                let parent = to_term(superclass)?;
                check_declared(&parent, &graph)?;
                graph.subclass_axioms.insert((class.clone(), parent));
            }
            for other in &subject.disjoint_with {
                let other = to_term(other)?;
                check_declared(&other, &graph)?;
                let pair = if class <= other {
                    (class.clone(), other)
                } else {
                    (other, class.clone())
                };
                graph.disjoint_pairs.insert(pair);
            }
        }
        if subject.is_object_property {
            let mut property = ObjectProperty::default();
            for domain in &subject.domains {
                property.domains.extend(expand(domain, &graph)?);
            }
            for range in &subject.ranges {
                property.ranges.extend(expand(range, &graph)?);
            }
            graph.object_properties.insert(name.clone(), property);
        }
        if subject.is_datatype_property {
            let mut property = DatatypeProperty::default();
            for domain in &subject.domains {
                property.domains.extend(expand(domain, &graph)?);
            }
            graph.datatype_properties.insert(name.clone(), property);
        }
    }

    Ok(graph)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ontology::{emit_turtle, DEFAULT_BASE_IRI};

    #[test]
    fn skeleton_round_trips() {
        let graph = OntologyGraph::skeleton();
        let ttl = emit_turtle(&graph, DEFAULT_BASE_IRI);
        let back = parse_ontology(&ttl).unwrap();
        assert_eq!(back, graph);
    }

    #[test]
    fn a_property_document_parses() {
        let ttl = "@prefix : <http://bpac.example/onto#> .\n\
                   @prefix owl: <http://www.w3.org/2002/07/owl#> .\n\
                   @prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .\n\
                   \n\
                   :Customer a owl:Class .\n\
                   \n\
                   :Order a owl:Class .\n\
                   \n\
                   :placingOrder a owl:ObjectProperty ;\n\
                       rdfs:domain :Customer ;\n\
                       rdfs:range :Order .\n";
        let graph = parse_ontology(ttl).unwrap();
        assert_eq!(graph.classes.len(), 2);
        let property = &graph.object_properties["placingOrder"];
        assert_eq!(property.domains.len(), 1);
        assert_eq!(property.ranges.len(), 1);
    }

    #[test]
    fn union_expressions_expand_to_member_sets() {
        let ttl = "@prefix : <http://bpac.example/onto#> .\n\
                   :A a owl:Class .\n\
                   :B a owl:Class .\n\
                   :C a owl:Class .\n\
                   :partOf a owl:ObjectProperty ;\n\
                       rdfs:domain [ a owl:Class ; owl:unionOf ( :A :B ) ] ;\n\
                       rdfs:range :C .\n";
        let graph = parse_ontology(ttl).unwrap();
        let property = &graph.object_properties["partOf"];
        assert_eq!(property.domains.len(), 2);
    }

    #[test]
    fn comments_are_skipped() {
        let ttl = "@prefix : <http://x#> .\n# a comment\n:A a owl:Class .\n";
        let graph = parse_ontology(ttl).unwrap();
        assert_eq!(graph.classes.len(), 1);
    }

    #[test]
    fn undeclared_references_are_rejected() {
        let ttl = "@prefix : <http://x#> .\n:A a owl:Class ;\n    rdfs:subClassOf :Ghost .\n";
        assert!(matches!(
            parse_ontology(ttl),
            Err(TurtleError::UndeclaredTerm(_))
        ));
    }

    #[test]
    fn garbage_is_rejected() {
        assert!(parse_ontology("hello world").is_err());
        assert!(parse_ontology(":A a owl:Class").is_err(), "missing dot");
    }
}
