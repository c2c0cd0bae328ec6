//! Ontology generation from the merged class diagram, Turtle output and
//! reasoner-lite consistency checks.
//!
//! The mapping: Object and Actor boxes become OWL classes, ISA arrows
//! subclass axioms, partOf arrows one shared `partOf` object property,
//! action arrows one object property per label (domains and ranges
//! collected across arrows), owned attributes datatype properties. Two
//! meta-classes `BusinessObject` and `BusinessActor` anchor every domain
//! class and carry the disjointness axiom that makes the inconsistency
//! checks meaningful.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::diagnostics::Diagnostic;
use crate::diagram::{ClassDiagram, EdgeKind, NodeKind};
use crate::graph::cycle_components;
use crate::model::{OpaalLexicon, TermId};

pub const META_OBJECT: &str = "BusinessObject";
pub const META_ACTOR: &str = "BusinessActor";
pub const DEFAULT_BASE_IRI: &str = "http://bpac.example/onto#";
pub const ONTOLOGY_FILE: &str = "ontology.ttl";

/// The structural relation keeps this fixed name; action labels that
/// would collide with it are rejected.
pub const PART_OF_PROPERTY: &str = "partOf";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OntologyError {
    #[error("property name {0:?} is used by both an attribute and a link")]
    NameClash(String),
    #[error("term {0} is neither an Object nor an Actor")]
    UncategorizedTerm(TermId),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ObjectProperty {
    pub domains: BTreeSet<TermId>,
    pub ranges: BTreeSet<TermId>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DatatypeProperty {
    pub domains: BTreeSet<TermId>,
}

/// Classes, properties and axioms of a generated ontology.
///
/// `partof_pairs` records which (part, whole) pairs contributed to the
/// shared `partOf` property. The pairs drive the acyclicity check but are
/// not ontology content (the emitted `partOf` property only carries the
/// unioned domains and ranges), so equality ignores them; two ontologies
/// are equal when their classes, axioms and properties coincide.
#[derive(Debug, Clone, Default)]
pub struct OntologyGraph {
    pub classes: BTreeSet<TermId>,
    pub subclass_axioms: BTreeSet<(TermId, TermId)>,
    pub object_properties: BTreeMap<String, ObjectProperty>,
    pub datatype_properties: BTreeMap<String, DatatypeProperty>,
    pub disjoint_pairs: BTreeSet<(TermId, TermId)>,
    pub partof_pairs: BTreeSet<(TermId, TermId)>,
}

impl PartialEq for OntologyGraph {
    fn eq(&self, other: &Self) -> bool {
        self.classes == other.classes
            && self.subclass_axioms == other.subclass_axioms
            && self.object_properties == other.object_properties
            && self.datatype_properties == other.datatype_properties
            && self.disjoint_pairs == other.disjoint_pairs
    }
}

impl Eq for OntologyGraph {}

impl OntologyGraph {
    /// The two meta-classes and their disjointness, the skeleton every
    /// generated ontology starts from.
    pub fn skeleton() -> OntologyGraph {
        let object = TermId::new(META_OBJECT).expect("valid meta-class name");
        let actor = TermId::new(META_ACTOR).expect("valid meta-class name");
        let mut graph = OntologyGraph::default();
        graph.classes.insert(object.clone());
        graph.classes.insert(actor.clone());
        graph.disjoint_pairs.insert(ordered_pair(actor, object));
        graph
    }

    /// Which actors perform what actions: every (domain, property, range)
    /// combination of the action-derived object properties.
    pub fn actor_action_tuples(&self) -> Vec<(TermId, String, TermId)> {
        let mut tuples = Vec::new();
        for (name, property) in &self.object_properties {
            if name == PART_OF_PROPERTY {
                continue;
            }
            for domain in &property.domains {
                for range in &property.ranges {
                    tuples.push((domain.clone(), name.clone(), range.clone()));
                }
            }
        }
        tuples
    }
}

fn ordered_pair(a: TermId, b: TermId) -> (TermId, TermId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Maps the merged class diagram (plus attribute ownership from the
/// lexicon) onto an ontology.
pub fn build_ontology(
    lexicon: &OpaalLexicon,
    merged: &ClassDiagram,
) -> Result<OntologyGraph, OntologyError> {
    let mut graph = OntologyGraph::skeleton();
    let meta_object = TermId::new(META_OBJECT).expect("valid meta-class name");
    let meta_actor = TermId::new(META_ACTOR).expect("valid meta-class name");

    for node in merged.nodes() {
        graph.classes.insert(node.term.clone());
        let parent = match node.node_kind {
            NodeKind::Object => meta_object.clone(),
            NodeKind::Actor => meta_actor.clone(),
        };
        graph.subclass_axioms.insert((node.term.clone(), parent));
    }

    for edge in merged.edges() {
        match &edge.edge_kind {
            EdgeKind::Isa => {
                graph
                    .subclass_axioms
                    .insert((edge.source.clone(), edge.target.clone()));
            }
            EdgeKind::PartOf => {
                let property = graph
                    .object_properties
                    .entry(PART_OF_PROPERTY.to_string())
                    .or_default();
                property.domains.insert(edge.source.clone());
                property.ranges.insert(edge.target.clone());
                graph
                    .partof_pairs
                    .insert((edge.source.clone(), edge.target.clone()));
            }
            EdgeKind::Action(label) => {
                let name = label.lower_camel();
                if name == PART_OF_PROPERTY {
                    return Err(OntologyError::NameClash(name));
                }
                let property = graph.object_properties.entry(name).or_default();
                property.domains.insert(edge.source.clone());
                property.ranges.insert(edge.target.clone());
            }
        }
    }

    // Owned attributes become datatype properties; their owners join the
    // class set even when no link put them on the diagram.
    for attr in &lexicon.attributes {
        if attr.owners.is_empty() {
            continue;
        }
        let name = attr.attr.lower_camel();
        if graph.object_properties.contains_key(&name)
            || graph.datatype_properties.contains_key(&name)
        {
            return Err(OntologyError::NameClash(name));
        }
        let mut domains = BTreeSet::new();
        for owner in &attr.owners {
            let parent = if lexicon.is_object(owner) {
                meta_object.clone()
            } else if lexicon.is_actor(owner) {
                meta_actor.clone()
            } else {
                return Err(OntologyError::UncategorizedTerm(owner.clone()));
            };
            graph.classes.insert(owner.clone());
            graph.subclass_axioms.insert((owner.clone(), parent));
            domains.insert(owner.clone());
        }
        graph
            .datatype_properties
            .insert(name, DatatypeProperty { domains });
    }

    Ok(graph)
}

// ---------------------------------------------------------------------------
// Turtle output
// ---------------------------------------------------------------------------

/// Serialises the ontology as a Turtle document.
///
/// Subject blocks are sorted by name, predicates within a block come in a
/// fixed order (`a`, `rdfs:subClassOf`, `rdfs:domain`, `rdfs:range`,
/// `owl:disjointWith`); multi-member domains and ranges are rendered as
/// anonymous union classes. Equal ontologies produce byte-identical text.
pub fn emit_turtle(graph: &OntologyGraph, base_iri: &str) -> String {
    let mut blocks: Vec<(String, String)> = Vec::new();

    let mut superclasses: BTreeMap<&TermId, Vec<&TermId>> = BTreeMap::new();
    for (child, parent) in &graph.subclass_axioms {
        superclasses.entry(child).or_default().push(parent);
    }

    for class in &graph.classes {
        let mut lines = vec![format!(":{class} a owl:Class")];
        if let Some(parents) = superclasses.get(class) {
            for parent in parents {
                lines.push(format!("rdfs:subClassOf :{parent}"));
            }
        }
        for (a, b) in &graph.disjoint_pairs {
            if a == class {
                lines.push(format!("owl:disjointWith :{b}"));
            }
        }
        blocks.push((class.as_str().to_string(), join_block(&lines)));
    }

    for (name, property) in &graph.object_properties {
        let mut lines = vec![format!(":{name} a owl:ObjectProperty")];
        lines.push(format!("rdfs:domain {}", class_expression(&property.domains)));
        lines.push(format!("rdfs:range {}", class_expression(&property.ranges)));
        blocks.push((name.clone(), join_block(&lines)));
    }

    for (name, property) in &graph.datatype_properties {
        let mut lines = vec![format!(":{name} a owl:DatatypeProperty")];
        lines.push(format!("rdfs:domain {}", class_expression(&property.domains)));
        blocks.push((name.clone(), join_block(&lines)));
    }

    blocks.sort_by(|a, b| a.0.cmp(&b.0));

    let mut out = String::new();
    out.push_str(&format!("@prefix : <{base_iri}> .\n"));
    out.push_str("@prefix owl: <http://www.w3.org/2002/07/owl#> .\n");
    out.push_str("@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .\n");
    for (_, block) in blocks {
        out.push('\n');
        out.push_str(&block);
        out.push('\n');
    }
    out
}

fn join_block(lines: &[String]) -> String {
    let mut out = String::new();
    for (i, line) in lines.iter().enumerate() {
        if i > 0 {
            out.push_str("    ");
        }
        out.push_str(line);
        if i + 1 < lines.len() {
            out.push_str(" ;\n");
        } else {
            out.push_str(" .");
        }
    }
    out
}

/// A named class for a single term, an anonymous union class otherwise.
fn class_expression(members: &BTreeSet<TermId>) -> String {
    if members.len() == 1 {
        let only = members.iter().next().expect("one member");
        format!(":{only}")
    } else {
        let list = members
            .iter()
            .map(|m| format!(":{m}"))
            .collect::<Vec<_>>()
            .join(" ");
        format!("[ a owl:Class ; owl:unionOf ( {list} ) ]")
    }
}

// ---------------------------------------------------------------------------
// Reasoner-lite checks
// ---------------------------------------------------------------------------

/// Structural consistency checks on an ontology:
///
/// - E005: the subclass graph must be acyclic;
/// - E020: no class may sit below both members of a disjoint pair;
/// - E021: every object property needs domains and ranges, every
///   datatype property domains;
/// - E006: the recorded partOf contributions must be acyclic.
pub fn check_ontology(graph: &OntologyGraph) -> Vec<Diagnostic> {
    let mut out = Vec::new();

    let subclass_edges: Vec<(TermId, TermId)> =
        graph.subclass_axioms.iter().cloned().collect();
    for cycle in cycle_components(&subclass_edges) {
        out.push(Diagnostic::error(
            "E005",
            ONTOLOGY_FILE,
            0,
            format!("subclass cycle involving {}", join_terms(&cycle)),
        ));
    }

    for class in &graph.classes {
        let ancestors = reflexive_superclasses(graph, class);
        for (a, b) in &graph.disjoint_pairs {
            if ancestors.contains(a) && ancestors.contains(b) {
                out.push(Diagnostic::error(
                    "E020",
                    ONTOLOGY_FILE,
                    0,
                    format!("class {class} is below both {a} and {b}, which are disjoint"),
                ));
            }
        }
    }

    for (name, property) in &graph.object_properties {
        if property.domains.is_empty() || property.ranges.is_empty() {
            out.push(Diagnostic::error(
                "E021",
                ONTOLOGY_FILE,
                0,
                format!("object property {name} is missing a domain or range"),
            ));
        }
    }
    for (name, property) in &graph.datatype_properties {
        if property.domains.is_empty() {
            out.push(Diagnostic::error(
                "E021",
                ONTOLOGY_FILE,
                0,
                format!("datatype property {name} is missing a domain"),
            ));
        }
    }

    let partof_edges: Vec<(TermId, TermId)> = graph.partof_pairs.iter().cloned().collect();
    for cycle in cycle_components(&partof_edges) {
        out.push(Diagnostic::error(
            "E006",
            ONTOLOGY_FILE,
            0,
            format!("partOf cycle involving {}", join_terms(&cycle)),
        ));
    }

    crate::diagnostics::sort_and_dedup(&mut out);
    out
}

fn join_terms(terms: &[TermId]) -> String {
    terms
        .iter()
        .map(TermId::as_str)
        .collect::<Vec<_>>()
        .join(", ")
}

/// The class itself plus everything reachable through subclass axioms.
fn reflexive_superclasses(graph: &OntologyGraph, class: &TermId) -> BTreeSet<TermId> {
    let mut seen: BTreeSet<TermId> = BTreeSet::new();
    let mut queue = vec![class.clone()];
    while let Some(current) = queue.pop() {
        if !seen.insert(current.clone()) {
            continue;
        }
        for (child, parent) in &graph.subclass_axioms {
            if child == &current && !seen.contains(parent) {
                queue.push(parent.clone());
            }
        }
    }
    seen
}
