//! Class-diagram generation from the lexicon, and DOT serialization.
//!
//! The lexicon maps onto labelled graphs: Object and Actor terms become
//! class boxes (attribute terms listed inside the box of their owner),
//! links become typed arrows. Instead of one large diagram the builder
//! partitions by link kind into a structural diagram (ISA and partOf
//! arrows) and a functional diagram (action arrows); [`merge_diagrams`]
//! reassembles a global view. [`emit_dot`] renders any diagram as a DOT
//! digraph with a byte-deterministic layout, so golden-file comparisons
//! and diffing work.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::model::{LinkKind, OpaalLexicon, TermId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagramError {
    #[error("term {0} is drawn as both an Object and an Actor")]
    KindConflict(TermId),
    #[error("edge endpoint {0} is not a node of the diagram")]
    ClosureViolation(TermId),
    #[error("link endpoint {0} is neither an Object nor an Actor term")]
    UncategorizedTerm(TermId),
}

/// Whether a class box is drawn as a plain entity or a (filled) actor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum NodeKind {
    Object,
    Actor,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagramNode {
    pub term: TermId,
    pub node_kind: NodeKind,
    pub attributes: Vec<TermId>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum EdgeKind {
    Isa,
    PartOf,
    Action(TermId),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct DiagramEdge {
    pub source: TermId,
    pub target: TermId,
    pub edge_kind: EdgeKind,
}

/// A labelled graph of entity boxes and typed arrows.
///
/// Invariants held by construction: every edge endpoint is a node
/// (closure) and there are no duplicate `(source, target, kind)` edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassDiagram {
    pub name: String,
    nodes: BTreeMap<TermId, DiagramNode>,
    edges: BTreeSet<DiagramEdge>,
}

impl ClassDiagram {
    pub fn empty(name: impl Into<String>) -> ClassDiagram {
        ClassDiagram {
            name: name.into(),
            nodes: BTreeMap::new(),
            edges: BTreeSet::new(),
        }
    }

    pub fn new(
        name: impl Into<String>,
        nodes: Vec<DiagramNode>,
        edges: Vec<DiagramEdge>,
    ) -> Result<ClassDiagram, DiagramError> {
        let mut diagram = ClassDiagram::empty(name);
        for node in nodes {
            diagram.insert_node(node)?;
        }
        for edge in edges {
            diagram.insert_edge(edge)?;
        }
        Ok(diagram)
    }

    fn insert_node(&mut self, node: DiagramNode) -> Result<(), DiagramError> {
        match self.nodes.get_mut(&node.term) {
            None => {
                self.nodes.insert(node.term.clone(), node);
            }
            Some(existing) => {
                if existing.node_kind != node.node_kind {
                    return Err(DiagramError::KindConflict(node.term));
                }
                for attr in node.attributes {
                    if !existing.attributes.contains(&attr) {
                        existing.attributes.push(attr);
                    }
                }
            }
        }
        Ok(())
    }

    fn insert_edge(&mut self, edge: DiagramEdge) -> Result<(), DiagramError> {
        for endpoint in [&edge.source, &edge.target] {
            if !self.nodes.contains_key(endpoint) {
                return Err(DiagramError::ClosureViolation(endpoint.clone()));
            }
        }
        self.edges.insert(edge);
        Ok(())
    }

    pub fn nodes(&self) -> impl Iterator<Item = &DiagramNode> {
        self.nodes.values()
    }

    pub fn edges(&self) -> impl Iterator<Item = &DiagramEdge> {
        self.edges.iter()
    }

    pub fn node(&self, term: &TermId) -> Option<&DiagramNode> {
        self.nodes.get(term)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty() && self.edges.is_empty()
    }
}

/// Builds the structural and functional subdiagrams of a lexicon.
///
/// The structural diagram holds every ISA and partOf arrow with its
/// endpoints, the functional diagram every action arrow. Each node lists
/// the attributes owned by its term. A lexicon with no links at all still
/// gets its Object and Actor terms drawn as bare boxes in the structural
/// diagram; once links exist, the diagrams show the linked terms.
pub fn build_diagrams(
    lexicon: &OpaalLexicon,
) -> Result<(ClassDiagram, ClassDiagram), DiagramError> {
    let mut structural = ClassDiagram::empty("structural");
    let mut functional = ClassDiagram::empty("functional");

    let make_node = |term: &TermId| -> Result<DiagramNode, DiagramError> {
        let node_kind = if lexicon.is_object(term) {
            NodeKind::Object
        } else if lexicon.is_actor(term) {
            NodeKind::Actor
        } else {
            return Err(DiagramError::UncategorizedTerm(term.clone()));
        };
        let attributes = lexicon
            .attributes
            .iter()
            .filter(|a| a.owners.contains(term))
            .map(|a| a.attr.clone())
            .collect();
        Ok(DiagramNode {
            term: term.clone(),
            node_kind,
            attributes,
        })
    };

    for link in &lexicon.links {
        let (diagram, edge_kind) = match &link.kind {
            LinkKind::Isa => (&mut structural, EdgeKind::Isa),
            LinkKind::PartOf => (&mut structural, EdgeKind::PartOf),
            LinkKind::Functional(label) => {
                (&mut functional, EdgeKind::Action(label.clone()))
            }
        };
        diagram.insert_node(make_node(&link.source)?)?;
        diagram.insert_node(make_node(&link.target)?)?;
        diagram.insert_edge(DiagramEdge {
            source: link.source.clone(),
            target: link.target.clone(),
            edge_kind,
        })?;
    }

    if lexicon.links.is_empty() {
        for term in lexicon.objects.iter().chain(lexicon.actors.iter()) {
            structural.insert_node(make_node(term)?)?;
        }
    }

    Ok((structural, functional))
}

/// Merges subdiagrams into one diagram named `name`.
///
/// Nodes are unioned by term (attribute lists unioned, first-seen order)
/// and edges de-duplicated; a term drawn as an Object in one part and an
/// Actor in another is a [`DiagramError::KindConflict`].
pub fn merge_diagrams(
    parts: &[ClassDiagram],
    name: impl Into<String>,
) -> Result<ClassDiagram, DiagramError> {
    let mut merged = ClassDiagram::empty(name);
    for part in parts {
        for node in part.nodes() {
            merged.insert_node(node.clone())?;
        }
    }
    for part in parts {
        for edge in part.edges() {
            merged.insert_edge(edge.clone())?;
        }
    }
    Ok(merged)
}

/// Renders a diagram as a DOT digraph.
///
/// Nodes come first, then edges, each block sorted lexicographically by
/// its rendered line; attribute rows inside a record label are sorted as
/// well. Equal diagrams therefore produce byte-identical text, whatever
/// order they were assembled in.
pub fn emit_dot(diagram: &ClassDiagram) -> String {
    let mut node_lines: Vec<String> = diagram
        .nodes()
        .map(|node| {
            let mut attrs: Vec<&TermId> = node.attributes.iter().collect();
            attrs.sort();
            let label = if attrs.is_empty() {
                format!("{{{}}}", node.term)
            } else {
                let rows: String = attrs.iter().map(|a| format!("{a}\\l")).collect();
                format!("{{{}|{rows}}}", node.term)
            };
            let style = match node.node_kind {
                NodeKind::Actor => "style=filled, ",
                NodeKind::Object => "",
            };
            format!("\"{}\" [shape=record, {style}label=\"{label}\"]", node.term)
        })
        .collect();
    node_lines.sort();

    let mut edge_lines: Vec<String> = diagram
        .edges()
        .map(|edge| {
            let decoration = match &edge.edge_kind {
                EdgeKind::Isa => "[arrowhead=empty, label=\"ISA\"]".to_string(),
                EdgeKind::PartOf => "[arrowhead=diamond, label=\"partOf\"]".to_string(),
                EdgeKind::Action(label) => {
                    format!("[arrowhead=normal, label=\"{label}\"]")
                }
            };
            format!("\"{}\" -> \"{}\" {decoration}", edge.source, edge.target)
        })
        .collect();
    edge_lines.sort();

    let mut out = format!("digraph {} {{\n", diagram.name);
    for line in node_lines.iter().chain(edge_lines.iter()) {
        out.push_str("  ");
        out.push_str(line);
        out.push('\n');
    }
    out.push_str("}\n");
    out
}
