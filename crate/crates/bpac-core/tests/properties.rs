//! Property tests: canvas round-tripping, merge algebra, morphology and
//! Turtle round-tripping over randomized inputs.

use std::collections::BTreeSet;

use proptest::prelude::*;

use bpac_core::diagram::{
    build_diagrams, emit_dot, merge_diagrams, ClassDiagram, DiagramEdge, DiagramNode, EdgeKind,
    NodeKind,
};
use bpac_core::io::{parse_canvas, write_canvas};
use bpac_core::model::{
    canonicalize, AaoMatrix, AaoTriple, AttributeDecl, BpSignature, Canvas, GlossaryEntry, Link,
    LinkKind, NarrativeText, OpaalLexicon, TermId,
};
use bpac_core::morphology::Morphology;
use bpac_core::ontology::{build_ontology, emit_turtle, DEFAULT_BASE_IRI};
use bpac_core::turtle::parse_ontology;

fn term_strategy() -> impl Strategy<Value = TermId> {
    proptest::string::string_regex("[A-Z][a-z]{1,6}([A-Z][a-z]{1,5}){0,2}")
        .expect("valid regex")
        .prop_map(|s| TermId::new(&s).expect("regex yields canonical names"))
}

/// Distinct terms (case-insensitively), which every list-valued canvas
/// section requires.
fn term_vec(max: usize) -> impl Strategy<Value = Vec<TermId>> {
    proptest::collection::vec(term_strategy(), 0..=max).prop_map(|terms| {
        let mut seen = BTreeSet::new();
        terms
            .into_iter()
            .filter(|t| seen.insert(t.clone()))
            .collect()
    })
}

fn text_strategy() -> impl Strategy<Value = String> {
    proptest::string::string_regex("[a-zA-Z0-9][a-zA-Z0-9 ,.!?'()-]{0,30}[a-zA-Z0-9.]")
        .expect("valid regex")
}

fn gerund_phrase() -> impl Strategy<Value = String> {
    proptest::string::string_regex("[a-z]{2,7}ing( and [a-z]{2,7}ing)?").expect("valid regex")
}

prop_compose! {
    fn signature_strategy()(
        name in text_strategy(),
        trigger in proptest::option::of(text_strategy()),
        key_actors in term_vec(3),
        key_objects in term_vec(3),
        input in proptest::option::of(text_strategy()),
        objective in proptest::option::of(text_strategy()),
        output in proptest::option::of(text_strategy()),
    ) -> BpSignature {
        BpSignature {
            name,
            trigger: trigger.unwrap_or_default(),
            key_actors,
            key_objects,
            input: input.unwrap_or_default(),
            objective: objective.unwrap_or_default(),
            output: output.unwrap_or_default(),
        }
    }
}

prop_compose! {
    fn aao_strategy()(
        actors in proptest::collection::vec(term_strategy(), 1..4),
        rows in proptest::collection::vec(
            (any::<prop::sample::Index>(), gerund_phrase(), term_strategy(), any::<bool>()),
            0..6,
        ),
    ) -> AaoMatrix {
        let mut out: Vec<AaoTriple> = Vec::new();
        let mut prev: Option<TermId> = None;
        for (actor_index, action, outcome, inherit) in rows {
            let explicit_actor = prev.is_none() || !inherit;
            let actor = if explicit_actor {
                actors[actor_index.index(actors.len())].clone()
            } else {
                prev.clone().expect("inherit only after a previous row")
            };
            prev = Some(actor.clone());
            out.push(AaoTriple::new(actor, &action, outcome, explicit_actor).expect("gerund"));
        }
        AaoMatrix::new(out).expect("first row explicit")
    }
}

prop_compose! {
    fn glossary_strategy()(
        rows in proptest::collection::vec(
            (term_strategy(), term_vec(2), text_strategy()),
            0..6,
        ),
    ) -> Vec<GlossaryEntry> {
        let mut seen = BTreeSet::new();
        rows.into_iter()
            .filter(|(term, _, _)| seen.insert(term.clone()))
            .map(|(term, synonyms, description)| {
                let synonyms: Vec<String> = synonyms
                    .into_iter()
                    .filter(|s| s != &term)
                    .map(|s| s.as_str().to_string())
                    .collect();
                GlossaryEntry::new(term, synonyms, description).expect("valid entry")
            })
            .collect()
    }
}

prop_compose! {
    fn lexicon_strategy()(
        objects in term_vec(4),
        processes in term_vec(4),
        actors in term_vec(4),
        attributes in proptest::collection::vec((term_strategy(), term_vec(2)), 0..3),
        link_specs in proptest::collection::vec(
            (0..3u8, term_strategy(), term_strategy(), term_strategy()),
            0..5,
        ),
    ) -> OpaalLexicon {
        let mut lexicon = OpaalLexicon::default();
        lexicon.objects.extend(objects);
        lexicon.processes.extend(processes);
        lexicon.actors.extend(actors);
        let mut seen_attrs = BTreeSet::new();
        for (attr, owners) in attributes {
            if seen_attrs.insert(attr.clone()) {
                lexicon.attributes.push(AttributeDecl::new(attr, owners).expect("owners unique"));
            }
        }
        for (kind, label, source, target) in link_specs {
            if source == target {
                continue;
            }
            let kind = match kind {
                0 => LinkKind::Isa,
                1 => LinkKind::PartOf,
                _ => LinkKind::Functional(label),
            };
            lexicon.links.push(Link::new(kind, source, target).expect("no self-link"));
        }
        lexicon
    }
}

prop_compose! {
    fn canvas_strategy()(
        signature in signature_strategy(),
        statement in proptest::option::of(text_strategy()),
        story_bodies in proptest::collection::vec(
            ("[a-z][a-z0-9-]{0,7}", text_strategy()),
            0..3,
        ),
        aao in aao_strategy(),
        glossary in glossary_strategy(),
        lexicon in lexicon_strategy(),
    ) -> Canvas {
        let statement = statement.map(|s| NarrativeText::statement(s).expect("non-empty"));
        let mut ids = BTreeSet::new();
        let mut stories: Vec<NarrativeText> = story_bodies
            .into_iter()
            .filter(|(id, _)| ids.insert(id.to_lowercase()))
            .map(|(id, body)| NarrativeText::user_story(id, body).expect("valid story"))
            .collect();
        stories.sort_by(|a, b| a.story_id.cmp(&b.story_id));
        Canvas { signature, statement, stories, aao, glossary, lexicon }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 500, ..ProptestConfig::default() })]

    /// Write then parse reproduces the canvas, and reports no errors.
    #[test]
    fn canvas_round_trips(canvas in canvas_strategy()) {
        let dir = tempfile::tempdir().unwrap();
        write_canvas(&canvas, dir.path()).unwrap();
        let result = parse_canvas(dir.path());
        for d in &result.diagnostics {
            prop_assert!(
                d.level != bpac_core::Level::Error,
                "round-trip produced {d}"
            );
        }
        prop_assert_eq!(result.canvas.as_ref(), Some(&canvas));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 300, ..ProptestConfig::default() })]

    #[test]
    fn canonicalize_is_idempotent(surface in "[A-Za-z][A-Za-z0-9 -]{0,20}") {
        if let Ok(first) = canonicalize(&surface) {
            let second = canonicalize(first.as_str()).expect("canonical input stays valid");
            prop_assert_eq!(first.as_str(), second.as_str());
        }
    }

    #[test]
    fn gerunds_always_end_in_ing(token in "[a-z]{1,10}") {
        let morph = Morphology::builtin();
        let gerund = morph.gerund(&morph.lemmatize_verb(&token));
        prop_assert!(gerund.ends_with("ing"), "{token} -> {gerund}");
    }
}

// ---------------------------------------------------------------------------
// Merge algebra
// ---------------------------------------------------------------------------

/// Diagrams drawn from a shared pool of terms with fixed kinds, so merges
/// never hit kind conflicts.
fn diagram_strategy() -> impl Strategy<Value = ClassDiagram> {
    let pool = proptest::collection::vec((term_strategy(), any::<bool>(), term_vec(2)), 1..8)
        .prop_map(|nodes| {
            let mut seen = BTreeSet::new();
            nodes
                .into_iter()
                .filter(|(t, _, _)| seen.insert(t.clone()))
                .collect::<Vec<_>>()
        });
    (pool, proptest::collection::vec((any::<prop::sample::Index>(), any::<prop::sample::Index>(), 0..3u8), 0..10))
        .prop_map(|(pool, edge_specs)| {
            let nodes: Vec<DiagramNode> = pool
                .iter()
                .map(|(term, is_actor, attrs)| DiagramNode {
                    term: term.clone(),
                    node_kind: if *is_actor { NodeKind::Actor } else { NodeKind::Object },
                    attributes: attrs.clone(),
                })
                .collect();
            let edges: Vec<DiagramEdge> = edge_specs
                .into_iter()
                .map(|(s, t, kind)| {
                    let source = nodes[s.index(nodes.len())].term.clone();
                    let target = nodes[t.index(nodes.len())].term.clone();
                    let edge_kind = match kind {
                        0 => EdgeKind::Isa,
                        1 => EdgeKind::PartOf,
                        _ => EdgeKind::Action(source.clone()),
                    };
                    DiagramEdge { source, target, edge_kind }
                })
                .collect();
            ClassDiagram::new("part", nodes, edges).expect("pool edges satisfy closure")
        })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 1000, ..ProptestConfig::default() })]

    #[test]
    fn merge_identity_and_idempotence(diagram in diagram_strategy()) {
        let empty = ClassDiagram::empty("part");
        let with_empty = merge_diagrams(&[diagram.clone(), empty], "part").unwrap();
        prop_assert_eq!(&with_empty, &diagram);
        let doubled = merge_diagrams(&[diagram.clone(), diagram.clone()], "part").unwrap();
        prop_assert_eq!(&doubled, &diagram);
    }

    #[test]
    fn merge_is_commutative_and_associative_up_to_rendering(
        a in diagram_strategy(),
        b in diagram_strategy(),
        c in diagram_strategy(),
    ) {
        let ab = merge_diagrams(&[a.clone(), b.clone()], "m").unwrap();
        let ba = merge_diagrams(&[b.clone(), a.clone()], "m").unwrap();
        prop_assert_eq!(emit_dot(&ab), emit_dot(&ba));

        let ab_c = merge_diagrams(&[ab, c.clone()], "m").unwrap();
        let bc = merge_diagrams(&[b, c], "m").unwrap();
        let a_bc = merge_diagrams(&[a, bc], "m").unwrap();
        prop_assert_eq!(emit_dot(&ab_c), emit_dot(&a_bc));
    }

    #[test]
    fn dot_rendering_is_deterministic(diagram in diagram_strategy()) {
        prop_assert_eq!(emit_dot(&diagram), emit_dot(&diagram));
    }
}

// ---------------------------------------------------------------------------
// Lexicon -> diagrams -> ontology -> Turtle -> ontology
// ---------------------------------------------------------------------------

/// Well-typed lexicons: categories disjoint, links only between Object
/// and Actor terms, functional labels drawn from the processes.
fn typed_lexicon_strategy() -> impl Strategy<Value = OpaalLexicon> {
    (
        proptest::collection::vec(term_strategy(), 1..5),
        proptest::collection::vec(term_strategy(), 1..4),
        proptest::collection::vec(term_strategy(), 1..4),
        proptest::collection::vec(
            (any::<prop::sample::Index>(), any::<prop::sample::Index>(), any::<prop::sample::Index>(), 0..3u8),
            0..8,
        ),
        proptest::collection::vec((any::<prop::sample::Index>(), any::<prop::sample::Index>()), 0..3),
    )
        .prop_map(|(raw_objects, raw_actors, raw_processes, link_specs, attr_specs)| {
            let mut lexicon = OpaalLexicon::default();
            let mut taken: BTreeSet<TermId> = BTreeSet::new();
            let mut claim = |t: &TermId| taken.insert(t.clone()) && t.folded() != "partof";
            let objects: Vec<TermId> =
                raw_objects.iter().filter(|t| claim(t)).cloned().collect();
            let actors: Vec<TermId> = raw_actors.iter().filter(|t| claim(t)).cloned().collect();
            let processes: Vec<TermId> =
                raw_processes.iter().filter(|t| claim(t)).cloned().collect();
            lexicon.objects.extend(objects.clone());
            lexicon.actors.extend(actors.clone());
            lexicon.processes.extend(processes.clone());

            let entities: Vec<TermId> =
                objects.iter().chain(actors.iter()).cloned().collect();
            if !entities.is_empty() {
                for (si, ti, pi, kind) in link_specs {
                    let source = entities[si.index(entities.len())].clone();
                    let target = entities[ti.index(entities.len())].clone();
                    if source == target {
                        continue;
                    }
                    let kind = match kind {
                        0 => LinkKind::Isa,
                        1 => LinkKind::PartOf,
                        _ => {
                            if processes.is_empty() || !lexicon.is_actor(&source) {
                                LinkKind::PartOf
                            } else {
                                LinkKind::Functional(
                                    processes[pi.index(processes.len())].clone(),
                                )
                            }
                        }
                    };
                    lexicon
                        .links
                        .push(Link::new(kind, source, target).expect("no self-link"));
                }
                for (ai, oi) in attr_specs {
                    let attr = TermId::new(&format!(
                        "Attr{}",
                        entities[ai.index(entities.len())].as_str()
                    ))
                    .expect("valid attribute name");
                    if !claim(&attr) {
                        continue;
                    }
                    let owner = entities[oi.index(entities.len())].clone();
                    lexicon
                        .attributes
                        .push(AttributeDecl::new(attr, vec![owner]).expect("one owner"));
                }
            }
            lexicon
        })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 300, ..ProptestConfig::default() })]

    #[test]
    fn generated_ontologies_round_trip_through_turtle(lexicon in typed_lexicon_strategy()) {
        let (structural, functional) = build_diagrams(&lexicon).unwrap();
        let merged = merge_diagrams(&[structural, functional], "merged").unwrap();
        let graph = build_ontology(&lexicon, &merged).unwrap();
        let ttl = emit_turtle(&graph, DEFAULT_BASE_IRI);
        let back = parse_ontology(&ttl).expect("emitted turtle parses");
        prop_assert_eq!(back, graph);
    }

    #[test]
    fn merge_preserves_exactly_the_lexicon_links(lexicon in typed_lexicon_strategy()) {
        let (structural, functional) = build_diagrams(&lexicon).unwrap();
        let merged = merge_diagrams(&[structural, functional], "merged").unwrap();
        let merged_edges: BTreeSet<(TermId, TermId, EdgeKind)> = merged
            .edges()
            .map(|e| (e.source.clone(), e.target.clone(), e.edge_kind.clone()))
            .collect();
        let link_edges: BTreeSet<(TermId, TermId, EdgeKind)> = lexicon
            .links
            .iter()
            .map(|l| {
                let kind = match &l.kind {
                    LinkKind::Isa => EdgeKind::Isa,
                    LinkKind::PartOf => EdgeKind::PartOf,
                    LinkKind::Functional(p) => EdgeKind::Action(p.clone()),
                };
                (l.source.clone(), l.target.clone(), kind)
            })
            .collect();
        prop_assert_eq!(merged_edges, link_edges);
    }
}
