//! Cycle detection shared by the link validator and the ontology checks.

use std::collections::{BTreeMap, BTreeSet};

use crate::model::TermId;

/// Strongly connected components with more than one member in the
/// directed graph formed by `edges`, via iterative Tarjan. Nodes are
/// visited in sorted order and each component comes back sorted, so the
/// result is deterministic. Components of size one are dropped: the
/// model rejects self-links, so every returned component is a cycle.
pub(crate) fn cycle_components(edges: &[(TermId, TermId)]) -> Vec<Vec<TermId>> {
    let mut nodes: BTreeSet<TermId> = BTreeSet::new();
    let mut succ: BTreeMap<TermId, BTreeSet<TermId>> = BTreeMap::new();
    for (source, target) in edges {
        nodes.insert(source.clone());
        nodes.insert(target.clone());
        succ.entry(source.clone())
            .or_default()
            .insert(target.clone());
    }

    let node_list: Vec<TermId> = nodes.iter().cloned().collect();
    let index_of: BTreeMap<&TermId, usize> =
        node_list.iter().enumerate().map(|(i, t)| (t, i)).collect();
    let successors: Vec<Vec<usize>> = node_list
        .iter()
        .map(|t| {
            succ.get(t)
                .map(|set| set.iter().map(|s| index_of[s]).collect())
                .unwrap_or_default()
        })
        .collect();

    let n = node_list.len();
    let mut index = vec![usize::MAX; n];
    let mut lowlink = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut next_index = 0usize;
    let mut components: Vec<Vec<usize>> = Vec::new();

    struct Frame {
        node: usize,
        next: usize,
    }

    for start in 0..n {
        if index[start] != usize::MAX {
            continue;
        }
        index[start] = next_index;
        lowlink[start] = next_index;
        next_index += 1;
        stack.push(start);
        on_stack[start] = true;
        let mut call_stack = vec![Frame { node: start, next: 0 }];

        while let Some(frame) = call_stack.last_mut() {
            let v = frame.node;
            if frame.next < successors[v].len() {
                let w = successors[v][frame.next];
                frame.next += 1;
                if index[w] == usize::MAX {
                    index[w] = next_index;
                    lowlink[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call_stack.push(Frame { node: w, next: 0 });
                } else if on_stack[w] {
                    lowlink[v] = lowlink[v].min(index[w]);
                }
            } else {
                if lowlink[v] == index[v] {
                    let mut component = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack[w] = false;
                        component.push(w);
                        if w == v {
                            break;
                        }
                    }
                    if component.len() > 1 {
                        components.push(component);
                    }
                }
                let finished = call_stack.pop().expect("frame present").node;
                if let Some(parent) = call_stack.last() {
                    let p = parent.node;
                    lowlink[p] = lowlink[p].min(lowlink[finished]);
                }
            }
        }
    }

    let mut result: Vec<Vec<TermId>> = components
        .into_iter()
        .map(|component| {
            let mut terms: Vec<TermId> =
                component.into_iter().map(|i| node_list[i].clone()).collect();
            terms.sort();
            terms
        })
        .collect();
    result.sort();
    result
}
