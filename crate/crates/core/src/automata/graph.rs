//! Graph utilities shared by automata, transducers and the ambiguity product.

use std::collections::{BTreeSet, VecDeque};

use super::model::{Automaton, Edge};

/// Strongly connected components, numbered by their smallest member state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SccDecomposition {
    component_of: Vec<usize>,
    components: Vec<Component>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    /// Member states in increasing order.
    pub states: Vec<usize>,
    pub contains_final: bool,
    /// A single state without a self-transition.
    pub is_trivial: bool,
}

impl SccDecomposition {
    pub fn component_of(&self, q: usize) -> usize {
        self.component_of[q]
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }
}

pub(crate) fn successors(
    n: usize,
    edges: impl IntoIterator<Item = (usize, usize)>,
) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for (s, d) in edges {
        adj[s].push(d);
    }
    for row in &mut adj {
        row.sort_unstable();
        row.dedup();
    }
    adj
}

/// Tarjan's algorithm, iterative. Returns the component index of each
/// vertex; indices are in reverse topological order of discovery.
pub(crate) fn tarjan(adj: &[Vec<usize>]) -> (Vec<usize>, usize) {
    let n = adj.len();
    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comp = vec![UNSEEN; n];
    let mut next_index = 0;
    let mut count = 0;

    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&(v, child)) = call.last() {
            if child < adj[v].len() {
                let w = adj[v][child];
                call.last_mut().expect("non-empty").1 += 1;
                if index[w] == UNSEEN {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp[w] = count;
                        if w == v {
                            break;
                        }
                    }
                    count += 1;
                }
            }
        }
    }
    (comp, count)
}

pub(crate) fn decompose(n: usize, edges: &[Edge], finals: &BTreeSet<usize>) -> SccDecomposition {
    let adj = successors(n, edges.iter().map(|e| (e.src, e.dst)));
    let (raw, count) = tarjan(&adj);
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); count];
    for q in 0..n {
        members[raw[q]].push(q);
    }
    // renumber by smallest member
    members.sort_by_key(|m| m[0]);
    let mut component_of = vec![0; n];
    let components = members
        .into_iter()
        .enumerate()
        .map(|(id, states)| {
            for &q in &states {
                component_of[q] = id;
            }
            let is_trivial = states.len() == 1 && !adj[states[0]].contains(&states[0]);
            let contains_final = states.iter().any(|q| finals.contains(q));
            Component {
                states,
                contains_final,
                is_trivial,
            }
        })
        .collect();
    SccDecomposition {
        component_of,
        components,
    }
}

pub(crate) fn reachable(adj: &[Vec<usize>], from: impl IntoIterator<Item = usize>) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    let mut queue: VecDeque<usize> = VecDeque::new();
    for q in from {
        if !seen[q] {
            seen[q] = true;
            queue.push_back(q);
        }
    }
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    seen
}

/// States reachable from `targets` in the reversed graph.
pub(crate) fn coreachable(
    n: usize,
    edges: &[Edge],
    targets: impl IntoIterator<Item = usize>,
) -> Vec<bool> {
    let rev = successors(n, edges.iter().map(|e| (e.dst, e.src)));
    reachable(&rev, targets)
}

/// States lying on some accepting run: reachable from an initial state and
/// able to reach a final state that sits on a cycle.
pub(crate) fn useful_states(
    n: usize,
    edges: &[Edge],
    initial: &BTreeSet<usize>,
    finals: &BTreeSet<usize>,
) -> Vec<usize> {
    let adj = successors(n, edges.iter().map(|e| (e.src, e.dst)));
    let scc = decompose(n, edges, finals);
    let recurrent_finals = finals
        .iter()
        .copied()
        .filter(|&f| !scc.components[scc.component_of[f]].is_trivial);
    let co = coreachable(n, edges, recurrent_finals);
    let fw = reachable(&adj, initial.iter().copied());
    (0..n).filter(|&q| fw[q] && co[q]).collect()
}

/// Strongly connected components of an automaton's transition graph.
pub fn scc_decompose(a: &Automaton) -> SccDecomposition {
    decompose(a.state_count(), a.edges(), a.finals())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::Alphabet;

    fn edge(src: usize, symbol: usize, dst: usize) -> Edge {
        Edge { src, symbol, dst }
    }

    #[test]
    fn dag_has_trivial_components() {
        let a = Automaton::with_indexed_states(
            3,
            Alphabet::binary(),
            vec![edge(0, 0, 1), edge(1, 1, 2)],
            [0],
            [2],
        )
        .unwrap();
        let scc = scc_decompose(&a);
        assert_eq!(scc.len(), 3);
        assert!(scc.components().iter().all(|c| c.is_trivial));
        assert!(scc.components()[2].contains_final);
    }

    #[test]
    fn self_loop_is_not_trivial() {
        let a =
            Automaton::with_indexed_states(1, Alphabet::binary(), vec![edge(0, 0, 0)], [0], [0])
                .unwrap();
        let scc = scc_decompose(&a);
        assert!(!scc.components()[0].is_trivial);
    }

    #[test]
    fn deep_chain_does_not_overflow() {
        let n = 200_000;
        let edges: Vec<Edge> = (0..n - 1)
            .map(|i| edge(i, 0, i + 1))
            .chain([edge(n - 1, 0, 0)])
            .collect();
        let a = Automaton::with_indexed_states(n, Alphabet::binary(), edges, [0], [0]).unwrap();
        assert_eq!(scc_decompose(&a).len(), 1);
    }

    #[test]
    fn components_partition_and_dag() {
        // 0 <-> 1 -> 2 <-> 3, 4 isolated
        let edges = vec![
            edge(0, 0, 1),
            edge(1, 0, 0),
            edge(1, 1, 2),
            edge(2, 0, 3),
            edge(3, 1, 2),
        ];
        let a =
            Automaton::with_indexed_states(5, Alphabet::binary(), edges.clone(), [0], [3]).unwrap();
        let scc = scc_decompose(&a);
        let sizes: Vec<usize> = scc.components().iter().map(|c| c.states.len()).collect();
        assert_eq!(sizes, [2, 2, 1]);
        for e in &edges {
            let (cs, cd) = (scc.component_of(e.src), scc.component_of(e.dst));
            // edges between components only go one way here
            assert!(cs <= cd);
        }
    }
}
