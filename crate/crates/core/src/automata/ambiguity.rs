//! Büchi unambiguity via the self-product with a divergence bit.
//!
//! Product states are `(p, q, d)`: two runs on the same input currently in
//! `p` and `q`, with `d` set once the runs have used different transitions.
//! The machine is ambiguous iff some reachable non-trivial SCC of the
//! product lies in the `d = 1` layer and contains both a state whose first
//! coordinate is final and a state whose second coordinate is final.

use std::collections::{BTreeSet, VecDeque};

use super::alphabet::{Symbol, Word};
use super::graph;
use super::model::{Automaton, Edge, Transducer};

/// Two distinct accepting runs on the ultimately periodic word
/// `prefix · cycle^ω`. Runs are transition indices of length
/// `prefix.len() + cycle.len()`; both return after the cycle to the state
/// they occupied after the prefix, and each visits a final state inside the cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmbiguityWitness {
    pub prefix: Word,
    pub cycle: Word,
    pub first_run: Vec<usize>,
    pub second_run: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Ambiguity {
    Unambiguous,
    Ambiguous(AmbiguityWitness),
}

impl Ambiguity {
    pub fn is_unambiguous(&self) -> bool {
        matches!(self, Ambiguity::Unambiguous)
    }
}

/// Checks an automaton.
pub fn check_unambiguous(a: &Automaton) -> Ambiguity {
    check_edges(
        a.state_count(),
        a.alphabet().len(),
        a.edges(),
        a.initial(),
        a.finals(),
    )
}

/// Checks a transducer's input automaton without merging parallel
/// transitions, so `p -a|u→ q` and `p -a|v→ q` with `u ≠ v` count as two runs.
pub fn check_unambiguous_transducer(t: &Transducer) -> Ambiguity {
    check_edges(
        t.state_count(),
        t.input_alphabet().len(),
        &t.edges(),
        t.initial(),
        t.finals(),
    )
}

type Pair = (usize, usize);

pub(crate) fn check_edges(
    n: usize,
    symbols: usize,
    edges: &[Edge],
    initial: &BTreeSet<usize>,
    finals: &BTreeSet<usize>,
) -> Ambiguity {
    let mut by_source: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new(); symbols]; n];
    for (i, e) in edges.iter().enumerate() {
        by_source[e.src][e.symbol].push(i);
    }
    let id = |p: usize, q: usize, d: bool| (p * n + q) * 2 + usize::from(d);
    let decode = |s: usize| (s / 2 / n, s / 2 % n, s % 2 == 1);
    let size = 2 * n * n;

    // Forward exploration, remembering one BFS parent per state.
    let mut parent: Vec<Option<(usize, Pair)>> = vec![None; size];
    let mut seen = vec![false; size];
    let mut order = Vec::new();
    let mut queue = VecDeque::new();
    for &i in initial {
        for &j in initial {
            let s = id(i, j, i != j);
            if !seen[s] {
                seen[s] = true;
                queue.push_back(s);
            }
        }
    }
    let mut succ: Vec<Vec<(Pair, usize)>> = vec![Vec::new(); size];
    while let Some(s) = queue.pop_front() {
        order.push(s);
        let (p, q, d) = decode(s);
        for a in 0..symbols {
            for &t1 in &by_source[p][a] {
                for &t2 in &by_source[q][a] {
                    let next = id(edges[t1].dst, edges[t2].dst, d || t1 != t2);
                    succ[s].push(((t1, t2), next));
                    if !seen[next] {
                        seen[next] = true;
                        parent[next] = Some((s, (t1, t2)));
                        queue.push_back(next);
                    }
                }
            }
        }
    }

    let adj: Vec<Vec<usize>> = succ
        .iter()
        .map(|out| out.iter().map(|&(_, d)| d).collect())
        .collect();
    let (comp, count) = graph::tarjan(&adj);
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); count];
    // BFS order, so the first member of each component has the shortest prefix
    for &s in &order {
        members[comp[s]].push(s);
    }
    let offending = order.iter().map(|&s| comp[s]).find(|&c| {
        let states = &members[c];
        let nontrivial = states.len() > 1 || adj[states[0]].contains(&states[0]);
        let diverged = decode(states[0]).2;
        nontrivial
            && diverged
            && states.iter().any(|&s| finals.contains(&decode(s).0))
            && states.iter().any(|&s| finals.contains(&decode(s).1))
    });
    let Some(c) = offending else {
        return Ambiguity::Unambiguous;
    };

    let entry = members[c][0];
    let mut prefix_pairs = Vec::new();
    let mut cur = entry;
    while let Some((prev, pair)) = parent[cur] {
        prefix_pairs.push(pair);
        cur = prev;
    }
    prefix_pairs.reverse();

    let in_comp = |s: usize| comp[s] == c;
    let first_final = *members[c]
        .iter()
        .find(|&&s| finals.contains(&decode(s).0))
        .expect("checked");
    let second_final = *members[c]
        .iter()
        .find(|&&s| finals.contains(&decode(s).1))
        .expect("checked");
    let mut cycle_pairs = path_within(&succ, entry, first_final, &in_comp, false);
    cycle_pairs.extend(path_within(
        &succ,
        first_final,
        second_final,
        &in_comp,
        false,
    ));
    let closing = path_within(&succ, second_final, entry, &in_comp, cycle_pairs.is_empty());
    cycle_pairs.extend(closing);

    let label =
        |pairs: &[Pair]| -> Vec<Symbol> { pairs.iter().map(|&(t1, _)| edges[t1].symbol).collect() };
    let all: Vec<Pair> = prefix_pairs.iter().chain(&cycle_pairs).copied().collect();
    Ambiguity::Ambiguous(AmbiguityWitness {
        prefix: label(&prefix_pairs),
        cycle: label(&cycle_pairs),
        first_run: all.iter().map(|p| p.0).collect(),
        second_run: all.iter().map(|p| p.1).collect(),
    })
}

/// Shortest path inside one component. With `nonempty`, a path of at least
/// one step is returned even when `from == to`.
fn path_within(
    succ: &[Vec<(Pair, usize)>],
    from: usize,
    to: usize,
    inside: &impl Fn(usize) -> bool,
    nonempty: bool,
) -> Vec<Pair> {
    if from == to && !nonempty {
        return Vec::new();
    }
    let mut parent: std::collections::HashMap<usize, (usize, Pair)> =
        std::collections::HashMap::new();
    let mut queue = VecDeque::new();
    queue.push_back(from);
    let mut visited = std::collections::HashSet::new();
    if !nonempty {
        visited.insert(from);
    }
    while let Some(s) = queue.pop_front() {
        for &(pair, next) in &succ[s] {
            if !inside(next) || !visited.insert(next) {
                continue;
            }
            parent.insert(next, (s, pair));
            if next == to {
                let mut path = Vec::new();
                let mut cur = to;
                loop {
                    let (prev, pair) = parent[&cur];
                    path.push(pair);
                    cur = prev;
                    if cur == from && (path.len() > 0) {
                        break;
                    }
                }
                path.reverse();
                return path;
            }
            queue.push_back(next);
        }
    }
    unreachable!("target lies in the same strongly connected component")
}

/// Independent check of a witness: both runs are consistent with the word,
/// start initially, close their loop and see a final state inside it.
#[cfg(test)]
pub(crate) fn witness_is_valid(
    w: &AmbiguityWitness,
    edges: &[Edge],
    initial: &BTreeSet<usize>,
    finals: &BTreeSet<usize>,
) -> bool {
    let word: Vec<Symbol> = w.prefix.iter().chain(&w.cycle).copied().collect();
    let k = w.prefix.len();
    let run_ok = |run: &[usize]| {
        run.len() == word.len()
            && !run.is_empty()
            && initial.contains(&edges[run[0]].src)
            && run.iter().zip(&word).all(|(&t, &a)| edges[t].symbol == a)
            && run.windows(2).all(|p| edges[p[0]].dst == edges[p[1]].src)
            && {
                let loop_start = if k == 0 {
                    edges[run[0]].src
                } else {
                    edges[run[k - 1]].dst
                };
                edges[*run.last().unwrap()].dst == loop_start
            }
            && run[k..].iter().any(|&t| finals.contains(&edges[t].dst))
    };
    !w.cycle.is_empty()
        && run_ok(&w.first_run)
        && run_ok(&w.second_run)
        && w.first_run != w.second_run
}
