use std::collections::{BTreeSet, HashSet};
use std::fmt;

use thiserror::Error;

use super::alphabet::{Alphabet, Symbol, Word};
use super::graph;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("state index {0} out of range")]
    StateOutOfRange(usize),
    #[error("symbol index {0} out of range")]
    SymbolOutOfRange(usize),
    #[error("duplicate state name {0:?}")]
    DuplicateState(String),
    #[error("duplicate transition {0}")]
    DuplicateTransition(String),
}

/// `src -input|output→ dst`. The output may be empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transition {
    pub src: usize,
    pub input: Symbol,
    pub output: Word,
    pub dst: usize,
}

/// `src -symbol→ dst`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub src: usize,
    pub symbol: Symbol,
    pub dst: usize,
}

/// Büchi transducer `⟨Q, A, B, Δ, I, F⟩`. States are dense indices `0..n`
/// carrying their display names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transducer {
    states: Vec<String>,
    input: Alphabet,
    output: Alphabet,
    transitions: Vec<Transition>,
    initial: BTreeSet<usize>,
    finals: BTreeSet<usize>,
}

/// Büchi automaton `⟨Q, A, Δ, I, F⟩`. Parallel duplicate edges are merged.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Automaton {
    states: Vec<String>,
    alphabet: Alphabet,
    edges: Vec<Edge>,
    initial: BTreeSet<usize>,
    finals: BTreeSet<usize>,
}

fn check_names(states: &[String]) -> Result<(), ModelError> {
    let mut seen = HashSet::new();
    for s in states {
        if !seen.insert(s.as_str()) {
            return Err(ModelError::DuplicateState(s.clone()));
        }
    }
    Ok(())
}

fn check_sets(
    n: usize,
    initial: &BTreeSet<usize>,
    finals: &BTreeSet<usize>,
) -> Result<(), ModelError> {
    match initial.iter().chain(finals).find(|&&q| q >= n) {
        Some(&q) => Err(ModelError::StateOutOfRange(q)),
        None => Ok(()),
    }
}

impl Transducer {
    pub fn new(
        states: Vec<String>,
        input: Alphabet,
        output: Alphabet,
        transitions: Vec<Transition>,
        initial: impl IntoIterator<Item = usize>,
        finals: impl IntoIterator<Item = usize>,
    ) -> Result<Self, ModelError> {
        check_names(&states)?;
        let n = states.len();
        let initial: BTreeSet<usize> = initial.into_iter().collect();
        let finals: BTreeSet<usize> = finals.into_iter().collect();
        check_sets(n, &initial, &finals)?;
        let mut seen = HashSet::new();
        for t in &transitions {
            for q in [t.src, t.dst] {
                if q >= n {
                    return Err(ModelError::StateOutOfRange(q));
                }
            }
            if t.input >= input.len() {
                return Err(ModelError::SymbolOutOfRange(t.input));
            }
            if let Some(&b) = t.output.iter().find(|&&b| b >= output.len()) {
                return Err(ModelError::SymbolOutOfRange(b));
            }
            if !seen.insert(t) {
                return Err(ModelError::DuplicateTransition(format!(
                    "{} {} {} {}",
                    states[t.src],
                    input.char_of(t.input),
                    render_output(&output, &t.output),
                    states[t.dst]
                )));
            }
        }
        Ok(Transducer {
            states,
            input,
            output,
            transitions,
            initial,
            finals,
        })
    }

    /// Builds a transducer whose states are named `0..n`.
    pub fn with_indexed_states(
        n: usize,
        input: Alphabet,
        output: Alphabet,
        transitions: Vec<Transition>,
        initial: impl IntoIterator<Item = usize>,
        finals: impl IntoIterator<Item = usize>,
    ) -> Result<Self, ModelError> {
        Self::new(
            (0..n).map(|i| i.to_string()).collect(),
            input,
            output,
            transitions,
            initial,
            finals,
        )
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn state_name(&self, q: usize) -> &str {
        &self.states[q]
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn input_alphabet(&self) -> &Alphabet {
        &self.input
    }

    pub fn output_alphabet(&self) -> &Alphabet {
        &self.output
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn initial(&self) -> &BTreeSet<usize> {
        &self.initial
    }

    pub fn finals(&self) -> &BTreeSet<usize> {
        &self.finals
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Transition graph as labeled edges, one per transition (duplicates on
    /// `(src, input, dst)` with different outputs are kept apart).
    pub fn edges(&self) -> Vec<Edge> {
        self.transitions
            .iter()
            .map(|t| Edge {
                src: t.src,
                symbol: t.input,
                dst: t.dst,
            })
            .collect()
    }

    /// The automaton obtained by dropping output labels.
    pub fn input_automaton(&self) -> Automaton {
        Automaton::from_parts(
            self.states.clone(),
            self.input.clone(),
            self.edges(),
            self.initial.clone(),
            self.finals.clone(),
        )
    }

    /// Keeps the given states (in the given order) and the transitions among them.
    pub fn restrict(&self, keep: &[usize]) -> Transducer {
        let mut map = vec![None; self.state_count()];
        for (i, &q) in keep.iter().enumerate() {
            map[q] = Some(i);
        }
        let transitions = self
            .transitions
            .iter()
            .filter_map(|t| {
                Some(Transition {
                    src: map[t.src]?,
                    input: t.input,
                    output: t.output.clone(),
                    dst: map[t.dst]?,
                })
            })
            .collect();
        Transducer {
            states: keep.iter().map(|&q| self.states[q].clone()).collect(),
            input: self.input.clone(),
            output: self.output.clone(),
            transitions,
            initial: self.initial.iter().filter_map(|&q| map[q]).collect(),
            finals: self.finals.iter().filter_map(|&q| map[q]).collect(),
        }
    }

    /// Removes every state that does not occur on an accepting run. The
    /// result is empty iff the accepted language is empty.
    pub fn trim(&self) -> Transducer {
        let keep = graph::useful_states(
            self.state_count(),
            &self.edges(),
            &self.initial,
            &self.finals,
        );
        self.restrict(&keep)
    }

    /// Same machine with its states listed in a different order;
    /// `order[i]` is the old index of new state `i`.
    pub fn permute_states(&self, order: &[usize]) -> Transducer {
        assert_eq!(order.len(), self.state_count());
        self.restrict(order)
    }
}

fn render_output(alphabet: &Alphabet, w: &[Symbol]) -> String {
    if w.is_empty() {
        "-".to_string()
    } else {
        alphabet.render(w)
    }
}

impl Automaton {
    pub fn new(
        states: Vec<String>,
        alphabet: Alphabet,
        edges: Vec<Edge>,
        initial: impl IntoIterator<Item = usize>,
        finals: impl IntoIterator<Item = usize>,
    ) -> Result<Self, ModelError> {
        check_names(&states)?;
        let n = states.len();
        let initial: BTreeSet<usize> = initial.into_iter().collect();
        let finals: BTreeSet<usize> = finals.into_iter().collect();
        check_sets(n, &initial, &finals)?;
        for e in &edges {
            if e.src >= n || e.dst >= n {
                return Err(ModelError::StateOutOfRange(e.src.max(e.dst)));
            }
            if e.symbol >= alphabet.len() {
                return Err(ModelError::SymbolOutOfRange(e.symbol));
            }
        }
        Ok(Self::from_parts(states, alphabet, edges, initial, finals))
    }

    pub fn with_indexed_states(
        n: usize,
        alphabet: Alphabet,
        edges: Vec<Edge>,
        initial: impl IntoIterator<Item = usize>,
        finals: impl IntoIterator<Item = usize>,
    ) -> Result<Self, ModelError> {
        Self::new(
            (0..n).map(|i| i.to_string()).collect(),
            alphabet,
            edges,
            initial,
            finals,
        )
    }

    fn from_parts(
        states: Vec<String>,
        alphabet: Alphabet,
        edges: Vec<Edge>,
        initial: BTreeSet<usize>,
        finals: BTreeSet<usize>,
    ) -> Self {
        let mut seen = HashSet::new();
        let edges = edges.into_iter().filter(|e| seen.insert(*e)).collect();
        Automaton {
            states,
            alphabet,
            edges,
            initial,
            finals,
        }
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn state_name(&self, q: usize) -> &str {
        &self.states[q]
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn initial(&self) -> &BTreeSet<usize> {
        &self.initial
    }

    pub fn finals(&self) -> &BTreeSet<usize> {
        &self.finals
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Same graph with a different initial set.
    pub fn with_initial(&self, initial: impl IntoIterator<Item = usize>) -> Automaton {
        Automaton {
            initial: initial.into_iter().collect(),
            ..self.clone()
        }
    }

    pub fn restrict(&self, keep: &[usize]) -> Automaton {
        let mut map = vec![None; self.state_count()];
        for (i, &q) in keep.iter().enumerate() {
            map[q] = Some(i);
        }
        Automaton {
            states: keep.iter().map(|&q| self.states[q].clone()).collect(),
            alphabet: self.alphabet.clone(),
            edges: self
                .edges
                .iter()
                .filter_map(|e| {
                    Some(Edge {
                        src: map[e.src]?,
                        symbol: e.symbol,
                        dst: map[e.dst]?,
                    })
                })
                .collect(),
            initial: self.initial.iter().filter_map(|&q| map[q]).collect(),
            finals: self.finals.iter().filter_map(|&q| map[q]).collect(),
        }
    }

    pub fn trim(&self) -> Automaton {
        let keep =
            graph::useful_states(self.state_count(), &self.edges, &self.initial, &self.finals);
        self.restrict(&keep)
    }

    /// One initial state and at most one successor per (state, symbol).
    pub fn is_deterministic(&self) -> bool {
        if self.initial.len() != 1 {
            return false;
        }
        let mut seen = HashSet::new();
        self.edges.iter().all(|e| seen.insert((e.src, e.symbol)))
    }

    /// Every state has a successor on every symbol.
    pub fn is_complete(&self) -> bool {
        let seen: HashSet<(usize, Symbol)> = self.edges.iter().map(|e| (e.src, e.symbol)).collect();
        seen.len() == self.state_count() * self.alphabet.len()
    }

    /// Successor table `delta[state][symbol]` of a deterministic automaton.
    pub fn transition_table(&self) -> Vec<Vec<Option<usize>>> {
        let mut table = vec![vec![None; self.alphabet.len()]; self.state_count()];
        for e in &self.edges {
            table[e.src][e.symbol] = Some(e.dst);
        }
        table
    }
}

fn write_names(
    f: &mut fmt::Formatter<'_>,
    key: &str,
    names: &[String],
    set: impl Iterator<Item = usize>,
) -> fmt::Result {
    let parts: Vec<&str> = set.map(|q| names[q].as_str()).collect();
    if parts.is_empty() {
        writeln!(f, "{key}")
    } else {
        writeln!(f, "{key} {}", parts.join(" "))
    }
}

impl fmt::Display for Transducer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "transducer")?;
        writeln!(f, "in {}", self.input)?;
        writeln!(f, "out {}", self.output)?;
        write_names(f, "states", &self.states, 0..self.state_count())?;
        write_names(f, "initial", &self.states, self.initial.iter().copied())?;
        write_names(f, "final", &self.states, self.finals.iter().copied())?;
        for t in &self.transitions {
            writeln!(
                f,
                "t {} {} {} {}",
                self.states[t.src],
                self.input.char_of(t.input),
                render_output(&self.output, &t.output),
                self.states[t.dst]
            )?;
        }
        Ok(())
    }
}

impl fmt::Display for Automaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "automaton")?;
        writeln!(f, "in {}", self.alphabet)?;
        write_names(f, "states", &self.states, 0..self.state_count())?;
        write_names(f, "initial", &self.states, self.initial.iter().copied())?;
        write_names(f, "final", &self.states, self.finals.iter().copied())?;
        for e in &self.edges {
            writeln!(
                f,
                "t {} {} {}",
                self.states[e.src],
                self.alphabet.char_of(e.symbol),
                self.states[e.dst]
            )?;
        }
        Ok(())
    }
}
