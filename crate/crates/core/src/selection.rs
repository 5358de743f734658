//! Prefix selection by a regular language, as a transducer.
//!
//! A selector copies a symbol (`p -a|a→ q`) or drops it (`p -a|ε→ q`).
//! Oblivious selection keeps `x_i` when `x_1…x_{i−1}` is in the language;
//! non-oblivious selection keeps it when `x_1…x_i` is.

use std::str::FromStr;

use thiserror::Error;

use crate::automata::{Automaton, Symbol, Transducer, Transition, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SelectionError {
    #[error("the automaton is not deterministic")]
    NotDeterministic,
    #[error("the automaton is not complete")]
    Incomplete,
    #[error("unknown selection mode {0:?} (expected `oblivious` or `nonoblivious`)")]
    UnknownMode(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// The prefix before the current symbol decides.
    Oblivious,
    /// The prefix including the current symbol decides.
    NonOblivious,
}

impl FromStr for Mode {
    type Err = SelectionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "oblivious" => Ok(Mode::Oblivious),
            "nonoblivious" | "non-oblivious" => Ok(Mode::NonOblivious),
            other => Err(SelectionError::UnknownMode(other.to_string())),
        }
    }
}

/// A transducer whose transitions copy or drop their input symbol, with
/// every state final.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Selector(Transducer);

impl Selector {
    pub fn transducer(&self) -> &Transducer {
        &self.0
    }

    pub fn into_transducer(self) -> Transducer {
        self.0
    }

    /// Runs the selector on a finite word, concatenating transition outputs.
    pub fn apply(&self, x: &[Symbol]) -> Word {
        let t = &self.0;
        let mut state = *t.initial().iter().next().expect("one initial state");
        let mut out = Word::new();
        for &a in x {
            let tr = t
                .transitions()
                .iter()
                .find(|tr| tr.src == state && tr.input == a)
                .expect("complete");
            out.extend(&tr.output);
            state = tr.dst;
        }
        out
    }
}

fn table(dfa: &Automaton) -> Result<Vec<Vec<usize>>, SelectionError> {
    if !dfa.is_deterministic() {
        return Err(SelectionError::NotDeterministic);
    }
    if !dfa.is_complete() {
        return Err(SelectionError::Incomplete);
    }
    Ok(dfa
        .transition_table()
        .into_iter()
        .map(|row| row.into_iter().map(|q| q.expect("complete")).collect())
        .collect())
}

fn build(dfa: &Automaton, mode: Mode) -> Result<Selector, SelectionError> {
    let delta = table(dfa)?;
    let mut transitions = Vec::new();
    for (p, row) in delta.iter().enumerate() {
        for (a, &q) in row.iter().enumerate() {
            let decides = match mode {
                Mode::Oblivious => p,
                Mode::NonOblivious => q,
            };
            let output = if dfa.finals().contains(&decides) {
                vec![a]
            } else {
                Vec::new()
            };
            transitions.push(Transition {
                src: p,
                input: a,
                output,
                dst: q,
            });
        }
    }
    let n = dfa.state_count();
    let t = Transducer::new(
        dfa.state_names().to_vec(),
        dfa.alphabet().clone(),
        dfa.alphabet().clone(),
        transitions,
        dfa.initial().iter().copied(),
        0..n,
    )
    .expect("built from a valid automaton");
    Ok(Selector(t))
}

/// Selector for `x ↾ L`: copies `a` on `p → q` iff `p` is accepting.
pub fn oblivious_selector(dfa: &Automaton) -> Result<Selector, SelectionError> {
    build(dfa, Mode::Oblivious)
}

/// Selector for `x ⇂ L`: copies `a` on `p → q` iff `q` is accepting.
pub fn nonoblivious_selector(dfa: &Automaton) -> Result<Selector, SelectionError> {
    build(dfa, Mode::NonOblivious)
}

pub fn selector(dfa: &Automaton, mode: Mode) -> Result<Selector, SelectionError> {
    build(dfa, mode)
}

/// Every symbol permutes the states. False for automata that are not
/// deterministic and complete.
pub fn is_group_automaton(dfa: &Automaton) -> bool {
    let Ok(delta) = table(dfa) else { return false };
    let n = dfa.state_count();
    (0..dfa.alphabet().len()).all(|a| {
        let mut hit = vec![false; n];
        delta
            .iter()
            .all(|row| !std::mem::replace(&mut hit[row[a]], true))
    })
}

/// Direct definition: the symbols `x_i` whose deciding prefix is accepted.
pub fn prefix_select(x: &[Symbol], dfa: &Automaton, mode: Mode) -> Result<Word, SelectionError> {
    let delta = table(dfa)?;
    let accepts = |prefix: &[Symbol]| {
        let start = *dfa.initial().iter().next().expect("one initial state");
        dfa.finals()
            .contains(&prefix.iter().fold(start, |q, &a| delta[q][a]))
    };
    Ok((0..x.len())
        .filter(|&i| match mode {
            Mode::Oblivious => accepts(&x[..i]),
            Mode::NonOblivious => accepts(&x[..=i]),
        })
        .map(|i| x[i])
        .collect())
}
