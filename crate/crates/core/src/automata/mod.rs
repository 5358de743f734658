//! Büchi automata and transducers: data model, text format, trimming,
//! strongly connected components, determinism and unambiguity.

mod alphabet;
mod ambiguity;
mod graph;
mod model;
mod parse;

pub use alphabet::{Alphabet, Symbol, Word};
pub use ambiguity::{check_unambiguous, check_unambiguous_transducer, Ambiguity, AmbiguityWitness};
pub use graph::{scc_decompose, Component, SccDecomposition};
pub use model::{Automaton, Edge, ModelError, Transducer, Transition};
pub use parse::{parse_automaton, parse_machine, parse_transducer, Machine, ParseError};

pub(crate) use graph::coreachable;

/// Convenience wrapper around [`Automaton::is_deterministic`].
pub fn is_deterministic(a: &Automaton) -> bool {
    a.is_deterministic()
}

#[cfg(test)]
pub(crate) mod tests;
