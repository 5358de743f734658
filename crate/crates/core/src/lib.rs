//! Exact decision procedure for normality preservation by unambiguous
//! Büchi transducers, and construction of the rational weighted automaton
//! giving the limiting frequency of every output block on normal inputs.

pub mod automata;
pub mod construction;
pub mod decision;
pub mod empirical;
pub mod linalg;
pub mod selection;
pub mod spectral;
pub mod weighted;
