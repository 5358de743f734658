//! End-to-end decision: trim, reject ambiguity, split into strongly connected
//! components, build the frequency automaton of every component that has a
//! final state and spectral radius 1, and compare it with the uniform
//! Bernoulli automaton of the output alphabet.

use std::fmt;

use thiserror::Error;

use crate::automata::{
    check_unambiguous_transducer, scc_decompose, Ambiguity, AmbiguityWitness, SccDecomposition,
    Transducer, Word,
};
use crate::construction::{
    self, ConstructionError, ConstructionMatrices, NormalizedTransducer, WeightedTransitionTable,
};
use crate::linalg::Rational;
use crate::spectral::{self, PerronData, SpectralError};
use crate::weighted::{
    bernoulli_automaton, equivalent, Equivalence, WeightedAutomaton, WeightedError,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecisionError {
    #[error("the transducer is ambiguous")]
    AmbiguousTransducer(AmbiguityWitness),
    #[error("the transducer accepts no sequence (empty after trim)")]
    EmptyLanguage,
    #[error("component {0} does not exist")]
    UnknownComponent(usize),
    #[error("component {component} cannot be analyzed: {reason}")]
    NotAnalyzable {
        component: usize,
        reason: &'static str,
    },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
    #[error(transparent)]
    Weighted(#[from] WeightedError),
}

/// Everything computed for one analyzable component.
#[derive(Debug, Clone)]
pub struct ComponentAnalysis {
    /// The component as a transducer, states in trimmed order.
    pub transducer: Transducer,
    pub perron: PerronData,
    pub normalized: NormalizedTransducer,
    pub weights: WeightedTransitionTable,
    pub matrices: ConstructionMatrices,
    pub automaton: WeightedAutomaton,
}

/// A word whose limiting frequency differs from the uniform one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrequencyWitness {
    pub word: Word,
    pub computed: Rational,
    pub expected: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SccReport {
    /// Indices into the trimmed transducer.
    pub states: Vec<usize>,
    pub contains_final: bool,
    pub radius_one: bool,
    pub analyzed: bool,
    pub preserves: bool,
    pub witness: Option<FrequencyWitness>,
    pub no_infinite_output: bool,
    /// Limiting frequency of each output symbol, when the component was analyzed.
    pub symbol_frequencies: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub preserves: bool,
    /// No component is both final and of radius 1: no normal input has an
    /// accepting run, and `preserves` holds vacuously.
    pub empty_normal_domain: bool,
    pub components: Vec<SccReport>,
    pub validation: Ambiguity,
    pub trimmed: Transducer,
}

/// Trims and checks unambiguity.
pub fn validate(t: &Transducer) -> Result<Transducer, DecisionError> {
    let trimmed = t.trim();
    if trimmed.is_empty() {
        return Err(DecisionError::EmptyLanguage);
    }
    match check_unambiguous_transducer(&trimmed) {
        Ambiguity::Unambiguous => Ok(trimmed),
        Ambiguity::Ambiguous(w) => Err(DecisionError::AmbiguousTransducer(w)),
    }
}

/// Components of an already trimmed transducer, numbered by smallest member.
pub fn components(trimmed: &Transducer) -> SccDecomposition {
    scc_decompose(&trimmed.input_automaton())
}

fn radius_one(trimmed: &Transducer, states: &[usize]) -> bool {
    let m = spectral::adjacency_matrix(&trimmed.restrict(states).input_automaton());
    spectral::radius_is_one(&m)
}

/// Runs the construction on the component made of `states` of a trimmed,
/// unambiguous transducer. The component must have radius 1.
pub fn analyze_component(
    trimmed: &Transducer,
    states: &[usize],
) -> Result<ComponentAnalysis, DecisionError> {
    let transducer = trimmed.restrict(states);
    let perron =
        spectral::perron_vectors(&spectral::adjacency_matrix(&transducer.input_automaton()))?;
    let (normalized, weights) = construction::normalize(&transducer, &perron.alpha);
    let matrices = construction::build_matrices(&normalized, &weights)?;
    let automaton = construction::build_frequency_automaton(&matrices, &normalized);
    Ok(ComponentAnalysis {
        transducer,
        perron,
        normalized,
        weights,
        matrices,
        automaton,
    })
}

/// Decides whether `t` maps every normal sequence in its domain to a normal sequence.
pub fn preserves_normality(t: &Transducer) -> Result<Verdict, DecisionError> {
    let trimmed = validate(t)?;
    let scc = components(&trimmed);
    let uniform = bernoulli_automaton(trimmed.output_alphabet())?;
    let mut reports = Vec::new();
    for c in scc.components() {
        let radius_one = !c.is_trivial && radius_one(&trimmed, &c.states);
        let mut report = SccReport {
            states: c.states.clone(),
            contains_final: c.contains_final,
            radius_one,
            analyzed: c.contains_final && radius_one,
            preserves: true,
            witness: None,
            no_infinite_output: false,
            symbol_frequencies: Vec::new(),
        };
        if report.analyzed {
            match analyze_component(&trimmed, &c.states) {
                Ok(analysis) => {
                    report.symbol_frequencies = (0..trimmed.output_alphabet().len())
                        .map(|b| analysis.automaton.weight(&[b]))
                        .collect::<Result<_, _>>()?;
                    if let Equivalence::Distinguished { word, left, right } =
                        equivalent(&analysis.automaton, &uniform)?
                    {
                        report.preserves = false;
                        report.witness = Some(FrequencyWitness {
                            word,
                            computed: left,
                            expected: right,
                        });
                    }
                }
                Err(DecisionError::Construction(ConstructionError::NoInfiniteOutput)) => {
                    report.preserves = false;
                    report.no_infinite_output = true;
                }
                Err(other) => return Err(other),
            }
        }
        reports.push(report);
    }
    let empty_normal_domain = !reports.iter().any(|r| r.analyzed);
    Ok(Verdict {
        preserves: reports.iter().all(|r| r.preserves),
        empty_normal_domain,
        components: reports,
        validation: Ambiguity::Unambiguous,
        trimmed,
    })
}

/// Analysis of component `index` (in the numbering of [`components`]) of `t`.
pub fn component_analysis(
    t: &Transducer,
    index: usize,
) -> Result<ComponentAnalysis, DecisionError> {
    let trimmed = validate(t)?;
    let scc = components(&trimmed);
    let c = scc
        .components()
        .get(index)
        .ok_or(DecisionError::UnknownComponent(index))?;
    if !c.contains_final {
        return Err(DecisionError::NotAnalyzable {
            component: index,
            reason: "it has no final state",
        });
    }
    if c.is_trivial || !radius_one(&trimmed, &c.states) {
        return Err(DecisionError::NotAnalyzable {
            component: index,
            reason: "its spectral radius is below 1",
        });
    }
    analyze_component(&trimmed, &c.states)
}

/// Index of the first component with a final state and radius 1.
pub fn first_analyzable(t: &Transducer) -> Result<Option<usize>, DecisionError> {
    let trimmed = validate(t)?;
    let scc = components(&trimmed);
    Ok(scc
        .components()
        .iter()
        .position(|c| c.contains_final && !c.is_trivial && radius_one(&trimmed, &c.states)))
}

/// Limiting frequency of every output word of length `1..=max_len`, or of
/// the empty word alone when `max_len` is 0.
pub fn block_frequencies(
    t: &Transducer,
    component: usize,
    max_len: usize,
) -> Result<Vec<(Word, Rational)>, DecisionError> {
    let analysis = component_analysis(t, component)?;
    frequency_table(&analysis.automaton, max_len)
}

/// Weights of all words of length `1..=max_len` (just the empty word for 0).
pub fn frequency_table(
    a: &WeightedAutomaton,
    max_len: usize,
) -> Result<Vec<(Word, Rational)>, DecisionError> {
    let lengths: Vec<usize> = if max_len == 0 {
        vec![0]
    } else {
        (1..=max_len).collect()
    };
    let mut table = Vec::new();
    for n in lengths {
        for w in a.alphabet().words_of_length(n) {
            let x = a.weight(&w)?;
            table.push((w, x));
        }
    }
    Ok(table)
}

/// Human-readable report.
impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = &self.trimmed;
        let out = t.output_alphabet();
        let names = |states: &[usize]| {
            states
                .iter()
                .map(|&q| t.state_name(q))
                .collect::<Vec<_>>()
                .join(" ")
        };
        if self.preserves {
            writeln!(f, "preserves normality")?;
        } else {
            writeln!(f, "does not preserve normality")?;
        }
        if self.empty_normal_domain {
            writeln!(
                f,
                "note: empty normal domain, no normal sequence has an accepting run"
            )?;
        }
        for (i, c) in self.components.iter().enumerate() {
            let status = match (c.contains_final, c.radius_one) {
                (false, _) => "skipped (no final state)",
                (true, false) => "skipped (spectral radius < 1)",
                (true, true) if c.no_infinite_output => "analyzed: a cycle emits nothing",
                (true, true) if c.preserves => "analyzed: preserves",
                (true, true) => "analyzed: does not preserve",
            };
            writeln!(f, "component {i} {{{}}}: {status}", names(&c.states))?;
            for (b, x) in c.symbol_frequencies.iter().enumerate() {
                writeln!(f, "  freq({}) = {x}", out.char_of(b))?;
            }
            if let Some(w) = &c.witness {
                let word = if w.word.is_empty() {
                    "ε".to_string()
                } else {
                    out.render(&w.word)
                };
                writeln!(
                    f,
                    "  witness: freq({word}) = {} but uniform is {}",
                    w.computed, w.expected
                )?;
            }
        }
        Ok(())
    }
}

/// `num/den`, always with a denominator.
pub fn fraction(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

impl Verdict {
    /// `key = value` lines; rationals are written `num/den`.
    pub fn machine_report(&self) -> String {
        let t = &self.trimmed;
        let out = t.output_alphabet();
        let mut lines = vec![
            format!("preserves = {}", self.preserves),
            format!("empty_normal_domain = {}", self.empty_normal_domain),
            format!("components = {}", self.components.len()),
        ];
        for (i, c) in self.components.iter().enumerate() {
            let states: Vec<&str> = c.states.iter().map(|&q| t.state_name(q)).collect();
            lines.push(format!("scc.{i}.states = {}", states.join(" ")));
            lines.push(format!("scc.{i}.contains_final = {}", c.contains_final));
            lines.push(format!("scc.{i}.radius_one = {}", c.radius_one));
            lines.push(format!("scc.{i}.analyzed = {}", c.analyzed));
            lines.push(format!("scc.{i}.preserves = {}", c.preserves));
            lines.push(format!(
                "scc.{i}.no_infinite_output = {}",
                c.no_infinite_output
            ));
            for (b, x) in c.symbol_frequencies.iter().enumerate() {
                lines.push(format!("scc.{i}.freq.{} = {}", out.char_of(b), fraction(x)));
            }
            if let Some(w) = &c.witness {
                lines.push(format!("scc.{i}.witness.word = {}", out.render(&w.word)));
                lines.push(format!(
                    "scc.{i}.witness.computed = {}",
                    fraction(&w.computed)
                ));
                lines.push(format!(
                    "scc.{i}.witness.expected = {}",
                    fraction(&w.expected)
                ));
            }
        }
        lines.join("\n") + "\n"
    }
}

#[cfg(test)]
mod tests;
