//! Finite-prefix experiments: Champernowne inputs, running a transducer,
//! counting blocks in the output and comparing with the exact frequencies.

use std::fmt::Write as _;
use std::str::FromStr;

use num_traits::ToPrimitive;
use thiserror::Error;

use crate::automata::{self, Alphabet, Symbol, Transducer, Word};
use crate::decision::{self, DecisionError};
use crate::linalg::Rational;
use crate::spectral;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmpiricalError {
    #[error("base must be between 2 and 36, got {0}")]
    Base(u32),
    #[error("the pattern is empty")]
    EmptyPattern,
    #[error("no accepting run can read the input up to position {position}")]
    NoRun { position: usize },
    #[error("unknown source {0:?} (expected `champernowne:<base>`)")]
    UnknownSource(String),
    #[error("digit {0:?} of the source is not in the input alphabet")]
    SourceAlphabet(char),
    #[error("the run ended in component {0}, which has no frequency automaton")]
    NotAnalyzable(usize),
    #[error(transparent)]
    Decision(#[from] DecisionError),
}

/// Digits of `0, 1, 2, …` written in `base` and concatenated.
#[derive(Debug, Clone)]
pub struct Champernowne {
    base: u32,
    next: u64,
    digits: Vec<Symbol>,
}

impl Champernowne {
    pub fn new(base: u32) -> Result<Self, EmpiricalError> {
        if !(2..=36).contains(&base) {
            return Err(EmpiricalError::Base(base));
        }
        Ok(Champernowne {
            base,
            next: 0,
            digits: Vec::new(),
        })
    }

    pub fn base(&self) -> u32 {
        self.base
    }
}

impl Iterator for Champernowne {
    type Item = Symbol;

    fn next(&mut self) -> Option<Symbol> {
        if self.digits.is_empty() {
            let mut n = self.next;
            self.next += 1;
            // pushed least significant first, popped most significant first
            loop {
                self.digits.push((n % self.base as u64) as Symbol);
                n /= self.base as u64;
                if n == 0 {
                    break;
                }
            }
        }
        self.digits.pop()
    }
}

/// First `n` symbols of the Champernowne word in `base`.
pub fn champernowne(base: u32, n: usize) -> Result<Word, EmpiricalError> {
    Ok(Champernowne::new(base)?.take(n).collect())
}

/// Number of (possibly overlapping) occurrences of `v` in `w`.
pub fn count_occurrences<T: PartialEq>(w: &[T], v: &[T]) -> Result<usize, EmpiricalError> {
    if v.is_empty() {
        return Err(EmpiricalError::EmptyPattern);
    }
    Ok(if v.len() > w.len() {
        0
    } else {
        w.windows(v.len()).filter(|x| *x == v).count()
    })
}

#[derive(Debug, Clone)]
struct Candidate {
    state: usize,
    output: Vec<Symbol>,
    states: Vec<usize>,
}

/// Streaming execution of a trimmed unambiguous transducer on a finite
/// prefix. All runs that can still be extended into a component with a
/// final state and radius 1 are tracked; the output they share is
/// committed as soon as it is common to all of them.
#[derive(Debug, Clone)]
pub struct Runner {
    by_symbol: Vec<Vec<Vec<usize>>>,
    transitions: Vec<(Word, usize)>,
    alive: Vec<bool>,
    candidates: Vec<Candidate>,
    position: usize,
    keep_trace: bool,
    trace: Vec<usize>,
}

impl Runner {
    /// `t` must be trimmed and unambiguous (see [`decision::validate`]).
    pub fn new(t: &Transducer, keep_trace: bool) -> Result<Self, EmpiricalError> {
        let n = t.state_count();
        let scc = decision::components(t);
        let targets: Vec<usize> = scc
            .components()
            .iter()
            .filter(|c| {
                c.contains_final
                    && !c.is_trivial
                    && spectral::radius_is_one(&spectral::adjacency_matrix(
                        &t.restrict(&c.states).input_automaton(),
                    ))
            })
            .flat_map(|c| c.states.iter().copied())
            .collect();
        let alive = automata::coreachable(n, &t.edges(), targets);
        let mut by_symbol = vec![vec![Vec::new(); t.input_alphabet().len()]; n];
        for (i, tr) in t.transitions().iter().enumerate() {
            if alive[tr.dst] {
                by_symbol[tr.src][tr.input].push(i);
            }
        }
        let candidates: Vec<Candidate> = t
            .initial()
            .iter()
            .filter(|&&q| alive[q])
            .map(|&q| Candidate {
                state: q,
                output: Vec::new(),
                states: if keep_trace { vec![q] } else { Vec::new() },
            })
            .collect();
        if candidates.is_empty() {
            return Err(EmpiricalError::NoRun { position: 0 });
        }
        Ok(Runner {
            by_symbol,
            transitions: t
                .transitions()
                .iter()
                .map(|tr| (tr.output.clone(), tr.dst))
                .collect(),
            alive,
            candidates,
            position: 0,
            keep_trace,
            trace: Vec::new(),
        })
    }

    /// Reads one input symbol; committed output symbols are passed to `emit`.
    pub fn feed(&mut self, a: Symbol, emit: &mut impl FnMut(Symbol)) -> Result<(), EmpiricalError> {
        let mut next: Vec<Candidate> = Vec::with_capacity(self.candidates.len());
        for c in &self.candidates {
            for &i in &self.by_symbol[c.state][a] {
                let (out, dst) = &self.transitions[i];
                debug_assert!(self.alive[*dst]);
                // two live runs meeting in one state would contradict unambiguity
                if next.iter().any(|d| d.state == *dst) {
                    continue;
                }
                let mut d = c.clone();
                d.state = *dst;
                d.output.extend(out);
                if self.keep_trace {
                    d.states.push(*dst);
                }
                next.push(d);
            }
        }
        if next.is_empty() {
            return Err(EmpiricalError::NoRun {
                position: self.position,
            });
        }
        self.position += 1;
        self.candidates = next;
        self.commit(emit);
        Ok(())
    }

    fn commit(&mut self, emit: &mut impl FnMut(Symbol)) {
        let first = &self.candidates[0];
        let common_out = self.candidates[1..]
            .iter()
            .fold(first.output.len(), |k, c| {
                k.min(
                    c.output
                        .iter()
                        .zip(&first.output)
                        .take_while(|(x, y)| x == y)
                        .count(),
                )
            });
        for &b in &first.output[..common_out] {
            emit(b);
        }
        let common_states = if self.keep_trace {
            self.candidates[1..]
                .iter()
                .fold(first.states.len(), |k, c| {
                    k.min(
                        c.states
                            .iter()
                            .zip(&first.states)
                            .take_while(|(x, y)| x == y)
                            .count(),
                    )
                })
        } else {
            0
        };
        if self.keep_trace {
            self.trace.extend_from_slice(&first.states[..common_states]);
        }
        for c in &mut self.candidates {
            c.output.drain(..common_out);
            c.states.drain(..common_states);
        }
    }

    pub fn position(&self) -> usize {
        self.position
    }

    /// Current state and not-yet-committed output of every surviving run.
    pub fn candidates(&self) -> Vec<(usize, Word)> {
        self.candidates
            .iter()
            .map(|c| (c.state, c.output.clone()))
            .collect()
    }
}

/// Result of running a transducer on a finite word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutcome {
    /// The longest output prefix common to every surviving run.
    pub output: Word,
    /// The state sequence common to every surviving run.
    pub trace: Vec<usize>,
    /// End state and full output of each surviving run.
    pub candidates: Vec<(usize, Word)>,
}

/// Runs `t` on `x`. State indices refer to `t.trim()`.
pub fn run_transducer(t: &Transducer, x: &[Symbol]) -> Result<RunOutcome, EmpiricalError> {
    let trimmed = decision::validate(t)?;
    let mut runner = Runner::new(&trimmed, true)?;
    let mut output = Word::new();
    for &a in x {
        runner.feed(a, &mut |b| output.push(b))?;
    }
    let mut trace = runner.trace.clone();
    let candidates = runner
        .candidates
        .iter()
        .map(|c| (c.state, output.iter().chain(&c.output).copied().collect()))
        .collect();
    if runner.candidates.len() == 1 {
        trace.extend(&runner.candidates[0].states);
    }
    Ok(RunOutcome {
        output,
        trace,
        candidates,
    })
}

/// Sliding and aligned counts of every block of length `1..=max_block`.
#[derive(Debug, Clone)]
pub struct BlockCounter {
    symbols: usize,
    max_block: usize,
    sliding: Vec<Vec<u64>>,
    aligned: Vec<Vec<u64>>,
    window: Vec<Symbol>,
    length: u64,
}

impl BlockCounter {
    pub fn new(symbols: usize, max_block: usize) -> Self {
        let table = |k: usize| vec![0u64; symbols.pow(k as u32)];
        BlockCounter {
            symbols,
            max_block,
            sliding: (1..=max_block).map(table).collect(),
            aligned: (1..=max_block).map(table).collect(),
            window: Vec::with_capacity(max_block),
            length: 0,
        }
    }

    pub fn push(&mut self, b: Symbol) {
        if self.window.len() == self.max_block {
            self.window.remove(0);
        }
        self.window.push(b);
        self.length += 1;
        for k in 1..=self.window.len() {
            let code = self.window[self.window.len() - k..]
                .iter()
                .fold(0usize, |c, &s| c * self.symbols + s);
            self.sliding[k - 1][code] += 1;
            if self.length % k as u64 == 0 {
                self.aligned[k - 1][code] += 1;
            }
        }
    }

    pub fn length(&self) -> u64 {
        self.length
    }

    fn code(&self, w: &[Symbol]) -> usize {
        w.iter().fold(0usize, |c, &s| c * self.symbols + s)
    }

    /// Overlapping occurrences of `w`.
    pub fn sliding(&self, w: &[Symbol]) -> u64 {
        self.sliding[w.len() - 1][self.code(w)]
    }

    /// Occurrences of `w` at positions that are multiples of `|w|`.
    pub fn aligned(&self, w: &[Symbol]) -> u64 {
        self.aligned[w.len() - 1][self.code(w)]
    }

    /// Number of length-`k` windows.
    pub fn windows(&self, k: usize) -> u64 {
        (self.length + 1).saturating_sub(k as u64)
    }

    pub fn aligned_windows(&self, k: usize) -> u64 {
        self.length / k as u64
    }
}

/// Where input prefixes come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Champernowne { base: u32 },
}

impl FromStr for Source {
    type Err = EmpiricalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let unknown = || EmpiricalError::UnknownSource(s.to_string());
        let (kind, base) = s.split_once(':').ok_or_else(unknown)?;
        if kind != "champernowne" {
            return Err(unknown());
        }
        let base: u32 = base.parse().map_err(|_| unknown())?;
        Champernowne::new(base)?;
        Ok(Source::Champernowne { base })
    }
}

impl Source {
    /// Stream of symbols of `alphabet`, mapping digit `d` to the character `d` in base 36.
    pub fn symbols(
        &self,
        alphabet: &Alphabet,
    ) -> Result<impl Iterator<Item = Symbol>, EmpiricalError> {
        let Source::Champernowne { base } = *self;
        let map = (0..base)
            .map(|d| {
                let c = char::from_digit(d, 36).expect("base at most 36");
                alphabet
                    .index_of(c)
                    .ok_or(EmpiricalError::SourceAlphabet(c))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Champernowne::new(base)?.map(move |d| map[d]))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyRow {
    pub block: Word,
    pub count: u64,
    pub windows: u64,
    pub aligned_count: u64,
    pub aligned_windows: u64,
    pub predicted: Rational,
}

impl FrequencyRow {
    pub fn empirical(&self) -> f64 {
        if self.windows == 0 {
            0.0
        } else {
            self.count as f64 / self.windows as f64
        }
    }

    pub fn empirical_rational(&self) -> Rational {
        Rational::new(self.count.into(), self.windows.max(1).into())
    }

    pub fn aligned(&self) -> f64 {
        if self.aligned_windows == 0 {
            0.0
        } else {
            self.aligned_count as f64 / self.aligned_windows as f64
        }
    }

    pub fn predicted_f64(&self) -> f64 {
        self.predicted.to_f64().unwrap_or(f64::NAN)
    }

    pub fn deviation(&self) -> f64 {
        (self.empirical() - self.predicted_f64()).abs()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyReport {
    pub alphabet: Alphabet,
    pub input_length: usize,
    pub output_length: u64,
    /// Component (in the numbering of [`decision::components`]) where the run ended.
    pub component: usize,
    pub rows: Vec<FrequencyRow>,
}

impl FrequencyReport {
    pub fn max_deviation(&self) -> f64 {
        self.rows
            .iter()
            .map(FrequencyRow::deviation)
            .fold(0.0, f64::max)
    }

    pub fn row(&self, block: &str) -> Option<&FrequencyRow> {
        let w = self.alphabet.parse_word(block).ok()?;
        self.rows.iter().find(|r| r.block == w)
    }

    /// Columns: block, count, empirical, predicted (`num/den`), deviation.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("block,count,empirical,predicted,deviation\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{:.6},{},{:.6}",
                self.alphabet.render(&r.block),
                r.count,
                r.empirical(),
                decision::fraction(&r.predicted),
                r.deviation()
            );
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "input symbols: {}\noutput symbols: {}\ncomponent: {}\n",
            self.input_length, self.output_length, self.component
        );
        let width = self
            .rows
            .iter()
            .map(|r| r.block.len())
            .max()
            .unwrap_or(1)
            .max(5);
        let _ = writeln!(
            out,
            "{:<width$}  {:>10}  {:>10}  {:>12}  {:>10}",
            "block", "count", "empirical", "predicted", "deviation"
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:<width$}  {:>10}  {:>10.6}  {:>12}  {:>10.6}",
                self.alphabet.render(&r.block),
                r.count,
                r.empirical(),
                r.predicted.to_string(),
                r.deviation()
            );
        }
        out
    }
}

/// Runs `t` on the first `prefix_len` symbols of `source` and compares
/// block frequencies with the frequency automaton of the component in
/// which the run ends.
pub fn compare_frequencies(
    t: &Transducer,
    source: Source,
    prefix_len: usize,
    max_block: usize,
) -> Result<FrequencyReport, EmpiricalError> {
    let trimmed = decision::validate(t)?;
    let alphabet = trimmed.output_alphabet().clone();
    let mut runner = Runner::new(&trimmed, false)?;
    let mut counter = BlockCounter::new(alphabet.len(), max_block);
    for a in source.symbols(trimmed.input_alphabet())?.take(prefix_len) {
        runner.feed(a, &mut |b| counter.push(b))?;
    }
    let scc = decision::components(&trimmed);
    let component = scc.component_of(runner.candidates[0].state);
    let analysis = match decision::component_analysis(&trimmed, component) {
        Ok(a) => a,
        Err(DecisionError::NotAnalyzable { .. }) => {
            return Err(EmpiricalError::NotAnalyzable(component))
        }
        Err(e) => return Err(e.into()),
    };
    let table = decision::frequency_table(&analysis.automaton, max_block)?;
    let rows = table
        .into_iter()
        .filter(|(w, _)| !w.is_empty())
        .map(|(block, predicted)| FrequencyRow {
            count: counter.sliding(&block),
            windows: counter.windows(block.len()),
            aligned_count: counter.aligned(&block),
            aligned_windows: counter.aligned_windows(block.len()),
            block,
            predicted,
        })
        .collect();
    Ok(FrequencyReport {
        alphabet,
        input_length: prefix_len,
        output_length: counter.length(),
        component,
        rows,
    })
}
