//! Weighted automata over the rationals, seen as series `w ↦ π·μ(w)·ν`.

use std::collections::VecDeque;
use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::automata::{Alphabet, Symbol, Word};
use crate::linalg::{parse_rational, Orientation, RMatrix, RVector, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WeightedError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("symbol index {0} is outside the alphabet")]
    UnknownSymbol(Symbol),
    #[error("symbol {0:?} is outside the alphabet")]
    UnknownChar(char),
    #[error("the alphabet is empty")]
    EmptyAlphabet,
    #[error("alphabets differ: {left} vs {right}")]
    AlphabetMismatch { left: String, right: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WeightedParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing `{0}` line")]
    Missing(&'static str),
    #[error(transparent)]
    Invalid(#[from] WeightedError),
}

/// The triple `⟨initial, μ, final⟩` over an alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedAutomaton {
    alphabet: Alphabet,
    initial: RVector,
    mu: Vec<RMatrix>,
    final_weights: RVector,
}

impl WeightedAutomaton {
    /// `mu[b]` is the matrix of symbol index `b`.
    pub fn new(
        alphabet: Alphabet,
        initial: RVector,
        mu: Vec<RMatrix>,
        final_weights: RVector,
    ) -> Result<Self, WeightedError> {
        let n = initial.len();
        if final_weights.len() != n {
            return Err(WeightedError::Dimension(format!(
                "initial has {n} entries, final has {}",
                final_weights.len()
            )));
        }
        if mu.len() != alphabet.len() {
            return Err(WeightedError::Dimension(format!(
                "{} matrices for {} symbols",
                mu.len(),
                alphabet.len()
            )));
        }
        if let Some(m) = mu.iter().find(|m| m.rows() != n || m.cols() != n) {
            return Err(WeightedError::Dimension(format!(
                "expected {n}x{n} matrices, found {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        let initial = if initial.orientation() == Orientation::Row {
            initial
        } else {
            initial.transposed()
        };
        let final_weights = if final_weights.orientation() == Orientation::Column {
            final_weights
        } else {
            final_weights.transposed()
        };
        Ok(WeightedAutomaton {
            alphabet,
            initial,
            mu,
            final_weights,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn size(&self) -> usize {
        self.initial.len()
    }

    pub fn initial(&self) -> &RVector {
        &self.initial
    }

    pub fn mu(&self, b: Symbol) -> &RMatrix {
        &self.mu[b]
    }

    pub fn final_weights(&self) -> &RVector {
        &self.final_weights
    }

    fn check_word(&self, w: &[Symbol]) -> Result<(), WeightedError> {
        match w.iter().find(|&&b| b >= self.alphabet.len()) {
            Some(&b) => Err(WeightedError::UnknownSymbol(b)),
            None => Ok(()),
        }
    }

    fn step(&self, v: &RVector, b: Symbol) -> RVector {
        v.mul_matrix(&self.mu[b])
            .expect("dimensions validated at construction")
    }

    /// `initial · μ(w) · final`, folding the row vector left to right.
    pub fn weight(&self, w: &[Symbol]) -> Result<Rational, WeightedError> {
        self.check_word(w)?;
        let v = w
            .iter()
            .fold(self.initial.clone(), |v, &b| self.step(&v, b));
        Ok(v.dot(&self.final_weights))
    }

    /// Weight of a word written with the alphabet's characters.
    pub fn weight_of(&self, text: &str) -> Result<Rational, WeightedError> {
        let w = self
            .alphabet
            .parse_word(text)
            .map_err(WeightedError::UnknownChar)?;
        self.weight(&w)
    }

    /// `μ(w)` as a product of matrices.
    pub fn matrix_of(&self, w: &[Symbol]) -> Result<RMatrix, WeightedError> {
        self.check_word(w)?;
        Ok(w.iter().fold(RMatrix::identity(self.size()), |m, &b| {
            m.mul(&self.mu[b]).expect("square")
        }))
    }
}

/// One state, every symbol weighted `1/#alphabet`.
pub fn bernoulli_automaton(alphabet: &Alphabet) -> Result<WeightedAutomaton, WeightedError> {
    if alphabet.is_empty() {
        return Err(WeightedError::EmptyAlphabet);
    }
    let p = Rational::new(1.into(), alphabet.len().into());
    let mu = vec![RMatrix::from_rows(vec![vec![p]]); alphabet.len()];
    WeightedAutomaton::new(
        alphabet.clone(),
        RVector::ones(1, Orientation::Row),
        mu,
        RVector::ones(1, Orientation::Column),
    )
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Equivalence {
    Equivalent,
    /// A word on which the two series differ, with both weights.
    Distinguished {
        word: Word,
        left: Rational,
        right: Rational,
    },
}

impl Equivalence {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, Equivalence::Equivalent)
    }
}

/// Row-echelon basis with unit pivots.
struct Basis {
    rows: Vec<(usize, Vec<Rational>)>,
}

impl Basis {
    /// Adds `v` if it is independent of the current rows.
    fn insert(&mut self, v: &[Rational]) -> bool {
        let mut v = v.to_vec();
        for (pivot, row) in &self.rows {
            if !v[*pivot].is_zero() {
                let k = v[*pivot].clone();
                for (x, r) in v.iter_mut().zip(row) {
                    *x -= &k * r;
                }
            }
        }
        let Some(pivot) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = v[pivot].recip();
        for x in v.iter_mut() {
            *x *= &inv;
        }
        for (_, row) in self.rows.iter_mut() {
            if !row[pivot].is_zero() {
                let k = row[pivot].clone();
                for (x, r) in row.iter_mut().zip(&v) {
                    *x -= &k * r;
                }
            }
        }
        self.rows.push((pivot, v));
        true
    }
}

/// Decides whether two automata define the same series.
///
/// Works on the difference automaton `a − b`: the reachable row vectors
/// `(π_a μ_a(w), −π_b μ_b(w))` are explored breadth first while an
/// independent basis is kept; the series is zero iff every explored vector
/// is orthogonal to the stacked final vector.
pub fn equivalent(
    a: &WeightedAutomaton,
    b: &WeightedAutomaton,
) -> Result<Equivalence, WeightedError> {
    if a.alphabet != b.alphabet {
        return Err(WeightedError::AlphabetMismatch {
            left: a.alphabet.to_string(),
            right: b.alphabet.to_string(),
        });
    }
    let (na, nb) = (a.size(), b.size());
    let n = na + nb;
    let minus = -Rational::one();
    let start = RVector::row(
        a.initial
            .entries()
            .iter()
            .cloned()
            .chain(b.initial.entries().iter().map(|x| x * &minus))
            .collect(),
    );
    let fin = RVector::column(
        a.final_weights
            .entries()
            .iter()
            .chain(b.final_weights.entries())
            .cloned()
            .collect(),
    );
    let mu: Vec<RMatrix> = (0..a.alphabet.len())
        .map(|s| {
            RMatrix::from_fn(n, n, |i, j| match (i < na, j < na) {
                (true, true) => a.mu[s][(i, j)].clone(),
                (false, false) => b.mu[s][(i - na, j - na)].clone(),
                _ => Rational::zero(),
            })
        })
        .collect();

    let mut basis = Basis { rows: Vec::new() };
    let mut queue = VecDeque::new();
    queue.push_back((start, Word::new()));
    while let Some((v, word)) = queue.pop_front() {
        if !v.dot(&fin).is_zero() {
            let left = a.weight(&word)?;
            let right = b.weight(&word)?;
            return Ok(Equivalence::Distinguished { word, left, right });
        }
        if !basis.insert(v.entries()) {
            continue;
        }
        for (s, m) in mu.iter().enumerate() {
            let mut next = word.clone();
            next.push(s);
            queue.push_back((v.mul_matrix(m).expect("square"), next));
        }
    }
    Ok(Equivalence::Equivalent)
}

fn write_row(f: &mut fmt::Formatter<'_>, entries: &[Rational]) -> fmt::Result {
    let cells: Vec<String> = entries.iter().map(ToString::to_string).collect();
    write!(f, "{}", cells.join(" "))
}

/// Text dump: `weighted`, `alphabet`, `initial`, one `mu <b>` block of rows per symbol, `final`.
impl fmt::Display for WeightedAutomaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "weighted")?;
        writeln!(f, "alphabet {}", self.alphabet)?;
        write!(f, "initial ")?;
        write_row(f, self.initial.entries())?;
        writeln!(f)?;
        for (b, m) in self.mu.iter().enumerate() {
            writeln!(f, "mu {}", self.alphabet.char_of(b))?;
            for i in 0..m.rows() {
                write_row(f, m.row(i))?;
                writeln!(f)?;
            }
        }
        write!(f, "final ")?;
        write_row(f, self.final_weights.entries())?;
        writeln!(f)
    }
}

fn rationals(line: usize, tokens: &[&str]) -> Result<Vec<Rational>, WeightedParseError> {
    tokens
        .iter()
        .map(|t| {
            parse_rational(t).ok_or_else(|| WeightedParseError::Syntax {
                line,
                message: format!("bad rational {t:?}"),
            })
        })
        .collect()
}

/// Parses the text dump written by `Display`.
pub fn parse_weighted(text: &str) -> Result<WeightedAutomaton, WeightedParseError> {
    let syntax = |line: usize, message: &str| WeightedParseError::Syntax {
        line,
        message: message.to_string(),
    };
    let mut lines = text.lines().enumerate().filter_map(|(i, raw)| {
        let tokens: Vec<&str> = raw
            .split('#')
            .next()
            .unwrap_or("")
            .split_whitespace()
            .collect();
        (!tokens.is_empty()).then_some((i + 1, tokens))
    });
    match lines.next() {
        Some((_, t)) if t == ["weighted"] => {}
        Some((line, _)) => return Err(syntax(line, "expected `weighted` header")),
        None => return Err(WeightedParseError::Missing("weighted")),
    }
    let mut alphabet: Option<Alphabet> = None;
    let mut initial: Option<Vec<Rational>> = None;
    let mut final_weights: Option<Vec<Rational>> = None;
    let mut mu: Vec<Option<Vec<Vec<Rational>>>> = Vec::new();
    let mut current: Option<usize> = None;
    for (line, tokens) in lines {
        match tokens[0] {
            "alphabet" => {
                let a = Alphabet::new(tokens[1..].iter().flat_map(|t| t.chars()))
                    .map_err(|c| syntax(line, &format!("invalid or repeated symbol {c:?}")))?;
                mu = vec![None; a.len()];
                alphabet = Some(a);
                current = None;
            }
            "initial" => {
                initial = Some(rationals(line, &tokens[1..])?);
                current = None;
            }
            "final" => {
                final_weights = Some(rationals(line, &tokens[1..])?);
                current = None;
            }
            "mu" => {
                let a = alphabet
                    .as_ref()
                    .ok_or_else(|| syntax(line, "`mu` before `alphabet`"))?;
                let [_, sym] = tokens[..] else {
                    return Err(syntax(line, "expected `mu <symbol>`"));
                };
                let mut chars = sym.chars();
                let (Some(c), None) = (chars.next(), chars.next()) else {
                    return Err(syntax(line, "expected a single symbol"));
                };
                let b = a
                    .index_of(c)
                    .ok_or_else(|| syntax(line, &format!("symbol {c:?} is not in the alphabet")))?;
                if mu[b].is_some() {
                    return Err(syntax(line, "matrix given twice"));
                }
                mu[b] = Some(Vec::new());
                current = Some(b);
            }
            _ => {
                let b =
                    current.ok_or_else(|| syntax(line, &format!("unexpected `{}`", tokens[0])))?;
                mu[b]
                    .as_mut()
                    .expect("opened by `mu`")
                    .push(rationals(line, &tokens)?);
            }
        }
    }
    let alphabet = alphabet.ok_or(WeightedParseError::Missing("alphabet"))?;
    let initial = initial.ok_or(WeightedParseError::Missing("initial"))?;
    let final_weights = final_weights.ok_or(WeightedParseError::Missing("final"))?;
    let mut matrices = Vec::new();
    for rows in mu {
        let rows = rows.ok_or(WeightedParseError::Missing("mu"))?;
        if rows.iter().any(|r| r.len() != initial.len()) || rows.len() != initial.len() {
            return Err(WeightedError::Dimension(format!(
                "matrices must be {0}x{0}",
                initial.len()
            ))
            .into());
        }
        matrices.push(RMatrix::from_rows(rows));
    }
    Ok(WeightedAutomaton::new(
        alphabet,
        RVector::row(initial),
        matrices,
        RVector::column(final_weights),
    )?)
}
