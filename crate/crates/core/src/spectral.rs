//! Adjacency matrix, the eigenvalue-1 test and the Perron data of a
//! strongly connected unambiguous automaton.
//!
//! For such automata the spectral radius of `M` is at most 1 and is itself
//! an eigenvalue, so `ρ(M) = 1` is equivalent to `det(M − I) = 0`.

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::automata::Automaton;
use crate::linalg::{self, LinalgError, RMatrix, RVector, Rational, Side};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpectralError {
    #[error(transparent)]
    Rank(#[from] LinalgError),
    #[error("Perron vector has a non-positive entry at state index {index}")]
    NotPositive { index: usize },
}

/// `M`, the right and left eigenvectors `α`, `π` for eigenvalue 1 with
/// `Σ π_q α_q = 1`, and the Markov matrix `P`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PerronData {
    pub m: RMatrix,
    pub alpha: RVector,
    pub pi: RVector,
    pub p: RMatrix,
}

impl PerronData {
    /// `(π_q α_q)_q`, the stationary distribution of `P`.
    pub fn state_frequencies(&self) -> RVector {
        RVector::row(
            self.pi
                .entries()
                .iter()
                .zip(self.alpha.entries())
                .map(|(p, a)| p * a)
                .collect(),
        )
    }
}

/// `M[p][q]` = number of symbols labeling `p → q`, divided by the alphabet size.
pub fn adjacency_matrix(a: &Automaton) -> RMatrix {
    let n = a.state_count();
    let mut m = RMatrix::zeros(n, n);
    let unit = Rational::new(1.into(), (a.alphabet().len().max(1)).into());
    for e in a.edges() {
        m[(e.src, e.dst)] += &unit;
    }
    m
}

/// `det(M − I) = 0`. Meaningful as a spectral-radius test only for the
/// adjacency matrix of a strongly connected unambiguous automaton.
pub fn radius_is_one(m: &RMatrix) -> bool {
    linalg::det(&m.minus_identity())
        .map(|d| d.is_zero())
        .unwrap_or(false)
}

fn positive(v: RVector) -> Result<RVector, SpectralError> {
    let v = if v.entries().iter().any(Signed::is_negative) {
        v.scale(&-Rational::one())
    } else {
        v
    };
    match v.entries().iter().position(|x| !x.is_positive()) {
        Some(index) => Err(SpectralError::NotPositive { index }),
        None => Ok(v),
    }
}

/// Perron eigenvectors of an irreducible `M` with `ρ(M) = 1`.
///
/// `α` keeps its leading entry at 1; `π` is scaled so that `Σ π_q α_q = 1`.
pub fn perron_vectors(m: &RMatrix) -> Result<PerronData, SpectralError> {
    let shifted = m.minus_identity();
    let alpha = positive(linalg::nullspace_1d(&shifted, Side::Right)?)?;
    let pi_raw = positive(linalg::nullspace_1d(&shifted, Side::Left)?)?;
    let norm = pi_raw.dot(&alpha);
    let pi = pi_raw.scale(&norm.recip());
    Ok(with_alpha(m, alpha, pi))
}

fn with_alpha(m: &RMatrix, alpha: RVector, pi: RVector) -> PerronData {
    let mut data = PerronData {
        m: m.clone(),
        alpha,
        pi,
        p: RMatrix::zeros(0, 0),
    };
    data.p = markov_matrix(&data);
    data
}

/// `P[p][q] = M[p][q] · α_q / α_p`.
pub fn markov_matrix(d: &PerronData) -> RMatrix {
    let n = d.m.rows();
    RMatrix::from_fn(n, n, |p, q| &d.m[(p, q)] * &d.alpha[q] / &d.alpha[p])
}
