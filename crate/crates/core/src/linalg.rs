//! Exact rational linear algebra.
//!
//! Every matrix in the crate is a small dense [`RMatrix`] over
//! arbitrary-precision rationals. The kernels here (determinant, linear
//! solve, one-dimensional nullspace, stationary distribution) are all
//! cubic-time eliminations with no tolerances anywhere.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Exact arbitrary-precision fraction, always stored reduced with a
/// positive denominator.
pub type Rational = BigRational;

/// Builds `num/den` as a [`Rational`]. Panics if `den == 0`.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Builds an integer-valued [`Rational`].
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `n`, `-n` or `n/d`.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (
            n.trim().parse::<BigInt>().ok()?,
            d.trim().parse::<BigInt>().ok()?,
        ),
        None => (text.parse::<BigInt>().ok()?, BigInt::one()),
    };
    if den.is_zero() {
        return None;
    }
    Some(Rational::new(num, den))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is singular (rank {rank} of {size})")]
    Singular { rank: usize, size: usize },
    #[error("nullspace has dimension {dimension}, expected 1")]
    NullspaceDimension { dimension: usize },
    #[error("row {row} is not stochastic: {reason}")]
    NotStochastic { row: usize, reason: String },
    #[error("stationary distribution has a negative entry at index {index}")]
    NegativeStationary { index: usize },
}

/// Dense row-major rational matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl RMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RMatrix {
            rows,
            cols,
            entries: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        RMatrix {
            rows,
            cols,
            entries,
        }
    }

    /// Builds a matrix from rows. Panics if the rows are ragged.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        RMatrix {
            rows: r,
            cols: c,
            entries: rows.into_iter().flatten().collect(),
        }
    }

    /// Convenience constructor from `(num, den)` pairs.
    pub fn from_ratios(rows: &[&[(i64, i64)]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|row| row.iter().map(|&(n, d)| rat(n, d)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn scale(&self, k: &Rational) -> Self {
        RMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|x| x * k).collect(),
        }
    }

    pub fn add(&self, other: &RMatrix) -> Result<Self, LinalgError> {
        self.same_shape(other)?;
        Ok(RMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &RMatrix) -> Result<Self, LinalgError> {
        self.same_shape(other)?;
        Ok(RMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn mul(&self, other: &RMatrix) -> Result<Self, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    /// `self - I`. Panics on a non-square matrix.
    pub fn minus_identity(&self) -> Self {
        assert!(self.is_square());
        let mut m = self.clone();
        for i in 0..self.rows {
            m[(i, i)] -= Rational::one();
        }
        m
    }

    pub fn row_sums(&self) -> Vec<Rational> {
        (0..self.rows).map(|i| self.row(i).iter().sum()).collect()
    }

    /// Sum of the entries of each column, i.e. `𝟏·self`.
    pub fn col_sums(&self) -> Vec<Rational> {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| &self[(i, j)]).sum())
            .collect()
    }

    pub fn is_row_stochastic(&self) -> bool {
        self.entries.iter().all(|x| !x.is_negative()) && self.row_sums().iter().all(One::is_one)
    }

    /// Restriction to the given rows and columns, in the given order.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| {
            self[(rows[i], cols[j])].clone()
        })
    }

    fn same_shape(&self, other: &RMatrix) -> Result<(), LinalgError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LinalgError::Dimension(format!(
                "shapes {}x{} and {}x{} differ",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    /// Renders the matrix as `c·[[...],...]` where `c = 1/L` and `L` is the
    /// lcm of all denominators, so entries print as integers.
    pub fn display_factored(&self) -> String {
        let lcm = self
            .entries
            .iter()
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let scaled = self.scale(&Rational::from_integer(lcm.clone()));
        let body = (0..self.rows)
            .map(|i| {
                let row: Vec<String> = scaled.row(i).iter().map(ToString::to_string).collect();
                format!("[{}]", row.join(","))
            })
            .collect::<Vec<_>>()
            .join(",");
        if lcm.is_one() {
            format!("[{body}]")
        } else {
            format!("1/{lcm}·[{body}]")
        }
    }
}

impl Index<(usize, usize)> for RMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.entries[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.entries[i * self.cols + j]
    }
}

impl fmt::Display for RMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Row,
    Column,
}

/// Rational vector tagged with its orientation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RVector {
    entries: Vec<Rational>,
    orientation: Orientation,
}

impl RVector {
    pub fn row(entries: Vec<Rational>) -> Self {
        RVector {
            entries,
            orientation: Orientation::Row,
        }
    }

    pub fn column(entries: Vec<Rational>) -> Self {
        RVector {
            entries,
            orientation: Orientation::Column,
        }
    }

    /// The all-ones vector `𝟏`.
    pub fn ones(n: usize, orientation: Orientation) -> Self {
        RVector {
            entries: vec![Rational::one(); n],
            orientation,
        }
    }

    pub fn from_ratios(pairs: &[(i64, i64)], orientation: Orientation) -> Self {
        RVector {
            entries: pairs.iter().map(|&(n, d)| rat(n, d)).collect(),
            orientation,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<Rational> {
        self.entries
    }

    pub fn transposed(&self) -> Self {
        let orientation = match self.orientation {
            Orientation::Row => Orientation::Column,
            Orientation::Column => Orientation::Row,
        };
        RVector {
            entries: self.entries.clone(),
            orientation,
        }
    }

    pub fn sum(&self) -> Rational {
        self.entries.iter().sum()
    }

    pub fn dot(&self, other: &RVector) -> Rational {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn scale(&self, k: &Rational) -> Self {
        RVector {
            entries: self.entries.iter().map(|x| x * k).collect(),
            orientation: self.orientation,
        }
    }

    /// Row vector times matrix. Orientation of `self` is not checked.
    pub fn mul_matrix(&self, m: &RMatrix) -> Result<RVector, LinalgError> {
        if self.len() != m.rows() {
            return Err(LinalgError::Dimension(format!(
                "vector of length {} times {}x{}",
                self.len(),
                m.rows(),
                m.cols()
            )));
        }
        let mut out = vec![Rational::zero(); m.cols()];
        for (i, x) in self.entries.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                let y = &m[(i, j)];
                if !y.is_zero() {
                    *o += x * y;
                }
            }
        }
        Ok(RVector::row(out))
    }

    /// Matrix times column vector.
    pub fn matrix_mul(m: &RMatrix, v: &RVector) -> Result<RVector, LinalgError> {
        if v.len() != m.cols() {
            return Err(LinalgError::Dimension(format!(
                "{}x{} times vector of length {}",
                m.rows(),
                m.cols(),
                v.len()
            )));
        }
        Ok(RVector::column(
            (0..m.rows())
                .map(|i| m.row(i).iter().zip(&v.entries).map(|(a, b)| a * b).sum())
                .collect(),
        ))
    }
}

impl Index<usize> for RVector {
    type Output = Rational;
    fn index(&self, i: usize) -> &Rational {
        &self.entries[i]
    }
}

impl fmt::Display for RVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Exact determinant by fraction-free (Bareiss) elimination.
///
/// Each row is first multiplied by the lcm of its denominators, so the
/// elimination runs over integers and every intermediate division is exact.
pub fn det(m: &RMatrix) -> Result<Rational, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::Dimension(format!(
            "determinant of a {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    if n == 0 {
        return Ok(Rational::one());
    }
    let mut scale = BigInt::one();
    let mut a: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            let lcm = m
                .row(i)
                .iter()
                .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            scale *= &lcm;
            m.row(i)
                .iter()
                .map(|x| (x * Rational::from_integer(lcm.clone())).to_integer())
                .collect()
        })
        .collect();

    let mut negate = false;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    negate = !negate;
                }
                None => return Ok(Rational::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    let mut d = a[n - 1][n - 1].clone();
    if negate {
        d = -d;
    }
    Ok(Rational::new(d, scale))
}

/// Reduced row echelon form in place; returns pivot columns.
fn rref(m: &mut RMatrix) -> Vec<usize> {
    let (rows, cols) = (m.rows(), m.cols());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[(i, c)].is_zero()) else {
            continue;
        };
        if p != r {
            for j in 0..cols {
                let tmp = m[(p, j)].clone();
                m[(p, j)] = m[(r, j)].clone();
                m[(r, j)] = tmp;
            }
        }
        let inv = m[(r, c)].recip();
        for j in c..cols {
            m[(r, j)] = &m[(r, j)] * &inv;
        }
        for i in 0..rows {
            if i == r || m[(i, c)].is_zero() {
                continue;
            }
            let factor = m[(i, c)].clone();
            for j in c..cols {
                let delta = &factor * &m[(r, j)];
                m[(i, j)] -= delta;
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Solves `a·X = b` exactly.
pub fn solve(a: &RMatrix, b: &RMatrix) -> Result<RMatrix, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::Dimension(format!(
            "solve with a {}x{} coefficient matrix",
            a.rows(),
            a.cols()
        )));
    }
    if b.rows() != a.rows() {
        return Err(LinalgError::Dimension(format!(
            "right-hand side has {} rows, expected {}",
            b.rows(),
            a.rows()
        )));
    }
    let n = a.rows();
    let k = b.cols();
    let mut aug = RMatrix::from_fn(n, n + k, |i, j| {
        if j < n {
            a[(i, j)].clone()
        } else {
            b[(i, j - n)].clone()
        }
    });
    let pivots = rref(&mut aug);
    let rank = pivots.iter().filter(|&&c| c < n).count();
    if rank < n {
        return Err(LinalgError::Singular { rank, size: n });
    }
    Ok(RMatrix::from_fn(n, k, |i, j| aug[(i, n + j)].clone()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Returns the spanning vector of a one-dimensional nullspace, scaled so its
/// first nonzero entry is 1. `Side::Right` gives a column vector `v` with
/// `a·v = 0`; `Side::Left` a row vector with `v·a = 0`.
pub fn nullspace_1d(a: &RMatrix, side: Side) -> Result<RVector, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::Dimension(format!(
            "nullspace of a {}x{} matrix",
            a.rows(),
            a.cols()
        )));
    }
    let mut work = match side {
        Side::Right => a.clone(),
        Side::Left => a.transpose(),
    };
    let n = work.cols();
    let pivots = rref(&mut work);
    let dimension = n - pivots.len();
    if dimension != 1 {
        return Err(LinalgError::NullspaceDimension { dimension });
    }
    let free = (0..n)
        .find(|c| !pivots.contains(c))
        .expect("one free column");
    let mut v = vec![Rational::zero(); n];
    v[free] = Rational::one();
    for (r, &c) in pivots.iter().enumerate() {
        v[c] = -work[(r, free)].clone();
    }
    let first = v
        .iter()
        .find(|x| !x.is_zero())
        .expect("nonzero by construction")
        .clone();
    let v: Vec<Rational> = v.into_iter().map(|x| x / &first).collect();
    Ok(match side {
        Side::Right => RVector::column(v),
        Side::Left => RVector::row(v),
    })
}

/// Unique stationary distribution `x·p = x`, `Σx = 1` of a row-stochastic matrix.
pub fn stationary(p: &RMatrix) -> Result<RVector, LinalgError> {
    if !p.is_square() {
        return Err(LinalgError::Dimension(format!(
            "stationary distribution of a {}x{} matrix",
            p.rows(),
            p.cols()
        )));
    }
    for i in 0..p.rows() {
        if let Some(x) = p.row(i).iter().find(|x| x.is_negative()) {
            return Err(LinalgError::NotStochastic {
                row: i,
                reason: format!("negative entry {x}"),
            });
        }
        let s: Rational = p.row(i).iter().sum();
        if !s.is_one() {
            return Err(LinalgError::NotStochastic {
                row: i,
                reason: format!("row sums to {s}"),
            });
        }
    }
    let v = nullspace_1d(&p.minus_identity(), Side::Left)?;
    let total = v.sum();
    let x = v.scale(&total.recip());
    if let Some(index) = x.entries().iter().position(Signed::is_negative) {
        return Err(LinalgError::NegativeStationary { index });
    }
    Ok(x)
}
