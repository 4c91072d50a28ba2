//! Dense matrices over a [`Scalar`] backend.

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum LinalgError {
    #[error("matrix is singular")]
    Singular,
    #[error("dimension mismatch: {0}")]
    Shape(&'static str),
}

/// Row-major dense matrix.
#[derive(Clone, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Build from nested rows; all rows must have the same length.
    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let nr = rows.len();
        let nc = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == nc), "ragged rows");
        Self {
            rows: nr,
            cols: nc,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn column(values: Vec<S>) -> Self {
        Self {
            rows: values.len(),
            cols: 1,
            data: values,
        }
    }

    pub fn row_vector(values: Vec<S>) -> Self {
        Self {
            rows: 1,
            cols: values.len(),
            data: values,
        }
    }

    pub fn diagonal(values: &[S]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = v.clone();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn row(&self, r: usize) -> &[S] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn col(&self, c: usize) -> Vec<S> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = &S> {
        self.data.iter()
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Matrix<T> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn to_f64(&self) -> Matrix<f64> {
        self.map(S::to_f64)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].clone())
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(
            self.cols, other.rows,
            "matmul shape mismatch: {}x{} * {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(r, k)];
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = &other[(k, c)];
                    if b.is_zero() {
                        continue;
                    }
                    out[(r, c)] += a.clone() * b.clone();
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(self.cols, v.len(), "mul_vec shape mismatch");
        (0..self.rows)
            .map(|r| {
                let mut acc = S::zero();
                for (a, b) in self.row(r).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += a.clone() * b.clone();
                    }
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.shape(), other.shape(), "add shape mismatch");
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.shape(), other.shape(), "sub shape mismatch");
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        }
    }

    pub fn scale(&self, s: &S) -> Self {
        self.map(|a| a.clone() * s.clone())
    }

    pub fn neg(&self) -> Self {
        self.map(|a| -a.clone())
    }

    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Self {
        Self::from_fn(nr, nc, |r, c| self[(r0 + r, c0 + c)].clone())
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Self) {
        for r in 0..b.rows {
            for c in 0..b.cols {
                self[(r0 + r, c0 + c)] = b[(r, c)].clone();
            }
        }
    }

    pub fn hstack(blocks: &[Self]) -> Self {
        let rows = blocks.first().map_or(0, |b| b.rows);
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(rows, cols);
        let mut c0 = 0;
        for b in blocks {
            assert_eq!(b.rows, rows, "hstack row mismatch");
            out.set_block(0, c0, b);
            c0 += b.cols;
        }
        out
    }

    pub fn vstack(blocks: &[Self]) -> Self {
        let cols = blocks.first().map_or(0, |b| b.cols);
        let rows = blocks.iter().map(|b| b.rows).sum();
        let mut out = Self::zeros(rows, cols);
        let mut r0 = 0;
        for b in blocks {
            assert_eq!(b.cols, cols, "vstack column mismatch");
            out.set_block(r0, 0, b);
            r0 += b.rows;
        }
        out
    }

    /// Largest entry magnitude, as `f64`.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(S::abs_f64).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.shape(), other.shape(), "diff shape mismatch");
        self.sub(other).max_abs()
    }

    /// Exactly zero for the rational backend; every entry within `tol` for floats.
    pub fn is_zero_within(&self, tol: f64) -> bool {
        self.data.iter().all(|a| a.is_negligible(tol))
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.shape() == other.shape() && self.sub(other).is_zero_within(tol)
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.rows == self.cols && self.approx_eq(&self.transpose(), tol)
    }

    /// Gaussian elimination into an upper-triangular factor, applied jointly
    /// to `rhs`. Returns the determinant sign flips and the pivot list, or
    /// `Singular` when a column has no usable pivot.
    fn eliminate(&self, rhs: &mut Self) -> Result<(Self, bool), LinalgError> {
        if self.rows != self.cols {
            return Err(LinalgError::Shape("elimination needs a square matrix"));
        }
        if rhs.rows != self.rows {
            return Err(LinalgError::Shape("right-hand side row count"));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut flipped = false;
        let threshold = pivot_threshold::<S>(self);
        for col in 0..n {
            let pivot_row = if S::EXACT {
                (col..n).find(|&r| !a[(r, col)].is_zero())
            } else {
                (col..n)
                    .map(|r| (r, a[(r, col)].abs_f64()))
                    .filter(|(_, v)| *v > threshold)
                    .max_by(|x, y| x.1.total_cmp(&y.1))
                    .map(|(r, _)| r)
            };
            let Some(p) = pivot_row else {
                return Err(LinalgError::Singular);
            };
            if p != col {
                a.swap_rows(p, col);
                rhs.swap_rows(p, col);
                flipped = !flipped;
            }
            let pivot = a[(col, col)].clone();
            for r in col + 1..n {
                if a[(r, col)].is_zero() {
                    continue;
                }
                let factor = a[(r, col)].clone() / pivot.clone();
                a[(r, col)] = S::zero();
                for c in col + 1..n {
                    if !a[(col, c)].is_zero() {
                        let t = factor.clone() * a[(col, c)].clone();
                        a[(r, c)] -= t;
                    }
                }
                for c in 0..rhs.cols {
                    if !rhs[(col, c)].is_zero() {
                        let t = factor.clone() * rhs[(col, c)].clone();
                        rhs[(r, c)] -= t;
                    }
                }
            }
        }
        Ok((a, flipped))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// Solve `self * X = rhs`.
    pub fn solve(&self, rhs: &Self) -> Result<Self, LinalgError> {
        let mut b = rhs.clone();
        let (u, _) = self.eliminate(&mut b)?;
        let n = self.rows;
        let mut x = Self::zeros(n, b.cols);
        for c in 0..b.cols {
            for r in (0..n).rev() {
                let mut acc = b[(r, c)].clone();
                for k in r + 1..n {
                    if !u[(r, k)].is_zero() {
                        acc -= u[(r, k)].clone() * x[(k, c)].clone();
                    }
                }
                x[(r, c)] = acc / u[(r, r)].clone();
            }
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<Self, LinalgError> {
        self.solve(&Self::identity(self.rows))
    }

    pub fn determinant(&self) -> S {
        if self.rows != self.cols {
            return S::zero();
        }
        if self.rows == 0 {
            return S::one();
        }
        let mut dummy = Self::zeros(self.rows, 0);
        match self.eliminate(&mut dummy) {
            Ok((u, flipped)) => {
                let mut det = S::one();
                for i in 0..self.rows {
                    det *= u[(i, i)].clone();
                }
                if flipped {
                    -det
                } else {
                    det
                }
            }
            Err(_) => S::zero(),
        }
    }

    /// Rank by row reduction; float pivots below `tol * max|entry|` count as zero.
    pub fn rank(&self, tol: f64) -> usize {
        let mut a = self.clone();
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        let mut rank = 0;
        for col in 0..a.cols {
            if rank == a.rows {
                break;
            }
            let pivot_row = if S::EXACT {
                (rank..a.rows).find(|&r| !a[(r, col)].is_zero())
            } else {
                (rank..a.rows)
                    .map(|r| (r, a[(r, col)].abs_f64()))
                    .filter(|(_, v)| *v > tol * scale)
                    .max_by(|x, y| x.1.total_cmp(&y.1))
                    .map(|(r, _)| r)
            };
            let Some(p) = pivot_row else { continue };
            a.swap_rows(p, rank);
            let pivot = a[(rank, col)].clone();
            for r in rank + 1..a.rows {
                if a[(r, col)].is_zero() {
                    continue;
                }
                let factor = a[(r, col)].clone() / pivot.clone();
                for c in col..a.cols {
                    let t = factor.clone() * a[(rank, c)].clone();
                    a[(r, c)] -= t;
                }
            }
            rank += 1;
        }
        rank
    }
}

fn pivot_threshold<S: Scalar>(m: &Matrix<S>) -> f64 {
    if S::EXACT {
        0.0
    } else {
        1e-14 * m.max_abs()
    }
}

/// Nonsingularity verdict for a square matrix.
#[derive(Debug, Clone)]
pub struct Regularity<S> {
    pub nonsingular: bool,
    pub determinant: S,
    /// Smallest singular value (float backend only).
    pub min_singular_value: Option<f64>,
}

/// Relative threshold on the smallest singular value for float verdicts.
pub const FLOAT_SINGULAR_THRESHOLD: f64 = 1e-10;

/// Exact backend: `det != 0`. Float backend: smallest singular value above
/// `1e-10 * max|entry|`.
pub fn regularity<S: Scalar>(m: &Matrix<S>) -> Regularity<S> {
    let determinant = m.determinant();
    if S::EXACT {
        return Regularity {
            nonsingular: !determinant.is_zero(),
            determinant,
            min_singular_value: None,
        };
    }
    let f = m.to_f64();
    let dm = nalgebra::DMatrix::from_fn(f.rows(), f.cols(), |r, c| f[(r, c)]);
    let sigma_min = dm
        .singular_values()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let sigma_min = if f.rows() == 0 {
        f64::INFINITY
    } else {
        sigma_min
    };
    Regularity {
        nonsingular: sigma_min > FLOAT_SINGULAR_THRESHOLD * f.max_abs(),
        determinant,
        min_singular_value: Some(sigma_min),
    }
}

impl<S> Index<(usize, usize)> for Matrix<S> {
    type Output = S;
    fn index(&self, (r, c): (usize, usize)) -> &S {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl<S> IndexMut<(usize, usize)> for Matrix<S> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut S {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

impl<S: fmt::Display> fmt::Debug for Matrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix {}x{} ", self.rows, self.cols)?;
        fmt::Display::fmt(self, f)
    }
}

impl<S: fmt::Display> fmt::Display for Matrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self[(r, c)])?;
            }
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(n: i64) -> Rational {
        Rational::from_i64(n)
    }

    fn m(rows: &[&[i64]]) -> Matrix<Rational> {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| q(v)).collect())
                .collect(),
        )
    }

    #[test]
    fn exact_inverse_and_determinant() {
        let a = m(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        assert_eq!(a.determinant(), q(18));
        let inv = a.inverse().unwrap();
        assert_eq!(a.matmul(&inv), Matrix::identity(3));
    }

    #[test]
    fn pivoting_handles_zero_leading_entry() {
        let a = m(&[&[0, 1], &[1, 0]]);
        assert_eq!(a.determinant(), q(-1));
        let x = a.solve(&m(&[&[3], &[5]])).unwrap();
        assert_eq!(x, m(&[&[5], &[3]]));
    }

    #[test]
    fn singular_detected() {
        let a = m(&[&[1, 2], &[2, 4]]);
        assert_eq!(a.inverse(), Err(LinalgError::Singular));
        assert_eq!(a.determinant(), q(0));
        assert_eq!(a.rank(0.0), 1);
        assert!(!regularity(&a).nonsingular);
    }

    #[test]
    fn float_regularity_uses_singular_values() {
        let a = Matrix::from_rows(vec![vec![1.0, 0.0], vec![0.0, 1e-14]]);
        let r = regularity(&a);
        assert!(!r.nonsingular);
        assert!(r.min_singular_value.unwrap() < 1e-13);
        let b = Matrix::from_rows(vec![vec![2.0, 1.0], vec![1.0, 2.0]]);
        assert!(regularity(&b).nonsingular);
    }

    #[test]
    fn rank_of_rectangular() {
        let a = m(&[&[1, 0, 0, 0], &[0, 0, 1, 0]]);
        assert_eq!(a.rank(0.0), 2);
        assert_eq!(a.transpose().rank(0.0), 2);
        assert_eq!(Matrix::<Rational>::zeros(2, 3).rank(0.0), 0);
    }

    #[test]
    fn stacking_and_blocks() {
        let a = m(&[&[1, 2]]);
        let b = m(&[&[3, 4]]);
        let v = Matrix::vstack(&[a.clone(), b.clone()]);
        assert_eq!(v, m(&[&[1, 2], &[3, 4]]));
        let h = Matrix::hstack(&[a, b]);
        assert_eq!(h, m(&[&[1, 2, 3, 4]]));
        assert_eq!(v.block(1, 0, 1, 2), m(&[&[3, 4]]));
        assert_eq!(v.transpose(), m(&[&[1, 3], &[2, 4]]));
    }
}
