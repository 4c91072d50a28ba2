//! Multi-indices in graded reverse lexicographical order and the shift
//! matrices `L_{n,i}` that express `x_i X_n = L_{n,i} X_{n+1}`.
//!
//! Order within a degree: `a` precedes `b` when, at the first position where
//! they differ, `a` has the larger exponent. For `d = 2` this gives
//! `1; x1, x2; x1^2, x1 x2, x2^2; ...`.

use std::fmt;

use crate::matrix::Matrix;
use crate::scalar::Scalar;

/// Exponent vector `(n_1, ..., n_d)` of a monomial.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        assert!(!exponents.is_empty(), "a multi-index needs d >= 1");
        Self(exponents)
    }

    pub fn zero(d: usize) -> Self {
        Self::new(vec![0; d])
    }

    /// Unit index `e_i` (0-based position).
    pub fn unit(d: usize, i: usize) -> Self {
        let mut e = vec![0; d];
        e[i] = 1;
        Self::new(e)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn is_odd(&self) -> bool {
        self.degree() % 2 == 1
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self + e_i`.
    pub fn bump(&self, i: usize) -> Self {
        let mut e = self.0.clone();
        e[i] += 1;
        Self(e)
    }

    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(Self)
    }

    /// Position of this index inside `enumerate(degree, d)`.
    pub fn position_in_degree(&self) -> usize {
        let d = self.dim();
        let mut remaining = self.degree();
        let mut pos = 0;
        for p in 0..d.saturating_sub(1) {
            let e = self.0[p] as usize;
            let slots = d - p - 1;
            // indices with a larger exponent at position p come first
            for larger in e + 1..=remaining {
                pos += rank_size(remaining - larger, slots);
            }
            remaining -= e;
        }
        pos
    }

    /// Position in the full graded list `enumerate(0) ++ enumerate(1) ++ ...`.
    pub fn global_position(&self) -> usize {
        let n = self.degree();
        let before = if n == 0 {
            0
        } else {
            cumulative_size(n - 1, self.dim())
        };
        before + self.position_in_degree()
    }

    /// Evaluate `x^nu` at a point.
    pub fn eval<S: Scalar>(&self, x: &[S]) -> S {
        debug_assert_eq!(x.len(), self.dim());
        let mut acc = S::one();
        for (xi, &e) in x.iter().zip(&self.0) {
            if e > 0 {
                acc *= xi.powi(e);
            }
        }
        acc
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Monomial notation, e.g. `x1^2*x3`; the zero index prints as `1`.
impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "x{}", i + 1)?;
            } else {
                write!(f, "x{}^{}", i + 1, e)?;
            }
        }
        if first {
            write!(f, "1")?;
        }
        Ok(())
    }
}

/// `r_n^d = binom(n+d-1, n)`, the number of monomials of exact degree `n`.
pub fn rank_size(n: usize, d: usize) -> usize {
    assert!(d >= 1, "dimension must be at least 1");
    binom(n + d - 1, n)
}

/// `dim Pi_n^d = binom(n+d, n)`.
pub fn cumulative_size(n: usize, d: usize) -> usize {
    assert!(d >= 1, "dimension must be at least 1");
    binom(n + d, n)
}

fn binom(n: usize, k: usize) -> usize {
    debug_assert!(k <= n);
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

/// The `r_n^d` multi-indices of total degree `n`, in reverse lex order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedBasis {
    pub dim: usize,
    pub degree: usize,
    pub indices: Vec<MultiIndex>,
}

impl GradedBasis {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

pub fn enumerate(n: usize, d: usize) -> GradedBasis {
    assert!(d >= 1, "dimension must be at least 1");
    let mut indices = Vec::with_capacity(rank_size(n, d));
    let mut current = vec![0u32; d];
    fill(&mut current, 0, n, &mut indices);
    GradedBasis {
        dim: d,
        degree: n,
        indices,
    }
}

fn fill(current: &mut [u32], pos: usize, remaining: usize, out: &mut Vec<MultiIndex>) {
    if pos + 1 == current.len() {
        current[pos] = remaining as u32;
        out.push(MultiIndex(current.to_vec()));
        return;
    }
    for e in (0..=remaining).rev() {
        current[pos] = e as u32;
        fill(current, pos + 1, remaining - e, out);
    }
    current[pos] = 0;
}

/// All multi-indices of degree `<= n`, in graded order.
pub fn all_up_to(n: usize, d: usize) -> Vec<MultiIndex> {
    (0..=n).flat_map(|k| enumerate(k, d).indices).collect()
}

/// Structural 0/1 matrix `L_{n,i}` of size `r_n^d x r_{n+1}^d`.
///
/// Stored as the column index of the single 1 in each row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftMatrix {
    pub dim: usize,
    pub degree: usize,
    /// 0-based variable.
    pub variable: usize,
    columns: Vec<usize>,
}

impl ShiftMatrix {
    pub fn rows(&self) -> usize {
        self.columns.len()
    }

    pub fn cols(&self) -> usize {
        rank_size(self.degree + 1, self.dim)
    }

    /// Column holding the 1 in row `r`.
    pub fn column_of(&self, r: usize) -> usize {
        self.columns[r]
    }

    pub fn to_matrix<S: Scalar>(&self) -> Matrix<S> {
        let mut m = Matrix::zeros(self.rows(), self.cols());
        for (r, &c) in self.columns.iter().enumerate() {
            m[(r, c)] = S::one();
        }
        m
    }
}

/// `L_{n,i}` for variable `i` (0-based, `i < d`).
pub fn shift_matrix(n: usize, i: usize, d: usize) -> ShiftMatrix {
    assert!(i < d, "variable {i} out of range for d = {d}");
    let columns = enumerate(n, d)
        .indices
        .iter()
        .map(|nu| nu.bump(i).position_in_degree())
        .collect();
    ShiftMatrix {
        dim: d,
        degree: n,
        variable: i,
        columns,
    }
}

/// Dense `L_{n,i}` in the requested backend; an empty `0 x r_0` matrix for `n < 0`.
pub fn shift<S: Scalar>(n: isize, i: usize, d: usize) -> Matrix<S> {
    if n < 0 {
        Matrix::zeros(0, 1)
    } else {
        shift_matrix(n as usize, i, d).to_matrix()
    }
}
