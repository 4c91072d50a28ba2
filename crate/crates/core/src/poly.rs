//! Dense multivariate polynomials against the canonical graded monomial basis.
//!
//! A [`Polynomial`] stores one coefficient per monomial of degree `<= bound`
//! in graded reverse-lex order. A [`VectorPolynomial`] is a column of such
//! polynomials stored as a coefficient matrix `[G_{n,0} | G_{n,1} | ... ]`.

use std::collections::BTreeMap;

use crate::matrix::Matrix;
use crate::multiindex::{all_up_to, cumulative_size, enumerate, rank_size, MultiIndex};
use crate::scalar::Scalar;

/// Values of every monomial of degree `<= bound` at `x`, in graded order.
pub fn monomial_vector<S: Scalar>(x: &[S], bound: usize) -> Vec<S> {
    let d = x.len();
    // powers[i][e] = x_i^e
    let powers: Vec<Vec<S>> = x
        .iter()
        .map(|xi| {
            let mut p = Vec::with_capacity(bound + 1);
            p.push(S::one());
            for e in 1..=bound {
                let next = p[e - 1].clone() * xi.clone();
                p.push(next);
            }
            p
        })
        .collect();
    all_up_to(bound, d)
        .iter()
        .map(|nu| {
            let mut acc = S::one();
            for (i, &e) in nu.exponents().iter().enumerate() {
                if e > 0 {
                    acc *= powers[i][e as usize].clone();
                }
            }
            acc
        })
        .collect()
}

/// Scalar polynomial in `d` variables.
#[derive(Clone, PartialEq, Debug)]
pub struct Polynomial<S> {
    dim: usize,
    bound: usize,
    coeffs: Vec<S>,
}

impl<S: Scalar> Polynomial<S> {
    pub fn zero(dim: usize) -> Self {
        Self::with_bound(dim, 0)
    }

    pub fn with_bound(dim: usize, bound: usize) -> Self {
        Self {
            dim,
            bound,
            coeffs: vec![S::zero(); cumulative_size(bound, dim)],
        }
    }

    pub fn constant(dim: usize, c: S) -> Self {
        let mut p = Self::zero(dim);
        p.coeffs[0] = c;
        p
    }

    pub fn monomial(nu: &MultiIndex, c: S) -> Self {
        let mut p = Self::with_bound(nu.dim(), nu.degree());
        p.coeffs[nu.global_position()] = c;
        p
    }

    /// `x_i` (0-based).
    pub fn variable(dim: usize, i: usize) -> Self {
        Self::monomial(&MultiIndex::unit(dim, i), S::one())
    }

    pub fn from_terms<I: IntoIterator<Item = (MultiIndex, S)>>(dim: usize, terms: I) -> Self {
        let mut p = Self::zero(dim);
        for (nu, c) in terms {
            assert_eq!(nu.dim(), dim, "term dimension mismatch");
            p = p.add(&Self::monomial(&nu, c));
        }
        p
    }

    /// Coefficient vector in graded order; its length is `dim Pi_bound`.
    pub fn from_coeffs(dim: usize, bound: usize, coeffs: Vec<S>) -> Self {
        assert_eq!(coeffs.len(), cumulative_size(bound, dim));
        Self { dim, bound, coeffs }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Storage bound on the degree (not necessarily attained).
    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn coeff(&self, nu: &MultiIndex) -> S {
        self.coeffs
            .get(nu.global_position())
            .cloned()
            .unwrap_or_else(S::zero)
    }

    /// Nonzero terms keyed by multi-index.
    pub fn terms(&self) -> BTreeMap<MultiIndex, S> {
        all_up_to(self.bound, self.dim)
            .into_iter()
            .zip(&self.coeffs)
            .filter(|(_, c)| !c.is_zero())
            .map(|(nu, c)| (nu, c.clone()))
            .collect()
    }

    /// Highest degree with a coefficient above `tol` (exact zero test for rationals).
    pub fn degree(&self, tol: f64) -> Option<usize> {
        (0..=self.bound).rev().find(|&k| {
            let start = if k == 0 {
                0
            } else {
                cumulative_size(k - 1, self.dim)
            };
            self.coeffs[start..start + rank_size(k, self.dim)]
                .iter()
                .any(|c| !c.is_negligible(tol))
        })
    }

    pub fn is_zero_within(&self, tol: f64) -> bool {
        self.coeffs.iter().all(|c| c.is_negligible(tol))
    }

    pub fn padded(&self, bound: usize) -> Self {
        if bound <= self.bound {
            return self.clone();
        }
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(cumulative_size(bound, self.dim), S::zero());
        Self {
            dim: self.dim,
            bound,
            coeffs,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let b = self.bound.max(other.bound);
        let mut out = self.padded(b);
        for (o, c) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *o += c.clone();
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-S::one()))
    }

    pub fn scale(&self, s: &S) -> Self {
        Self {
            dim: self.dim,
            bound: self.bound,
            coeffs: self.coeffs.iter().map(|c| c.clone() * s.clone()).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let mut out = Self::with_bound(self.dim, self.bound + other.bound);
        let left = all_up_to(self.bound, self.dim);
        let right = all_up_to(other.bound, self.dim);
        for (a, ca) in left.iter().zip(&self.coeffs) {
            if ca.is_zero() {
                continue;
            }
            for (b, cb) in right.iter().zip(&other.coeffs) {
                if cb.is_zero() {
                    continue;
                }
                out.coeffs[a.add(b).global_position()] += ca.clone() * cb.clone();
            }
        }
        out
    }

    /// `x_i * p`.
    pub fn mul_var(&self, i: usize) -> Self {
        let mut out = Self::with_bound(self.dim, self.bound + 1);
        for (nu, c) in all_up_to(self.bound, self.dim).iter().zip(&self.coeffs) {
            if !c.is_zero() {
                out.coeffs[nu.bump(i).global_position()] = c.clone();
            }
        }
        out
    }

    /// Partial derivative in variable `i`.
    pub fn derivative(&self, i: usize) -> Self {
        let mut out = Self::with_bound(self.dim, self.bound.saturating_sub(1));
        for (nu, c) in all_up_to(self.bound, self.dim).iter().zip(&self.coeffs) {
            let e = nu.exponents()[i];
            if e == 0 || c.is_zero() {
                continue;
            }
            let lowered = nu.checked_sub(&MultiIndex::unit(self.dim, i)).unwrap();
            out.coeffs[lowered.global_position()] += c.clone() * S::from_i64(e as i64);
        }
        out
    }

    pub fn eval(&self, x: &[S]) -> S {
        assert_eq!(x.len(), self.dim, "point dimension mismatch");
        let mut acc = S::zero();
        for (c, m) in self.coeffs.iter().zip(monomial_vector(x, self.bound)) {
            if !c.is_zero() {
                acc += c.clone() * m;
            }
        }
        acc
    }

    /// Substitute a polynomial for each variable: `p(q_1(x), ..., q_d(x))`.
    pub fn compose(&self, subs: &[Polynomial<S>]) -> Polynomial<S> {
        assert_eq!(subs.len(), self.dim);
        let target_dim = subs.first().map_or(self.dim, |s| s.dim);
        let mut out = Polynomial::zero(target_dim);
        for (nu, c) in self.terms() {
            let mut term = Polynomial::constant(target_dim, c);
            for (i, &e) in nu.exponents().iter().enumerate() {
                for _ in 0..e {
                    term = term.mul(&subs[i]);
                }
            }
            out = out.add(&term);
        }
        out
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Polynomial<T> {
        Polynomial {
            dim: self.dim,
            bound: self.bound,
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.sub(other)
            .coeffs
            .iter()
            .map(S::abs_f64)
            .fold(0.0, f64::max)
    }
}

/// Column vector of polynomials, `P = sum_k G_{n,k} X_k`.
#[derive(Clone, PartialEq)]
pub struct VectorPolynomial<S> {
    dim: usize,
    bound: usize,
    coeffs: Matrix<S>,
}

impl<S: Scalar> std::fmt::Debug for VectorPolynomial<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "VectorPolynomial(d={}, bound={}) {:?}",
            self.dim, self.bound, self.coeffs
        )
    }
}

impl<S: Scalar> VectorPolynomial<S> {
    pub fn zeros(dim: usize, rows: usize, bound: usize) -> Self {
        Self {
            dim,
            bound,
            coeffs: Matrix::zeros(rows, cumulative_size(bound, dim)),
        }
    }

    /// Canonical monomial vector `X_n`.
    pub fn monomials(dim: usize, n: usize) -> Self {
        let r = rank_size(n, dim);
        let offset = if n == 0 {
            0
        } else {
            cumulative_size(n - 1, dim)
        };
        let mut out = Self::zeros(dim, r, n);
        for k in 0..r {
            out.coeffs[(k, offset + k)] = S::one();
        }
        out
    }

    /// Coefficient matrix with `dim Pi_bound` columns.
    pub fn from_coeffs(dim: usize, bound: usize, coeffs: Matrix<S>) -> Self {
        assert_eq!(coeffs.cols(), cumulative_size(bound, dim));
        Self { dim, bound, coeffs }
    }

    /// Assemble from blocks `[G_{n,0}, ..., G_{n,n}]`.
    pub fn from_blocks(dim: usize, blocks: &[Matrix<S>]) -> Self {
        let bound = blocks.len().checked_sub(1).expect("at least one block");
        for (k, b) in blocks.iter().enumerate() {
            assert_eq!(b.cols(), rank_size(k, dim), "block {k} has wrong width");
        }
        Self {
            dim,
            bound,
            coeffs: Matrix::hstack(blocks),
        }
    }

    pub fn from_rows(dim: usize, rows: &[Polynomial<S>]) -> Self {
        let bound = rows.iter().map(Polynomial::bound).max().unwrap_or(0);
        let mut out = Self::zeros(dim, rows.len(), bound);
        for (r, p) in rows.iter().enumerate() {
            for (c, v) in p.coeffs().iter().enumerate() {
                out.coeffs[(r, c)] = v.clone();
            }
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coeffs.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.rows() == 0
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn coeffs(&self) -> &Matrix<S> {
        &self.coeffs
    }

    /// `G_{n,k}`; zero when `k` exceeds the storage bound.
    pub fn block(&self, k: usize) -> Matrix<S> {
        let r = rank_size(k, self.dim);
        if k > self.bound {
            return Matrix::zeros(self.len(), r);
        }
        let offset = if k == 0 {
            0
        } else {
            cumulative_size(k - 1, self.dim)
        };
        self.coeffs.block(0, offset, self.len(), r)
    }

    pub fn row(&self, r: usize) -> Polynomial<S> {
        Polynomial::from_coeffs(self.dim, self.bound, self.coeffs.row(r).to_vec())
    }

    pub fn padded(&self, bound: usize) -> Self {
        if bound <= self.bound {
            return self.clone();
        }
        let mut out = Self::zeros(self.dim, self.len(), bound);
        out.coeffs.set_block(0, 0, &self.coeffs);
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let b = self.bound.max(other.bound);
        Self {
            dim: self.dim,
            bound: b,
            coeffs: self.padded(b).coeffs.add(&other.padded(b).coeffs),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let b = self.bound.max(other.bound);
        Self {
            dim: self.dim,
            bound: b,
            coeffs: self.padded(b).coeffs.sub(&other.padded(b).coeffs),
        }
    }

    /// `A * P` for a scalar matrix `A`.
    pub fn left_mul(&self, a: &Matrix<S>) -> Self {
        if a.cols() == 0 {
            return Self::zeros(self.dim, a.rows(), self.bound);
        }
        Self {
            dim: self.dim,
            bound: self.bound,
            coeffs: a.matmul(&self.coeffs),
        }
    }

    /// `x_i * P`.
    pub fn mul_var(&self, i: usize) -> Self {
        let rows: Vec<_> = (0..self.len()).map(|r| self.row(r).mul_var(i)).collect();
        let mut out = Self::from_rows(self.dim, &rows);
        if rows.is_empty() {
            out = Self::zeros(self.dim, 0, self.bound + 1);
        }
        out
    }

    /// `q * P` for a scalar polynomial `q`.
    pub fn mul_poly(&self, q: &Polynomial<S>) -> Self {
        let rows: Vec<_> = (0..self.len()).map(|r| self.row(r).mul(q)).collect();
        if rows.is_empty() {
            return Self::zeros(self.dim, 0, self.bound + q.bound());
        }
        Self::from_rows(self.dim, &rows)
    }

    pub fn evaluate(&self, x: &[S]) -> Vec<S> {
        assert_eq!(x.len(), self.dim, "point dimension mismatch");
        self.coeffs.mul_vec(&monomial_vector(x, self.bound))
    }

    pub fn is_zero_within(&self, tol: f64) -> bool {
        self.coeffs.is_zero_within(tol)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.sub(other).coeffs.max_abs()
    }

    /// True when every entry has degree `<= n` (coefficients above `n` vanish).
    pub fn has_degree_at_most(&self, n: usize, tol: f64) -> bool {
        (n + 1..=self.bound).all(|k| self.block(k).is_zero_within(tol))
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> VectorPolynomial<T> {
        VectorPolynomial {
            dim: self.dim,
            bound: self.bound,
            coeffs: self.coeffs.map(f),
        }
    }
}

/// Scalar polynomial `x^nu`-sum built from a univariate coefficient list.
pub fn univariate<S: Scalar>(coeffs: &[S]) -> Polynomial<S> {
    Polynomial::from_terms(
        1,
        coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| (MultiIndex::new(vec![k as u32]), c.clone())),
    )
}

/// Degree-`n` block of the monomial vector, i.e. `X_n(x)`.
pub fn monomial_block<S: Scalar>(x: &[S], n: usize) -> Vec<S> {
    enumerate(n, x.len())
        .indices
        .iter()
        .map(|nu| nu.eval(x))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex::new(v.to_vec())
    }

    #[test]
    fn arithmetic_and_evaluation() {
        // p = 1 + 2 x1 - x1 x2
        let p = Polynomial::from_terms(
            2,
            [
                (mi(&[0, 0]), q(1, 1)),
                (mi(&[1, 0]), q(2, 1)),
                (mi(&[1, 1]), q(-1, 1)),
            ],
        );
        let x = [q(1, 2), q(3, 1)];
        assert_eq!(p.eval(&x), q(1, 1) + q(1, 1) - q(3, 2));
        let sq = p.mul(&p);
        assert_eq!(sq.eval(&x), p.eval(&x) * p.eval(&x));
        assert_eq!(p.degree(0.0), Some(2));
        assert_eq!(Polynomial::<Rational>::zero(2).degree(0.0), None);
        let dx = p.derivative(0);
        assert_eq!(
            dx,
            Polynomial::from_terms(2, [(mi(&[0, 0]), q(2, 1)), (mi(&[0, 1]), q(-1, 1))]).padded(1)
        );
    }

    #[test]
    fn vector_polynomial_blocks() {
        let x2 = VectorPolynomial::<Rational>::monomials(2, 2);
        assert_eq!(x2.len(), 3);
        assert_eq!(x2.block(2), Matrix::identity(3));
        assert!(x2.block(1).is_zero_within(0.0));
        let pt = [q(2, 1), q(-1, 1)];
        assert_eq!(x2.evaluate(&pt), vec![q(4, 1), q(-2, 1), q(1, 1)]);
        assert_eq!(x2.evaluate(&pt), monomial_block(&pt, 2));
        // x1 X_1 = L_{1,0} X_2
        let x1 = VectorPolynomial::<Rational>::monomials(2, 1).mul_var(0);
        let l = crate::multiindex::shift_matrix(1, 0, 2).to_matrix::<Rational>();
        assert_eq!(x1, x2.left_mul(&l));
    }

    #[test]
    fn compose_substitutes() {
        // t^2 with t = x1 + x2
        let t2 = univariate(&[q(0, 1), q(0, 1), q(1, 1)]);
        let s = Polynomial::variable(2, 0).add(&Polynomial::variable(2, 1));
        let c = t2.compose(&[s]);
        assert_eq!(c.coeff(&mi(&[1, 1])), q(2, 1));
        assert_eq!(c.coeff(&mi(&[2, 0])), q(1, 1));
    }

    proptest! {
        #[test]
        fn evaluation_matches_direct_monomial_sum(
            coeffs in proptest::collection::vec(-5i64..=5, 10),
            x in -4i64..=4, y in -4i64..=4,
        ) {
            let p = Polynomial::from_coeffs(2, 3, coeffs.iter().map(|&c| q(c, 1)).collect());
            let pt = [q(x, 3), q(y, 2)];
            let direct = all_up_to(3, 2).iter().zip(&coeffs).fold(q(0, 1), |acc, (nu, &c)| {
                acc + q(c, 1) * pt[0].clone().powi(nu.exponents()[0]) * pt[1].clone().powi(nu.exponents()[1])
            });
            prop_assert_eq!(p.eval(&pt), direct);
        }
    }
}
