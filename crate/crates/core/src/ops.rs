//! Monic orthogonal polynomial systems, Gram matrices, three-term
//! coefficients and reproducing kernels.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::matrix::{regularity, Matrix};
use crate::moments::MomentFunctional;
use crate::multiindex::{all_up_to, enumerate, rank_size, shift};
use crate::poly::{Polynomial, VectorPolynomial};
use crate::scalar::Scalar;

type Cached<S> = OnceLock<Result<Matrix<S>>>;

/// Monic OPS `P_0, ..., P_N` of a quasi-definite moment functional.
///
/// Built with [`OpSystem::build`] (fails on the first singular moment matrix)
/// or [`OpSystem::build_truncating`] (keeps every degree below the failure).
pub struct OpSystem<S> {
    functional: MomentFunctional<S>,
    tol: f64,
    polys: Vec<VectorPolynomial<S>>,
    grams: Vec<Matrix<S>>,
    gram_inverses: Vec<Matrix<S>>,
    failure: Option<Error>,
    b_cache: Vec<Vec<Cached<S>>>,
}

impl<S: Scalar> Clone for OpSystem<S> {
    fn clone(&self) -> Self {
        Self {
            functional: self.functional.clone(),
            tol: self.tol,
            polys: self.polys.clone(),
            grams: self.grams.clone(),
            gram_inverses: self.gram_inverses.clone(),
            failure: self.failure.clone(),
            b_cache: fresh_cache(self.polys.len(), self.functional.dim()),
        }
    }
}

impl<S: Scalar> std::fmt::Debug for OpSystem<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("OpSystem")
            .field("functional", &self.functional)
            .field("max_degree", &self.max_degree())
            .field("failure", &self.failure)
            .finish()
    }
}

fn fresh_cache<S>(levels: usize, d: usize) -> Vec<Vec<Cached<S>>> {
    (0..levels)
        .map(|_| (0..d).map(|_| OnceLock::new()).collect())
        .collect()
}

impl<S: Scalar> OpSystem<S> {
    /// Builds `P_0..P_N`; errors with the first degree whose moment matrix is singular.
    pub fn build(u: &MomentFunctional<S>, max_degree: usize, tol: f64) -> Result<Self> {
        let sys = Self::build_truncating(u, max_degree, tol);
        match sys.failure {
            Some(e) => Err(e),
            None => Ok(sys),
        }
    }

    /// Builds degree by degree and stops at the first failure, keeping the
    /// polynomials constructed so far.
    pub fn build_truncating(u: &MomentFunctional<S>, max_degree: usize, tol: f64) -> Self {
        let mut sys = Self {
            functional: u.clone(),
            tol,
            polys: Vec::new(),
            grams: Vec::new(),
            gram_inverses: Vec::new(),
            failure: None,
            b_cache: Vec::new(),
        };
        for n in 0..=max_degree {
            if let Err(e) = sys.push_degree(n) {
                sys.failure = Some(e);
                break;
            }
        }
        sys.b_cache = fresh_cache(sys.polys.len(), u.dim());
        sys
    }

    /// Wraps polynomials and Grams computed elsewhere (for instance by a
    /// modification engine). The caller guarantees they form a monic OPS of `u`.
    pub fn from_parts(
        u: &MomentFunctional<S>,
        tol: f64,
        polys: Vec<VectorPolynomial<S>>,
        grams: Vec<Matrix<S>>,
        gram_inverses: Vec<Matrix<S>>,
    ) -> Self {
        assert!(polys.len() == grams.len() && grams.len() == gram_inverses.len());
        let b_cache = fresh_cache(polys.len(), u.dim());
        Self {
            functional: u.clone(),
            tol,
            polys,
            grams,
            gram_inverses,
            failure: None,
            b_cache,
        }
    }

    fn push_degree(&mut self, n: usize) -> Result<()> {
        let u = &self.functional;
        let d = u.dim();
        let top = enumerate(n, d).indices;
        let p = if n == 0 {
            VectorPolynomial::monomials(d, 0)
        } else {
            let lower = all_up_to(n - 1, d);
            let m = u.moment_grid(&lower, &lower)?;
            let rhs = u.moment_grid(&lower, &top)?;
            let x = m
                .solve(&rhs)
                .map_err(|_| Error::SingularMomentMatrix { degree: n - 1 })?;
            let coeffs = Matrix::hstack(&[x.transpose().neg(), Matrix::identity(top.len())]);
            VectorPolynomial::from_coeffs(d, n, coeffs)
        };
        let h = p.coeffs().matmul(&u.moment_grid(&all_up_to(n, d), &top)?);
        let reg = regularity(&h);
        if !reg.nonsingular {
            return Err(Error::SingularMomentMatrix { degree: n });
        }
        let h_inv = h
            .inverse()
            .map_err(|_| Error::SingularMomentMatrix { degree: n })?;
        self.polys.push(p);
        self.grams.push(h);
        self.gram_inverses.push(h_inv);
        Ok(())
    }

    pub fn functional(&self) -> &MomentFunctional<S> {
        &self.functional
    }

    pub fn dim(&self) -> usize {
        self.functional.dim()
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    /// Highest degree built. A truncated build at degree 0 has no polynomials;
    /// callers should consult [`OpSystem::failure`] first.
    pub fn max_degree(&self) -> usize {
        self.polys.len().saturating_sub(1)
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    pub fn failure(&self) -> Option<&Error> {
        self.failure.as_ref()
    }

    pub fn poly(&self, n: usize) -> &VectorPolynomial<S> {
        &self.polys[n]
    }

    pub fn polys(&self) -> &[VectorPolynomial<S>] {
        &self.polys
    }

    /// `H_n = <u, P_n P_n^t>`.
    pub fn gram(&self, n: usize) -> &Matrix<S> {
        &self.grams[n]
    }

    pub fn gram_inverse(&self, n: usize) -> &Matrix<S> {
        &self.gram_inverses[n]
    }

    pub fn evaluate(&self, n: usize, x: &[S]) -> Vec<S> {
        self.polys[n].evaluate(x)
    }

    /// `B_{n,i} = <u, x_i P_n P_n^t> H_n^{-1}` (`i` is 0-based).
    pub fn b(&self, n: usize, i: usize) -> Result<Matrix<S>> {
        self.b_cache[n][i]
            .get_or_init(|| {
                let xp = self.polys[n].mul_var(i);
                Ok(self
                    .functional
                    .pair(&xp, &self.polys[n])?
                    .matmul(&self.gram_inverses[n]))
            })
            .clone()
    }

    /// `C_{n,i} = H_n L_{n-1,i}^t H_{n-1}^{-1}` for `n >= 1`; an `r_0 x 0` matrix for `n = 0`.
    pub fn c(&self, n: usize, i: usize) -> Matrix<S> {
        if n == 0 {
            return Matrix::zeros(1, 0);
        }
        let l = shift::<S>(n as isize - 1, i, self.dim());
        self.grams[n]
            .matmul(&l.transpose())
            .matmul(&self.gram_inverses[n - 1])
    }

    /// `C_{n,i}` from the pairing `<u, x_i P_n P_{n-1}^t> H_{n-1}^{-1}`.
    pub fn c_from_pairing(&self, n: usize, i: usize) -> Result<Matrix<S>> {
        assert!(n >= 1);
        let xp = self.polys[n].mul_var(i);
        Ok(self
            .functional
            .pair(&xp, &self.polys[n - 1])?
            .matmul(&self.gram_inverses[n - 1]))
    }

    /// `x_i P_n - L_{n,i} P_{n+1} - B_{n,i} P_n - C_{n,i} P_{n-1}`; requires `n + 1 <= N`.
    pub fn three_term_residual(&self, n: usize, i: usize) -> Result<VectorPolynomial<S>> {
        let d = self.dim();
        let mut r = self.polys[n]
            .mul_var(i)
            .sub(&self.polys[n + 1].left_mul(&shift(n as isize, i, d)))
            .sub(&self.polys[n].left_mul(&self.b(n, i)?));
        if n >= 1 {
            r = r.sub(&self.polys[n - 1].left_mul(&self.c(n, i)));
        }
        Ok(r)
    }

    /// Checks `rank C_{n,i} = r_{n-1}` for each `i` and that the joint matrix
    /// `(C_{n,1} | ... | C_{n,d})` has rank `r_n`.
    pub fn rank_conditions(&self, n: usize) -> bool {
        assert!(n >= 1);
        let d = self.dim();
        let blocks: Vec<Matrix<S>> = (0..d).map(|i| self.c(n, i)).collect();
        let each = blocks
            .iter()
            .all(|c| c.rank(self.tol) == rank_size(n - 1, d));
        each && Matrix::hstack(&blocks).rank(self.tol) == rank_size(n, d)
    }

    /// `K_n(u; x, y)`.
    pub fn kernel(&self, n: usize, x: &[S], y: &[S]) -> S {
        let mut acc = S::zero();
        for m in 0..=n {
            let px = Matrix::column(self.evaluate(m, x));
            let py = Matrix::column(self.evaluate(m, y));
            acc += px.transpose().matmul(&self.gram_inverses[m]).matmul(&py)[(0, 0)].clone();
        }
        acc
    }

    /// `y -> K_n(u; x, y)` as a polynomial.
    pub fn kernel_polynomial(&self, n: usize, x: &[S]) -> Polynomial<S> {
        let mut acc = Polynomial::zero(self.dim());
        for m in 0..=n {
            let row = Matrix::column(self.evaluate(m, x))
                .transpose()
                .matmul(&self.gram_inverses[m]);
            acc = acc.add(&self.polys[m].left_mul(&row).row(0));
        }
        acc
    }

    /// `<u, X_m P_n^t>` for every `m < n`, stacked vertically; zero for a genuine OPS.
    pub fn orthogonality_defect(&self, n: usize) -> Result<Matrix<S>> {
        let d = self.dim();
        let lower: Vec<Matrix<S>> = (0..n)
            .map(|m| {
                self.functional
                    .pair(&VectorPolynomial::monomials(d, m), &self.polys[n])
            })
            .collect::<Result<_>>()?;
        if lower.is_empty() {
            return Ok(Matrix::zeros(0, rank_size(n, d)));
        }
        Ok(Matrix::vstack(&lower))
    }
}
