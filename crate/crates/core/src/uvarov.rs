//! Uvarov modification `v = u + sum_i lambda_i delta_{xi_i}`.
//!
//! [`UvarovSystem`] caches, per degree `n`, the evaluation matrix
//! `P_n(xi)` (columns `P_n(xi_i)`), the kernel matrix `K_n` with entries
//! `K_n(u; xi_i, xi_j)` and the kernel vectors `K_n(xi_i, .)` as polynomials.
//! The modified monic polynomials, Grams, inverse Grams and kernels of `v`
//! follow from these without touching the moments of `v`.

use crate::error::{Error, Result};
use crate::matrix::{regularity, Matrix};
use crate::moments::{validate_masses, MomentFunctional};
use crate::ops::OpSystem;
use crate::poly::VectorPolynomial;
use crate::scalar::Scalar;

/// Distinct points with nonzero masses.
#[derive(Debug, Clone, PartialEq)]
pub struct UvarovSpec<S> {
    dim: usize,
    points: Vec<Vec<S>>,
    masses: Vec<S>,
}

impl<S: Scalar> UvarovSpec<S> {
    pub fn new(dim: usize, points: Vec<Vec<S>>, masses: Vec<S>) -> Result<Self> {
        validate_masses(dim, &points, &masses)?;
        Ok(Self {
            dim,
            points,
            masses,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Vec<S>] {
        &self.points
    }

    pub fn masses(&self) -> &[S] {
        &self.masses
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    /// `Lambda = diag(lambda_i)`.
    pub fn lambda(&self) -> Matrix<S> {
        Matrix::diagonal(&self.masses)
    }

    /// The modified functional `v`.
    pub fn apply(&self, u: &MomentFunctional<S>) -> Result<MomentFunctional<S>> {
        u.add_point_masses(&self.points, &self.masses)
    }
}

/// Certificate for degree `n`: invertibility of `D_n = I + Lambda K_{n-1}`
/// (needed for `Q_n`) and of `D_{n+1}` (equivalent to `Ĥ_n` being invertible).
#[derive(Debug, Clone, PartialEq)]
pub struct UvarovVerdict<S> {
    pub degree: usize,
    pub determinant: S,
    pub min_singular_value: Option<f64>,
    pub invertible: bool,
    pub gram_invertible: bool,
}

#[derive(Debug, Clone)]
pub struct UvarovSystem<S: Scalar> {
    base: OpSystem<S>,
    spec: UvarovSpec<S>,
    p_xi: Vec<Matrix<S>>,
    kernel_mats: Vec<Matrix<S>>,
    kernel_vecs: Vec<VectorPolynomial<S>>,
}

impl<S: Scalar> UvarovSystem<S> {
    /// Precomputes the per-degree data for every degree of `base`.
    pub fn new(base: OpSystem<S>, spec: UvarovSpec<S>) -> Self {
        assert_eq!(base.dim(), spec.dim(), "dimension mismatch");
        let count = spec.len();
        let mut p_xi = Vec::with_capacity(base.len());
        let mut kernel_mats: Vec<Matrix<S>> = Vec::with_capacity(base.len());
        let mut kernel_vecs: Vec<VectorPolynomial<S>> = Vec::with_capacity(base.len());
        for n in 0..base.len() {
            let cols: Vec<Matrix<S>> = spec
                .points
                .iter()
                .map(|xi| Matrix::column(base.evaluate(n, xi)))
                .collect();
            let p = Matrix::hstack(&cols);
            let weighted = p.transpose().matmul(base.gram_inverse(n));
            let step = weighted.matmul(&p);
            let vec_step = base.poly(n).left_mul(&weighted);
            let (k, kv) = match n {
                0 => (step, vec_step),
                _ => (
                    kernel_mats[n - 1].add(&step),
                    kernel_vecs[n - 1].padded(n).add(&vec_step),
                ),
            };
            debug_assert_eq!(k.shape(), (count, count));
            p_xi.push(p);
            kernel_mats.push(k);
            kernel_vecs.push(kv);
        }
        Self {
            base,
            spec,
            p_xi,
            kernel_mats,
            kernel_vecs,
        }
    }

    pub fn base(&self) -> &OpSystem<S> {
        &self.base
    }

    pub fn spec(&self) -> &UvarovSpec<S> {
        &self.spec
    }

    pub fn max_degree(&self) -> usize {
        self.base.max_degree()
    }

    /// `P_n(xi)`, of size `r_n x N`.
    pub fn evaluation_matrix(&self, n: usize) -> &Matrix<S> {
        &self.p_xi[n]
    }

    /// `K_n` with entries `K_n(u; xi_i, xi_j)`.
    pub fn kernel_matrix(&self, n: usize) -> &Matrix<S> {
        &self.kernel_mats[n]
    }

    /// Rows `K_n(u; xi_i, .)`.
    pub fn kernel_vector(&self, n: usize) -> &VectorPolynomial<S> {
        &self.kernel_vecs[n]
    }

    /// `D_n = I + Lambda K_{n-1}`, with `D_0 = I`.
    pub fn d_matrix(&self, n: usize) -> Matrix<S> {
        let id = Matrix::identity(self.spec.len());
        if n == 0 {
            return id;
        }
        id.add(&self.spec.lambda().matmul(&self.kernel_mats[n - 1]))
    }

    fn d_regular(&self, n: usize) -> (bool, S, Option<f64>) {
        let r = regularity(&self.d_matrix(n));
        (r.nonsingular, r.determinant, r.min_singular_value)
    }

    /// Verdicts for degrees `0..=N`.
    pub fn certify(&self) -> Vec<UvarovVerdict<S>> {
        let top = self.base.len();
        let regs: Vec<_> = (0..=top).map(|n| self.d_regular(n)).collect();
        (0..top)
            .map(|n| UvarovVerdict {
                degree: n,
                determinant: regs[n].1.clone(),
                min_singular_value: regs[n].2,
                invertible: regs[n].0,
                gram_invertible: regs[n].0 && regs[n + 1].0,
            })
            .collect()
    }

    /// First degree `n <= N + 1` whose `D_n` is singular.
    pub fn first_failure(&self) -> Option<usize> {
        (0..=self.base.len()).find(|&n| !self.d_regular(n).0)
    }

    fn require(&self, n: usize) -> Result<()> {
        match (0..=n).find(|&k| !self.d_regular(k).0) {
            Some(k) => Err(Error::NotQuasiDefinite { degree: k }),
            None => Ok(()),
        }
    }

    /// `D_n^{-1} Lambda`, symmetric since it is the inverse of `Lambda^{-1} + K_{n-1}`.
    pub fn weighted_inverse(&self, n: usize) -> Result<Matrix<S>> {
        self.require(n)?;
        self.d_matrix(n)
            .solve(&self.spec.lambda())
            .map_err(|_| Error::NotQuasiDefinite { degree: n })
    }

    /// `Q_n = P_n - P_n(xi) D_n^{-1} Lambda K_{n-1}(xi, .)`.
    pub fn connect(&self, n: usize) -> Result<VectorPolynomial<S>> {
        let p = self.base.poly(n);
        if n == 0 {
            return Ok(p.clone());
        }
        let coef = self.p_xi[n].matmul(&self.weighted_inverse(n)?);
        Ok(p.sub(&self.kernel_vecs[n - 1].left_mul(&coef).padded(n)))
    }

    /// `Ĥ_n = H_n + P_n(xi) D_n^{-1} Lambda P_n(xi)^t`.
    pub fn modified_gram(&self, n: usize) -> Result<Matrix<S>> {
        let w = self.weighted_inverse(n)?;
        Ok(self
            .base
            .gram(n)
            .add(&self.p_xi[n].matmul(&w).matmul(&self.p_xi[n].transpose())))
    }

    /// `Ĥ_n^{-1} = H_n^{-1} - H_n^{-1} P_n(xi) D_{n+1}^{-1} Lambda P_n(xi)^t H_n^{-1}`.
    pub fn modified_gram_inverse(&self, n: usize) -> Result<Matrix<S>> {
        let w = self.weighted_inverse(n + 1)?;
        let hinv = self.base.gram_inverse(n);
        let left = hinv.matmul(&self.p_xi[n]);
        Ok(hinv.sub(&left.matmul(&w).matmul(&left.transpose())))
    }

    /// `K_n(v; x, y) = K_n(u; x, y) - K_n(xi, x)^t D_{n+1}^{-1} Lambda K_n(xi, y)`.
    pub fn modified_kernel(&self, n: usize, x: &[S], y: &[S]) -> Result<S> {
        let w = self.weighted_inverse(n + 1)?;
        let kx = Matrix::column(self.kernel_vecs[n].evaluate(x));
        let ky = Matrix::column(self.kernel_vecs[n].evaluate(y));
        let corr = kx.transpose().matmul(&w).matmul(&ky)[(0, 0)].clone();
        Ok(self.base.kernel(n, x, y) - corr)
    }

    /// The monic OPS of `v` through degree `N`, assembled from the connection
    /// formulas.
    pub fn modified_system(&self) -> Result<OpSystem<S>> {
        let top = self.base.len();
        self.require(top)?;
        let v = self.spec.apply(self.base.functional())?;
        let mut polys = Vec::with_capacity(top);
        let mut grams = Vec::with_capacity(top);
        let mut inverses = Vec::with_capacity(top);
        for n in 0..top {
            polys.push(self.connect(n)?);
            grams.push(self.modified_gram(n)?);
            inverses.push(self.modified_gram_inverse(n)?);
        }
        Ok(OpSystem::from_parts(
            &v,
            self.base.tolerance(),
            polys,
            grams,
            inverses,
        ))
    }
}
