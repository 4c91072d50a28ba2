//! Christoffel modification `v = lambda(x) u` by a polynomial of exact degree two.

use crate::error::{Error, Result};
use crate::matrix::{regularity, Matrix};
use crate::moments::MomentFunctional;
use crate::multiindex::{enumerate, rank_size, shift, MultiIndex};
use crate::ops::OpSystem;
use crate::poly::{Polynomial, VectorPolynomial};
use crate::scalar::Scalar;

/// `lambda(x) = a_2 X_2 + a_1 X_1 + a_0`, with `a_2` indexed like `enumerate(2, d)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticMultiplier<S> {
    dim: usize,
    a2: Vec<S>,
    a1: Vec<S>,
    a0: S,
}

impl<S: Scalar> QuadraticMultiplier<S> {
    /// Fails with [`Error::DegreeCollapse`] when `a_2 = 0`.
    pub fn new(dim: usize, a2: Vec<S>, a1: Vec<S>, a0: S) -> Result<Self> {
        if a2.len() != rank_size(2, dim) || a1.len() != dim {
            return Err(Error::Invalid(format!(
                "multiplier in {dim} variables needs {} quadratic and {dim} linear coefficients, got {} and {}",
                rank_size(2, dim),
                a2.len(),
                a1.len()
            )));
        }
        if a2.iter().all(|c| c.is_zero()) {
            return Err(Error::DegreeCollapse);
        }
        Ok(Self { dim, a2, a1, a0 })
    }

    /// Reads the coefficients of a polynomial of degree two.
    pub fn from_polynomial(p: &Polynomial<S>, tol: f64) -> Result<Self> {
        let d = p.dim();
        if p.degree(tol).is_some_and(|deg| deg > 2) {
            return Err(Error::Invalid("multiplier has degree above two".into()));
        }
        let a2: Vec<S> = enumerate(2, d)
            .indices
            .iter()
            .map(|nu| p.coeff(nu))
            .collect();
        let a1 = (0..d).map(|i| p.coeff(&MultiIndex::unit(d, i))).collect();
        if a2.iter().all(|c| c.is_negligible(tol)) {
            return Err(Error::DegreeCollapse);
        }
        Self::new(d, a2, a1, p.coeff(&MultiIndex::zero(d)))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn a2(&self) -> &[S] {
        &self.a2
    }

    pub fn a1(&self) -> &[S] {
        &self.a1
    }

    pub fn a0(&self) -> &S {
        &self.a0
    }

    pub fn polynomial(&self) -> Polynomial<S> {
        let d = self.dim;
        let mut terms = vec![(MultiIndex::zero(d), self.a0.clone())];
        terms.extend((0..d).map(|i| (MultiIndex::unit(d, i), self.a1[i].clone())));
        terms.extend(
            enumerate(2, d)
                .indices
                .into_iter()
                .zip(self.a2.iter().cloned()),
        );
        Polynomial::from_terms(d, terms)
    }

    pub fn scale(&self, s: &S) -> Self {
        Self {
            dim: self.dim,
            a2: self.a2.iter().map(|c| c.clone() * s.clone()).collect(),
            a1: self.a1.iter().map(|c| c.clone() * s.clone()).collect(),
            a0: self.a0.clone() * s.clone(),
        }
    }

    /// `(i, j)` with `i <= j` for each entry of `a_2`.
    fn quadratic_pairs(&self) -> Vec<(usize, usize)> {
        enumerate(2, self.dim)
            .indices
            .iter()
            .map(|nu| {
                let mut vars = Vec::new();
                for (k, &e) in nu.exponents().iter().enumerate() {
                    vars.extend(std::iter::repeat_n(k, e as usize));
                }
                (vars[0], vars[1])
            })
            .collect()
    }

    /// `A_{h,1} = sum_i a_i L_{h,i}`.
    pub fn shift_linear(&self, h: usize) -> Matrix<S> {
        let d = self.dim;
        (0..d).fold(
            Matrix::zeros(rank_size(h, d), rank_size(h + 1, d)),
            |acc, i| acc.add(&shift::<S>(h as isize, i, d).scale(&self.a1[i])),
        )
    }

    /// `A_{h,2} = sum_{i <= j} a_{ij} L_{h,j} L_{h+1,i}`.
    pub fn shift_quadratic(&self, h: usize) -> Matrix<S> {
        let d = self.dim;
        let h = h as isize;
        self.quadratic_pairs().into_iter().zip(&self.a2).fold(
            Matrix::zeros(rank_size(h as usize, d), rank_size(h as usize + 2, d)),
            |acc, ((i, j), a)| acc.add(&shift::<S>(h, j, d).matmul(&shift(h + 1, i, d)).scale(a)),
        )
    }

    /// `<u, lambda>`.
    pub fn pair_with(&self, u: &MomentFunctional<S>) -> Result<S> {
        u.apply(&self.polynomial())
    }

    /// `v = lambda u`; requires `<u, lambda> != 0`.
    pub fn apply(&self, u: &MomentFunctional<S>) -> Result<MomentFunctional<S>> {
        if self.pair_with(u)?.is_negligible(0.0) {
            return Err(Error::InadmissibleParameters("<u, lambda> vanishes".into()));
        }
        Ok(u.left_multiply(&self.polynomial()))
    }

    /// `<v, X_h X_k^t> = a_0 m_{h,k} + A_{h,1} m_{h+1,k} + A_{h,2} m_{h+2,k}`.
    pub fn modified_moment_block(
        &self,
        u: &MomentFunctional<S>,
        h: usize,
        k: usize,
    ) -> Result<Matrix<S>> {
        Ok(u.moment_block(h, k)?
            .scale(&self.a0)
            .add(&self.shift_linear(h).matmul(&u.moment_block(h + 1, k)?))
            .add(&self.shift_quadratic(h).matmul(&u.moment_block(h + 2, k)?)))
    }
}

/// `M_n` (`1 <= n <= top`) and `N_n` (`2 <= n <= top`) in `P_n = Q_n + M_n Q_{n-1} + N_n Q_{n-2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Connection<S: Scalar> {
    dim: usize,
    m: Vec<Matrix<S>>,
    n: Vec<Matrix<S>>,
}

impl<S: Scalar> Connection<S> {
    /// `m[k]` holds `M_{k+1}` and `n[k]` holds `N_{k+2}`.
    pub fn new(dim: usize, m: Vec<Matrix<S>>, n: Vec<Matrix<S>>) -> Result<Self> {
        if n.len() + 1 != m.len() {
            return Err(Error::Invalid("connection needs one more M than N".into()));
        }
        for (k, mat) in m.iter().enumerate() {
            let deg = k + 1;
            if mat.shape() != (rank_size(deg, dim), rank_size(deg - 1, dim)) {
                return Err(Error::Invalid(format!(
                    "M_{deg} has shape {:?}",
                    mat.shape()
                )));
            }
        }
        for (k, mat) in n.iter().enumerate() {
            let deg = k + 2;
            if mat.shape() != (rank_size(deg, dim), rank_size(deg - 2, dim)) {
                return Err(Error::Invalid(format!(
                    "N_{deg} has shape {:?}",
                    mat.shape()
                )));
            }
        }
        Ok(Self { dim, m, n })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Largest `n` with `M_n` available.
    pub fn top(&self) -> usize {
        self.m.len()
    }

    /// `M_n` for `1 <= n <= top`.
    pub fn m(&self, n: usize) -> &Matrix<S> {
        &self.m[n - 1]
    }

    /// `N_n` for `2 <= n <= top`.
    pub fn n(&self, n: usize) -> &Matrix<S> {
        &self.n[n - 2]
    }

    pub fn m_mut(&mut self, n: usize) -> &mut Matrix<S> {
        &mut self.m[n - 1]
    }

    pub fn n_mut(&mut self, n: usize) -> &mut Matrix<S> {
        &mut self.n[n - 2]
    }

    /// Keeps degrees `<= top`.
    pub fn truncated(&self, top: usize) -> Self {
        let top = top.min(self.top());
        Self {
            dim: self.dim,
            m: self.m[..top].to_vec(),
            n: self.n[..top.saturating_sub(1)].to_vec(),
        }
    }
}

/// Connection coefficients between the monic OPS of `u` and of `v`, through
/// degree `min(N_u, N_v + 1)`.
pub fn connection<S: Scalar>(u: &OpSystem<S>, v: &OpSystem<S>) -> Result<Connection<S>> {
    let top = u.max_degree().min(v.max_degree() + 1);
    let vf = v.functional();
    let mut m = Vec::new();
    let mut nn = Vec::new();
    for n in 1..=top {
        m.push(
            vf.pair(u.poly(n), v.poly(n - 1))?
                .matmul(v.gram_inverse(n - 1)),
        );
        if n >= 2 {
            nn.push(
                vf.pair(u.poly(n), v.poly(n - 2))?
                    .matmul(v.gram_inverse(n - 2)),
            );
        }
    }
    Connection::new(u.dim(), m, nn)
}

/// `P_n - Q_n - M_n Q_{n-1} - N_n Q_{n-2}` for `n <= min(top, N_v)`.
pub fn connection_residual<S: Scalar>(
    u: &OpSystem<S>,
    v: &OpSystem<S>,
    conn: &Connection<S>,
    n: usize,
) -> VectorPolynomial<S> {
    let mut r = u.poly(n).sub(v.poly(n));
    if n >= 1 {
        r = r.sub(&v.poly(n - 1).left_mul(conn.m(n)).padded(n));
    }
    if n >= 2 {
        r = r.sub(&v.poly(n - 2).left_mul(conn.n(n)).padded(n));
    }
    r
}

/// `N_n Ĥ_{n-2} - H_n A_{n-2,2}^t`.
pub fn eq_n_gram<S: Scalar>(
    u: &OpSystem<S>,
    v: &OpSystem<S>,
    conn: &Connection<S>,
    lambda: &QuadraticMultiplier<S>,
    n: usize,
) -> Matrix<S> {
    conn.n(n)
        .matmul(v.gram(n - 2))
        .sub(&u.gram(n).matmul(&lambda.shift_quadratic(n - 2).transpose()))
}

/// Three-term coefficients of `Q` transported from those of `P`.
#[derive(Debug, Clone)]
pub struct Transport<S: Scalar> {
    /// `b_hat[n][i]` for `0 <= n <= top - 1`.
    pub b_hat: Vec<Vec<Matrix<S>>>,
    /// `c_hat[n][i]` for `1 <= n <= top - 1`; index 0 holds the empty `r_0 x 0` blocks.
    pub c_hat: Vec<Vec<Matrix<S>>>,
}

/// `B̂_n = B_n - M_n L_{n-1} + L_n M_{n+1}` and
/// `Ĉ_n = C_n - M_n B̂_{n-1} + B_n M_n - N_n L_{n-2} + L_n N_{n+1}`.
pub fn transport<S: Scalar>(u: &OpSystem<S>, conn: &Connection<S>) -> Result<Transport<S>> {
    let d = u.dim();
    let top = conn.top();
    let mut b_hat: Vec<Vec<Matrix<S>>> = Vec::with_capacity(top);
    let mut c_hat: Vec<Vec<Matrix<S>>> = Vec::with_capacity(top);
    for n in 0..top {
        let mut bs = Vec::with_capacity(d);
        let mut cs = Vec::with_capacity(d);
        #[allow(clippy::needless_range_loop)]
        for i in 0..d {
            let l_n = shift::<S>(n as isize, i, d);
            let b = u.b(n, i)?;
            let mut bh = b.add(&l_n.matmul(conn.m(n + 1)));
            if n >= 1 {
                bh = bh.sub(&conn.m(n).matmul(&shift(n as isize - 1, i, d)));
            }
            let ch = if n == 0 {
                Matrix::zeros(1, 0)
            } else {
                let mut c = u
                    .c(n, i)
                    .sub(&conn.m(n).matmul(&b_hat[n - 1][i]))
                    .add(&b.matmul(conn.m(n)))
                    .add(&l_n.matmul(conn.n(n + 1)));
                if n >= 2 {
                    c = c.sub(&conn.n(n).matmul(&shift(n as isize - 2, i, d)));
                }
                c
            };
            bs.push(bh);
            cs.push(ch);
        }
        b_hat.push(bs);
        c_hat.push(cs);
    }
    Ok(Transport { b_hat, c_hat })
}

/// `M_n Ĉ_{n-1} + N_n B̂_{n-2} - C_n M_{n-1} - B_n N_n` for `2 <= n <= top`.
pub fn eq_consistency<S: Scalar>(
    u: &OpSystem<S>,
    conn: &Connection<S>,
    tr: &Transport<S>,
    n: usize,
    i: usize,
) -> Result<Matrix<S>> {
    assert!(n >= 2);
    let lhs = conn
        .m(n)
        .matmul(&tr.c_hat[n - 1][i])
        .add(&conn.n(n).matmul(&tr.b_hat[n - 2][i]));
    let rhs = u
        .c(n, i)
        .matmul(conn.m(n - 1))
        .add(&u.b(n, i)?.matmul(conn.n(n)));
    Ok(lhs.sub(&rhs))
}

/// `C_n N_{n-1} - N_n Ĉ_{n-2}` for `3 <= n <= top`.
pub fn eq_shifted_consistency<S: Scalar>(
    u: &OpSystem<S>,
    conn: &Connection<S>,
    tr: &Transport<S>,
    n: usize,
    i: usize,
) -> Matrix<S> {
    assert!(n >= 3);
    u.c(n, i)
        .matmul(conn.n(n - 1))
        .sub(&conn.n(n).matmul(&tr.c_hat[n - 2][i]))
}

/// `x_i Q_n - L_{n,i} Q_{n+1} - B̂_{n,i} Q_n - Ĉ_{n,i} Q_{n-1}`.
pub fn three_term_residual<S: Scalar>(
    q: &[VectorPolynomial<S>],
    tr: &Transport<S>,
    n: usize,
    i: usize,
) -> VectorPolynomial<S> {
    let d = q[n].dim();
    let mut r = q[n]
        .mul_var(i)
        .sub(&q[n + 1].left_mul(&shift(n as isize, i, d)))
        .sub(&q[n].left_mul(&tr.b_hat[n][i]).padded(n + 1));
    if n >= 1 {
        r = r.sub(&q[n - 1].left_mul(&tr.c_hat[n][i]).padded(n + 1));
    }
    r
}

/// Which identity a [`Check`] refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Identity {
    /// Three-term relation of `Q`.
    ThreeTerm,
    /// Transported `B̂` against the directly computed coefficient of `v`.
    TransportB,
    /// Transported `Ĉ` against the directly computed coefficient of `v`.
    TransportC,
    Consistency,
    ShiftedConsistency,
    /// `N_n Ĥ_{n-2} = H_n A_{n-2,2}^t`.
    NGram,
    /// `P_n = Q_n + M_n Q_{n-1} + N_n Q_{n-2}`.
    Connection,
}

impl Identity {
    /// Equation label used in reports.
    pub fn label(self) -> &'static str {
        match self {
            Identity::ThreeTerm => "4.4",
            Identity::TransportB => "4.5",
            Identity::TransportC => "4.6",
            Identity::Consistency => "4.7",
            Identity::ShiftedConsistency => "4.8",
            Identity::NGram => "4.9",
            Identity::Connection => "connection",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub identity: Identity,
    pub degree: usize,
    pub variable: Option<usize>,
    pub residual: f64,
    /// Exact backend and the residual is identically zero.
    pub exact: bool,
}

impl Check {
    pub fn passes(&self, tol: f64) -> bool {
        self.exact || self.residual <= tol
    }

    fn from_matrix<S: Scalar>(
        identity: Identity,
        degree: usize,
        variable: Option<usize>,
        r: &Matrix<S>,
    ) -> Self {
        let exact = S::EXACT && r.entries().all(|c| c.is_zero());
        Self {
            identity,
            degree,
            variable,
            residual: r.max_abs(),
            exact,
        }
    }
}

/// Consistency checks (4.7 and 4.8 style) for a candidate connection.
pub fn consistency_checks<S: Scalar>(u: &OpSystem<S>, conn: &Connection<S>) -> Result<Vec<Check>> {
    let tr = transport(u, conn)?;
    let mut out = Vec::new();
    for n in 2..=conn.top() {
        for i in 0..u.dim() {
            out.push(Check::from_matrix(
                Identity::Consistency,
                n,
                Some(i),
                &eq_consistency(u, conn, &tr, n, i)?,
            ));
        }
        if n >= 3 {
            for i in 0..u.dim() {
                out.push(Check::from_matrix(
                    Identity::ShiftedConsistency,
                    n,
                    Some(i),
                    &eq_shifted_consistency(u, conn, &tr, n, i),
                ));
            }
        }
    }
    Ok(out)
}

/// Every identity relating a genuine pair `(u, v = lambda u)`.
pub fn verify_pair<S: Scalar>(
    u: &OpSystem<S>,
    v: &OpSystem<S>,
    lambda: &QuadraticMultiplier<S>,
) -> Result<Vec<Check>> {
    let conn = connection(u, v)?;
    let top = conn.top();
    let d = u.dim();
    let tr = transport(u, &conn)?;
    let mut out = Vec::new();
    for n in 0..=top.min(v.max_degree()) {
        let r = connection_residual(u, v, &conn, n);
        out.push(Check::from_matrix(
            Identity::Connection,
            n,
            None,
            r.coeffs(),
        ));
    }
    for n in 0..top.min(v.max_degree()) {
        for i in 0..d {
            let r = three_term_residual(v.polys(), &tr, n, i);
            out.push(Check::from_matrix(
                Identity::ThreeTerm,
                n,
                Some(i),
                r.coeffs(),
            ));
        }
    }
    for n in 0..top {
        for i in 0..d {
            let r = tr.b_hat[n][i].sub(&v.b(n, i)?);
            out.push(Check::from_matrix(Identity::TransportB, n, Some(i), &r));
            if n >= 1 {
                let r = tr.c_hat[n][i].sub(&v.c(n, i));
                out.push(Check::from_matrix(Identity::TransportC, n, Some(i), &r));
            }
        }
    }
    out.extend(consistency_checks(u, &conn)?);
    for n in 2..=top {
        out.push(Check::from_matrix(
            Identity::NGram,
            n,
            None,
            &eq_n_gram(u, v, &conn, lambda, n),
        ));
    }
    Ok(out)
}

/// `s (N_2^t H_2^{-1} P_2 + M_1^t H_1^{-1} P_1 + H_0^{-1} P_0)`; pass `s = Ĥ_0` to
/// recover the multiplier itself, `s = 1` for the representative with `<v, 1>` normalized away.
pub fn recover_multiplier<S: Scalar>(
    u: &OpSystem<S>,
    conn: &Connection<S>,
    scale: &S,
) -> Result<QuadraticMultiplier<S>> {
    if conn.top() < 2 || u.max_degree() < 2 {
        return Err(Error::Invalid(
            "recovery needs the connection through degree 2".into(),
        ));
    }
    if conn.n(2).is_zero_within(u.tolerance()) {
        return Err(Error::DegreeCollapse);
    }
    let row = |mat: &Matrix<S>, k: usize| {
        let coef = mat.transpose().matmul(u.gram_inverse(k));
        u.poly(k).left_mul(&coef).row(0).padded(2)
    };
    let p = row(conn.n(2), 2)
        .add(&row(conn.m(1), 1))
        .add(&u.poly(0).left_mul(u.gram_inverse(0)).row(0).padded(2))
        .scale(scale);
    QuadraticMultiplier::from_polynomial(&p, u.tolerance())
}

/// Result of the constructive converse.
#[derive(Debug, Clone)]
pub struct Reconstruction<S: Scalar> {
    pub multiplier: QuadraticMultiplier<S>,
    pub system: OpSystem<S>,
    pub transport: Transport<S>,
}

/// Builds `Q_n = P_n - M_n Q_{n-1} - N_n Q_{n-2}`, requires a three-term
/// relation, recovers `lambda` and checks that the `Q_n` are orthogonal for
/// `lambda u` with invertible Grams.
pub fn build_from_connection<S: Scalar>(
    u: &OpSystem<S>,
    conn: &Connection<S>,
    scale: Option<&S>,
) -> Result<Reconstruction<S>> {
    let tol = u.tolerance();
    let top = conn.top().min(u.max_degree());
    if top < 2 {
        return Err(Error::Invalid("connection must reach degree 2".into()));
    }
    if conn.n(2).is_zero_within(tol) {
        return Err(Error::DegreeCollapse);
    }
    let conn = conn.truncated(top);
    let d = u.dim();
    let mut q: Vec<VectorPolynomial<S>> = Vec::with_capacity(top + 1);
    for n in 0..=top {
        let mut qn = u.poly(n).clone();
        if n >= 1 {
            qn = qn.sub(&q[n - 1].left_mul(conn.m(n)).padded(n));
        }
        if n >= 2 {
            qn = qn.sub(&q[n - 2].left_mul(conn.n(n)).padded(n));
        }
        q.push(qn);
    }
    let tr = transport(u, &conn)?;
    for n in 2..=top {
        for i in 0..d {
            let r = eq_consistency(u, &conn, &tr, n, i)?;
            if !r.is_zero_within(tol) {
                return Err(no_three_term(n, i, &r));
            }
        }
        if n >= 3 {
            for i in 0..d {
                let r = eq_shifted_consistency(u, &conn, &tr, n, i);
                if !r.is_zero_within(tol) {
                    return Err(no_three_term(n, i, &r));
                }
            }
        }
    }
    for n in 0..top {
        for i in 0..d {
            let r = three_term_residual(&q, &tr, n, i);
            if !r.is_zero_within(tol) {
                return Err(no_three_term(n, i, r.coeffs()));
            }
        }
    }
    let s = scale.cloned().unwrap_or_else(S::one);
    let multiplier = recover_multiplier(u, &conn, &s)?;
    let v = multiplier.apply(u.functional())?;
    let mut grams = Vec::with_capacity(top + 1);
    let mut inverses = Vec::with_capacity(top + 1);
    for n in 0..=top {
        for m in 0..n {
            if !v.pair(&q[n], &q[m])?.is_zero_within(tol) {
                return Err(Error::Invalid(format!("Q_{n} is not orthogonal to Q_{m}")));
            }
        }
        let h = v.pair(&q[n], &q[n])?;
        if !regularity(&h).nonsingular {
            return Err(Error::NotQuasiDefinite { degree: n });
        }
        inverses.push(
            h.inverse()
                .map_err(|_| Error::NotQuasiDefinite { degree: n })?,
        );
        grams.push(h);
    }
    Ok(Reconstruction {
        multiplier,
        system: OpSystem::from_parts(&v, tol, q, grams, inverses),
        transport: tr,
    })
}

fn no_three_term<S: Scalar>(degree: usize, variable: usize, r: &Matrix<S>) -> Error {
    Error::NoThreeTerm {
        degree,
        variable,
        residual: format!("max |entry| = {:e}", r.max_abs()),
    }
}

/// Central symmetry through degree `n`, decided by odd moments up to `2n + 1`
/// and independently by `B_{k,i} = 0` for `k <= n`.
pub fn is_centrally_symmetric<S: Scalar>(
    u: &MomentFunctional<S>,
    n: usize,
    tol: f64,
) -> Result<bool> {
    let by_moments = u.odd_moments_vanish(2 * n + 1, tol)?;
    let ops = OpSystem::build(u, n, tol)?;
    let mut by_b = true;
    'outer: for k in 0..=n {
        for i in 0..u.dim() {
            if !ops.b(k, i)?.is_zero_within(tol) {
                by_b = false;
                break 'outer;
            }
        }
    }
    if by_moments != by_b {
        return Err(Error::InconsistentSymmetry);
    }
    Ok(by_moments)
}
