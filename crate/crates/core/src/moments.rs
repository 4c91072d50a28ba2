//! Moment functionals, moment blocks and quasi-definiteness.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use crate::error::{Error, Result};
use crate::matrix::{regularity, Matrix};
use crate::multiindex::{all_up_to, cumulative_size, enumerate, MultiIndex};
use crate::poly::{Polynomial, VectorPolynomial};
use crate::scalar::Scalar;

type Oracle<S> = dyn Fn(&MultiIndex) -> Result<S> + Send + Sync;

struct Inner<S> {
    dim: usize,
    label: Option<String>,
    symmetric: bool,
    oracle: Box<Oracle<S>>,
    cache: RwLock<HashMap<MultiIndex, S>>,
}

/// A linear functional on polynomials, known through its moments `<u, x^nu>`.
///
/// Cloning is cheap and clones share the moment cache. Each moment is
/// computed at most once, even under concurrent access.
pub struct MomentFunctional<S> {
    inner: Arc<Inner<S>>,
}

impl<S> Clone for MomentFunctional<S> {
    fn clone(&self) -> Self {
        Self {
            inner: Arc::clone(&self.inner),
        }
    }
}

impl<S: Scalar> fmt::Debug for MomentFunctional<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MomentFunctional")
            .field("dim", &self.inner.dim)
            .field("label", &self.inner.label)
            .field("symmetric", &self.inner.symmetric)
            .finish()
    }
}

/// Per-degree verdict on `det M_k != 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeVerdict<S> {
    pub degree: usize,
    pub determinant: S,
    pub min_singular_value: Option<f64>,
    pub nonsingular: bool,
}

impl<S: Scalar> MomentFunctional<S> {
    pub fn from_fn<F>(dim: usize, label: impl Into<String>, oracle: F) -> Self
    where
        F: Fn(&MultiIndex) -> Result<S> + Send + Sync + 'static,
    {
        assert!(dim >= 1, "dimension must be at least 1");
        Self {
            inner: Arc::new(Inner {
                dim,
                label: Some(label.into()),
                symmetric: false,
                oracle: Box::new(oracle),
                cache: RwLock::new(HashMap::new()),
            }),
        }
    }

    /// Functional given by an explicit finite table; other moments are missing.
    pub fn table(dim: usize, moments: HashMap<MultiIndex, S>) -> Self {
        Self::from_fn(dim, "table", move |nu| {
            moments
                .get(nu)
                .cloned()
                .ok_or_else(|| Error::MissingMoment(nu.to_string()))
        })
    }

    /// Declares the functional centrally symmetric. Odd moments are then
    /// answered as zero without consulting the oracle.
    pub fn with_symmetry(self, symmetric: bool) -> Self {
        let inner = Arc::try_unwrap(self.inner).unwrap_or_else(|_| {
            panic!("symmetry must be declared before the functional is shared")
        });
        Self {
            inner: Arc::new(Inner { symmetric, ..inner }),
        }
    }

    pub fn dim(&self) -> usize {
        self.inner.dim
    }

    pub fn label(&self) -> Option<&str> {
        self.inner.label.as_deref()
    }

    pub fn declared_symmetric(&self) -> bool {
        self.inner.symmetric
    }

    pub fn moment(&self, nu: &MultiIndex) -> Result<S> {
        assert_eq!(nu.dim(), self.dim(), "multi-index dimension mismatch");
        if self.inner.symmetric && nu.is_odd() {
            return Ok(S::zero());
        }
        if let Some(v) = self
            .inner
            .cache
            .read()
            .expect("moment cache poisoned")
            .get(nu)
        {
            return Ok(v.clone());
        }
        let mut cache = self.inner.cache.write().expect("moment cache poisoned");
        if let Some(v) = cache.get(nu) {
            return Ok(v.clone());
        }
        let v = (self.inner.oracle)(nu)?;
        cache.insert(nu.clone(), v.clone());
        Ok(v)
    }

    /// Number of moments currently cached.
    pub fn cached_len(&self) -> usize {
        self.inner
            .cache
            .read()
            .expect("moment cache poisoned")
            .len()
    }

    /// `m_{h,k} = <u, X_h X_k^t>`.
    pub fn moment_block(&self, h: usize, k: usize) -> Result<Matrix<S>> {
        let d = self.dim();
        self.moment_grid(&enumerate(h, d).indices, &enumerate(k, d).indices)
    }

    /// Block matrix `M_n` of order `dim Pi_n`.
    pub fn moment_matrix(&self, n: usize) -> Result<Matrix<S>> {
        let all = all_up_to(n, self.dim());
        self.moment_grid(&all, &all)
    }

    /// Matrix of moments `mu_{a+b}` over arbitrary row and column index lists.
    pub fn moment_grid(&self, rows: &[MultiIndex], cols: &[MultiIndex]) -> Result<Matrix<S>> {
        let mut m = Matrix::zeros(rows.len(), cols.len());
        for (r, a) in rows.iter().enumerate() {
            for (c, b) in cols.iter().enumerate() {
                m[(r, c)] = self.moment(&a.add(b))?;
            }
        }
        Ok(m)
    }

    /// `<u, p>`.
    pub fn apply(&self, p: &Polynomial<S>) -> Result<S> {
        assert_eq!(p.dim(), self.dim(), "polynomial dimension mismatch");
        let mut acc = S::zero();
        for (nu, c) in all_up_to(p.bound(), self.dim()).iter().zip(p.coeffs()) {
            if !c.is_zero() {
                acc += c.clone() * self.moment(nu)?;
            }
        }
        Ok(acc)
    }

    /// Matrix pairing `<u, P Q^t>` of two vector polynomials.
    pub fn pair(&self, p: &VectorPolynomial<S>, q: &VectorPolynomial<S>) -> Result<Matrix<S>> {
        let d = self.dim();
        if p.is_empty() || q.is_empty() {
            return Ok(Matrix::zeros(p.len(), q.len()));
        }
        let grid = self.moment_grid(&all_up_to(p.bound(), d), &all_up_to(q.bound(), d))?;
        Ok(p.coeffs().matmul(&grid).matmul(&q.coeffs().transpose()))
    }

    /// Per-degree verdicts on the leading moment matrices `M_0, ..., M_n`.
    pub fn quasi_definite_verdicts(&self, n: usize) -> Result<Vec<DegreeVerdict<S>>> {
        let full = self.moment_matrix(n)?;
        Ok((0..=n)
            .map(|k| {
                let size = cumulative_size(k, self.dim());
                let reg = regularity(&full.block(0, 0, size, size));
                DegreeVerdict {
                    degree: k,
                    determinant: reg.determinant,
                    min_singular_value: reg.min_singular_value,
                    nonsingular: reg.nonsingular,
                }
            })
            .collect())
    }

    pub fn is_quasi_definite(&self, n: usize) -> Result<bool> {
        Ok(self
            .quasi_definite_verdicts(n)?
            .iter()
            .all(|v| v.nonsingular))
    }

    /// True when every moment of odd total degree up to `max_degree` vanishes.
    pub fn odd_moments_vanish(&self, max_degree: usize, tol: f64) -> Result<bool> {
        for nu in all_up_to(max_degree, self.dim()) {
            if nu.is_odd() && !self.moment(&nu)?.is_negligible(tol) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `q u`, defined by `<q u, p> = <u, q p>`.
    pub fn left_multiply(&self, q: &Polynomial<S>) -> Self {
        assert_eq!(q.dim(), self.dim(), "polynomial dimension mismatch");
        let base = self.clone();
        let terms: Vec<(MultiIndex, S)> = q.terms().into_iter().collect();
        let label = format!("({}) * {}", describe(q), self.label().unwrap_or("u"));
        Self::from_fn(self.dim(), label, move |nu| {
            let mut acc = S::zero();
            for (kappa, c) in &terms {
                acc += c.clone() * base.moment(&nu.add(kappa))?;
            }
            Ok(acc)
        })
    }

    /// `u + sum_i lambda_i delta_{xi_i}`.
    pub fn add_point_masses(&self, points: &[Vec<S>], masses: &[S]) -> Result<Self> {
        validate_masses(self.dim(), points, masses)?;
        let base = self.clone();
        let points = points.to_vec();
        let masses = masses.to_vec();
        let label = format!(
            "{} + {} point mass(es)",
            self.label().unwrap_or("u"),
            masses.len()
        );
        Ok(Self::from_fn(self.dim(), label, move |nu| {
            let mut acc = base.moment(nu)?;
            for (xi, lambda) in points.iter().zip(&masses) {
                acc += lambda.clone() * nu.eval(xi);
            }
            Ok(acc)
        }))
    }

    /// Converts every moment into another backend.
    pub fn map_backend<T: Scalar>(
        &self,
        f: impl Fn(&S) -> T + Send + Sync + 'static,
    ) -> MomentFunctional<T> {
        let base = self.clone();
        let label = self.label().unwrap_or("u").to_string();
        let out =
            MomentFunctional::from_fn(self.dim(), label, move |nu| base.moment(nu).map(|v| f(&v)));
        out.with_symmetry(self.declared_symmetric())
    }
}

/// Checks the admissibility of a point-mass specification.
pub fn validate_masses<S: Scalar>(dim: usize, points: &[Vec<S>], masses: &[S]) -> Result<()> {
    if points.len() != masses.len() {
        return Err(Error::LengthMismatch {
            points: points.len(),
            masses: masses.len(),
        });
    }
    for (i, p) in points.iter().enumerate() {
        if p.len() != dim {
            return Err(Error::Invalid(format!(
                "mass point {} has {} coordinates, expected {dim}",
                i,
                p.len()
            )));
        }
        if points[..i].contains(p) {
            return Err(Error::DuplicatePoint(format_point(p)));
        }
    }
    if let Some(index) = masses.iter().position(|m| m.is_zero()) {
        return Err(Error::ZeroMass { index });
    }
    Ok(())
}

pub(crate) fn format_point<S: Scalar>(p: &[S]) -> String {
    let parts: Vec<String> = p.iter().map(|c| c.to_string()).collect();
    format!("({})", parts.join(", "))
}

fn describe<S: Scalar>(q: &Polynomial<S>) -> String {
    let parts: Vec<String> = q
        .terms()
        .into_iter()
        .map(|(nu, c)| format!("{c}*{nu}"))
        .collect();
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
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

    /// Normalized area measure on the unit disk, via the closed form for
    /// `(1/pi) int r^{a+b+1} cos^a sin^b` computed by Wallis products.
    fn disk(nu: &MultiIndex) -> Rational {
        let (a, b) = (nu.exponents()[0] as i64, nu.exponents()[1] as i64);
        if a % 2 == 1 || b % 2 == 1 {
            return q(0, 1);
        }
        // (1/pi) * 1/(a+b+2) * int_0^{2pi} cos^a sin^b
        // int_0^{2pi} cos^a sin^b = 2pi (a-1)!!(b-1)!!/(a+b)!!
        let dfact = |n: i64| (1..=n).rev().step_by(2).product::<i64>();
        q(2, a + b + 2) * q(dfact(a - 1) * dfact(b - 1), dfact(a + b))
    }

    fn disk_functional() -> MomentFunctional<Rational> {
        MomentFunctional::from_fn(2, "disk", |nu| Ok(disk(nu))).with_symmetry(true)
    }

    fn random_functional(seed: u64) -> MomentFunctional<Rational> {
        MomentFunctional::from_fn(2, "hash", move |nu| {
            let e = nu.exponents();
            let h = (seed + 7 * e[0] as u64 + 13 * e[1] as u64 + (e[0] * e[1]) as u64) % 11;
            Ok(q(h as i64 - 5, 1 + (e[0] + e[1]) as i64 % 3))
        })
    }

    #[test]
    fn blocks_and_matrix() {
        let delta = MomentFunctional::from_fn(2, "delta", |nu: &MultiIndex| {
            Ok(if nu.degree() == 0 { q(1, 1) } else { q(0, 1) })
        });
        assert_eq!(delta.moment_block(0, 0).unwrap(), Matrix::identity(1));
        let m1 = delta.moment_matrix(1).unwrap();
        assert_eq!(m1.shape(), (3, 3));
        assert_eq!(m1[(0, 0)], q(1, 1));
        assert!(m1.entries().skip(1).all(|v| v == &q(0, 1)));

        let u = disk_functional();
        assert_eq!(
            u.moment_block(1, 1).unwrap(),
            Matrix::diagonal(&[q(1, 4), q(1, 4)])
        );
        assert_eq!(
            u.moment_matrix(1).unwrap(),
            Matrix::diagonal(&[q(1, 1), q(1, 4), q(1, 4)])
        );
        assert_eq!(u.moment_matrix(2).unwrap().shape(), (6, 6));
        assert_eq!(u.moment(&mi(&[2, 2])).unwrap(), q(1, 24));
    }

    #[test]
    fn quasi_definiteness() {
        let u = disk_functional();
        assert!(u
            .quasi_definite_verdicts(4)
            .unwrap()
            .iter()
            .all(|v| v.nonsingular));
        let zero_mass = MomentFunctional::from_fn(2, "z", |nu: &MultiIndex| {
            Ok(if nu.degree() == 0 { q(0, 1) } else { disk(nu) })
        });
        let v = zero_mass.quasi_definite_verdicts(1).unwrap();
        assert!(!v[0].nonsingular);
    }

    #[test]
    fn apply_left_multiply_and_masses() {
        let u = disk_functional();
        let r2 = Polynomial::from_terms(2, [(mi(&[2, 0]), q(1, 1)), (mi(&[0, 2]), q(1, 1))]);
        assert_eq!(u.apply(&r2).unwrap(), q(1, 2));
        assert_eq!(
            u.apply(&Polynomial::monomial(&mi(&[1, 2]), q(1, 1)))
                .unwrap(),
            q(0, 1)
        );
        assert_eq!(u.apply(&Polynomial::constant(2, q(1, 1))).unwrap(), q(1, 1));

        let lam = Polynomial::constant(2, q(1, 1)).sub(&r2);
        assert_eq!(
            u.left_multiply(&lam).moment(&MultiIndex::zero(2)).unwrap(),
            q(1, 2)
        );
        let x1 = u.left_multiply(&Polynomial::variable(2, 0));
        assert_eq!(x1.moment(&mi(&[2, 0])).unwrap(), q(0, 1));
        assert_eq!(x1.moment(&mi(&[1, 1])).unwrap(), q(0, 1));

        let v = u
            .add_point_masses(&[vec![q(1, 1), q(0, 1)]], &[q(1, 1)])
            .unwrap();
        assert_eq!(v.moment(&mi(&[2, 0])).unwrap(), q(5, 4));
        let origin = u
            .add_point_masses(&[vec![q(0, 1), q(0, 1)]], &[q(3, 1)])
            .unwrap();
        assert_eq!(origin.moment(&MultiIndex::zero(2)).unwrap(), q(4, 1));
        assert_eq!(origin.moment(&mi(&[2, 0])).unwrap(), q(1, 4));
        let sym = u
            .add_point_masses(
                &[vec![q(1, 2), q(0, 1)], vec![q(-1, 2), q(0, 1)]],
                &[q(2, 1), q(2, 1)],
            )
            .unwrap();
        assert!(sym.odd_moments_vanish(7, 0.0).unwrap());
        assert!(!v.odd_moments_vanish(3, 0.0).unwrap());
    }

    #[test]
    fn mass_validation() {
        let u = disk_functional();
        let p = vec![q(0, 1), q(0, 1)];
        assert!(matches!(
            u.add_point_masses(&[p.clone(), p.clone()], &[q(1, 1), q(1, 1)]),
            Err(Error::DuplicatePoint(_))
        ));
        assert!(matches!(
            u.add_point_masses(std::slice::from_ref(&p), &[q(0, 1)]),
            Err(Error::ZeroMass { index: 0 })
        ));
        assert!(matches!(
            u.add_point_masses(&[p], &[q(1, 1), q(2, 1)]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn table_reports_missing_moments() {
        let mut t = HashMap::new();
        t.insert(MultiIndex::zero(2), q(1, 1));
        let u = MomentFunctional::table(2, t);
        assert_eq!(u.moment(&MultiIndex::zero(2)).unwrap(), q(1, 1));
        assert!(matches!(
            u.moment(&mi(&[1, 0])),
            Err(Error::MissingMoment(_))
        ));
    }

    #[test]
    fn cache_computes_each_moment_once_across_threads() {
        use std::sync::atomic::{AtomicUsize, Ordering};
        let calls = Arc::new(AtomicUsize::new(0));
        let c = Arc::clone(&calls);
        let u = MomentFunctional::from_fn(2, "counted", move |nu: &MultiIndex| {
            c.fetch_add(1, Ordering::SeqCst);
            Ok(q(nu.degree() as i64, 1))
        });
        std::thread::scope(|s| {
            for _ in 0..8 {
                let u = u.clone();
                s.spawn(move || {
                    for nu in all_up_to(4, 2) {
                        u.moment(&nu).unwrap();
                    }
                });
            }
        });
        assert_eq!(calls.load(Ordering::SeqCst), cumulative_size(4, 2));
    }

    #[test]
    fn pairing_matches_apply() {
        let u = random_functional(3);
        let p = VectorPolynomial::<Rational>::monomials(2, 2);
        let x1 = VectorPolynomial::<Rational>::monomials(2, 1);
        assert_eq!(u.pair(&p, &x1).unwrap(), u.moment_block(2, 1).unwrap());
        for h in 0..4 {
            for k in 0..4 {
                assert_eq!(
                    u.moment_block(h, k).unwrap(),
                    u.moment_block(k, h).unwrap().transpose()
                );
            }
        }
    }

    fn small_poly() -> impl Strategy<Value = Polynomial<Rational>> {
        proptest::collection::vec((-4i64..=4, 1i64..=3), 6).prop_map(|c| {
            Polynomial::from_coeffs(2, 2, c.into_iter().map(|(n, d)| q(n, d)).collect())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn apply_is_linear(p in small_poly(), r in small_poly(), a in -3i64..=3, b in -3i64..=3, seed in 0u64..50) {
            let u = random_functional(seed);
            let lhs = u.apply(&p.scale(&q(a, 1)).add(&r.scale(&q(b, 1)))).unwrap();
            let rhs = q(a, 1) * u.apply(&p).unwrap() + q(b, 1) * u.apply(&r).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn left_multiply_composes(p in small_poly(), r in small_poly(), seed in 0u64..50) {
            let u = random_functional(seed);
            let two_step = u.left_multiply(&p).left_multiply(&r);
            let one_step = u.left_multiply(&p.mul(&r));
            for nu in all_up_to(6, 2) {
                prop_assert_eq!(two_step.moment(&nu).unwrap(), one_step.moment(&nu).unwrap());
            }
        }

        #[test]
        fn point_masses_add_evaluations(p in small_poly(), x in -3i64..=3, y in -3i64..=3, l in 1i64..=5, seed in 0u64..50) {
            let u = random_functional(seed);
            let xi = vec![q(x, 2), q(y, 3)];
            let v = u.add_point_masses(std::slice::from_ref(&xi), &[q(l, 2)]).unwrap();
            prop_assert_eq!(v.apply(&p).unwrap(), u.apply(&p).unwrap() + q(l, 2) * p.eval(&xi));
        }
    }
}
