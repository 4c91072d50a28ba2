//! Bivariate Bessel–Laguerre polynomials
//! `P_{n,m}(x, y) = B_{n-m}^{(g+2m, -g)}(x) x^m L_m^{(g gamma - 1)}(g y / x)`
//! and their modification by a mass at the origin.
//!
//! The moment functional is determined by the basis up to a constant factor.
//! Orthogonality pins it to
//! `<u, x^h y^k> = g^{h+1} Gamma(g gamma + k) / (g)_{h+k}`,
//! i.e. a Bessel functional in `x` with weight `(g)_{h+k}` coupling and a
//! Laguerre factor in `y`. With this scale `<u, 1> = g Gamma(g gamma)`.

use crate::error::{Error, Result};
use crate::moments::MomentFunctional;
use crate::multiindex::MultiIndex;
use crate::ops::OpSystem;
use crate::poly::{Polynomial, VectorPolynomial};
use crate::scalar::{binomial, pochhammer, Scalar};
use crate::uvarov::{UvarovSpec, UvarovSystem};

use super::univariate::{
    bessel_coeffs, bessel_moment, bessel_norm, laguerre_coeffs, laguerre_norm,
};

#[derive(Debug, Clone, PartialEq)]
pub struct Params<S> {
    pub g: S,
    pub gamma: S,
}

impl<S: Scalar> Params<S> {
    /// Validates `g != 0`, `g gamma > -2`, and `g + k != 0`, `g gamma + k != 0` for `k <= max_degree`.
    pub fn new(g: S, gamma: S, max_degree: usize) -> Result<Self> {
        if g.is_zero() {
            return Err(Error::InadmissibleParameters("g must be nonzero".into()));
        }
        let gg = g.clone() * gamma.clone();
        if gg.to_f64() <= -2.0 {
            return Err(Error::InadmissibleParameters(format!(
                "g*gamma = {gg} must exceed -2"
            )));
        }
        for k in 0..=2 * max_degree {
            let kk = S::from_usize(k);
            if (g.clone() + kk.clone()).is_zero() || (gg.clone() + kk).is_zero() {
                return Err(Error::InadmissibleParameters(format!(
                    "g + {k} or g*gamma + {k} vanishes"
                )));
            }
        }
        Ok(Self { g, gamma })
    }

    pub fn g_gamma(&self) -> S {
        self.g.clone() * self.gamma.clone()
    }

    /// `Gamma(g gamma)`, or an error naming the first moment that needs it.
    pub fn gamma_factor(&self) -> Result<S> {
        self.g_gamma().gamma().ok_or_else(|| {
            Error::IrrationalMoment(format!(
                "<u, {}> (involves Gamma({}))",
                MultiIndex::zero(2),
                self.g_gamma()
            ))
        })
    }

    /// `<u, 1> = g Gamma(g gamma)`.
    pub fn total_mass(&self) -> Result<S> {
        Ok(self.g.clone() * self.gamma_factor()?)
    }
}

/// `<u, x^h y^k>`.
pub fn moment<S: Scalar>(p: &Params<S>, h: usize, k: usize) -> Result<S> {
    let gamma = p.gamma_factor()?;
    Ok(
        p.g.clone().powi(h as u32 + 1) * gamma * pochhammer(&p.g_gamma(), k)
            / pochhammer(&p.g, h + k),
    )
}

/// The moment functional; in the exact backend `g gamma` must be a positive integer.
pub fn functional<S: Scalar>(p: &Params<S>) -> Result<MomentFunctional<S>> {
    p.gamma_factor()?;
    let params = p.clone();
    Ok(MomentFunctional::from_fn(
        2,
        format!("bessel-laguerre(g={}, gamma={})", p.g, p.gamma),
        move |nu| {
            moment(
                &params,
                nu.exponents()[0] as usize,
                nu.exponents()[1] as usize,
            )
        },
    ))
}

/// `P_{n,m}` as a bivariate polynomial.
pub fn basis_element<S: Scalar>(p: &Params<S>, n: usize, m: usize) -> Polynomial<S> {
    assert!(m <= n);
    let a = p.g.clone() + S::from_usize(2 * m);
    let b = -p.g.clone();
    let bessel = Polynomial::from_terms(
        2,
        bessel_coeffs(n - m, &a, &b)
            .into_iter()
            .enumerate()
            .map(|(k, c)| (MultiIndex::new(vec![k as u32, 0]), c)),
    );
    // x^m L_m(g y / x) = sum_k c_k g^k y^k x^{m-k}
    let alpha = p.g_gamma() - S::one();
    let laguerre = Polynomial::from_terms(
        2,
        laguerre_coeffs(m, &alpha)
            .into_iter()
            .enumerate()
            .map(|(k, c)| {
                (
                    MultiIndex::new(vec![(m - k) as u32, k as u32]),
                    c * p.g.clone().powi(k as u32),
                )
            }),
    );
    bessel.mul(&laguerre)
}

/// Rows `P_{n,0}, ..., P_{n,n}`.
pub fn basis<S: Scalar>(p: &Params<S>, n: usize) -> VectorPolynomial<S> {
    let rows: Vec<_> = (0..=n).map(|m| basis_element(p, n, m)).collect();
    VectorPolynomial::from_rows(2, &rows).padded(n)
}

/// The product `h_{n-m}^{(g+2m,-g)} h_m^{(g gamma - 1)}` of the univariate norms.
pub fn product_norm<S: Scalar>(p: &Params<S>, n: usize, m: usize) -> Result<S> {
    let alpha = p.g_gamma() - S::one();
    let lag = laguerre_norm(m, &alpha)
        .ok_or_else(|| Error::IrrationalMoment(format!("Gamma({})", p.g_gamma())))?;
    Ok(bessel_norm(n - m, &(p.g.clone() + S::from_usize(2 * m)), &-p.g.clone()) * lag)
}

/// `<u, P_{n,m}^2>`, which equals `g^{2m} / (g)_{2m}` times [`product_norm`].
pub fn norm<S: Scalar>(p: &Params<S>, n: usize, m: usize) -> Result<S> {
    Ok(p.g.clone().powi(2 * m as u32) / pochhammer(&p.g, 2 * m) * product_norm(p, n, m)?)
}

/// `lambda_k = 1 + lambda (-1)^k binom(g + k - 1, k) / (g Gamma(g gamma))`.
pub fn lambda_k<S: Scalar>(p: &Params<S>, lambda: &S, k: usize) -> Result<S> {
    let sign = if k.is_multiple_of(2) {
        S::one()
    } else {
        -S::one()
    };
    let kernel =
        sign * binomial(&(p.g.clone() + S::from_usize(k) - S::one()), k) / p.total_mass()?;
    Ok(S::one() + lambda.clone() * kernel)
}

/// First `k <= max_k` with `lambda_k = 0`, if any.
pub fn first_degenerate<S: Scalar>(
    p: &Params<S>,
    lambda: &S,
    max_k: usize,
    tol: f64,
) -> Result<Option<usize>> {
    for k in 0..=max_k {
        if lambda_k(p, lambda, k)?.is_negligible(tol) {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

/// Ensures the origin-mass modification is quasi-definite through degree `n`
/// (which needs `lambda_k != 0` for `k < n`).
pub fn check_modification<S: Scalar>(p: &Params<S>, lambda: &S, n: usize, tol: f64) -> Result<()> {
    if n == 0 {
        return Ok(());
    }
    match first_degenerate(p, lambda, n - 1, tol)? {
        Some(k) => Err(Error::NotQuasiDefinite { degree: k }),
        None => Ok(()),
    }
}

/// `Q_{n,0} = P_{n,0} - (lambda / lambda_{n-1}) K_{n-1}((0,0), .)` computed from the generic engine.
pub fn modified_radial<S: Scalar>(
    sys: &UvarovSystem<S>,
    p: &Params<S>,
    n: usize,
) -> Result<Polynomial<S>> {
    let base = basis_element(p, n, 0);
    if n == 0 {
        return Ok(base);
    }
    let kk = sys.kernel_matrix(n - 1)[(0, 0)].clone();
    let lambda = sys.spec().masses()[0].clone();
    let lam = S::one() + lambda.clone() * kk;
    if lam.is_negligible(sys.base().tolerance()) {
        return Err(Error::NotQuasiDefinite { degree: n - 1 });
    }
    let kvec = sys.kernel_vector(n - 1).row(0);
    Ok(base.sub(&kvec.scale(&(lambda / lam))))
}

/// The same polynomial through the univariate route: orthogonal polynomials of
/// `b^{(g,-g)} + (lambda / Gamma(g gamma)) delta_0`, scaled to the leading
/// coefficient of `B_n^{(g,-g)}` and embedded as a polynomial in `x`.
pub fn univariate_modified<S: Scalar>(
    p: &Params<S>,
    lambda: &S,
    n: usize,
    tol: f64,
) -> Result<Polynomial<S>> {
    let g = p.g.clone();
    let gg = g.clone();
    let bessel =
        super::univariate::functional_from("bessel", move |k| bessel_moment(k, &gg, &-gg.clone()));
    let tilde = lambda.clone() / p.gamma_factor()?;
    let modified = bessel.add_point_masses(&[vec![S::zero()]], &[tilde])?;
    let ops = OpSystem::build(&modified, n, tol)?;
    let lead = bessel_coeffs(n, &g, &-g.clone())[n].clone();
    let x = Polynomial::variable(2, 0);
    Ok(ops.poly(n).row(0).scale(&lead).compose(&[x]))
}

/// Generic Uvarov system for `u + lambda delta_(0,0)`.
pub fn uvarov_system<S: Scalar>(
    p: &Params<S>,
    lambda: &S,
    max_degree: usize,
    tol: f64,
) -> Result<UvarovSystem<S>> {
    let u = functional(p)?;
    let ops = OpSystem::build(&u, max_degree, tol)?;
    let spec = UvarovSpec::new(2, vec![vec![S::zero(), S::zero()]], vec![lambda.clone()])?;
    Ok(UvarovSystem::new(ops, spec))
}

/// `x^2 w_xx + 2xy w_xy + (y^2 - y) w_yy + g(x - 1) w_x + g(y - gamma) w_y - n(n + g - 1) w`.
pub fn pde_residual<S: Scalar>(p: &Params<S>, n: usize, w: &Polynomial<S>) -> Polynomial<S> {
    let x = Polynomial::variable(2, 0);
    let y = Polynomial::variable(2, 1);
    let one = Polynomial::constant(2, S::one());
    let g = &p.g;
    let wx = w.derivative(0);
    let wy = w.derivative(1);
    let terms = [
        x.mul(&x).mul(&wx.derivative(0)),
        x.mul(&y).mul(&wx.derivative(1)).scale(&S::from_i64(2)),
        y.mul(&y).sub(&y).mul(&wy.derivative(1)),
        x.sub(&one).mul(&wx).scale(g),
        y.sub(&one.scale(&p.gamma)).mul(&wy).scale(g),
    ];
    let eig = S::from_usize(n) * (S::from_usize(n) + g.clone() - S::one());
    terms.iter().fold(w.scale(&-eig), |acc, t| acc.add(t))
}
