//! The classical ball functional `u_mu` with weight `(1 - |x|^2)^{mu - 1/2}`,
//! normalized so that `<u_mu, 1> = 1`, together with closed forms for its
//! kernel at the origin and for the origin point-mass modification.

use crate::error::{Error, Result};
use crate::moments::MomentFunctional;
use crate::multiindex::{rank_size, MultiIndex};
use crate::poly::Polynomial;
use crate::scalar::{binomial, pochhammer, Scalar};

use super::univariate::{jacobi_coeffs, jacobi_eval, jacobi_log_abs_sequence, to_polynomial};

pub fn check_parameter<S: Scalar>(mu: &S) -> Result<()> {
    if mu.to_f64() <= -0.5 {
        return Err(Error::InadmissibleParameters(format!(
            "ball parameter mu = {mu} must exceed -1/2"
        )));
    }
    Ok(())
}

/// `<u_mu, x^nu>`: zero unless every exponent is even, and
/// `prod_i (1/2)_{b_i} / (mu + (d+1)/2)_{|b|}` for `nu = 2b`.
pub fn moment<S: Scalar>(d: usize, mu: &S, nu: &MultiIndex) -> S {
    if nu.exponents().iter().any(|e| e % 2 == 1) {
        return S::zero();
    }
    let half = S::from_ratio(1, 2);
    let mut num = S::one();
    let mut total = 0;
    for &e in nu.exponents() {
        let b = (e / 2) as usize;
        num *= pochhammer(&half, b);
        total += b;
    }
    num / pochhammer(&(mu.clone() + S::from_ratio(d as i64 + 1, 2)), total)
}

/// The ball functional; declared centrally symmetric.
pub fn functional<S: Scalar>(d: usize, mu: &S) -> MomentFunctional<S> {
    let m = mu.clone();
    MomentFunctional::from_fn(d, format!("ball(d={d}, mu={mu})"), move |nu| {
        Ok(moment(d, &m, nu))
    })
    .with_symmetry(true)
}

/// `(mu + (d+1)/2)_m / (mu + 1/2)_m`.
pub fn kernel_ratio<S: Scalar>(d: usize, mu: &S, m: usize) -> S {
    let top = mu.clone() + S::from_ratio(d as i64 + 1, 2);
    let bottom = mu.clone() + S::from_ratio(1, 2);
    (0..m).fold(S::one(), |acc, i| {
        acc * (top.clone() + S::from_usize(i)) / (bottom.clone() + S::from_usize(i))
    })
}

/// `K_n(u_mu; 0, 0) = ratio * binom(floor(n/2) + d/2, floor(n/2))`.
pub fn kernel_at_origin<S: Scalar>(d: usize, mu: &S, n: usize) -> S {
    let m = n / 2;
    kernel_ratio(d, mu, m) * binomial(&(S::from_ratio(d as i64, 2) + S::from_usize(m)), m)
}

/// `K_n(u_mu; x, 0) = ratio * P_m^{(d/2, mu - 1/2)}(1 - 2|x|^2)`, `m = floor(n/2)`.
pub fn kernel_to_origin<S: Scalar>(d: usize, mu: &S, n: usize, x: &[S]) -> S {
    let m = n / 2;
    let t = S::one() - S::from_i64(2) * norm_sq(x);
    kernel_ratio(d, mu, m)
        * jacobi_eval(
            m,
            &S::from_ratio(d as i64, 2),
            &(mu.clone() - S::from_ratio(1, 2)),
            &t,
        )
}

/// The same kernel as a polynomial in `x`.
pub fn kernel_to_origin_polynomial<S: Scalar>(d: usize, mu: &S, n: usize) -> Polynomial<S> {
    let m = n / 2;
    radial_jacobi(
        d,
        m,
        &S::from_ratio(d as i64, 2),
        &(mu.clone() - S::from_ratio(1, 2)),
    )
    .scale(&kernel_ratio(d, mu, m))
}

/// `P_m^{(alpha,beta)}(1 - 2|x|^2)` as a polynomial in `d` variables.
pub fn radial_jacobi<S: Scalar>(d: usize, m: usize, alpha: &S, beta: &S) -> Polynomial<S> {
    let mut t = Polynomial::constant(d, S::one());
    for i in 0..d {
        let xi = Polynomial::variable(d, i);
        t = t.sub(&xi.mul(&xi).scale(&S::from_i64(2)));
    }
    to_polynomial(&jacobi_coeffs(m, alpha, beta)).compose(&[t])
}

pub fn norm_sq<S: Scalar>(x: &[S]) -> S {
    x.iter()
        .fold(S::zero(), |acc, c| acc + c.clone() * c.clone())
}

/// `[h_{j,n}(mu)]^2` from the explicit Jacobi/harmonic orthonormal basis.
pub fn h_squared<S: Scalar>(d: usize, mu: &S, j: usize, n: usize) -> S {
    let half_d1 = S::from_ratio(d as i64 - 1, 2);
    let top = S::from_ratio(d as i64, 2);
    let bottom = mu.clone() + S::from_ratio(d as i64 + 1, 2);
    let harmonic_part = (0..n - j).fold(S::one(), |acc, i| {
        acc * (top.clone() + S::from_usize(i)) / (bottom.clone() + S::from_usize(i))
    });
    let shifted = mu.clone() + S::from_ratio(1, 2);
    let jacobi_part = (0..j).fold(S::one(), |acc, i| {
        acc * (shifted.clone() + S::from_usize(i)) / S::from_usize(i + 1)
    });
    jacobi_part * harmonic_part * (S::from_usize(n - j) + mu.clone() + half_d1.clone())
        / (S::from_usize(n) + mu.clone() + half_d1)
}

/// Dimension of the space of harmonic polynomials of degree `m` in `d` variables.
pub fn harmonic_dim(m: usize, d: usize) -> usize {
    match m {
        0 => 1,
        1 => d,
        _ => rank_size(m, d) - rank_size(m - 2, d),
    }
}

/// `1 + lambda K_n(u_mu; 0, 0)`; a zero value means the modified functional degenerates.
pub fn mass_denominator<S: Scalar>(d: usize, mu: &S, lambda: &S, n: usize) -> S {
    S::one() + lambda.clone() * kernel_at_origin(d, mu, n)
}

/// `b_n` in the rank-one kernel correction for a mass `lambda` at the origin.
pub fn correction_coefficient<S: Scalar>(d: usize, mu: &S, lambda: &S, n: usize) -> Result<S> {
    let den = mass_denominator(d, mu, lambda, n);
    if den.is_zero() {
        return Err(Error::MassDegenerate { degree: n });
    }
    let r = kernel_ratio(d, mu, n / 2);
    Ok(lambda.clone() / den * r.clone() * r)
}

/// `K_n(v; x, y)` from `K_n(u_mu; x, y)` for `v = u_mu + lambda delta_0`.
pub fn modified_kernel<S: Scalar>(
    d: usize,
    mu: &S,
    lambda: &S,
    n: usize,
    base: S,
    x: &[S],
    y: &[S],
) -> Result<S> {
    let m = n / 2;
    let alpha = S::from_ratio(d as i64, 2);
    let beta = mu.clone() - S::from_ratio(1, 2);
    let px = jacobi_eval(m, &alpha, &beta, &(S::one() - S::from_i64(2) * norm_sq(x)));
    let py = jacobi_eval(m, &alpha, &beta, &(S::one() - S::from_i64(2) * norm_sq(y)));
    Ok(base - correction_coefficient(d, mu, lambda, n)? * px * py)
}

/// `K_n(v; 0, 0) = K / (1 + lambda K)` with `K = K_n(u_mu; 0, 0)`.
pub fn modified_kernel_at_origin<S: Scalar>(d: usize, mu: &S, lambda: &S, n: usize) -> Result<S> {
    let k = kernel_at_origin(d, mu, n);
    let den = S::one() + lambda.clone() * k.clone();
    if den.is_zero() {
        return Err(Error::MassDegenerate { degree: n });
    }
    Ok(k / den)
}

/// `K_n(u_mu; x, x)` for `|x| = r`, summed over the explicit orthonormal basis.
pub fn diagonal_kernel(d: usize, mu: f64, n: usize, r: f64) -> f64 {
    let alpha = mu - 0.5;
    let t = 2.0 * r * r - 1.0;
    let half_d = d as f64 / 2.0;
    let half_d1 = (d as f64 - 1.0) / 2.0;
    let mut total = 0.0;
    for m in 0..=n {
        let beta = m as f64 + (d as f64 - 2.0) / 2.0;
        let jmax = (n - m) / 2;
        let logs = jacobi_log_abs_sequence(jmax, alpha, beta, t);
        let log_harmonic =
            (harmonic_dim(m, d) as f64).ln() + if m == 0 { 0.0 } else { 2.0 * m as f64 * r.ln() };
        // h_{j, m+2j}^2 without the last factor, updated in j
        let mut prefix = h_squared(d, &mu, 0, m);
        for (j, log_p) in logs.iter().enumerate() {
            if j > 0 {
                let i = (m + j - 1) as f64;
                prefix *=
                    (half_d + i) / (mu + half_d + 0.5 + i) * (mu + 0.5 + (j - 1) as f64) / j as f64;
            }
            let deg = (m + 2 * j) as f64;
            let h2 = prefix * ((m + j) as f64 + mu + half_d1) / (deg + mu + half_d1);
            total += (2.0 * log_p + log_harmonic - h2.ln()).exp();
        }
    }
    total
}

/// Limit of `K_n(v; x, x) / binom(n + d, d)` for `0 < |x| = r < 1`.
pub fn interior_limit(d: usize, mu: f64, r: f64) -> f64 {
    use statrs::function::gamma::gamma;
    let df = d as f64;
    gamma(mu + 0.5) * gamma((df + 1.0) / 2.0)
        / (gamma(mu + (df + 1.0) / 2.0) * std::f64::consts::PI.sqrt())
        * (1.0 - r * r).powf(-mu)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OriginRow {
    pub n: usize,
    pub value: f64,
    pub limit: f64,
    pub rel_err: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InteriorRow {
    pub n: usize,
    pub ratio: f64,
    pub limit: f64,
    pub rel_err: f64,
}

/// `K_n(v; 0, 0)` against its limit `1/lambda`.
pub fn origin_table(d: usize, mu: f64, lambda: f64, degrees: &[usize]) -> Result<Vec<OriginRow>> {
    check_parameter(&mu)?;
    if lambda <= 0.0 {
        return Err(Error::InadmissibleParameters(format!(
            "mass {lambda} must be positive"
        )));
    }
    degrees
        .iter()
        .map(|&n| {
            let value = modified_kernel_at_origin(d, &mu, &lambda, n)?;
            let limit = 1.0 / lambda;
            Ok(OriginRow {
                n,
                value,
                limit,
                rel_err: (value - limit).abs() / limit,
            })
        })
        .collect()
}

/// `K_n(v; x, x) / binom(n + d, d)` at `|x| = r` against its interior limit.
pub fn interior_table(
    d: usize,
    mu: f64,
    lambda: f64,
    r: f64,
    degrees: &[usize],
) -> Result<Vec<InteriorRow>> {
    check_parameter(&mu)?;
    if !(0.0 < r && r < 1.0) {
        return Err(Error::InadmissibleParameters(format!(
            "radius {r} must lie in (0, 1)"
        )));
    }
    let limit = interior_limit(d, mu, r);
    let mut x = vec![0.0; d];
    x[0] = r;
    degrees
        .iter()
        .map(|&n| {
            let kv = modified_kernel(d, &mu, &lambda, n, diagonal_kernel(d, mu, n, r), &x, &x)?;
            let ratio = kv / binomial(&((n + d) as f64), d);
            Ok(InteriorRow {
                n,
                ratio,
                limit,
                rel_err: (ratio - limit).abs() / limit,
            })
        })
        .collect()
}
