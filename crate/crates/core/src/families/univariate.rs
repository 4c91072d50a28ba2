//! Classical univariate families: Jacobi, Laguerre and Bessel polynomials,
//! their norms, and the corresponding one-variable moment functionals.

use crate::error::{Error, Result};
use crate::moments::MomentFunctional;
use crate::multiindex::MultiIndex;
use crate::poly::{univariate, Polynomial};
use crate::scalar::{binomial, factorial, pochhammer, Scalar};

/// Coefficients (ascending powers of `t`) of the Jacobi polynomial `P_n^{(alpha,beta)}`.
pub fn jacobi_coeffs<S: Scalar>(n: usize, alpha: &S, beta: &S) -> Vec<S> {
    let one = S::one();
    let two = S::from_i64(2);
    let mut prev = vec![one.clone()];
    if n == 0 {
        return prev;
    }
    // P_1 = (alpha - beta)/2 + (alpha + beta + 2)/2 t
    let mut cur = vec![
        (alpha.clone() - beta.clone()) / two.clone(),
        (alpha.clone() + beta.clone() + two.clone()) / two.clone(),
    ];
    for k in 2..=n {
        let (a_k, slope, shift, c_k) = jacobi_recurrence(k, alpha, beta);
        let mut next = vec![S::zero(); k + 1];
        for (p, c) in cur.iter().enumerate() {
            next[p + 1] += slope.clone() * c.clone();
            next[p] += shift.clone() * c.clone();
        }
        for (p, c) in prev.iter().enumerate() {
            next[p] -= c_k.clone() * c.clone();
        }
        for c in next.iter_mut() {
            *c = c.clone() / a_k.clone();
        }
        prev = cur;
        cur = next;
    }
    cur
}

/// `P_n^{(alpha,beta)}(t)` by the three-term recurrence.
pub fn jacobi_eval<S: Scalar>(n: usize, alpha: &S, beta: &S, t: &S) -> S {
    jacobi_sequence(n, alpha, beta, t).pop().expect("non-empty")
}

/// `[P_0(t), ..., P_n(t)]` for fixed parameters.
pub fn jacobi_sequence<S: Scalar>(n: usize, alpha: &S, beta: &S, t: &S) -> Vec<S> {
    let two = S::from_i64(2);
    let mut out = vec![S::one()];
    if n == 0 {
        return out;
    }
    out.push(
        (alpha.clone() - beta.clone()) / two.clone()
            + (alpha.clone() + beta.clone() + two.clone()) / two * t.clone(),
    );
    for k in 2..=n {
        let (a_k, slope, shift, c_k) = jacobi_recurrence(k, alpha, beta);
        let next =
            ((slope * t.clone() + shift) * out[k - 1].clone() - c_k * out[k - 2].clone()) / a_k;
        out.push(next);
    }
    out
}

/// `ln |P_k^{(alpha,beta)}(t)|` for `k = 0..=n`, renormalizing the recurrence
/// so that large degrees neither overflow nor underflow.
pub fn jacobi_log_abs_sequence(n: usize, alpha: f64, beta: f64, t: f64) -> Vec<f64> {
    let mut logs = vec![0.0];
    if n == 0 {
        return logs;
    }
    let mut prev = 1.0f64;
    let mut cur = (alpha - beta) / 2.0 + (alpha + beta + 2.0) / 2.0 * t;
    let mut scale = 0.0;
    logs.push(cur.abs().ln());
    for k in 2..=n {
        let (a_k, slope, shift, c_k) = jacobi_recurrence(k, &alpha, &beta);
        let next = ((slope * t + shift) * cur - c_k * prev) / a_k;
        prev = cur;
        cur = next;
        let mag = cur.abs().max(prev.abs());
        if mag > 1e100 || (mag > 0.0 && mag < 1e-100) {
            prev /= mag;
            cur /= mag;
            scale += mag.ln();
        }
        logs.push(cur.abs().ln() + scale);
    }
    logs
}

/// `a_k P_k = (slope t + shift) P_{k-1} - c_k P_{k-2}`.
pub(crate) fn jacobi_recurrence<S: Scalar>(k: usize, alpha: &S, beta: &S) -> (S, S, S, S) {
    let kk = S::from_usize(k);
    let two = S::from_i64(2);
    let s = two.clone() * kk.clone() + alpha.clone() + beta.clone();
    let a_k = two.clone()
        * kk.clone()
        * (kk.clone() + alpha.clone() + beta.clone())
        * (s.clone() - two.clone());
    assert!(!a_k.is_zero(), "degenerate Jacobi recurrence at degree {k}");
    let mid = s.clone() - S::one();
    let slope = mid.clone() * s.clone() * (s.clone() - two.clone());
    let shift = mid * (alpha.clone() * alpha.clone() - beta.clone() * beta.clone());
    let c_k = two * (kk.clone() + alpha.clone() - S::one()) * (kk + beta.clone() - S::one()) * s;
    (a_k, slope, shift, c_k)
}

/// `P_n^{(alpha,beta)}(1) = binom(n + alpha, n)`.
pub fn jacobi_at_one<S: Scalar>(n: usize, alpha: &S) -> S {
    binomial(&(alpha.clone() + S::from_usize(n)), n)
}

/// Laguerre `L_m^{(alpha)}(t) = sum_k (-1)^k binom(m + alpha, m - k) t^k / k!`.
pub fn laguerre_coeffs<S: Scalar>(m: usize, alpha: &S) -> Vec<S> {
    (0..=m)
        .map(|k| {
            let sign = if k % 2 == 0 { S::one() } else { -S::one() };
            sign * binomial(&(alpha.clone() + S::from_usize(m)), m - k) / factorial::<S>(k)
        })
        .collect()
}

/// Bessel `B_n^{(a,b)}(z) = sum_k binom(n,k) (n + a - 1)_k (z/b)^k`, normalized by `B_n(0) = 1`.
pub fn bessel_coeffs<S: Scalar>(n: usize, a: &S, b: &S) -> Vec<S> {
    let shift = a.clone() + S::from_usize(n) - S::one();
    (0..=n)
        .map(|k| binomial(&S::from_usize(n), k) * pochhammer(&shift, k) / b.clone().powi(k as u32))
        .collect()
}

/// Laguerre norm `Gamma(alpha + m + 1) / m!`, or `None` when the Gamma value is not representable.
pub fn laguerre_norm<S: Scalar>(m: usize, alpha: &S) -> Option<S> {
    let g = (alpha.clone() + S::one()).gamma()?;
    Some(g * pochhammer(&(alpha.clone() + S::one()), m) / factorial::<S>(m))
}

/// Bessel norm `(-1)^{n+1} n! b / ((2n + a - 1) (a)_{n-1})`; equals `-b` at `n = 0`.
pub fn bessel_norm<S: Scalar>(n: usize, a: &S, b: &S) -> S {
    if n == 0 {
        return -b.clone();
    }
    let sign = if n % 2 == 1 { S::one() } else { -S::one() };
    let denom = (S::from_usize(2 * n) + a.clone() - S::one()) * pochhammer(a, n - 1);
    sign * factorial::<S>(n) * b.clone() / denom
}

/// Univariate moment functional from a closure on the exponent.
pub fn functional_from<S, F>(label: &str, f: F) -> MomentFunctional<S>
where
    S: Scalar,
    F: Fn(usize) -> Result<S> + Send + Sync + 'static,
{
    MomentFunctional::from_fn(1, label, move |nu: &MultiIndex| {
        f(nu.exponents()[0] as usize)
    })
}

/// Normalized Legendre weight on `[-1, 1]`: moments `1/(k+1)` for even `k`.
pub fn legendre_moment<S: Scalar>(k: usize) -> S {
    if k % 2 == 1 {
        S::zero()
    } else {
        S::from_ratio(1, k as i64 + 1)
    }
}

/// Normalized Laguerre weight `t^alpha e^{-t}`: moments `(alpha + 1)_k`.
pub fn laguerre_moment<S: Scalar>(k: usize, alpha: &S) -> S {
    pochhammer(&(alpha.clone() + S::one()), k)
}

/// Bessel functional `b^{(a,b)}` with `<b, 1> = -b`: moments `(-b)^{k+1} / (a)_k`.
pub fn bessel_moment<S: Scalar>(k: usize, a: &S, b: &S) -> Result<S> {
    let den = pochhammer(a, k);
    if den.is_zero() {
        return Err(Error::InadmissibleParameters(format!(
            "Bessel parameter a = {a} makes (a)_{k} vanish"
        )));
    }
    Ok((-b.clone()).powi(k as u32 + 1) / den)
}

pub fn to_polynomial<S: Scalar>(coeffs: &[S]) -> Polynomial<S> {
    univariate(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ops::OpSystem;
    use crate::scalar::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn jacobi_known_values() {
        // Legendre P_2 = (3t^2 - 1)/2
        assert_eq!(
            jacobi_coeffs(2, &q(0, 1), &q(0, 1)),
            vec![q(-1, 2), q(0, 1), q(3, 2)]
        );
        for n in 0..6 {
            let a = q(3, 2);
            let b = q(1, 3);
            let c = jacobi_coeffs(n, &a, &b);
            let at_one: Rational = c.iter().cloned().fold(q(0, 1), |s, x| s + x);
            assert_eq!(at_one, jacobi_at_one(n, &a));
            assert_eq!(jacobi_eval(n, &a, &b, &q(1, 1)), at_one);
            // symmetry P_n^{(a,b)}(-t) = (-1)^n P_n^{(b,a)}(t)
            let t = q(2, 7);
            let lhs = jacobi_eval(n, &a, &b, &-t.clone());
            let rhs = jacobi_eval(n, &b, &a, &t);
            assert_eq!(lhs, if n % 2 == 0 { rhs } else { -rhs });
        }
    }

    #[test]
    fn jacobi_orthogonal_under_beta_weight() {
        // Weight (1-t)^1 (1+t)^0 on [-1,1]: moments int t^k (1-t) dt.
        let u = functional_from("jac", |k| {
            let ev = |j: usize| {
                if j % 2 == 1 {
                    q(0, 1)
                } else {
                    q(2, j as i64 + 1)
                }
            };
            Ok(ev(k) - ev(k + 1))
        });
        let p3 = to_polynomial(&jacobi_coeffs(3, &q(1, 1), &q(0, 1)));
        for k in 0..3 {
            let mono = to_polynomial(&{
                let mut v = vec![q(0, 1); k + 1];
                v[k] = q(1, 1);
                v
            });
            assert_eq!(u.apply(&p3.mul(&mono)).unwrap(), q(0, 1));
        }
    }

    #[test]
    fn laguerre_and_bessel_norms() {
        let alpha = q(1, 1);
        let u = functional_from("lag", move |k| Ok(laguerre_moment(k, &q(1, 1))));
        for m in 0..5 {
            let l = to_polynomial(&laguerre_coeffs(m, &alpha));
            // normalized weight: divide the classical norm by Gamma(alpha + 1)
            let norm = laguerre_norm(m, &alpha).unwrap() / alpha.clone().gamma().unwrap();
            assert_eq!(u.apply(&l.mul(&l)).unwrap(), norm);
        }
        let (a, b) = (q(1, 1), q(-1, 1));
        let bes = functional_from("bessel", move |k| bessel_moment(k, &q(1, 1), &q(-1, 1)));
        let ops = OpSystem::build(&bes, 4, 0.0).unwrap();
        for n in 0..5 {
            let c = bessel_coeffs(n, &a, &b);
            assert_eq!(c[0], q(1, 1));
            let p = to_polynomial(&c);
            assert_eq!(bes.apply(&p.mul(&p)).unwrap(), bessel_norm(n, &a, &b));
            // proportional to the monic OPS
            let monic = ops.poly(n).row(0).scale(&c[n]);
            assert_eq!(monic, p.padded(n));
        }
    }
}
