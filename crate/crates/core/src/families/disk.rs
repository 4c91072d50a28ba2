//! Explicit orthonormal basis of the disk functional (`d = 2`), the relation
//! between the adjacent parameters `mu` and `mu + 1`, and the origin-mass
//! modification written in that basis. Floating point only, since the
//! normalization involves square roots.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::poly::{Polynomial, VectorPolynomial};
use crate::scalar::binomial;

use super::ball::{h_squared, kernel_at_origin, kernel_to_origin_polynomial, radial_jacobi};

const D: usize = 2;

/// `sqrt(2) Re (x + i y)^m` (`sine = false`) or `sqrt(2) Im (x + i y)^m`; the constant 1 for `m = 0`.
pub fn harmonic(m: usize, sine: bool) -> Polynomial<f64> {
    if m == 0 {
        return Polynomial::constant(D, 1.0);
    }
    let mut terms = Vec::new();
    for k in 0..=m {
        if (k % 2 == 1) != sine {
            continue;
        }
        // i^k contributes (-1)^{k/2} to the real part or (-1)^{(k-1)/2} to the imaginary part
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        let c = std::f64::consts::SQRT_2 * sign * binomial(&(m as f64), k);
        terms.push((
            crate::multiindex::MultiIndex::new(vec![(m - k) as u32, k as u32]),
            c,
        ));
    }
    Polynomial::from_terms(D, terms)
}

/// Row labels `(j, k)` of the degree-`n` basis vector: `j` descending and,
/// within each `j`, `k` descending (`k = 1` cosine, `k = 2` sine).
pub fn labels(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for j in (0..=n / 2).rev() {
        let sigma = if n == 2 * j { 1 } else { 2 };
        for k in (1..=sigma).rev() {
            out.push((j, k));
        }
    }
    out
}

pub fn h(mu: f64, j: usize, n: usize) -> f64 {
    h_squared(D, &mu, j, n).sqrt()
}

/// `P_{j,k}^n(x; mu)`.
pub fn element(mu: f64, n: usize, j: usize, k: usize) -> Polynomial<f64> {
    assert!(
        2 * j <= n && (k == 1 || (k == 2 && n > 2 * j)),
        "invalid basis label"
    );
    let m = n - 2 * j;
    // radial_jacobi evaluates at 1 - 2|x|^2; P^{(a,b)}(2|x|^2 - 1) = (-1)^j P^{(b,a)}(1 - 2|x|^2)
    let sign = if j.is_multiple_of(2) { 1.0 } else { -1.0 };
    radial_jacobi(D, j, &(m as f64), &(mu - 0.5))
        .mul(&harmonic(m, k == 2))
        .scale(&(sign / h(mu, j, n)))
}

pub fn element_eval(mu: f64, n: usize, j: usize, k: usize, x: &[f64]) -> f64 {
    element(mu, n, j, k).eval(x)
}

/// The degree-`n` orthonormal vector `P_n^{(mu)}`.
pub fn basis(mu: f64, n: usize) -> VectorPolynomial<f64> {
    let rows: Vec<_> = labels(n)
        .into_iter()
        .map(|(j, k)| element(mu, n, j, k))
        .collect();
    VectorPolynomial::from_rows(D, &rows).padded(n)
}

/// Coefficients `a_j^n` (`j = 0..=n/2`) and `b_j^n` (`j = 1..=n/2`, stored at index `j - 1`).
pub fn adjacent_coefficients(mu: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let den = n as f64 + mu + 0.5;
    let a = (0..=n / 2)
        .map(|j| h(mu + 1.0, j, n) / h(mu, j, n) * (n as f64 - j as f64 + mu + 0.5) / den)
        .collect();
    let b = (1..=n / 2)
        .map(|j| h(mu + 1.0, j - 1, n - 2) / h(mu, j, n) * (n as f64 - j as f64) / den)
        .collect();
    (a, b)
}

/// `(F_n, N_n)` with `P_n^{(mu)} = F_n P_n^{(mu+1)} + N_n P_{n-2}^{(mu+1)}`; `N_n` is absent for `n < 2`.
pub fn adjacent_relation(mu: f64, n: usize) -> (Matrix<f64>, Option<Matrix<f64>>) {
    let (a, b) = adjacent_coefficients(mu, n);
    let lab = labels(n);
    let f = Matrix::diagonal(&lab.iter().map(|&(j, _)| a[j]).collect::<Vec<_>>());
    if n < 2 {
        return (f, None);
    }
    let diag: Vec<f64> = labels(n - 2).iter().map(|&(jm, _)| b[jm]).collect();
    let l1 = crate::multiindex::shift::<f64>(n as isize - 1, 0, D);
    let l2 = crate::multiindex::shift::<f64>(n as isize - 2, 0, D);
    let nn = l1
        .transpose()
        .matmul(&l2.transpose())
        .matmul(&Matrix::diagonal(&diag))
        .neg();
    (f, Some(nn))
}

/// Largest coefficient of `P_n^{(mu)} - F_n P_n^{(mu+1)} - N_n P_{n-2}^{(mu+1)}`.
pub fn adjacent_residual(mu: f64, n: usize) -> f64 {
    let (f, nn) = adjacent_relation(mu, n);
    let mut r = basis(mu, n).sub(&basis(mu + 1.0, n).left_mul(&f));
    if let Some(nn) = nn {
        r = r.sub(&basis(mu + 1.0, n - 2).left_mul(&nn));
    }
    r.coeffs().max_abs()
}

/// `a_n = lambda P_{n/2,1}^n(0) / (1 + lambda K_{n-1}(u_mu; 0, 0))` for even `n >= 2`, zero otherwise.
pub fn uvarov_a(mu: f64, lambda: f64, n: usize) -> Result<f64> {
    if n % 2 == 1 || n == 0 {
        return Ok(0.0);
    }
    let den = 1.0 + lambda * kernel_at_origin(D, &mu, n - 1);
    if den == 0.0 {
        return Err(Error::MassDegenerate { degree: n - 1 });
    }
    Ok(lambda * element(mu, n, n / 2, 1).eval(&[0.0, 0.0]) / den)
}

/// Orthogonal basis of `u_mu + lambda delta_0` in degree `n`, in the row order of [`basis`].
pub fn uvarov_basis(mu: f64, lambda: f64, n: usize) -> Result<VectorPolynomial<f64>> {
    let p = basis(mu, n);
    if n % 2 == 1 || n == 0 {
        return Ok(p);
    }
    let a = uvarov_a(mu, lambda, n)?;
    let correction = kernel_to_origin_polynomial(D, &mu, n - 1).scale(&a);
    let mut rows: Vec<_> = (0..p.len()).map(|r| p.row(r)).collect();
    rows[0] = rows[0].sub(&correction);
    Ok(VectorPolynomial::from_rows(D, &rows).padded(n))
}
