//! Concrete families: classical univariate weights, the ball, the explicit
//! disk basis and the bivariate Bessel–Laguerre polynomials.

pub mod ball;
pub mod bessel_laguerre;
pub mod disk;
pub mod univariate;
