//! Seeded generators of random rational test instances.
//!
//! Every moment of a random functional is drawn from its own ChaCha stream,
//! keyed by the seed and the multi-index, so moments do not depend on the
//! order in which they are requested.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::christoffel::QuadraticMultiplier;
use crate::moments::MomentFunctional;
use crate::multiindex::{rank_size, MultiIndex};
use crate::ops::OpSystem;
use crate::scalar::{Rational, Scalar};
use crate::uvarov::{UvarovSpec, UvarovSystem};

fn mix(a: u64, b: u64) -> u64 {
    let mut z = a ^ b.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn small_rational(rng: &mut ChaCha8Rng, num: i64, den: i64) -> Rational {
    <Rational as Scalar>::from_ratio(rng.gen_range(-num..=num), rng.gen_range(1..=den))
}

fn rng_for(seed: u64, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix(seed, salt))
}

/// A functional with independent moments `p/q`, `|p| <= 9`, `1 <= q <= 4`, and `mu_0 != 0`.
pub fn functional(d: usize, seed: u64) -> MomentFunctional<Rational> {
    MomentFunctional::from_fn(d, format!("random(seed={seed})"), move |nu: &MultiIndex| {
        let mut rng = rng_for(seed, mix(nu.global_position() as u64, 0x51ED));
        loop {
            let value = small_rational(&mut rng, 9, 4);
            if nu.degree() > 0 || !value.is_zero() {
                return Ok(value);
            }
        }
    })
}

/// `count` distinct points with coordinates `p/q` (`|p| <= 3`, `q <= 3`) and nonzero masses.
pub fn point_masses(d: usize, count: usize, seed: u64) -> (Vec<Vec<Rational>>, Vec<Rational>) {
    let mut rng = rng_for(seed, 0xA55E5);
    let mut points: Vec<Vec<Rational>> = Vec::with_capacity(count);
    while points.len() < count {
        let p: Vec<Rational> = (0..d).map(|_| small_rational(&mut rng, 3, 3)).collect();
        if !points.contains(&p) {
            points.push(p);
        }
    }
    let masses = (0..count)
        .map(|_| loop {
            let m = small_rational(&mut rng, 5, 3);
            if !m.is_zero() {
                break m;
            }
        })
        .collect();
    (points, masses)
}

/// A multiplier of exact degree two with small rational coefficients.
pub fn quadratic_multiplier(d: usize, seed: u64) -> QuadraticMultiplier<Rational> {
    let mut rng = rng_for(seed, 0xC4215);
    loop {
        let a2: Vec<Rational> = (0..rank_size(2, d))
            .map(|_| small_rational(&mut rng, 3, 2))
            .collect();
        let a1: Vec<Rational> = (0..d).map(|_| small_rational(&mut rng, 3, 2)).collect();
        let a0 = small_rational(&mut rng, 3, 2);
        if let Ok(q) = QuadraticMultiplier::new(d, a2, a1, a0) {
            return q;
        }
    }
}

/// First seed at or after `seed` giving a functional quasi-definite through
/// `degree` and a Uvarov modification certified through `degree`.
pub fn sample_uvarov_case(
    d: usize,
    degree: usize,
    count: usize,
    seed: u64,
) -> (u64, UvarovSystem<Rational>) {
    for s in seed.. {
        let Ok(ops) = OpSystem::build(&functional(d, s), degree, 0.0) else {
            continue;
        };
        let (points, masses) = point_masses(d, count, s);
        let Ok(spec) = UvarovSpec::new(d, points, masses) else {
            continue;
        };
        let sys = UvarovSystem::new(ops, spec);
        if sys.first_failure().is_none() {
            return (s, sys);
        }
    }
    unreachable!("seed space exhausted")
}

/// A Christoffel pair: `u` quasi-definite through `u_degree`, a multiplier
/// with `<u, lambda> != 0`, and `v = lambda u` quasi-definite through `v_degree`.
pub struct ChristoffelSample {
    pub seed: u64,
    pub u: OpSystem<Rational>,
    pub v: OpSystem<Rational>,
    pub multiplier: QuadraticMultiplier<Rational>,
}

pub fn sample_christoffel_pair(
    d: usize,
    u_degree: usize,
    v_degree: usize,
    seed: u64,
) -> ChristoffelSample {
    for s in seed.. {
        let u_fun = functional(d, s);
        let Ok(u) = OpSystem::build(&u_fun, u_degree, 0.0) else {
            continue;
        };
        let multiplier = quadratic_multiplier(d, s);
        let Ok(v_fun) = multiplier.apply(&u_fun) else {
            continue;
        };
        let Ok(v) = OpSystem::build(&v_fun, v_degree, 0.0) else {
            continue;
        };
        return ChristoffelSample {
            seed: s,
            u,
            v,
            multiplier,
        };
    }
    unreachable!("seed space exhausted")
}
