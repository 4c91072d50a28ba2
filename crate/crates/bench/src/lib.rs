//! Fixtures shared by the construction benchmarks.

use mvop::random::{sample_christoffel_pair, sample_uvarov_case, ChristoffelSample};
use mvop::uvarov::UvarovSystem;
use mvop::Rational;

/// Seed used by every fixture so runs are comparable.
pub const SEED: u64 = 2024;

pub fn uvarov_fixture(degree: usize, masses: usize) -> UvarovSystem<Rational> {
    sample_uvarov_case(2, degree, masses, SEED).1
}

pub fn christoffel_fixture(degree: usize) -> ChristoffelSample {
    sample_christoffel_pair(2, degree + 1, degree, SEED)
}
