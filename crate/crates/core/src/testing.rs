//! Deterministic random fields for unit tests.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::spectral::{ScalarField, VectorField};

pub fn random_scalar(n: usize, seed: u64) -> ScalarField<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..n * n * n).map(|_| StandardNormal.sample(&mut rng)).collect();
    ScalarField::from_vec(n, data).unwrap()
}

pub fn random_vector(n: usize, seed: u64) -> VectorField<f64> {
    VectorField::from_components([
        random_scalar(n, seed.wrapping_mul(3)),
        random_scalar(n, seed.wrapping_mul(3) + 1),
        random_scalar(n, seed.wrapping_mul(3) + 2),
    ])
    .unwrap()
}
