//! Shared instance construction for the criterion benchmarks.

use krylman_core::densemat::DenseMatrix;
use krylman_core::ffield::PrimeField;
use krylman_core::gen::random_instance;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn field() -> PrimeField {
    PrimeField::new(65521).unwrap()
}

pub fn random_square(n: usize, seed: u64) -> DenseMatrix {
    let f = field();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let entries = (0..n * n).map(|_| rng.gen_range(0..f.modulus())).collect();
    DenseMatrix::from_entries(n, n, f, entries).unwrap()
}

/// Seeded (A, B) with m = 4 inputs and controllable dimension n / 2.
pub fn kalman_instance(n: usize, seed: u64) -> (DenseMatrix, DenseMatrix) {
    random_instance(field(), n, 4, n / 2, seed).unwrap()
}
