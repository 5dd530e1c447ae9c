//! Seeded sample generation. All suites draw from `ChaCha8Rng` so a fixed seed
//! reproduces the same sample ordering.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform_vector<R: Rng>(rng: &mut R, dim: usize) -> DVector<f64> {
    DVector::from_iterator(dim, (0..dim).map(|_| rng.random_range(-1.0..1.0)))
}

/// Uniform-direction unit vector (rejection from the cube).
pub fn unit_vector<R: Rng>(rng: &mut R, dim: usize) -> DVector<f64> {
    loop {
        let v = uniform_vector(rng, dim);
        let n = v.norm();
        if n > 0.1 && n <= 1.0 {
            return v / n;
        }
    }
}
