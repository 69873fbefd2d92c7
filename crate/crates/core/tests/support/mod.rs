//! Shared helpers for the integration suites.

use nem_core::contour::{FeatureSequence, TangentProfile};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A seeded pair of random feature sequences with lengths in `1..=max_len`,
/// angles in `[0, 2pi)`, and a `velocity` feature in `[0, 3)`.
pub fn random_instance(seed: u64, max_len: usize) -> (FeatureSequence<f64>, FeatureSequence<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut make = |name: &str| {
        let len = rng.random_range(1..=max_len);
        let angles: Vec<f64> = (0..len)
            .map(|_| rng.random_range(0.0..std::f64::consts::TAU))
            .collect();
        let velocity: Vec<f64> = (0..len).map(|_| rng.random_range(0.0..3.0)).collect();
        FeatureSequence::from_angles(name, TangentProfile::new(angles).unwrap(), true)
            .with_feature("velocity", velocity)
            .unwrap()
    };
    (make("x"), make("y"))
}
