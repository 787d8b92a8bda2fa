//! Random instance generators shared by unit tests.

use std::ops::RangeInclusive;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{Instance, Validation};

/// Instance with `m` and `n` drawn from the given ranges and every node
/// holding a random nonempty subset (sizes vary per node).
pub fn random_instance(seed: u64, m: RangeInclusive<usize>, n: RangeInclusive<usize>) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = rng.random_range(m);
    let n = rng.random_range(n);
    let lists: Vec<Vec<usize>> = (0..m)
        .map(|_| loop {
            let set: Vec<usize> = (0..n).filter(|_| rng.random_bool(0.4)).collect();
            if !set.is_empty() {
                break set;
            }
        })
        .collect();
    Instance::from_lists(n, &lists, Validation::Relaxed).unwrap()
}
