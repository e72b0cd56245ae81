//! Fixed workloads for the benchmarks.

use std::sync::Arc;

use nlmp_core::random::{self, ModelConfig};
use nlmp_core::{Nlmp, SigmaAlgebra};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A seeded random model on exactly `n` states over the powerset, or over a
/// random coarse σ-algebra.
pub fn model(n: usize, labels: usize, coarse: bool, seed: u64) -> Nlmp {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sigma = if coarse {
        random::sigma(&mut rng, random::universe(n), true)
    } else {
        SigmaAlgebra::powerset(random::universe(n))
    };
    let cfg = ModelConfig {
        max_states: n,
        max_labels: labels,
        ..ModelConfig::default()
    };
    random::nlmp_on(&mut rng, Arc::new(sigma), labels, &cfg)
}

pub fn fig1() -> Nlmp {
    nlmp_core::text::parse_model(include_str!("../../../corpus/fig1.nlmp"))
        .expect("corpus file parses")
        .nlmp()
}
