//! Fixtures shared by the benchmarks in `benches/`.

use clique_core::syndrome::effective_frame;
use clique_core::{Lattice, NoiseConfig, NoiseModel, NoiseSampler, SyndromeFrame};

/// Effective syndrome frames for the first `count` cycles with a nonempty syndrome.
pub fn nonempty_frames(lattice: &Lattice, model: NoiseModel, rate: f64, count: usize) -> Vec<SyndromeFrame> {
    let config = NoiseConfig::new(model, rate).with_seed(1);
    let sampler = NoiseSampler::new(lattice, &config).expect("valid config");
    (0..)
        .map(|c| effective_frame(lattice, &sampler.sample(c)).expect("two rounds"))
        .filter(|f| !f.is_clear())
        .take(count)
        .collect()
}
