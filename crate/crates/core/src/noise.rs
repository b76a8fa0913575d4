//! Error sampling: uniform, Gaussian-clustered and dual (edge) noise.
//!
//! Every cycle draws from its own ChaCha8 stream, keyed by the configured
//! seed and selected by the cycle index, so a pattern depends only on
//! `(config, cycle_index)` and never on evaluation order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CliqueError, Result};
use crate::lattice::Lattice;
use crate::{Bits, DataIndex};

/// Spreads below this collapse a Gaussian cluster onto its center.
pub const SIGMA_COLLAPSE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NoiseModel {
    #[serde(rename = "uniform")]
    Uniform,
    #[serde(rename = "gaussian")]
    Gaussian,
    #[serde(rename = "dual")]
    DualError,
}

impl NoiseModel {
    pub fn name(self) -> &'static str {
        match self {
            NoiseModel::Uniform => "uniform",
            NoiseModel::Gaussian => "gaussian",
            NoiseModel::DualError => "dual",
        }
    }
}

impl std::fmt::Display for NoiseModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for NoiseModel {
    type Err = CliqueError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "uniform" => Ok(NoiseModel::Uniform),
            "gaussian" => Ok(NoiseModel::Gaussian),
            "dual" | "dual-error" | "dualerror" => Ok(NoiseModel::DualError),
            other => Err(CliqueError::Parse(format!("unknown noise model '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    pub model: NoiseModel,
    /// Physical error rate `p`.
    pub rate: f64,
    /// Syndrome rounds per cycle. `1` disables measurement errors.
    pub measurement_rounds: usize,
    /// Per-ancilla, per-round measurement flip probability.
    pub measurement_rate: f64,
    /// Gaussian cluster spread in lattice units.
    pub sigma: f64,
    /// Expected erroneous qubits per Gaussian cluster.
    pub cluster_mean_size: f64,
    pub seed: u64,
}

impl NoiseConfig {
    /// Two measurement rounds at the data rate, `sigma = 1`, clusters of 2.
    pub fn new(model: NoiseModel, rate: f64) -> Self {
        NoiseConfig {
            model,
            rate,
            measurement_rounds: 2,
            measurement_rate: rate,
            sigma: 1.0,
            cluster_mean_size: 2.0,
            seed: 0,
        }
    }

    pub fn with_rounds(mut self, rounds: usize) -> Self {
        self.measurement_rounds = rounds;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_measurement_rate(mut self, rate: f64) -> Self {
        self.measurement_rate = rate;
        self
    }

    pub fn with_cluster(mut self, sigma: f64, cluster_mean_size: f64) -> Self {
        self.sigma = sigma;
        self.cluster_mean_size = cluster_mean_size;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(CliqueError::InvalidNoise(msg));
        if !(0.0..=1.0).contains(&self.rate) {
            return bad(format!("rate {} outside [0, 1]", self.rate));
        }
        if !(0.0..=1.0).contains(&self.measurement_rate) {
            return bad(format!("measurement rate {} outside [0, 1]", self.measurement_rate));
        }
        if self.measurement_rounds == 0 {
            return bad("measurement rounds must be at least 1".into());
        }
        if self.sigma <= 0.0 || !self.sigma.is_finite() {
            return bad(format!("sigma {} must be positive", self.sigma));
        }
        if self.cluster_mean_size < 1.0 || !self.cluster_mean_size.is_finite() {
            return bad(format!("cluster size {} must be at least 1", self.cluster_mean_size));
        }
        Ok(())
    }
}

/// Data flips plus one measurement-flip vector per round, for one cycle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ErrorPattern {
    pub data_flips: Bits,
    pub measurement_flips: Vec<Bits>,
}

impl ErrorPattern {
    pub fn zeros(lattice: &Lattice, rounds: usize) -> Self {
        ErrorPattern {
            data_flips: Bits::repeat(false, lattice.data_count()),
            measurement_flips: vec![Bits::repeat(false, lattice.ancilla_count()); rounds],
        }
    }

    pub fn rounds(&self) -> usize {
        self.measurement_flips.len()
    }

    pub fn data_weight(&self) -> usize {
        self.data_flips.count_ones()
    }

    fn toggle_data(&mut self, q: DataIndex) {
        let v = self.data_flips[q];
        self.data_flips.set(q, !v);
    }
}

/// Calls `hit` with every index in `0..n` selected independently with
/// probability `p`, skipping ahead geometrically when `p` is small.
fn for_each_bernoulli(rng: &mut ChaCha8Rng, n: usize, p: f64, mut hit: impl FnMut(usize)) {
    if p <= 0.0 || n == 0 {
        return;
    }
    if p >= 1.0 {
        (0..n).for_each(hit);
        return;
    }
    if p > 0.25 {
        for i in 0..n {
            if rng.random_bool(p) {
                hit(i);
            }
        }
        return;
    }
    let log_q = (-p).ln_1p();
    let mut i = 0usize;
    loop {
        // u in (0, 1]
        let u = 1.0 - rng.random::<f64>();
        let skip = (u.ln() / log_q).floor();
        if skip >= (n - i) as f64 {
            return;
        }
        i += skip as usize;
        hit(i);
        i += 1;
        if i >= n {
            return;
        }
    }
}

/// Precomputed per-lattice sampling tables for one [`NoiseConfig`].
#[derive(Clone, Debug)]
pub struct NoiseSampler<'a> {
    lattice: &'a Lattice,
    config: NoiseConfig,
    key: <ChaCha8Rng as SeedableRng>::Seed,
    edges: Vec<(DataIndex, DataIndex)>,
    /// For each cluster center, `(qubit, flip probability)` of every other qubit.
    spread: Vec<Vec<(DataIndex, f64)>>,
}

impl<'a> NoiseSampler<'a> {
    pub fn new(lattice: &'a Lattice, config: &NoiseConfig) -> Result<Self> {
        config.validate()?;
        let key = ChaCha8Rng::seed_from_u64(config.seed).get_seed();
        let edges = match config.model {
            NoiseModel::DualError => lattice.data_edges(),
            _ => Vec::new(),
        };
        let spread = match config.model {
            NoiseModel::Gaussian if config.sigma > SIGMA_COLLAPSE => gaussian_spread(lattice, config),
            _ => Vec::new(),
        };
        Ok(NoiseSampler { lattice, config: config.clone(), key, edges, spread })
    }

    pub fn config(&self) -> &NoiseConfig {
        &self.config
    }

    pub fn lattice(&self) -> &Lattice {
        self.lattice
    }

    /// Edge list used by the dual model (empty for other models).
    pub fn edges(&self) -> &[(DataIndex, DataIndex)] {
        &self.edges
    }

    pub fn rng_for_cycle(&self, cycle_index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::from_seed(self.key);
        rng.set_stream(cycle_index);
        rng
    }

    pub fn sample(&self, cycle_index: u64) -> ErrorPattern {
        let mut rng = self.rng_for_cycle(cycle_index);
        let mut pattern = ErrorPattern::zeros(self.lattice, self.config.measurement_rounds);
        match self.config.model {
            NoiseModel::Uniform => self.uniform_data(&mut rng, &mut pattern),
            NoiseModel::Gaussian => self.gaussian_data(&mut rng, &mut pattern),
            NoiseModel::DualError => {
                self.dual_data(&mut rng, &mut pattern);
            }
        }
        self.measurement(&mut rng, &mut pattern);
        pattern
    }

    /// Number of dual-model edges selected in `cycle_index`, alongside the pattern.
    pub fn sample_dual_counted(&self, cycle_index: u64) -> (ErrorPattern, usize) {
        let mut rng = self.rng_for_cycle(cycle_index);
        let mut pattern = ErrorPattern::zeros(self.lattice, self.config.measurement_rounds);
        let selected = self.dual_data(&mut rng, &mut pattern);
        self.measurement(&mut rng, &mut pattern);
        (pattern, selected)
    }

    fn uniform_data(&self, rng: &mut ChaCha8Rng, pattern: &mut ErrorPattern) {
        let data = &mut pattern.data_flips;
        for_each_bernoulli(rng, self.lattice.data_count(), self.config.rate, |q| data.set(q, true));
    }

    fn gaussian_data(&self, rng: &mut ChaCha8Rng, pattern: &mut ErrorPattern) {
        let n = self.lattice.data_count();
        let seed_rate = self.config.rate / self.config.cluster_mean_size;
        let mut centers = Vec::new();
        for_each_bernoulli(rng, n, seed_rate, |q| centers.push(q));
        for center in centers {
            pattern.toggle_data(center);
            if let Some(spread) = self.spread.get(center) {
                for &(q, prob) in spread {
                    if prob >= 1.0 || (prob > 0.0 && rng.random_bool(prob)) {
                        pattern.toggle_data(q);
                    }
                }
            }
        }
    }

    fn dual_data(&self, rng: &mut ChaCha8Rng, pattern: &mut ErrorPattern) -> usize {
        let mut selected = Vec::new();
        for_each_bernoulli(rng, self.edges.len(), self.config.rate, |e| selected.push(e));
        for &e in &selected {
            let (x, y) = self.edges[e];
            pattern.toggle_data(x);
            pattern.toggle_data(y);
        }
        selected.len()
    }

    fn measurement(&self, rng: &mut ChaCha8Rng, pattern: &mut ErrorPattern) {
        if self.config.measurement_rounds < 2 {
            return;
        }
        let m = self.lattice.ancilla_count();
        for round in pattern.measurement_flips.iter_mut() {
            for_each_bernoulli(rng, m, self.config.measurement_rate, |a| round.set(a, true));
        }
    }
}

fn gaussian_spread(lattice: &Lattice, config: &NoiseConfig) -> Vec<Vec<(DataIndex, f64)>> {
    let n = lattice.data_count();
    let two_sigma_sq = 2.0 * config.sigma * config.sigma;
    let extra = config.cluster_mean_size - 1.0;
    (0..n)
        .map(|center| {
            let (ci, cj) = lattice.data_position(center);
            let weights: Vec<(DataIndex, f64)> = (0..n)
                .filter(|&q| q != center)
                .map(|q| {
                    let (i, j) = lattice.data_position(q);
                    let di = i as f64 - ci as f64;
                    let dj = j as f64 - cj as f64;
                    (q, (-(di * di + dj * dj) / two_sigma_sq).exp())
                })
                .collect();
            let total: f64 = weights.iter().map(|&(_, w)| w).sum();
            weights.into_iter().map(|(q, w)| (q, (extra * w / total).min(1.0))).filter(|&(_, p)| p > 0.0).collect()
        })
        .collect()
}

/// Samples one cycle under [`NoiseModel::Uniform`].
pub fn sample_uniform(lattice: &Lattice, config: &NoiseConfig, cycle_index: u64) -> Result<ErrorPattern> {
    expect_model(config, NoiseModel::Uniform)?;
    Ok(NoiseSampler::new(lattice, config)?.sample(cycle_index))
}

/// Samples one cycle under [`NoiseModel::Gaussian`].
pub fn sample_gaussian(lattice: &Lattice, config: &NoiseConfig, cycle_index: u64) -> Result<ErrorPattern> {
    expect_model(config, NoiseModel::Gaussian)?;
    Ok(NoiseSampler::new(lattice, config)?.sample(cycle_index))
}

/// Samples one cycle under [`NoiseModel::DualError`].
pub fn sample_dual_error(lattice: &Lattice, config: &NoiseConfig, cycle_index: u64) -> Result<ErrorPattern> {
    expect_model(config, NoiseModel::DualError)?;
    Ok(NoiseSampler::new(lattice, config)?.sample(cycle_index))
}

fn expect_model(config: &NoiseConfig, model: NoiseModel) -> Result<()> {
    if config.model != model {
        return Err(CliqueError::InvalidNoise(format!("expected model {model}, configuration has {}", config.model)));
    }
    Ok(())
}
