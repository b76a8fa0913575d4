use clique_core::{Lattice, NoiseConfig, NoiseModel, NoiseSampler};

const CYCLES: u64 = 1_000_000;

fn three_sigma(n: f64, p: f64) -> f64 {
    3.0 * (n * p * (1.0 - p) / CYCLES as f64).sqrt()
}

#[test]
fn uniform_mean_weight_and_marginals() {
    let lattice = Lattice::build(5).unwrap();
    let config = NoiseConfig::new(NoiseModel::Uniform, 0.01).with_rounds(1).with_seed(11);
    let sampler = NoiseSampler::new(&lattice, &config).unwrap();
    let mut per_qubit = vec![0u64; lattice.data_count()];
    let mut total = 0u64;
    for c in 0..CYCLES {
        let pattern = sampler.sample(c);
        total += pattern.data_weight() as u64;
        for q in pattern.data_flips.iter_ones() {
            per_qubit[q] += 1;
        }
    }
    let mean = total as f64 / CYCLES as f64;
    assert!((mean - 0.25).abs() <= three_sigma(25.0, 0.01), "mean {mean}");
    for (q, &count) in per_qubit.iter().enumerate() {
        let f = count as f64 / CYCLES as f64;
        assert!((f - 0.01).abs() <= three_sigma(1.0, 0.01), "qubit {q}: {f}");
    }
}

#[test]
fn uniform_measurement_marginal() {
    let lattice = Lattice::build(5).unwrap();
    let config = NoiseConfig::new(NoiseModel::Uniform, 0.0).with_measurement_rate(0.02).with_seed(3);
    let sampler = NoiseSampler::new(&lattice, &config).unwrap();
    let cycles = 200_000u64;
    let mut count = 0u64;
    for c in 0..cycles {
        let p = sampler.sample(c);
        assert_eq!(p.data_weight(), 0);
        count += p.measurement_flips.iter().map(|r| r.count_ones() as u64).sum::<u64>();
    }
    let trials = (cycles * 2 * lattice.ancilla_count() as u64) as f64;
    let f = count as f64 / trials;
    assert!((f - 0.02).abs() <= 3.0 * (0.02 * 0.98 / trials).sqrt(), "{f}");
}

#[test]
fn gaussian_mean_weight_is_calibrated() {
    let lattice = Lattice::build(7).unwrap();
    let config = NoiseConfig::new(NoiseModel::Gaussian, 0.005).with_cluster(1.0, 2.0).with_rounds(1).with_seed(5);
    let sampler = NoiseSampler::new(&lattice, &config).unwrap();
    let total: u64 = (0..CYCLES).map(|c| sampler.sample(c).data_weight() as u64).sum();
    let mean = total as f64 / CYCLES as f64;
    let target = 49.0 * 0.005;
    assert!((mean - target).abs() <= 0.05 * target, "mean {mean} vs {target}");
}

#[test]
fn gaussian_clusters_are_spatially_correlated() {
    // Given one flipped qubit, a grid neighbor is far more likely flipped than under uniform noise.
    let lattice = Lattice::build(7).unwrap();
    let config = NoiseConfig::new(NoiseModel::Gaussian, 0.005).with_rounds(1).with_seed(8);
    let sampler = NoiseSampler::new(&lattice, &config).unwrap();
    let (centre, right) = (lattice.data_index(3, 3), lattice.data_index(3, 4));
    let (mut both, mut first) = (0u64, 0u64);
    for c in 0..CYCLES {
        let p = sampler.sample(c);
        if p.data_flips[centre] {
            first += 1;
            both += u64::from(p.data_flips[right]);
        }
    }
    let conditional = both as f64 / first as f64;
    assert!(conditional > 0.05, "{conditional}");
}

#[test]
fn dual_mean_selected_edges() {
    let lattice = Lattice::build(5).unwrap();
    let config = NoiseConfig::new(NoiseModel::DualError, 0.002).with_rounds(1).with_seed(13);
    let sampler = NoiseSampler::new(&lattice, &config).unwrap();
    let edges = lattice.data_edges().len() as f64;
    assert_eq!(sampler.edges().len() as f64, edges);
    let total: u64 = (0..CYCLES).map(|c| sampler.sample_dual_counted(c).1 as u64).sum();
    let mean = total as f64 / CYCLES as f64;
    assert!((mean - edges * 0.002).abs() <= three_sigma(edges, 0.002), "mean {mean}");
}

#[test]
fn distinct_cycles_are_uncorrelated() {
    let lattice = Lattice::build(5).unwrap();
    let config = NoiseConfig::new(NoiseModel::Uniform, 0.1).with_rounds(1).with_seed(21);
    let sampler = NoiseSampler::new(&lattice, &config).unwrap();
    let cycles = 200_000u64;
    let q = lattice.data_index(2, 2);
    let bits: Vec<f64> = (0..cycles).map(|c| f64::from(u8::from(sampler.sample(c).data_flips[q]))).collect();
    let mean = bits.iter().sum::<f64>() / cycles as f64;
    let var = bits.iter().map(|b| (b - mean).powi(2)).sum::<f64>() / cycles as f64;
    let lag1 = bits.windows(2).map(|w| (w[0] - mean) * (w[1] - mean)).sum::<f64>() / (cycles - 1) as f64 / var;
    assert!(lag1.abs() < 4.0 / (cycles as f64).sqrt(), "lag-1 autocorrelation {lag1}");
}
