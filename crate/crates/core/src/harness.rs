//! Monte Carlo runs, sweeps, improvement ratios and logistic extrapolation.
//!
//! Cycles are split into fixed-size chunks and decoded in parallel. Each
//! cycle's noise depends only on `(seed, cycle index)` and the per-chunk
//! counts are summed, so results do not depend on the number of workers.

use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{CliqueError, Result};
use crate::lattice::Lattice;
use crate::noise::{NoiseConfig, NoiseModel, NoiseSampler};
use crate::pipeline::{classify, Classification, Decoder};
use crate::syndrome::effective_frame;

pub const CHUNK_CYCLES: u64 = 4096;

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for `successes` out of `trials` at 95% confidence.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let low = if successes == 0 { 0.0 } else { (center - half).max(0.0) };
    let high = if successes == trials { 1.0 } else { (center + half).min(1.0) };
    (low, high)
}

/// One row of results: a (distance, rate, model, decoder) cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellStats {
    pub distance: usize,
    pub rate: f64,
    pub model: NoiseModel,
    pub decoder: Decoder,
    pub rounds: usize,
    pub cycles: u64,
    pub offload_count: u64,
    pub offload_fraction: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed: u64,
}

impl CellStats {
    pub fn new(distance: usize, config: &NoiseConfig, decoder: Decoder, cycles: u64, offload_count: u64) -> Self {
        let (ci_low, ci_high) = wilson_interval(offload_count, cycles);
        CellStats {
            distance,
            rate: config.rate,
            model: config.model,
            decoder,
            rounds: config.measurement_rounds,
            cycles,
            offload_count,
            offload_fraction: if cycles == 0 { 0.0 } else { offload_count as f64 / cycles as f64 },
            ci_low,
            ci_high,
            seed: config.seed,
        }
    }

    /// Binomial standard error of the offload fraction.
    pub fn standard_error(&self) -> f64 {
        let p = self.offload_fraction;
        (p * (1.0 - p) / self.cycles as f64).sqrt()
    }

    pub fn is_consistent(&self) -> bool {
        (0.0..=1.0).contains(&self.offload_fraction)
            && self.offload_count <= self.cycles
            && self.ci_low <= self.offload_fraction
            && self.offload_fraction <= self.ci_high
    }
}

/// A collection of cells, as written to and read from CSV.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    pub cells: Vec<CellStats>,
}

impl RunStats {
    pub fn find(&self, distance: usize, rate: f64, model: NoiseModel, decoder: Decoder) -> Option<&CellStats> {
        self.cells.iter().find(|c| c.distance == distance && c.rate == rate && c.model == model && c.decoder == decoder)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for cell in &self.cells {
            w.serialize(cell)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let cells = r.deserialize().collect::<std::result::Result<Vec<CellStats>, _>>()?;
        Ok(RunStats { cells })
    }
}

/// Offload counts for both decoders on the same samples.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PairedCounts {
    pub cycles: u64,
    pub l1_offload: u64,
    pub l2_offload: u64,
    /// Cycles L2 offloads while L1 handles them locally.
    pub l2_only: u64,
}

impl std::ops::Add for PairedCounts {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        PairedCounts {
            cycles: self.cycles + o.cycles,
            l1_offload: self.l1_offload + o.l1_offload,
            l2_offload: self.l2_offload + o.l2_offload,
            l2_only: self.l2_only + o.l2_only,
        }
    }
}

fn chunked<T>(cycles: u64, zero: T, work: impl Fn(u64) -> T + Sync, add: impl Fn(T, T) -> T + Sync + Send) -> T
where
    T: Clone + Send + Sync,
{
    let chunks = cycles.div_ceil(CHUNK_CYCLES);
    (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let start = chunk * CHUNK_CYCLES;
            let end = (start + CHUNK_CYCLES).min(cycles);
            (start..end).fold(zero.clone(), |acc, c| add(acc, work(c)))
        })
        .reduce(|| zero.clone(), &add)
}

/// Samples, filters and decodes `cycles` cycles with one decoder.
pub fn run_cell(lattice: &Lattice, config: &NoiseConfig, decoder: Decoder, cycles: u64) -> Result<CellStats> {
    let sampler = NoiseSampler::new(lattice, config)?;
    let offload = chunked(
        cycles,
        0u64,
        |c| {
            let frame = effective_frame(lattice, &sampler.sample(c)).expect("at least one round");
            u64::from(classify(decoder, lattice, &frame) == Classification::Offload)
        },
        |a, b| a + b,
    );
    Ok(CellStats::new(lattice.distance(), config, decoder, cycles, offload))
}

/// Decodes each sampled cycle with both decoders.
pub fn run_paired(lattice: &Lattice, config: &NoiseConfig, cycles: u64) -> Result<PairedCounts> {
    let sampler = NoiseSampler::new(lattice, config)?;
    Ok(chunked(
        cycles,
        PairedCounts::default(),
        |c| {
            let frame = effective_frame(lattice, &sampler.sample(c)).expect("at least one round");
            let l1 = classify(Decoder::L1, lattice, &frame) == Classification::Offload;
            let l2 = classify(Decoder::L2, lattice, &frame) == Classification::Offload;
            PairedCounts {
                cycles: 1,
                l1_offload: u64::from(l1),
                l2_offload: u64::from(l2),
                l2_only: u64::from(l2 && !l1),
            }
        },
        |a, b| a + b,
    ))
}

/// Cartesian sweep over distances and rates for one noise model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub distances: Vec<usize>,
    pub rates: Vec<f64>,
    pub decoders: Vec<Decoder>,
    /// Template for every cell; `rate` (and `measurement_rate`, unless
    /// `measurement_rate` below is set) is replaced per cell.
    pub base: NoiseConfig,
    pub measurement_rate: Option<f64>,
    pub cycles: u64,
}

impl SweepSpec {
    pub fn cell_config(&self, rate: f64) -> NoiseConfig {
        let mut cfg = self.base.clone();
        cfg.rate = rate;
        cfg.measurement_rate = self.measurement_rate.unwrap_or(rate);
        cfg
    }
}

/// Runs every cell of `spec`, in distance, rate, decoder order. When both
/// decoders are requested they share samples.
pub fn sweep(spec: &SweepSpec) -> Result<RunStats> {
    let mut cells = Vec::new();
    for &d in &spec.distances {
        let lattice = Lattice::build(d)?;
        for &rate in &spec.rates {
            let cfg = spec.cell_config(rate);
            let both = spec.decoders.contains(&Decoder::L1) && spec.decoders.contains(&Decoder::L2);
            if both {
                let counts = run_paired(&lattice, &cfg, spec.cycles)?;
                for &decoder in &spec.decoders {
                    let offload = match decoder {
                        Decoder::L1 => counts.l1_offload,
                        Decoder::L2 => counts.l2_offload,
                    };
                    cells.push(CellStats::new(d, &cfg, decoder, spec.cycles, offload));
                }
            } else {
                for &decoder in &spec.decoders {
                    cells.push(run_cell(&lattice, &cfg, decoder, spec.cycles)?);
                }
            }
        }
    }
    Ok(RunStats { cells })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Improvement {
    /// `l1 / l2` offload fractions.
    Ratio(f64),
    /// L2 never offloaded; the ratio is at least L1's offload count.
    AtLeast(u64),
}

impl Improvement {
    pub fn value(self) -> f64 {
        match self {
            Improvement::Ratio(r) => r,
            Improvement::AtLeast(n) => n as f64,
        }
    }
}

impl std::fmt::Display for Improvement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Improvement::Ratio(r) => write!(f, "{r:.2}x"),
            Improvement::AtLeast(n) => write!(f, ">= {n}x"),
        }
    }
}

pub fn improvement_ratio(l1: &CellStats, l2: &CellStats) -> Result<Improvement> {
    if l1.distance != l2.distance || l1.rate != l2.rate || l1.model != l2.model {
        return Err(CliqueError::CellMismatch(format!(
            "({}, {}, {}) vs ({}, {}, {})",
            l1.distance, l1.rate, l1.model, l2.distance, l2.rate, l2.model
        )));
    }
    Ok(fraction_ratio(l1.offload_fraction, l2.offload_fraction, l1.offload_count))
}

/// Ratio of two offload fractions; a zero denominator yields the lower bound form.
pub fn fraction_ratio(l1_fraction: f64, l2_fraction: f64, l1_count: u64) -> Improvement {
    if l2_fraction > 0.0 {
        Improvement::Ratio(l1_fraction / l2_fraction)
    } else {
        Improvement::AtLeast(l1_count)
    }
}

fn logit(f: f64) -> f64 {
    (f / (1.0 - f)).ln()
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// `logit(f) = intercept + slope * d`, fitted by ordinary least squares.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LogisticFit {
    pub intercept: f64,
    pub slope: f64,
    pub fitted_range: (usize, usize),
    pub extrapolated_range: Option<(usize, usize)>,
    /// Distances dropped because their fraction was exactly 0 or 1.
    pub excluded: Vec<usize>,
    /// `(distance, observed logit - fitted logit)` for every fitted point.
    pub residuals: Vec<(usize, f64)>,
}

impl LogisticFit {
    pub fn predict(&self, distance: f64) -> f64 {
        sigmoid(self.intercept + self.slope * distance)
    }
}

/// Fits `(distance, fraction)` points. Fractions at 0 or 1 are excluded.
pub fn fit_logistic(points: &[(usize, f64)]) -> Result<LogisticFit> {
    let (usable, excluded): (Vec<_>, Vec<_>) = points.iter().partition(|(_, f)| *f > 0.0 && *f < 1.0);
    if usable.len() < 3 {
        return Err(CliqueError::InsufficientPoints { usable: usable.len() });
    }
    let n = usable.len() as f64;
    let xs: Vec<f64> = usable.iter().map(|(d, _)| *d as f64).collect();
    let ys: Vec<f64> = usable.iter().map(|(_, f)| logit(*f)).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(CliqueError::InsufficientPoints { usable: 1 });
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals = usable.iter().zip(&ys).map(|((d, _), y)| (*d, y - (intercept + slope * *d as f64))).collect();
    let lo = usable.iter().map(|(d, _)| *d).min().unwrap_or(0);
    let hi = usable.iter().map(|(d, _)| *d).max().unwrap_or(0);
    Ok(LogisticFit {
        intercept,
        slope,
        fitted_range: (lo, hi),
        extrapolated_range: None,
        excluded: excluded.iter().map(|(d, _)| *d).collect(),
        residuals,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Prediction {
    pub distance: usize,
    pub offload_fraction: f64,
}

/// Fits cells of one (rate, model, decoder) series whose distance lies in
/// `window` (inclusive) and predicts `targets`.
pub fn logistic_extrapolate(
    cells: &[CellStats],
    window: Option<(usize, usize)>,
    targets: &[usize],
) -> Result<(LogisticFit, Vec<Prediction>)> {
    if let Some(first) = cells.first() {
        if let Some(other) =
            cells.iter().find(|c| c.rate != first.rate || c.model != first.model || c.decoder != first.decoder)
        {
            return Err(CliqueError::CellMismatch(format!(
                "mixed series: ({}, {}, {}) and ({}, {}, {})",
                first.rate, first.model, first.decoder, other.rate, other.model, other.decoder
            )));
        }
    }
    let points: Vec<(usize, f64)> = cells
        .iter()
        .filter(|c| window.is_none_or(|(lo, hi)| (lo..=hi).contains(&c.distance)))
        .map(|c| (c.distance, c.offload_fraction))
        .collect();
    let mut fit = fit_logistic(&points)?;
    if let (Some(&lo), Some(&hi)) = (targets.iter().min(), targets.iter().max()) {
        fit.extrapolated_range = Some((lo, hi));
    }
    let predictions =
        targets.iter().map(|&d| Prediction { distance: d, offload_fraction: fit.predict(d as f64) }).collect();
    Ok((fit, predictions))
}

/// Groups cells by (rate, model, decoder), keeping first-seen order.
pub fn series(cells: &[CellStats]) -> Vec<Vec<CellStats>> {
    let mut groups: Vec<Vec<CellStats>> = Vec::new();
    for cell in cells {
        match groups.iter_mut().find(|g| {
            let h = &g[0];
            h.rate == cell.rate && h.model == cell.model && h.decoder == cell.decoder
        }) {
            Some(g) => g.push(cell.clone()),
            None => groups.push(vec![cell.clone()]),
        }
    }
    groups
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cell(d: usize, decoder: Decoder, count: u64, cycles: u64) -> CellStats {
        CellStats::new(d, &NoiseConfig::new(NoiseModel::Uniform, 0.005), decoder, cycles, count)
    }

    #[test]
    fn wilson_known_values() {
        // 10 of 100: (0.0552, 0.1744) to 4 decimals
        let (lo, hi) = wilson_interval(10, 100);
        assert!((lo - 0.05523).abs() < 1e-4, "{lo}");
        assert!((hi - 0.17437).abs() < 1e-4, "{hi}");
        let (lo, hi) = wilson_interval(0, 1000);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.004);
    }

    #[test]
    fn zero_rate_never_offloads() {
        let l = Lattice::build(5).unwrap();
        let cfg = NoiseConfig::new(NoiseModel::Uniform, 0.0);
        for decoder in [Decoder::L1, Decoder::L2] {
            let c = run_cell(&l, &cfg, decoder, 5000).unwrap();
            assert_eq!(c.offload_count, 0);
            assert_eq!(c.offload_fraction, 0.0);
            assert!(c.is_consistent());
        }
    }

    #[test]
    fn paired_matches_separate_runs() {
        let l = Lattice::build(7).unwrap();
        let cfg = NoiseConfig::new(NoiseModel::Uniform, 0.01).with_seed(3);
        let paired = run_paired(&l, &cfg, 20_000).unwrap();
        assert_eq!(paired.l1_offload, run_cell(&l, &cfg, Decoder::L1, 20_000).unwrap().offload_count);
        assert_eq!(paired.l2_offload, run_cell(&l, &cfg, Decoder::L2, 20_000).unwrap().offload_count);
        assert!(paired.l2_offload <= paired.l1_offload);
    }

    #[test]
    fn result_independent_of_worker_count() {
        let l = Lattice::build(5).unwrap();
        let cfg = NoiseConfig::new(NoiseModel::DualError, 0.01).with_seed(11);
        let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let many = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = single.install(|| run_paired(&l, &cfg, 30_000).unwrap());
        let b = many.install(|| run_paired(&l, &cfg, 30_000).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn ratio_examples() {
        let r = fraction_ratio(0.1070, 0.0152, 0).value();
        assert!((r - 7.04).abs() < 0.005, "{r}");
        assert_eq!(fraction_ratio(0.2, 0.2, 0).value(), 1.0);
        let r = fraction_ratio(0.0093, 0.0011, 0).value();
        assert!((r - 8.45).abs() < 0.005, "{r}");
        assert_eq!(fraction_ratio(0.1, 0.0, 42), Improvement::AtLeast(42));
    }

    #[test]
    fn ratio_requires_matching_cells() {
        let a = cell(5, Decoder::L1, 10, 100);
        let b = cell(7, Decoder::L2, 5, 100);
        assert!(improvement_ratio(&a, &b).is_err());
        let b = cell(5, Decoder::L2, 5, 100);
        assert_eq!(improvement_ratio(&a, &b).unwrap(), Improvement::Ratio(2.0));
        let z = cell(5, Decoder::L2, 0, 100);
        assert_eq!(improvement_ratio(&a, &z).unwrap(), Improvement::AtLeast(10));
    }

    #[test]
    fn logistic_recovers_exact_model() {
        let points: Vec<(usize, f64)> = (3..=19).step_by(2).map(|d| (d, sigmoid(-6.0 + 0.2 * d as f64))).collect();
        let fit = fit_logistic(&points).unwrap();
        assert!((fit.intercept + 6.0).abs() < 1e-6);
        assert!((fit.slope - 0.2).abs() < 1e-6);
        assert!(fit.residuals.iter().all(|(_, r)| r.abs() < 1e-9));
    }

    #[test]
    fn logistic_slope_follows_trend() {
        let up = [(5, 0.01), (7, 0.02), (9, 0.05), (11, 0.08)];
        assert!(fit_logistic(&up).unwrap().slope > 0.0);
        let down = [(5, 0.3), (7, 0.2), (9, 0.1)];
        assert!(fit_logistic(&down).unwrap().slope < 0.0);
    }

    #[test]
    fn logistic_excludes_degenerate_points() {
        let pts = [(3, 0.0), (5, 0.01), (7, 0.02), (9, 0.05), (11, 1.0)];
        let fit = fit_logistic(&pts).unwrap();
        assert_eq!(fit.excluded, vec![3, 11]);
        assert_eq!(fit.fitted_range, (5, 9));
        let too_few = [(3, 0.0), (5, 0.01), (7, 0.02)];
        assert_eq!(fit_logistic(&too_few), Err(CliqueError::InsufficientPoints { usable: 2 }));
    }

    #[test]
    fn extrapolate_respects_window_and_series() {
        let cells: Vec<CellStats> = (3..=13)
            .step_by(2)
            .map(|d| {
                let f = sigmoid(-5.0 + 0.3 * d as f64);
                cell(d, Decoder::L1, (f * 1e6).round() as u64, 1_000_000)
            })
            .collect();
        let (fit, preds) = logistic_extrapolate(&cells, Some((7, 13)), &[21, 25]).unwrap();
        assert_eq!(fit.fitted_range, (7, 13));
        assert_eq!(fit.extrapolated_range, Some((21, 25)));
        assert!((preds[0].offload_fraction - sigmoid(-5.0 + 0.3 * 21.0)).abs() < 1e-4);
        let mut mixed = cells.clone();
        mixed.push(cell(5, Decoder::L2, 3, 100));
        assert!(logistic_extrapolate(&mixed, None, &[21]).is_err());
    }

    #[test]
    fn csv_round_trip_preserves_cells() {
        let stats = RunStats { cells: vec![cell(5, Decoder::L1, 7, 1000), cell(5, Decoder::L2, 1, 1000)] };
        let mut buf = Vec::new();
        stats.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(
            "distance,rate,model,decoder,rounds,cycles,offload_count,offload_fraction,ci_low,ci_high,seed\n"
        ));
        assert!(text.contains(",uniform,l1,"));
        assert_eq!(RunStats::read_csv(buf.as_slice()).unwrap(), stats);
    }

    #[test]
    fn sweep_orders_cells_and_shares_samples() {
        let spec = SweepSpec {
            distances: vec![3, 5],
            rates: vec![0.01, 0.02],
            decoders: vec![Decoder::L1, Decoder::L2],
            base: NoiseConfig::new(NoiseModel::Uniform, 0.0).with_rounds(1).with_seed(5),
            measurement_rate: None,
            cycles: 2000,
        };
        let stats = sweep(&spec).unwrap();
        assert_eq!(stats.cells.len(), 8);
        let keys: Vec<_> = stats.cells.iter().map(|c| (c.distance, c.rate, c.decoder)).collect();
        assert_eq!(keys[0], (3, 0.01, Decoder::L1));
        assert_eq!(keys[1], (3, 0.01, Decoder::L2));
        assert_eq!(keys[7], (5, 0.02, Decoder::L2));
        for pair in stats.cells.chunks(2) {
            assert!(pair[1].offload_count <= pair[0].offload_count);
        }
        assert_eq!(series(&stats.cells).len(), 4);
    }
}
