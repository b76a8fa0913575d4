//! Ground truth for small lattices.
//!
//! Two errors are physically equivalent when they differ by an element of the
//! stabilizer group, the GF(2) span of the opposite-type plaquette supports.
//! [`StabilizerBasis`] keeps that span in reduced row-echelon form so
//! membership is a single reduction pass.

use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{CliqueError, Result};
use crate::lattice::Lattice;
use crate::noise::{NoiseConfig, NoiseSampler};
use crate::pipeline::{decode, Decoder};
use crate::syndrome::{effective_frame, SyndromeFrame};
use crate::{Bits, DataIndex};

/// Upper limit on patterns visited by [`exact_offload_probability`].
pub const MAX_ENUMERATION: u128 = 50_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizerBasis {
    /// `(pivot, row)`; each pivot is the lowest set bit of its row and is
    /// clear in every other row.
    rows: Vec<(usize, Bits)>,
    width: usize,
}

impl StabilizerBasis {
    pub fn from_rows(width: usize, rows: impl IntoIterator<Item = Bits>) -> Self {
        let mut basis = StabilizerBasis { rows: Vec::new(), width };
        for row in rows {
            basis.insert(row);
        }
        basis
    }

    /// Basis for the errors that act trivially on the simulated sector.
    pub fn for_lattice(lattice: &Lattice) -> Self {
        let n = lattice.data_count();
        Self::from_rows(n, lattice.opposite_supports().iter().map(|s| indicator(n, s)))
    }

    fn reduce(&self, v: &mut Bits) {
        for (pivot, row) in &self.rows {
            if v[*pivot] {
                *v ^= row.as_bitslice();
            }
        }
    }

    /// Adds `row` to the span. Returns false if it was already dependent.
    pub fn insert(&mut self, mut row: Bits) -> bool {
        assert_eq!(row.len(), self.width);
        self.reduce(&mut row);
        let Some(pivot) = row.first_one() else {
            return false;
        };
        for (_, other) in self.rows.iter_mut() {
            if other[pivot] {
                *other ^= row.as_bitslice();
            }
        }
        self.rows.push((pivot, row));
        true
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn generators(&self) -> impl Iterator<Item = &Bits> {
        self.rows.iter().map(|(_, r)| r)
    }

    pub fn contains(&self, v: &Bits) -> Result<bool> {
        if v.len() != self.width {
            return Err(CliqueError::LengthMismatch { expected: self.width, found: v.len() });
        }
        let mut v = v.clone();
        self.reduce(&mut v);
        Ok(v.not_any())
    }
}

pub fn indicator(n: usize, support: &[DataIndex]) -> Bits {
    let mut v = Bits::repeat(false, n);
    for &q in support {
        let cur = v[q];
        v.set(q, !cur);
    }
    v
}

/// GF(2) membership of `residual` in the stabilizer group.
pub fn in_stabilizer_group(basis: &StabilizerBasis, residual: &Bits) -> Result<bool> {
    basis.contains(residual)
}

/// Parity of `residual` over the conjugate logical representative.
pub fn logical_parity(lattice: &Lattice, residual: &Bits) -> bool {
    lattice.conjugate_logical_support().iter().filter(|&&q| residual[q]).count() % 2 == 1
}

/// Syndrome-and-parity membership test; agrees with [`in_stabilizer_group`].
pub fn is_trivial_by_parity(lattice: &Lattice, residual: &Bits) -> bool {
    SyndromeFrame::of_data_flips(lattice, residual.iter_ones()).is_clear() && !logical_parity(lattice, residual)
}

fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn pattern_probability(n: usize, w: usize, p: f64) -> f64 {
    if p == 0.0 {
        return if w == 0 { 1.0 } else { 0.0 };
    }
    p.powi(w as i32) * (1.0 - p).powi((n - w) as i32)
}

/// Counts for one error weight during exhaustive enumeration.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct WeightClass {
    pub weight: usize,
    pub patterns: u64,
    pub offload: u64,
    /// Local outcomes whose residual is not a stabilizer.
    pub logical_failures: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExactOffload {
    pub probability: f64,
    /// Probability mass of all patterns heavier than `max_weight`.
    pub tail_bound: f64,
    pub max_weight: usize,
    pub by_weight: Vec<WeightClass>,
}

fn check_feasible(lattice: &Lattice, max_weight: usize) -> Result<()> {
    let d = lattice.distance();
    if d > 5 && max_weight > 3 {
        return Err(CliqueError::InfeasibleEnumeration(format!(
            "distance {d} with max weight {max_weight}: needs d <= 5 or max weight <= 3"
        )));
    }
    let n = lattice.data_count() as u64;
    let total: u128 = (0..=max_weight as u64).map(|w| binomial(n, w)).sum();
    if total > MAX_ENUMERATION {
        return Err(CliqueError::InfeasibleEnumeration(format!(
            "{total} patterns exceeds the limit of {MAX_ENUMERATION}"
        )));
    }
    Ok(())
}

/// Decodes each pattern and tallies offloads and logical failures.
fn tally(
    lattice: &Lattice,
    decoder: Decoder,
    basis: &StabilizerBasis,
    weight: usize,
    patterns: &[Vec<DataIndex>],
) -> WeightClass {
    let n = lattice.data_count();
    let (offload, logical_failures) = patterns
        .par_iter()
        .map(|combo| {
            let frame = SyndromeFrame::of_data_flips(lattice, combo.iter().copied());
            let outcome = decode(decoder, lattice, &frame);
            if !outcome.is_local() {
                return (1u64, 0u64);
            }
            let mut residual = indicator(n, combo);
            residual ^= outcome.corrections.as_bitslice();
            let ok = basis.contains(&residual).expect("widths agree");
            (0, u64::from(!ok))
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    WeightClass { weight, patterns: patterns.len() as u64, offload, logical_failures }
}

/// Decodes every data-error pattern of weight `<= max_weight` (no
/// measurement errors) and tallies offloads and logical failures per weight.
pub fn enumerate_weights(lattice: &Lattice, decoder: Decoder, max_weight: usize) -> Result<Vec<WeightClass>> {
    check_feasible(lattice, max_weight)?;
    let basis = StabilizerBasis::for_lattice(lattice);
    let n = lattice.data_count();
    Ok((0..=max_weight.min(n))
        .map(|w| {
            let combos: Vec<Vec<usize>> = (0..n).combinations(w).collect();
            tally(lattice, decoder, &basis, w, &combos)
        })
        .collect())
}

/// Length-2 chains: pairs of data qubits sharing a check, each also covered
/// by a second check, so the syndrome is two set ancillas around an unset one.
pub fn adjacent_pairs(lattice: &Lattice) -> Vec<(DataIndex, DataIndex)> {
    let mut pairs: Vec<(DataIndex, DataIndex)> = lattice
        .ancillas()
        .iter()
        .flat_map(|a| a.support.iter().copied().tuple_combinations())
        .filter(|&(x, y)| lattice.checks_of(x).len() == 2 && lattice.checks_of(y).len() == 2)
        .map(|(x, y)| (x.min(y), x.max(y)))
        .collect();
    pairs.sort_unstable();
    pairs.dedup();
    pairs
}

/// Tally over [`adjacent_pairs`].
pub fn adjacent_pair_class(lattice: &Lattice, decoder: Decoder) -> WeightClass {
    let basis = StabilizerBasis::for_lattice(lattice);
    let patterns: Vec<Vec<DataIndex>> = adjacent_pairs(lattice).into_iter().map(|(x, y)| vec![x, y]).collect();
    tally(lattice, decoder, &basis, 2, &patterns)
}

/// Exact probability that `decoder` offloads a cycle, truncated at
/// `max_weight`, under independent data flips at `rate` and no measurement error.
pub fn exact_offload_probability(
    lattice: &Lattice,
    decoder: Decoder,
    rate: f64,
    max_weight: usize,
) -> Result<ExactOffload> {
    let by_weight = enumerate_weights(lattice, decoder, max_weight)?;
    Ok(offload_from_classes(lattice, rate, by_weight))
}

/// Weights the per-class offload counts by the binomial pattern probability.
pub fn offload_from_classes(lattice: &Lattice, rate: f64, by_weight: Vec<WeightClass>) -> ExactOffload {
    let n = lattice.data_count();
    let max_weight = by_weight.iter().map(|c| c.weight).max().unwrap_or(0);
    let probability = by_weight.iter().map(|c| c.offload as f64 * pattern_probability(n, c.weight, rate)).sum();
    let tail_bound =
        (max_weight + 1..=n).map(|w| binomial(n as u64, w as u64) as f64 * pattern_probability(n, w, rate)).sum();
    ExactOffload { probability, tail_bound, max_weight, by_weight }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LogicalErrorRate {
    pub cycles: u64,
    pub local_cycles: u64,
    pub logical_failures: u64,
    /// `logical_failures / local_cycles`, 0 when nothing was local.
    pub fraction: f64,
}

/// Among sampled cycles that decode locally from their pure data syndrome,
/// the fraction whose residual error is not a stabilizer.
pub fn local_logical_error_rate(
    lattice: &Lattice,
    decoder: Decoder,
    config: &NoiseConfig,
    cycles: u64,
) -> Result<LogicalErrorRate> {
    let mut config = config.clone();
    config.measurement_rounds = 1;
    config.measurement_rate = 0.0;
    let sampler = NoiseSampler::new(lattice, &config)?;
    let basis = StabilizerBasis::for_lattice(lattice);
    let (local_cycles, logical_failures) = (0..cycles)
        .into_par_iter()
        .map(|c| {
            let pattern = sampler.sample(c);
            let frame = effective_frame(lattice, &pattern).expect("one round");
            let outcome = decode(decoder, lattice, &frame);
            if !outcome.is_local() {
                return (0u64, 0u64);
            }
            let mut residual = pattern.data_flips;
            residual ^= outcome.corrections.as_bitslice();
            (1, u64::from(!basis.contains(&residual).expect("widths agree")))
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    let fraction = if local_cycles == 0 { 0.0 } else { logical_failures as f64 / local_cycles as f64 };
    Ok(LogicalErrorRate { cycles, local_cycles, logical_failures, fraction })
}
