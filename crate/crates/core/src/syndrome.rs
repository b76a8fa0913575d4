//! Syndrome extraction and the multi-round persistence filter.

use serde::{Serialize, Serializer};

use crate::error::{CliqueError, Result};
use crate::lattice::Lattice;
use crate::noise::ErrorPattern;
use crate::{AncillaIndex, Bits, DataIndex};

/// One bit per simulated-type ancilla.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SyndromeFrame {
    bits: Bits,
}

impl SyndromeFrame {
    pub fn zeros(len: usize) -> Self {
        SyndromeFrame { bits: Bits::repeat(false, len) }
    }

    pub fn from_bits(bits: Bits) -> Self {
        SyndromeFrame { bits }
    }

    pub fn from_set(len: usize, set: impl IntoIterator<Item = AncillaIndex>) -> Self {
        let mut frame = Self::zeros(len);
        for a in set {
            frame.bits.set(a, true);
        }
        frame
    }

    /// Pure data syndrome of a set of flipped data qubits. Repeated indices cancel.
    pub fn of_data_flips(lattice: &Lattice, flips: impl IntoIterator<Item = DataIndex>) -> Self {
        let mut frame = Self::zeros(lattice.ancilla_count());
        for q in flips {
            frame.apply_data_flip(lattice, q);
        }
        frame
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// No bit set.
    pub fn is_clear(&self) -> bool {
        self.bits.not_any()
    }

    pub fn get(&self, a: AncillaIndex) -> bool {
        self.bits[a]
    }

    pub fn set(&mut self, a: AncillaIndex, value: bool) {
        self.bits.set(a, value);
    }

    pub fn toggle(&mut self, a: AncillaIndex) {
        let v = self.bits[a];
        self.bits.set(a, !v);
    }

    pub fn count(&self) -> usize {
        self.bits.count_ones()
    }

    pub fn set_bits(&self) -> impl Iterator<Item = AncillaIndex> + '_ {
        self.bits.iter_ones()
    }

    pub fn bits(&self) -> &Bits {
        &self.bits
    }

    /// Toggles every ancilla whose support contains `q`.
    pub fn apply_data_flip(&mut self, lattice: &Lattice, q: DataIndex) {
        for &a in lattice.checks_of(q) {
            self.toggle(a);
        }
    }

    pub fn xor_with(&mut self, other: &SyndromeFrame) {
        self.bits ^= other.bits.as_bitslice();
    }

    pub fn and_with(&mut self, other: &SyndromeFrame) {
        self.bits &= other.bits.as_bitslice();
    }
}

impl Serialize for SyndromeFrame {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.set_bits())
    }
}

/// Data-qubit parity over each ancilla support, with round `round`'s
/// measurement flips XOR-ed on top.
pub fn extract(lattice: &Lattice, pattern: &ErrorPattern, round: usize) -> Result<SyndromeFrame> {
    let rounds = pattern.measurement_flips.len();
    if round >= rounds {
        return Err(CliqueError::RoundOutOfRange { round, rounds });
    }
    if pattern.data_flips.len() != lattice.data_count() {
        return Err(CliqueError::LengthMismatch { expected: lattice.data_count(), found: pattern.data_flips.len() });
    }
    let measurement = &pattern.measurement_flips[round];
    if measurement.len() != lattice.ancilla_count() {
        return Err(CliqueError::LengthMismatch { expected: lattice.ancilla_count(), found: measurement.len() });
    }
    let mut frame = SyndromeFrame::of_data_flips(lattice, pattern.data_flips.iter_ones());
    frame.bits ^= measurement.as_bitslice();
    Ok(frame)
}

/// Keeps only bits set in every round. A single frame passes through unchanged.
pub fn persistence_filter(frames: &[SyndromeFrame]) -> Result<SyndromeFrame> {
    let (first, rest) = frames.split_first().ok_or(CliqueError::EmptyFrames)?;
    let mut out = first.clone();
    for frame in rest {
        if frame.len() != out.len() {
            return Err(CliqueError::LengthMismatch { expected: out.len(), found: frame.len() });
        }
        out.and_with(frame);
    }
    Ok(out)
}

/// Extracts every round of `pattern` and filters them into one effective frame.
pub fn effective_frame(lattice: &Lattice, pattern: &ErrorPattern) -> Result<SyndromeFrame> {
    let data = SyndromeFrame::of_data_flips(lattice, pattern.data_flips.iter_ones());
    let mut out: Option<SyndromeFrame> = None;
    for measurement in &pattern.measurement_flips {
        let mut round = data.clone();
        round.bits ^= measurement.as_bitslice();
        match out.as_mut() {
            Some(acc) => acc.and_with(&round),
            None => out = Some(round),
        }
    }
    out.ok_or(CliqueError::EmptyFrames)
}
