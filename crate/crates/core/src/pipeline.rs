//! Full-lattice decoding: color-scheduled rule sweeps and the two decoders.
//!
//! A sweep visits the four color classes in order A, B, C, D. Cliques of one
//! color read the same snapshot of the frame; their flips are applied together
//! and the frame is updated before the next color runs.

use serde::{Serialize, Serializer};

use crate::clique_rules::{CliqueView, Rule};
use crate::lattice::Lattice;
use crate::syndrome::SyndromeFrame;
use crate::{AncillaIndex, Bits, DataIndex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Deserialize)]
pub enum Decoder {
    #[serde(rename = "l1")]
    L1,
    #[serde(rename = "l2")]
    L2,
}

impl Decoder {
    pub fn name(self) -> &'static str {
        match self {
            Decoder::L1 => "l1",
            Decoder::L2 => "l2",
        }
    }

    /// Rule sweeps in execution order.
    pub fn stages(self) -> &'static [Rule] {
        match self {
            Decoder::L1 => &[Rule::Length1, Rule::EdgeCorner],
            Decoder::L2 => &[Rule::Length1, Rule::Length2, Rule::EdgeCorner],
        }
    }
}

impl Serialize for Decoder {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl std::fmt::Display for Decoder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Decoder {
    type Err = crate::CliqueError;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l1" => Ok(Decoder::L1),
            "l2" => Ok(Decoder::L2),
            other => Err(crate::CliqueError::Parse(format!("unknown decoder '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    Local,
    Offload,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StageAction {
    pub ancilla: AncillaIndex,
    pub flips: Vec<DataIndex>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StageRecord {
    pub rule: Rule,
    pub actions: Vec<StageAction>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecodeOutcome {
    #[serde(serialize_with = "serialize_ones")]
    pub corrections: Bits,
    pub residual_syndrome: SyndromeFrame,
    pub classification: Classification,
    pub stage_trace: Vec<StageRecord>,
}

fn serialize_ones<S: Serializer>(bits: &Bits, serializer: S) -> Result<S::Ok, S::Error> {
    serializer.collect_seq(bits.iter_ones())
}

impl DecodeOutcome {
    pub fn is_local(&self) -> bool {
        self.classification == Classification::Local
    }

    pub fn correction_indices(&self) -> Vec<DataIndex> {
        self.corrections.iter_ones().collect()
    }
}

/// One color-ordered sweep of `rule` over the whole lattice. Returns the
/// updated frame and every nonempty action in execution order.
pub fn color_sweep(lattice: &Lattice, frame: &SyndromeFrame, rule: Rule) -> (SyndromeFrame, Vec<StageAction>) {
    let mut corrections = Bits::repeat(false, lattice.data_count());
    let mut current = frame.clone();
    let actions = sweep_into(lattice, &mut current, rule, &mut corrections);
    (current, actions)
}

fn sweep_into(lattice: &Lattice, frame: &mut SyndromeFrame, rule: Rule, corrections: &mut Bits) -> Vec<StageAction> {
    let mut actions = Vec::new();
    if frame.is_clear() {
        return actions;
    }
    let mut flips: Vec<DataIndex> = Vec::new();
    for group in lattice.color_groups() {
        let snapshot = frame.clone();
        flips.clear();
        for &a in group {
            let view = CliqueView::observe(lattice, &snapshot, a).expect("color groups index valid ancillas");
            let action = rule.apply(&view);
            if !action.is_empty() {
                flips.extend_from_slice(&action.flips);
                actions.push(StageAction { ancilla: a, flips: action.flips.to_vec() });
            }
        }
        for &q in &flips {
            let v = corrections[q];
            corrections.set(q, !v);
            frame.apply_data_flip(lattice, q);
        }
    }
    actions
}

/// Runs `stages` in order, then classifies the residual. Both decoders are
/// instances of this; other orders are only useful for experiments.
pub fn decode_with_stages(lattice: &Lattice, frame: &SyndromeFrame, stages: &[Rule]) -> DecodeOutcome {
    let mut corrections = Bits::repeat(false, lattice.data_count());
    let mut residual = frame.clone();
    let mut stage_trace = Vec::with_capacity(stages.len());
    for &rule in stages {
        let actions = sweep_into(lattice, &mut residual, rule, &mut corrections);
        stage_trace.push(StageRecord { rule, actions });
    }
    let classification = if residual.is_clear() { Classification::Local } else { Classification::Offload };
    DecodeOutcome { corrections, residual_syndrome: residual, classification, stage_trace }
}

/// Length-1 sweep followed by the edge/corner sweep.
pub fn decode_l1(lattice: &Lattice, frame: &SyndromeFrame) -> DecodeOutcome {
    decode_with_stages(lattice, frame, Decoder::L1.stages())
}

/// Length-1, length-2, then edge/corner sweeps; anything left is offloaded.
pub fn decode_l2(lattice: &Lattice, frame: &SyndromeFrame) -> DecodeOutcome {
    decode_with_stages(lattice, frame, Decoder::L2.stages())
}

pub fn decode(decoder: Decoder, lattice: &Lattice, frame: &SyndromeFrame) -> DecodeOutcome {
    decode_with_stages(lattice, frame, decoder.stages())
}

/// Classification only, without building a trace.
pub fn classify(decoder: Decoder, lattice: &Lattice, frame: &SyndromeFrame) -> Classification {
    if frame.is_clear() {
        return Classification::Local;
    }
    let mut corrections = Bits::repeat(false, lattice.data_count());
    let mut residual = frame.clone();
    for &rule in decoder.stages() {
        sweep_into(lattice, &mut residual, rule, &mut corrections);
    }
    if residual.is_clear() {
        Classification::Local
    } else {
        Classification::Offload
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(l: &Lattice, positions: &[(usize, usize)]) -> SyndromeFrame {
        SyndromeFrame::from_set(l.ancilla_count(), positions.iter().map(|&(r, c)| l.ancilla_at(r, c).unwrap()))
    }

    #[test]
    fn empty_frame_is_local_without_actions() {
        let l = Lattice::build(5).unwrap();
        let f = SyndromeFrame::zeros(l.ancilla_count());
        let (after, actions) = color_sweep(&l, &f, Rule::Length2);
        assert!(after.is_clear() && actions.is_empty());
        for decoder in [Decoder::L1, Decoder::L2] {
            let out = decode(decoder, &l, &f);
            assert!(out.is_local());
            assert!(out.corrections.not_any());
        }
    }

    #[test]
    fn single_interior_error_is_local_for_l1() {
        let l = Lattice::build(7).unwrap();
        let q = l.data_index(3, 3);
        let out = decode_l1(&l, &SyndromeFrame::of_data_flips(&l, [q]));
        assert!(out.is_local());
        assert_eq!(out.correction_indices(), vec![q]);
    }

    #[test]
    fn lone_interior_defect_is_offloaded() {
        let l = Lattice::build(7).unwrap();
        let f = set(&l, &[(3, 3)]);
        for decoder in [Decoder::L1, Decoder::L2] {
            let out = decode(decoder, &l, &f);
            assert_eq!(out.classification, Classification::Offload);
            assert_eq!(out.residual_syndrome, f);
            assert!(out.corrections.not_any());
        }
    }

    #[test]
    fn interior_pair_needs_l2() {
        let l = Lattice::build(7).unwrap();
        // qubits (2,2) and (2,3) share the ancilla at plaquette (3,3)
        let pair = [l.data_index(2, 2), l.data_index(2, 3)];
        let f = SyndromeFrame::of_data_flips(&l, pair);
        assert_eq!(f.count(), 2);
        assert!(!decode_l1(&l, &f).is_local());
        let out = decode_l2(&l, &f);
        assert!(out.is_local());
        assert_eq!(out.stage_trace[1].actions.len(), 1);
    }

    #[test]
    fn trace_matches_corrections_and_residual() {
        let l = Lattice::build(9).unwrap();
        let flips = [l.data_index(1, 1), l.data_index(4, 4), l.data_index(4, 5), l.data_index(8, 0)];
        let f = SyndromeFrame::of_data_flips(&l, flips);
        for decoder in [Decoder::L1, Decoder::L2] {
            let out = decode(decoder, &l, &f);
            let mut xor = Bits::repeat(false, l.data_count());
            for stage in &out.stage_trace {
                for action in &stage.actions {
                    for &q in &action.flips {
                        let v = xor[q];
                        xor.set(q, !v);
                    }
                }
            }
            assert_eq!(xor, out.corrections);
            let mut expected = f.clone();
            expected.xor_with(&SyndromeFrame::of_data_flips(&l, out.corrections.iter_ones()));
            assert_eq!(expected, out.residual_syndrome);
            assert_eq!(out.is_local(), out.residual_syndrome.is_clear());
            assert_eq!(classify(decoder, &l, &f), out.classification);
        }
    }

    #[test]
    fn decoder_names_parse() {
        assert_eq!("l1".parse::<Decoder>().unwrap(), Decoder::L1);
        assert_eq!("L2".parse::<Decoder>().unwrap(), Decoder::L2);
        assert!("l3".parse::<Decoder>().is_err());
    }
}
