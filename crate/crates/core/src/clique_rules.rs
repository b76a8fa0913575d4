//! Per-clique decision logic.
//!
//! A clique is one ancilla (the center) together with the same-type ancillas
//! it shares a data qubit with. Each rule looks only at the center bit and
//! the neighbor bits and proposes a set of data qubits to flip.

use arrayvec::ArrayVec;
use serde::Serialize;

use crate::error::Result;
use crate::lattice::{Lattice, Neighbor};
use crate::syndrome::SyndromeFrame;
use crate::{AncillaIndex, DataIndex};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NeighborBit {
    pub set: bool,
    pub shared_data: DataIndex,
}

/// What one clique can see of the current syndrome.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliqueView {
    pub center_set: bool,
    pub neighbor_bits: ArrayVec<NeighborBit, 4>,
    pub boundary_slots: ArrayVec<DataIndex, 4>,
}

impl CliqueView {
    pub fn new(center_set: bool, neighbor_bits: &[(bool, DataIndex)], boundary_slots: &[DataIndex]) -> Self {
        CliqueView {
            center_set,
            neighbor_bits: neighbor_bits.iter().map(|&(set, shared_data)| NeighborBit { set, shared_data }).collect(),
            boundary_slots: boundary_slots.iter().copied().collect(),
        }
    }

    /// View of `ancilla`'s clique against `frame`.
    pub fn observe(lattice: &Lattice, frame: &SyndromeFrame, ancilla: AncillaIndex) -> Result<Self> {
        let anc = lattice.ancilla(ancilla)?;
        let mut view = CliqueView {
            center_set: frame.get(ancilla),
            neighbor_bits: ArrayVec::new(),
            boundary_slots: ArrayVec::new(),
        };
        for entry in &anc.clique {
            match entry.neighbor {
                Neighbor::Ancilla(b) => {
                    view.neighbor_bits.push(NeighborBit { set: frame.get(b), shared_data: entry.shared_data })
                }
                Neighbor::Boundary => view.boundary_slots.push(entry.shared_data),
            }
        }
        Ok(view)
    }

    pub fn set_neighbor_count(&self) -> usize {
        self.neighbor_bits.iter().filter(|n| n.set).count()
    }

    fn set_neighbor_data(&self) -> CliqueAction {
        CliqueAction { flips: self.neighbor_bits.iter().filter(|n| n.set).map(|n| n.shared_data).collect() }
    }
}

/// Data qubits a clique decides to flip. Always within the clique's support.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CliqueAction {
    pub flips: ArrayVec<DataIndex, 4>,
}

impl CliqueAction {
    pub fn none() -> Self {
        CliqueAction::default()
    }

    pub fn is_empty(&self) -> bool {
        self.flips.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    /// Center set with an odd number of set neighbors.
    Length1,
    /// Center unset with an even, nonzero number of set neighbors.
    Length2,
    /// Center set, no set neighbor, and a support qubit on the boundary.
    EdgeCorner,
}

impl Rule {
    pub fn apply(self, view: &CliqueView) -> CliqueAction {
        match self {
            Rule::Length1 => l1_interior(view),
            Rule::Length2 => l2_rule(view),
            Rule::EdgeCorner => edge_corner_rule(view),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Rule::Length1 => "length-1",
            Rule::Length2 => "length-2",
            Rule::EdgeCorner => "edge-corner",
        }
    }
}

/// An isolated error seen from an active clique: flip toward every set neighbor.
pub fn l1_interior(view: &CliqueView) -> CliqueAction {
    if view.center_set && view.set_neighbor_count() % 2 == 1 {
        view.set_neighbor_data()
    } else {
        CliqueAction::none()
    }
}

/// A length-2 chain through an inactive center: flip toward both (or all
/// four) set neighbors. The center's parity is touched an even number of times.
pub fn l2_rule(view: &CliqueView) -> CliqueAction {
    let set = view.set_neighbor_count();
    if !view.center_set && set >= 2 && set.is_multiple_of(2) {
        view.set_neighbor_data()
    } else {
        CliqueAction::none()
    }
}

/// An active boundary clique with no active neighbor: the error sits on a
/// boundary slot. With two slots either choice is equivalent up to a
/// stabilizer; the lower index is taken.
pub fn edge_corner_rule(view: &CliqueView) -> CliqueAction {
    if !view.center_set || view.set_neighbor_count() != 0 {
        return CliqueAction::none();
    }
    match view.boundary_slots.iter().min() {
        Some(&q) => {
            let mut flips = ArrayVec::new();
            flips.push(q);
            CliqueAction { flips }
        }
        None => CliqueAction::none(),
    }
}
