//! Rotated surface code geometry for one check type.
//!
//! Data qubits sit on the integer grid `(i, j)`, `0 <= i, j < d`. Plaquettes
//! sit at `(r, c)`, `0 <= r, c <= d`, and act on the up-to-four data qubits
//! `(r-1, c-1), (r-1, c), (r, c-1), (r, c)`. A plaquette is of the simulated
//! type when `r + c` is even; the simulated type owns the weight-2 plaquettes
//! on the top and bottom rows, the opposite type owns those on the left and
//! right columns. Corner plaquettes (weight 1) never exist.

use arrayvec::ArrayVec;
use serde::Serialize;

use crate::error::{CliqueError, Result};
use crate::{AncillaIndex, DataIndex};

/// Largest distance the simulator accepts.
pub const MAX_DISTANCE: usize = 31;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Color {
    A,
    B,
    C,
    D,
}

impl Color {
    pub const ALL: [Color; 4] = [Color::A, Color::B, Color::C, Color::D];

    fn from_parity(u: usize, v: usize) -> Self {
        match (u % 2, v % 2) {
            (0, 0) => Color::A,
            (1, 0) => Color::B,
            (0, _) => Color::C,
            _ => Color::D,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Far end of a clique link: another same-type ancilla or the lattice boundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Neighbor {
    Ancilla(AncillaIndex),
    Boundary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct CliqueEntry {
    pub neighbor: Neighbor,
    pub shared_data: DataIndex,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ancilla {
    pub row: usize,
    pub col: usize,
    /// Support in `(r-1,c-1), (r-1,c), (r,c-1), (r,c)` order, clipped to the grid.
    pub support: Vec<DataIndex>,
    /// One entry per support qubit, same order as `support`.
    pub clique: Vec<CliqueEntry>,
    /// Support qubits not shared with any other simulated-type ancilla.
    pub boundary_slots: Vec<DataIndex>,
    pub color: Color,
}

impl Ancilla {
    pub fn weight(&self) -> usize {
        self.support.len()
    }

    /// Neighbor ancillas with the data qubit shared with each.
    pub fn neighbors(&self) -> impl Iterator<Item = (AncillaIndex, DataIndex)> + '_ {
        self.clique.iter().filter_map(|e| match e.neighbor {
            Neighbor::Ancilla(a) => Some((a, e.shared_data)),
            Neighbor::Boundary => None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    distance: usize,
    ancillas: Vec<Ancilla>,
    /// Simulated-type ancillas touching each data qubit (1 or 2).
    data_checks: Vec<ArrayVec<AncillaIndex, 2>>,
    /// Plaquette position -> ancilla index, `(d+1) x (d+1)` row-major.
    position_lookup: Vec<Option<AncillaIndex>>,
    opposite_supports: Vec<Vec<DataIndex>>,
    color_groups: [Vec<AncillaIndex>; 4],
    opposite_positions: Vec<(usize, usize)>,
    logical_support: Vec<DataIndex>,
    conjugate_logical_support: Vec<DataIndex>,
}

fn plaquette_support(d: usize, r: usize, c: usize) -> Vec<DataIndex> {
    let mut support = Vec::with_capacity(4);
    for (i, j) in [(r.wrapping_sub(1), c.wrapping_sub(1)), (r.wrapping_sub(1), c), (r, c.wrapping_sub(1)), (r, c)] {
        if i < d && j < d {
            support.push(i * d + j);
        }
    }
    support
}

fn is_simulated_plaquette(d: usize, r: usize, c: usize) -> bool {
    if !(r + c).is_multiple_of(2) {
        return false;
    }
    let interior = (1..d).contains(&r) && (1..d).contains(&c);
    let top_or_bottom = (r == 0 || r == d) && (1..d).contains(&c);
    interior || top_or_bottom
}

fn is_opposite_plaquette(d: usize, r: usize, c: usize) -> bool {
    if (r + c) % 2 != 1 {
        return false;
    }
    let interior = (1..d).contains(&r) && (1..d).contains(&c);
    let left_or_right = (c == 0 || c == d) && (1..d).contains(&r);
    interior || left_or_right
}

impl Lattice {
    /// Builds the distance-`distance` lattice. Deterministic in `distance`.
    pub fn build(distance: usize) -> Result<Self> {
        let d = distance;
        if d < 3 || d.is_multiple_of(2) || d > MAX_DISTANCE {
            return Err(CliqueError::InvalidDistance(distance));
        }
        let side = d + 1;
        let mut position_lookup = vec![None; side * side];
        let mut ancillas = Vec::with_capacity((d * d - 1) / 2);
        let mut opposite_supports = Vec::with_capacity((d * d - 1) / 2);
        let mut opposite_positions = Vec::with_capacity((d * d - 1) / 2);
        for r in 0..=d {
            for c in 0..=d {
                if is_simulated_plaquette(d, r, c) {
                    position_lookup[r * side + c] = Some(ancillas.len());
                    let u = (r + c) / 2;
                    // r - c is even and d is odd, so r - c + d - 1 is even and >= 0
                    let v = (r + d - 1 - c) / 2;
                    ancillas.push(Ancilla {
                        row: r,
                        col: c,
                        support: plaquette_support(d, r, c),
                        clique: Vec::new(),
                        boundary_slots: Vec::new(),
                        color: Color::from_parity(u, v),
                    });
                } else if is_opposite_plaquette(d, r, c) {
                    opposite_supports.push(plaquette_support(d, r, c));
                    opposite_positions.push((r, c));
                }
            }
        }

        let mut data_checks = vec![ArrayVec::<AncillaIndex, 2>::new(); d * d];
        for (a, anc) in ancillas.iter().enumerate() {
            for &q in &anc.support {
                data_checks[q].push(a);
            }
        }

        for (a, anc) in ancillas.iter_mut().enumerate() {
            let mut clique = Vec::with_capacity(anc.support.len());
            let mut boundary_slots = Vec::new();
            for &q in &anc.support {
                let other = data_checks[q].iter().copied().find(|&b| b != a);
                let neighbor = match other {
                    Some(b) => Neighbor::Ancilla(b),
                    None => {
                        boundary_slots.push(q);
                        Neighbor::Boundary
                    }
                };
                clique.push(CliqueEntry { neighbor, shared_data: q });
            }
            anc.clique = clique;
            anc.boundary_slots = boundary_slots;
        }

        let mut color_groups: [Vec<AncillaIndex>; 4] = Default::default();
        for (a, anc) in ancillas.iter().enumerate() {
            color_groups[anc.color.index()].push(a);
        }

        Ok(Lattice {
            distance: d,
            ancillas,
            data_checks,
            position_lookup,
            opposite_supports,
            opposite_positions,
            color_groups,
            logical_support: (0..d).collect(),
            conjugate_logical_support: (0..d).map(|i| i * d).collect(),
        })
    }

    pub fn distance(&self) -> usize {
        self.distance
    }

    pub fn data_count(&self) -> usize {
        self.distance * self.distance
    }

    pub fn ancilla_count(&self) -> usize {
        self.ancillas.len()
    }

    pub fn ancillas(&self) -> &[Ancilla] {
        &self.ancillas
    }

    pub fn ancilla(&self, index: AncillaIndex) -> Result<&Ancilla> {
        self.ancillas.get(index).ok_or(CliqueError::AncillaOutOfRange { index, count: self.ancillas.len() })
    }

    /// Ancilla at plaquette position `(r, c)`, if that plaquette is of the simulated type.
    pub fn ancilla_at(&self, r: usize, c: usize) -> Option<AncillaIndex> {
        let side = self.distance + 1;
        if r >= side || c >= side {
            return None;
        }
        self.position_lookup[r * side + c]
    }

    pub fn data_index(&self, i: usize, j: usize) -> DataIndex {
        debug_assert!(i < self.distance && j < self.distance);
        i * self.distance + j
    }

    pub fn data_position(&self, q: DataIndex) -> (usize, usize) {
        (q / self.distance, q % self.distance)
    }

    /// Simulated-type ancillas whose support contains data qubit `q`.
    pub fn checks_of(&self, q: DataIndex) -> &[AncillaIndex] {
        &self.data_checks[q]
    }

    pub fn clique_of(&self, ancilla: AncillaIndex) -> Result<&[CliqueEntry]> {
        Ok(&self.ancilla(ancilla)?.clique)
    }

    /// The four color classes in schedule order A, B, C, D.
    pub fn color_groups(&self) -> &[Vec<AncillaIndex>; 4] {
        &self.color_groups
    }

    /// Coordinates of an ancilla on the same-type sublattice, where clique
    /// neighbors are at unit Manhattan distance.
    pub fn sublattice_coords(&self, ancilla: AncillaIndex) -> (isize, isize) {
        let anc = &self.ancillas[ancilla];
        let (r, c, d) = (anc.row as isize, anc.col as isize, self.distance as isize);
        ((r + c) / 2, (r - c + d - 1) / 2)
    }

    /// Supports of the opposite-type plaquettes. Their GF(2) span is the set
    /// of errors that act trivially in the simulated sector.
    pub fn opposite_supports(&self) -> &[Vec<DataIndex>] {
        &self.opposite_supports
    }

    /// Plaquette positions `(r, c)` matching [`Lattice::opposite_supports`].
    pub fn opposite_positions(&self) -> &[(usize, usize)] {
        &self.opposite_positions
    }

    /// Top row of data qubits: an undetectable error chain (logical operator)
    /// in the simulated sector.
    pub fn logical_support(&self) -> &[DataIndex] {
        &self.logical_support
    }

    /// Left column of data qubits: the conjugate logical. An error with empty
    /// syndrome is a logical error iff it overlaps this set an odd number of times.
    pub fn conjugate_logical_support(&self) -> &[DataIndex] {
        &self.conjugate_logical_support
    }

    /// Unordered data-qubit pairs sharing a plaquette of either type.
    pub fn data_edges(&self) -> Vec<(DataIndex, DataIndex)> {
        let mut edges: Vec<(DataIndex, DataIndex)> = self
            .ancillas
            .iter()
            .map(|a| a.support.as_slice())
            .chain(self.opposite_supports.iter().map(Vec::as_slice))
            .flat_map(|s| {
                (0..s.len()).flat_map(move |x| (x + 1..s.len()).map(move |y| (s[x].min(s[y]), s[x].max(s[y]))))
            })
            .collect();
        edges.sort_unstable();
        edges.dedup();
        edges
    }
}
