//! Local "clique" decoders for the rotated surface code.
//!
//! The crate simulates one Pauli sector of a distance-`d` rotated surface code,
//! injects errors under a few noise models, and runs two first-level decoders
//! over the resulting syndromes:
//!
//! - [`Decoder::L1`]: corrects isolated (length-1) errors plus the edge and
//!   corner special cases, offloading everything else.
//! - [`Decoder::L2`]: a four-stage pipeline that additionally corrects
//!   length-2 error chains in space.
//!
//! Every cycle is classified as [`Classification::Local`] (the local decoder
//! cleared the syndrome) or [`Classification::Offload`] (a full decoder would
//! be needed). The [`harness`] module turns those classifications into offload
//! fractions with confidence intervals, and [`oracle`] provides exact GF(2)
//! checks and exhaustive enumeration for small distances.
//!
//! ```
//! use clique_core::{decode_l2, Lattice, SyndromeFrame, Classification};
//!
//! let lattice = Lattice::build(5).unwrap();
//! // a single error on the data qubit at grid position (2, 2)
//! let q = lattice.data_index(2, 2);
//! let frame = SyndromeFrame::of_data_flips(&lattice, [q]);
//! let outcome = decode_l2(&lattice, &frame);
//! assert_eq!(outcome.classification, Classification::Local);
//! assert_eq!(outcome.correction_indices(), vec![q]);
//! ```

pub mod clique_rules;
pub mod error;
pub mod harness;
pub mod lattice;
pub mod noise;
pub mod oracle;
pub mod pipeline;
pub mod syndrome;

pub use clique_rules::{CliqueAction, CliqueView, NeighborBit, Rule};
pub use error::{CliqueError, Result};
pub use harness::{CellStats, LogisticFit, RunStats};
pub use lattice::{CliqueEntry, Color, Lattice, Neighbor};
pub use noise::{ErrorPattern, NoiseConfig, NoiseModel, NoiseSampler};
pub use oracle::StabilizerBasis;
pub use pipeline::{decode, decode_l1, decode_l2, Classification, DecodeOutcome, Decoder};
pub use syndrome::SyndromeFrame;

/// Bit-vector used for data-qubit and ancilla sets.
pub type Bits = bitvec::vec::BitVec<u64, bitvec::order::Lsb0>;

/// Index of a data qubit, `i * d + j` for grid position `(i, j)`.
pub type DataIndex = usize;

/// Index of a simulated-type ancilla in [`Lattice::ancillas`].
pub type AncillaIndex = usize;
