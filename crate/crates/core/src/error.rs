use thiserror::Error;

pub type Result<T, E = CliqueError> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CliqueError {
    #[error("invalid distance {0}: code distance must be odd and at least 3")]
    InvalidDistance(usize),
    #[error("ancilla index {index} out of range (lattice has {count} ancillas)")]
    AncillaOutOfRange { index: usize, count: usize },
    #[error("round {round} out of range (pattern has {rounds} rounds)")]
    RoundOutOfRange { round: usize, rounds: usize },
    #[error("persistence filter needs at least one frame")]
    EmptyFrames,
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("unrecognized value: {0}")]
    Parse(String),
    #[error("invalid noise configuration: {0}")]
    InvalidNoise(String),
    #[error("enumeration infeasible: {0}")]
    InfeasibleEnumeration(String),
    #[error("logistic fit needs at least 3 usable points, got {usable}")]
    InsufficientPoints { usable: usize },
    #[error("cells do not match: {0}")]
    CellMismatch(String),
    #[error("{0}")]
    Io(String),
}

impl From<std::io::Error> for CliqueError {
    fn from(err: std::io::Error) -> Self {
        CliqueError::Io(err.to_string())
    }
}

impl From<csv::Error> for CliqueError {
    fn from(err: csv::Error) -> Self {
        CliqueError::Io(err.to_string())
    }
}
