use crate::party::Role;
use crate::qstate::{BasisAxis, OutcomeSign};

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("state kind {kind} needs {expected} qubit labels, got {got}")]
    ArityMismatch {
        kind: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("state capacity exceeded: {requested} qubits (max {max})")]
    CapacityExceeded { requested: usize, max: usize },

    #[error("qubit index {index} out of range for {num_qubits}-qubit state")]
    QubitOutOfRange { index: usize, num_qubits: usize },

    #[error("duplicate qubit {index} in measurement assignment")]
    DuplicateQubit { index: usize },

    #[error("duplicate qubit label in state construction")]
    DuplicateLabel,

    #[error("cnot control and target must differ (both {index})")]
    CnotSameQubit { index: usize },

    #[error("forced projection has zero probability: qubit {qubit}, axis {axis:?}, sign {sign:?}")]
    ZeroProbability {
        qubit: usize,
        axis: BasisAxis,
        sign: OutcomeSign,
    },

    #[error("state vector has (near-)zero norm")]
    ZeroNorm,

    #[error("protocol layers only measure in X or Z, got {axis:?}")]
    ForbiddenAxis { axis: BasisAxis },

    #[error("duplicate role {role:?} in session topology")]
    DuplicateRole { role: Role },

    #[error("party {role:?} is not part of this session")]
    UnknownParty { role: Role },

    #[error("session topology must contain AUC")]
    MissingAuc,

    #[error("quantum delivery leg map does not match state ({legs} legs, {qubits} qubits)")]
    LegMismatch { legs: usize, qubits: usize },

    #[error("eavesdropper cannot intercept both channels at once")]
    EveBothChannels,

    #[error("malformed IMSI: {reason}")]
    InvalidImsi { reason: String },

    #[error("quantum key too short: {len} bits, minimum {min}")]
    InsufficientKey { len: usize, min: usize },

    #[error("state {kind} has no perfect Z correlation on channel {channel}")]
    NoZCorrelation { kind: &'static str, channel: char },

    #[error("window [{first}, {last}] out of range for bank of {capacity} cells")]
    WindowOutOfRange { first: u64, last: u64, capacity: u64 },

    #[error("position {position} was already consumed; quantum memory cells cannot be reused")]
    CellConsumed { position: u64 },

    #[error("basis contract wants {q} X picks out of a window of {m}")]
    ContractOutOfRange { q: usize, m: usize },

    #[error("combinatorics argument out of range: C({m}, {q})")]
    BinomialOutOfRange { m: u64, q: u64 },

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
