//! Error type shared by every module of the crate.

use thiserror::Error;

use crate::netmodel::{LabId, QubitId};

/// Everything that can go wrong while building or running a simulation.
#[derive(Debug, Error)]
pub enum Error {
    // --- state vectors and gates ---
    #[error("bit string has {got} bits, expected {expected}")]
    BitLength { expected: usize, got: usize },
    #[error("invalid bit character {0:?}, expected '0' or '1'")]
    BadBitChar(char),
    #[error("amplitude vector has length {got}, expected {expected}")]
    AmplitudeLength { expected: usize, got: usize },
    #[error("state has squared norm {0}, expected 1")]
    NotNormalized(f64),
    #[error("qubit {qubit} out of range for a {num_qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, num_qubits: usize },
    #[error("duplicate target qubit {0}")]
    DuplicateTarget(usize),
    #[error("matrix dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("matrix dimension {dim} does not match {targets} target qubits")]
    GateDimension { dim: usize, targets: usize },
    #[error("matrix is not unitary, residual {0:.2e}")]
    NotUnitary(f64),
    #[error("matrix is not Hermitian, residual {0:.2e}")]
    NotHermitian(f64),
    #[error("matrix trace is {0}, expected 1")]
    BadTrace(f64),
    #[error("matrix has negative eigenvalue {0:.2e}")]
    NegativeEigenvalue(f64),
    #[error("states have different qubit counts, {0} vs {1}")]
    QubitCountMismatch(usize, usize),
    #[error("requested measurement branch has probability {0:.2e}")]
    ImpossibleBranch(f64),
    #[error("measurement outcome has {got} bits for {expected} measured qubits")]
    OutcomeLength { expected: usize, got: usize },
    #[error("qubit {0} is still correlated with the rest of the register")]
    CorrelatedQubit(usize),
    #[error("invalid qubit permutation")]
    BadPermutation,

    // --- resource matrices and graphs ---
    #[error("resource matrix must be {expected}x{expected}, got {got} entries in a row")]
    MatrixShape { expected: usize, got: usize },
    #[error("resource matrix entry ({i},{j}) = {value} is not a finite nonnegative weight")]
    BadWeight { i: usize, j: usize, value: f64 },
    #[error("resource matrix is not symmetric at ({i},{j})")]
    NotSymmetric { i: usize, j: usize },
    #[error("resource matrix has nonzero diagonal entry at ({0},{0})")]
    NonzeroDiagonal(usize),
    #[error("edge weights are not uniform, found {0} and {1}")]
    NonUniformWeights(f64, f64),
    #[error("permutation enumeration is limited to 10 vertices, got {0}")]
    TooManyVertices(usize),
    #[error("operation is defined only for even lab counts, got {0}")]
    OddLabCount(usize),
    #[error("value {0} is not finite")]
    NotFinite(f64),

    // --- networks and protocols ---
    #[error("a network needs at least one lab")]
    EmptyNetwork,
    #[error("lab index {0} out of range for a {1}-lab network")]
    LabOutOfRange(usize, usize),
    #[error("qubit {0} is not live in this network")]
    UnknownQubit(QubitId),
    #[error("labs {0} and {1} share no unused entangled pair")]
    NoSharedPair(LabId, LabId),
    #[error("lab {0} cannot send a classical message to itself")]
    SelfMessage(LabId),
    #[error("gate targets span labs {0:?}, local operations may touch only one lab")]
    NonlocalGate(Vec<LabId>),
    #[error("cut sides overlap at lab {0}")]
    OverlappingCut(LabId),
    #[error("cut does not cover lab {0}")]
    IncompleteCut(LabId),
    #[error("hub protocol requires a fresh star network on {0} labs")]
    NotStarTopology(usize),
    #[error("protocol violated its contract: {0}")]
    ProtocolViolation(String),

    // --- command-line front end ---
    #[error("exhaustive mode is supported only for n <= 3 in hub runs, got {0}")]
    ExhaustiveTooLarge(usize),
    #[error("unitary spec {0:?} is not one of haar, identity, ps, or file:PATH")]
    BadUnitarySpec(String),
    #[error("network spec declares {spec} labs but the run requested {requested}")]
    NetworkSizeMismatch { spec: usize, requested: usize },
    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid JSON in {path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
