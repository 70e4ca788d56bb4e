use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not unitary (max residual {residual:.3e})")]
    NotUnitary { residual: f64 },

    #[error("matrix is not real orthogonal with unit determinant (residual {residual:.3e})")]
    NotSpecialOrthogonal { residual: f64 },

    #[error("matrix does not have the control-gate block form (residual {residual:.3e})")]
    NotBlockForm { residual: f64 },

    #[error("line {line} out of range for a {qubits}-qubit network")]
    LineOutOfRange { line: usize, qubits: usize },

    #[error("gate `{kind}` requires a {required}-qubit network, found {qubits}")]
    GateArity {
        kind: &'static str,
        required: usize,
        qubits: usize,
    },

    #[error("invalid U(p,r) pair ({p},{r})")]
    InvalidPair { p: usize, r: usize },

    #[error("extended phases are only defined for U(2,4) and U(3,4), not ({p},{r})")]
    UnsupportedExtension { p: usize, r: usize },

    #[error("diagonal gate needs {expected} phases, found {found}")]
    DiagonalLength { expected: usize, found: usize },

    #[error("mixed control orientations cannot be compressed")]
    MixedOrientation,

    #[error("expected only control gates, found `{kind}`")]
    NotControlGate { kind: &'static str },

    #[error("unsupported qubit count {0}")]
    UnsupportedQubits(usize),

    #[error("trace {0} outside [-1, 3]")]
    TraceOutOfRange(f64),

    #[error("cubic solution degenerate or inaccurate; dense fallback required")]
    CubicDegenerate,

    #[error("eigenvalues degenerate (separation {separation:.3e}); dense fallback required")]
    DegenerateSpectrum { separation: f64 },

    #[error("eigendecomposition did not converge")]
    NoConvergence,

    #[error("angle {0} too close to a singular point of the closed form")]
    NearSingular(f64),

    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("invalid basis label `{0}`")]
    InvalidBasis(String),

    #[error("index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("parameter out of range: {0}")]
    OutOfRange(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
