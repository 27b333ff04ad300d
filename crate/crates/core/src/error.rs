use thiserror::Error;

use crate::decomposition::PdViolation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("variable `{0}` has no assigned value")]
    MissingVariable(String),

    #[error("coefficient denominator vanishes modulo {0}")]
    DenominatorVanishes(u64),

    #[error("result exceeds the term cap of {cap} terms")]
    TermCap { cap: usize },

    #[error("malformed circuit: {0}")]
    MalformedCircuit(String),

    #[error("layering violation at g{gate}: {reason}")]
    Layering { gate: usize, reason: String },

    #[error("circuit is not weakly skew (multiplication gate g{0})")]
    NotWeaklySkew(usize),

    #[error("circuit is not a formula")]
    NotFormula,

    #[error("register index error: {0}")]
    Register(String),

    #[error("invalid path decomposition: {0}")]
    InvalidDecomposition(PdViolation),

    #[error("matrix is not square: {0}")]
    NonSquare(String),

    #[error("matrix or graph is not symmetric: {0}")]
    NotSymmetric(String),

    #[error("{what}: line {line}: {msg}")]
    Parse {
        what: &'static str,
        line: usize,
        msg: String,
    },

    #[error("malformed term: {0}")]
    MalformedTerm(String),

    #[error("clique to NLC preprocessing failed: {0}")]
    Preprocessing(String),

    #[error("{what} on {n} vertices exceeds the configured cap of {cap}")]
    SizeCap {
        what: &'static str,
        n: usize,
        cap: usize,
    },

    #[error("directed cycle detected through vertex `{0}`")]
    CycleDetected(String),

    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),
}

impl From<PdViolation> for Error {
    fn from(v: PdViolation) -> Self {
        Error::InvalidDecomposition(v)
    }
}
