use thiserror::Error;

/// Errors raised by the eidostate algebra, the models and the engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("eidostate must contain at least one state")]
    EmptyEidostate,

    #[error("copy count must be at least 1")]
    ZeroCopies,

    #[error("unregistered atom `{0}`")]
    UnknownAtom(String),

    #[error("eidostate is not uniform: {0}")]
    NonUniform(String),

    #[error("entropy comparison undecided at {bits} bits of precision")]
    PrecisionExhausted { bits: u32 },

    #[error("resource limit exceeded: {what} ({size} > {limit})")]
    ResourceLimit {
        what: &'static str,
        size: u64,
        limit: u64,
    },

    #[error("process is impossible: {0}")]
    ImpossibleProcess(String),

    #[error("invalid atom definition: {0}")]
    InvalidAtom(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("qubit budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("numerical rank deficiency: {0}")]
    RankDeficient(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
