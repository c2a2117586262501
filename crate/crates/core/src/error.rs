use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max |m - m^dagger| = {deviation:.3e})")]
    NonHermitianInput { deviation: f64 },

    #[error("not a density matrix: {check}")]
    NotDensityMatrix { check: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("Kraus operators are not trace preserving (residual {residual:.3e})")]
    NotTracePreserving { residual: f64 },

    #[error("Kraus operator list is empty")]
    EmptyOperatorList,

    #[error("too many Kraus operators: {0} (at most {max})", max = crate::channels::MAX_KRAUS)]
    TooManyOperators(usize),

    #[error("operator is not unitary (residual {residual:.3e})")]
    NotUnitary { residual: f64 },

    #[error("channel is not unitary")]
    NotUnitaryChannel,

    #[error("invalid basis: {0}")]
    InvalidBasis(String),

    #[error("outside theorem scope: {0}")]
    TheoremScope(String),

    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),

    #[error("parse error: {0}")]
    Parse(String),
}
