use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("map is not trace preserving (max deviation {deviation:.3e})")]
    NotTracePreserving { deviation: f64 },
    #[error("map is not completely positive (min Choi eigenvalue {min_eigenvalue:.3e})")]
    NotCompletelyPositive { min_eigenvalue: f64 },
    #[error("invalid density matrix: {0}")]
    InvalidState(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("dimension {dim} exceeds the configured cap {cap}")]
    ResourceLimit { dim: usize, cap: usize },
    #[error("reference state is not full rank (min eigenvalue {min_eigenvalue:.3e})")]
    SigmaNotFullRank { min_eigenvalue: f64 },
    #[error("channel is not GNS-symmetric (max deviation {deviation:.3e})")]
    NotGnsSymmetric { deviation: f64 },
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("ill-conditioned spectrum: eigenvalue modulus {modulus} lies just below the peripheral threshold")]
    IllConditionedSpectrum { modulus: f64 },
    #[error("inconsistent peripheral structure: {0}")]
    StructureInconsistent(String),
    #[error("negative time {0}")]
    NegativeTime(f64),
    #[error("error parameter delta = {0} out of range")]
    DeltaOutOfRange(f64),
    #[error("spectral gap is zero")]
    ZeroGap,
    #[error("fractional power {t} of a channel with negative eigenvalue {eta}")]
    FractionalPowerOfNegative { t: f64, eta: f64 },
    #[error("eigenvalues do not define a valid Pauli channel (min probability {min_probability:.3e})")]
    InvalidEigenvalues { min_probability: f64 },
    #[error("operator is not in the normalizer of the code")]
    NotInNormalizer,
    #[error("series `{0}` not present in curve")]
    SeriesMissing(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
