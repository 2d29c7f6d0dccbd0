use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("not hermitian: max |M - M^dagger| = {0:.3e}")]
    NotHermitian(f64),

    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),

    #[error("unphysical delta {0}: |delta| must be < 1")]
    UnphysicalDelta(f64),

    #[error("invalid meson parameters: {0}")]
    InvalidParams(String),

    #[error("invalid quasispin: {0}")]
    InvalidQuasispin(String),

    #[error("unknown basis tag `{0}`")]
    UnknownBasis(String),

    #[error("negative time {0}: evolution and observables are defined for t >= 0")]
    NegativeTime(f64),

    #[error("invalid integration step dt = {0}")]
    InvalidStep(f64),

    #[error("step too large (dt = {dt}): state left the physical region (deviation {deviation:.3e}); use a smaller dt")]
    StepTooLarge { dt: f64, deviation: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("layout mismatch: expected {expected}, found {found}")]
    LayoutMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("basis mismatch: expected {expected}, found {found}")]
    BasisMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("time ordering violated: t_n = {t_n} < t_m = {t_m}")]
    TimeOrdering { t_n: f64, t_m: f64 },

    #[error("probability {0} outside [0, 1]")]
    ProbabilityRange(f64),

    #[error("eigenvectors are not orthonormal (deviation {0:.3e})")]
    NotNormalized(f64),

    #[error("observable carries CP corrections; use cp_eigenvectors")]
    CpCorrected,

    #[error("no complementary time exists: {0}")]
    NoComplementaryTime(String),

    #[error("no root: {0}")]
    NoRoot(String),

    #[error("root diverges beyond t = {0}")]
    Divergence(f64),

    #[error("empty time grid")]
    EmptyGrid,

    #[error("time grid is not sorted ascending")]
    UnsortedGrid,

    #[error("unknown {kind} `{value}`")]
    UnknownTag { kind: &'static str, value: String },
}

pub type Result<T> = std::result::Result<T, Error>;
