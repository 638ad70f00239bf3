use thiserror::Error;

/// Errors reported by the library. Messages are stable; the CLI prints them verbatim.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid base {0}: base must be at least 2")]
    InvalidBase(u64),
    #[error("empty lcm")]
    EmptyLcm,
    #[error("lcm of zero is undefined")]
    ZeroInLcm,
    #[error("division by zero")]
    DivisionByZero,
    #[error("modulus must be at least 1")]
    ZeroModulus,
    #[error("initial value {0} is outside [0, 1)")]
    OutOfUnitInterval(String),
    #[error("insufficient precision")]
    InsufficientPrecision,
    #[error("insufficient guard bits")]
    InsufficientGuardBits,
    #[error("insufficient precision for requested steps")]
    InsufficientPrecisionForSteps,
    #[error("pole in perturbation at n={0}")]
    PoleInPerturbation(String),
    #[error("perturbation does not vanish")]
    PerturbationDoesNotVanish,
    #[error("too few steps: need at least {min}, got {got}")]
    TooFewSteps { min: usize, got: usize },
    #[error("boundary evaluation not absolutely convergent")]
    BoundaryNotConvergent,
    #[error("boundary point must be +1 or -1, got {0}")]
    InvalidBoundaryPoint(i64),
    #[error("nonlinear denominator factor")]
    NonlinearDenominator,
    #[error("unsupported root pattern: repeated non-integer root {0}")]
    UnsupportedRootPattern(String),
    #[error("Theorem applies to distinct roots only")]
    RepeatedRoots,
    #[error("outside convergence domain")]
    OutsideConvergenceDomain,
    #[error("empty sample")]
    EmptySample,
    #[error("need at least {min} samples, got {got}")]
    SampleTooShort { min: usize, got: usize },
    #[error("bases multiplicatively dependent")]
    BasesDependent,
    #[error("specs disagree")]
    SpecsDisagree,
    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),
    #[error("invalid spec: {}", .0.join("; "))]
    InvalidSpec(Vec<String>),
    #[error("unknown preset {0:?}")]
    UnknownPreset(String),
    #[error("malformed input: {0}")]
    Malformed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
