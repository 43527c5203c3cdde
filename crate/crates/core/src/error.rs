use thiserror::Error;

/// Everything that can go wrong below the CLI.
///
/// `kind()` gives the stable machine-readable name used in JSON error objects.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid family parameters: {0}")]
    InvalidFamilyParams(String),
    #[error("z coincides with a diagonal entry at index {index}")]
    PoleHit { index: i64 },
    #[error("ambiguous pole match near z: indices {0:?}")]
    AmbiguousMatch(Vec<i64>),
    #[error("sequence of length {len} too long for brute force (max {max})")]
    TooLong { len: usize, max: usize },
    #[error("negative input to tail bound")]
    NegativeInput,
    #[error("entry has a pole at the expansion point (index {index})")]
    PoleAtBase { index: i64 },
    #[error("custom spec has no tail metadata")]
    NoTailBound,
    #[error("window budget exhausted at N = {n} (estimate {estimate:e})")]
    Budget { n: usize, estimate: f64 },
    #[error("no usable index for the A(z) denominator")]
    DegenerateDenominator,
    #[error("z is too close to the spectrum: |F| = {value:e} below {threshold:e}")]
    NearSpectrum { value: f64, threshold: f64 },
    #[error("operation not available for this regularization class: {0}")]
    WrongClass(String),
    #[error("argument z = 0 is not allowed here")]
    ZeroArgument,
    #[error("extrapolation did not settle: spread {0:e}")]
    ExtrapolationDivergence(f64),
    #[error("function nearly vanishes on the contour at {re}+{im}i")]
    OnContourZero { re: f64, im: f64 },
    #[error("did not converge: {0}")]
    NonConvergent(String),
    #[error("subdivision depth exceeded ({0})")]
    DepthExceeded(usize),
    #[error("contour kept hitting zeros after jittering")]
    ContourDeadlock,
    #[error("inconsistent multiplicity: winding {winding}, derivative profile {profile}")]
    Inconsistent { winding: usize, profile: usize },
    #[error("window too small: need at least 5 entries, got {0}")]
    WindowTooSmall(usize),
    #[error("zero vector")]
    ZeroVector,
    #[error("|q| must lie in (0, 1), got {0}")]
    QOutOfRange(f64),
    #[error("argument at a pole of the special function")]
    PoleArgument,
    #[error("config error: {0}")]
    ConfigError(String),
}

impl Error {
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidFamilyParams(_) => "InvalidFamilyParams",
            Error::PoleHit { .. } => "PoleHit",
            Error::AmbiguousMatch(_) => "AmbiguousMatch",
            Error::TooLong { .. } => "TooLong",
            Error::NegativeInput => "NegativeInput",
            Error::PoleAtBase { .. } => "PoleAtBase",
            Error::NoTailBound => "NoTailBound",
            Error::Budget { .. } => "Budget",
            Error::DegenerateDenominator => "DegenerateDenominator",
            Error::NearSpectrum { .. } => "NearSpectrum",
            Error::WrongClass(_) => "WrongClass",
            Error::ZeroArgument => "ZeroArgument",
            Error::ExtrapolationDivergence(_) => "ExtrapolationDivergence",
            Error::OnContourZero { .. } => "OnContourZero",
            Error::NonConvergent(_) => "NonConvergent",
            Error::DepthExceeded(_) => "DepthExceeded",
            Error::ContourDeadlock => "ContourDeadlock",
            Error::Inconsistent { .. } => "Inconsistent",
            Error::WindowTooSmall(_) => "WindowTooSmall",
            Error::ZeroVector => "ZeroVector",
            Error::QOutOfRange(_) => "QOutOfRange",
            Error::PoleArgument => "PoleArgument",
            Error::ConfigError(_) => "ConfigError",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
