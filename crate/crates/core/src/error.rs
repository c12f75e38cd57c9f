use thiserror::Error;

/// Errors raised by the library.
///
/// Variants fall into two families: validation problems with the caller's
/// input, and numerical failures of a construction or search. The split is
/// exposed through [`Error::is_numerical`] so front-ends can map them to
/// distinct exit codes.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("character resolution failed: {0}")]
    CharacterResolution(String),
    #[error("character mod {modulus} is not primitive (conductor {conductor})")]
    NonPrimitive { modulus: u64, conductor: u64 },
    #[error("series is not invertible: a(1) = 0")]
    NonInvertible,
    #[error("series has no Euler product")]
    NoEulerProduct,
    #[error("real part {sigma} is below the supported half-plane (sigma >= {min})")]
    SigmaTooSmall { sigma: f64, min: f64 },
    #[error("coefficient matrix is singular (|det| = {det_abs:e})")]
    SingularCoefficientMatrix { det_abs: f64 },
    #[error("|F_{index}({sigma})| = {value:e} is within 10x of its tail bound {bound:e}")]
    EvaluationTooClose { index: usize, sigma: f64, value: f64, bound: f64 },
    #[error("pivot combination vanishes at stage {stage} (|L| = {value:e}, bound {bound:e}); increase sigma")]
    PivotVanishes { stage: usize, value: f64, bound: f64 },
    #[error("elimination produced the zero vector")]
    ZeroVector,
    #[error("null space has dimension {nullity}, expected 1")]
    RankDeficient { nullity: usize },
    #[error("no beta <= {cap} satisfies the distance condition at stage {stage}")]
    BetaNotFound { stage: usize, cap: f64 },
    #[error("scan found a near-zero ({min:e}) inside the strip at stage {stage}")]
    EpsilonZero { stage: usize, min: f64 },
    #[error("all root numbers are equal")]
    AllRootNumbersEqual,
    #[error("solution space at sigma = {sigma} has dimension larger than N-2")]
    DimensionCollapse { sigma: f64 },
    #[error("functions do not share a functional equation: {0}")]
    IncompatibleFunctionalEquations(String),
    #[error("|L| = {min:e} on the rectangle boundary is too close to zero")]
    BoundaryTooClose { min: f64 },
    #[error("contour integration did not converge: {0}")]
    NoConvergence(String),
    #[error("Newton iteration diverged: {0}")]
    Diverged(String),
    #[error("no confirmed zeros in the scanned window")]
    NoZerosFound,
    #[error("tensor quadrature supports dimension <= 4, got {0}")]
    DimensionTooLarge(usize),
    #[error("tail model diverges: ratio * r = {0} >= 1")]
    DivergentTail(f64),
    #[error("derivative of the parametrisation vanishes at theta = {theta}")]
    DerivativeVanishes { theta: f64 },
}

impl Error {
    /// True for failures of a numerical procedure, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        !matches!(
            self,
            Error::InvalidInput(_)
                | Error::Parse { .. }
                | Error::CharacterResolution(_)
                | Error::NonPrimitive { .. }
                | Error::NonInvertible
                | Error::NoEulerProduct
                | Error::SigmaTooSmall { .. }
                | Error::IncompatibleFunctionalEquations(_)
                | Error::DimensionTooLarge(_)
        )
    }

    /// Stable identifier used in machine-readable error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "InvalidInput",
            Error::Parse { .. } => "Parse",
            Error::CharacterResolution(_) => "CharacterResolution",
            Error::NonPrimitive { .. } => "NonPrimitive",
            Error::NonInvertible => "NonInvertible",
            Error::NoEulerProduct => "NoEulerProduct",
            Error::SigmaTooSmall { .. } => "SigmaTooSmall",
            Error::SingularCoefficientMatrix { .. } => "SingularCoefficientMatrix",
            Error::EvaluationTooClose { .. } => "EvaluationTooClose",
            Error::PivotVanishes { .. } => "PivotVanishes",
            Error::ZeroVector => "ZeroVector",
            Error::RankDeficient { .. } => "RankDeficient",
            Error::BetaNotFound { .. } => "BetaNotFound",
            Error::EpsilonZero { .. } => "EpsilonZero",
            Error::AllRootNumbersEqual => "AllRootNumbersEqual",
            Error::DimensionCollapse { .. } => "DimensionCollapse",
            Error::IncompatibleFunctionalEquations(_) => "IncompatibleFunctionalEquations",
            Error::BoundaryTooClose { .. } => "BoundaryTooClose",
            Error::NoConvergence(_) => "NoConvergence",
            Error::Diverged(_) => "Diverged",
            Error::NoZerosFound => "NoZerosFound",
            Error::DimensionTooLarge(_) => "DimensionTooLarge",
            Error::DivergentTail(_) => "DivergentTail",
            Error::DerivativeVanishes { .. } => "DerivativeVanishes",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
