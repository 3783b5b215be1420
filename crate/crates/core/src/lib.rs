//! Linearly recurrent Cantor systems built from ordered Kakutani-Rohlin tower
//! data, with exact and adaptive-precision eigenvalue diagnostics.

pub mod coding;
pub mod example_ab;
pub mod linalg;
pub mod markov;
pub mod scalar;
pub mod spectral;
pub mod substitution;
pub mod system_spec;
pub mod tower;

pub use coding::{CodingError, Fill, PointCode};
pub use example_ab::{build_example, Choice, ExampleError};
pub use linalg::IntMatrix;
pub use markov::{MarkovError, MeasureSource};
pub use scalar::{AdaptiveReal, BoundedPrecision, QuadraticReal, Refine, Scalar, ScalarError};
pub use spectral::{EigenCandidate, Policy, SpectralError, SpectralReport, Verdict};
pub use substitution::{Substitution, SubstitutionError};
pub use system_spec::SystemSpec;
pub use tower::{LevelSource, LevelSpec, MatrixSet, MeasureVector, TowerError, TowerSystem};

/// Any failure raised by the library.
#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    Tower(#[from] TowerError),
    #[error(transparent)]
    Coding(#[from] CodingError),
    #[error(transparent)]
    Substitution(#[from] SubstitutionError),
    #[error(transparent)]
    Markov(#[from] MarkovError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Example(#[from] ExampleError),
}

/// Coarse failure category, e.g. for process exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorClass {
    /// Malformed or invalid input.
    Input,
    /// An enclosure could not be refined far enough.
    Precision,
    /// Too few levels or no usable measure.
    Insufficient,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        use ErrorClass::*;
        fn scalar(e: &ScalarError) -> ErrorClass {
            match e {
                ScalarError::PrecisionExhausted { .. } => Precision,
                _ => Input,
            }
        }
        fn tower(e: &TowerError) -> ErrorClass {
            match e {
                TowerError::DepthInsufficient { .. } | TowerError::NoExactStructure | TowerError::LevelOutOfRange { .. } => {
                    Insufficient
                }
                TowerError::Scalar(s) => scalar(s),
                _ => Input,
            }
        }
        fn coding(e: &CodingError) -> ErrorClass {
            match e {
                CodingError::LevelOutOfRange { .. } | CodingError::CarryOverflow => Insufficient,
                CodingError::Tower(t) => tower(t),
                _ => Input,
            }
        }
        match self {
            Error::Scalar(e) => scalar(e),
            Error::Tower(e) => tower(e),
            Error::Coding(e) => coding(e),
            Error::Substitution(e) => match e {
                SubstitutionError::DepthInsufficient { .. } | SubstitutionError::WordTooShort { .. } => Insufficient,
                SubstitutionError::Tower(t) => tower(t),
                _ => Input,
            },
            Error::Markov(e) => match e {
                MarkovError::MeasureUnavailable(_) => Insufficient,
                MarkovError::Tower(t) => tower(t),
                MarkovError::Scalar(s) => scalar(s),
                _ => Input,
            },
            Error::Spectral(e) => match e {
                SpectralError::TooShallow { .. } | SpectralError::NotFound { .. } => Insufficient,
                SpectralError::Scalar(s) => scalar(s),
                SpectralError::Tower(t) => tower(t),
                SpectralError::Coding(c) => coding(c),
                SpectralError::NotRebased(_) => Input,
            },
            Error::Example(e) => match e {
                ExampleError::TooShallow { .. } => Insufficient,
                ExampleError::Tower(t) => tower(t),
                ExampleError::IdentityViolation(_) => Input,
            },
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
