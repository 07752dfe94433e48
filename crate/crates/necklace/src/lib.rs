//! Exact symbolic engine for graded noncommutative formal symplectic geometry.
//!
//! Everything is computed over exact rationals: cyclic words with Koszul
//! rotation signs, the necklace Poisson bracket, canonical potentials of
//! symmetric quivers, the algebra extracted from a cubic potential, and the
//! cohomology of the truncated deformation complex.

pub mod algebra;
pub mod bracket;
pub mod complex;
pub mod conventions;
pub mod dsl;
pub mod quiver;
pub mod rank;
pub mod words;

pub use bracket::{differential_d, master_residual, necklace_bracket, Potential};
pub use quiver::{ExtData, SymmetricQuiver};
pub use words::{Alphabet, CyclicSeries, NcPoly, Scalar, VarId, Word};

use thiserror::Error;

/// Error type shared across the engine.
#[derive(Debug, Error)]
pub enum EngineError {
    #[error("word is not a composable path: {0}")]
    NotComposable(String),
    #[error("word is not a closed cycle: {0}")]
    NotClosed(String),
    #[error("unknown variable: {0}")]
    UnknownVariable(String),
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),
    #[error("variable {0} has no declared dual")]
    MissingDual(String),
    #[error("quiver validation failed ({code}): {message}")]
    InvalidQuiver { code: String, message: String },
    #[error("potential fails the master equation: {0}")]
    NotMaurerCartan(String),
    #[error("potential is not homogeneous cubic: {0}")]
    NotCubic(String),
    #[error("no normalization makes the degree-0 basis act as unit: {0}")]
    NotUnital(String),
    #[error("differential leaves the selected subcomplex: {0}")]
    SubcomplexViolation(String),
    #[error("parse error at line {line}, column {col}: {message}")]
    Parse { line: usize, col: usize, message: String },
}

pub type Result<T> = std::result::Result<T, EngineError>;
