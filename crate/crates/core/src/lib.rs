//! Dirichlet series, Dirichlet characters and constructions of linear
//! combinations with prescribed zeros and zero-free vertical strips.

pub mod arith;
pub mod characters;
pub mod convexity;
pub mod dseries;
pub mod error;
pub mod quad;
pub mod scalar;
pub mod scanner;
pub mod strips;
pub mod torus;

pub use error::{Error, Result};
pub use scalar::Real;

/// Complex scalar used by all high-level operations.
pub type C64 = num_complex::Complex64;
