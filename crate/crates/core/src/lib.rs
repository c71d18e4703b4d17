//! Exact group arithmetic, orbit cocycles on virtually-Z extensions,
//! marked-word colorings of Cayley balls and random-walk diagnostics.

pub mod cayley;
pub mod cocycle;
pub mod coloring;
pub mod dynamics;
pub mod epset;
pub mod error;
pub mod group;
pub mod walk;

pub use error::{Error, Result};
pub use group::{GeneratingSet, Group, GroupElement, VirtZData};

/// Exact scalar for return probabilities.
pub type Exact = num_rational::BigRational;
/// Floating scalar for return probabilities.
pub type Float = f64;
