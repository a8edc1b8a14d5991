//! Cut-set bounds on the zero-error computing capacity of directed acyclic
//! networks, and the codes that meet them.
//!
//! * [`network`]: topology, cut classification, max-flow, source splitting.
//! * [`function`]: target functions as dense truth tables.
//! * [`equivalence`]: the `(I, J, c)` partitions behind the `W` and `R` counts.
//! * [`bounds`]: min-cut and its prior variants, global-cut and single-source bounds.
//! * [`code`]: `(n, k)` codes, exhaustive verification and search.
//! * [`tree`]: optimal codes on multi-edge trees.
//! * [`instances`]: the bundled examples.

pub mod bounds;
pub mod code;
pub mod equivalence;
pub mod function;
pub mod instances;
pub mod network;
pub mod radix;
pub mod sets;
mod syntax;
pub mod tree;

use thiserror::Error;

pub use bounds::{BoundError, BoundKind, BoundOptions, BoundReport, BoundValue};
pub use code::{CodeError, NetworkCode};
pub use equivalence::{EquivalenceError, EquivalencePartition};
pub use function::{FunctionError, InputMatrix, TargetFunction};
pub use network::{Network, NetworkDesc, NetworkError};
pub use syntax::ParseError;
pub use tree::TreeError;

/// Any failure from the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Function(#[from] FunctionError),
    #[error(transparent)]
    Equivalence(#[from] EquivalenceError),
    #[error(transparent)]
    Bound(#[from] BoundError),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

impl Error {
    /// True for refusals caused by a size budget rather than bad input.
    pub fn is_budget(&self) -> bool {
        match self {
            Error::Bound(e) => e.is_budget(),
            Error::Code(e) => e.is_budget(),
            Error::Tree(e) => e.is_budget(),
            Error::Function(FunctionError::TooLarge { .. }) => true,
            _ => false,
        }
    }
}
