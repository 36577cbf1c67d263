//! Finite-window toolkit for translation-invariant Ramsey colourings and
//! adjacent Hindman sums.
//!
//! Every object here lives on a bounded window: colourings are explicit
//! tables, sequences are finite, and the halting set is replaced by finite
//! stage-wise enumerations. The reductions between the principles are
//! checked by brute-force witness search.

pub mod bitcomb;
pub mod colourings;
pub mod error;
pub mod oracle;
pub mod reductions;
pub mod search;
pub mod sums;

pub use colourings::{
    Colour, Colouring, DifferenceColouring, FiniteColouring, Mode, Shape, VectorDomain,
};
pub use error::{Error, Result};
pub use oracle::EnumerationOracle;
pub use reductions::{ReductionKind, ReductionReport};
pub use sums::IncreasingSequence;

/// Default cap on the number of colourings an exhaustive run may visit.
pub const DEFAULT_BUDGET: u64 = 1 << 24;
