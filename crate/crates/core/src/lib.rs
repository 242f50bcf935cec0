//! Exact-arithmetic toolkit for non-malleable extractors built from inner
//! products against BCH parity-check seed encodings, the reductions between
//! non-malleable and two-source extractors, and a 2-round privacy
//! amplification protocol over an actively adversarial channel.
//!
//! Everything here is desk-scale by design: bit widths are small enough that
//! the structural claims (column independence, preimage counts, extraction
//! errors, protocol robustness) can be checked exhaustively or by seeded
//! Monte Carlo, with probabilities kept in exact rational arithmetic until a
//! report boundary is reached.

pub mod adversary;
pub mod bits;
pub mod codes;
pub mod dist;
pub mod error;
pub mod extractors;
pub mod fields;
pub mod harness;
pub mod nmext;
pub mod protocol;

pub use bits::Bits;
pub use error::{Error, Result};
