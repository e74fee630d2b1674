//! Strong sparsification for 1-in-3-SAT.
//!
//! The library merges variables that take equal values in every solution of a
//! monotone 1-in-3 (or 2-in-3) instance, using the parity relaxation of the
//! 2-in-3 reading: twins are variables with equal images in the quotient
//! space, and cycles of the dominance relation are merged wholesale. A
//! brute-force oracle certifies merges on small instances.

pub mod addcomb;
pub mod error;
pub mod f2;
pub mod generators;
pub mod instance;
pub mod locolor;
pub mod oracle;
pub mod reduction;
pub mod sparsifier;

pub use error::{Error, Result};
