//! Rational-point groups of linear algebraic groups over finite fields,
//! isogenies between them, and an exact census of subgroups of small index.

pub mod arith;
pub mod census;
pub mod cli;
pub mod error;
pub mod ffield;
pub mod group;
pub mod homs;
pub mod matgroup;
pub mod orderform;

pub use error::{Error, Result};
