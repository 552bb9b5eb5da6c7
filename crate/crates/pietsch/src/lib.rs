//! Exact-arithmetic machinery for the Calkin–Pietsch correspondence on finite
//! semifinite models: singular value functions and decreasing rearrangements,
//! the transfer maps between dyadic sequences and step functions, dyadic
//! operator decompositions, singular traces built from shift-invariant
//! functionals, uniform majorization, and Δ-norm transfer.
//!
//! The exact tier works over arbitrary-precision rationals throughout; a
//! floating tier (tolerance `1e-9`) covers generic dense matrices. Every
//! identity the library is built around is verified by the `verify` module
//! and the `pietsch verify` CLI subcommand.

pub mod cli;
pub mod deltanorm;
pub mod dyadic;
pub mod error;
pub mod functionals;
pub mod json;
pub mod majorize;
pub mod opmodel;
pub mod rat;
pub mod sample;
pub mod seq;
pub mod step;
pub mod transfer;
pub mod verify;

pub use opmodel::Operator;

pub use error::{Error, Result};
pub use rat::Rat;
pub use seq::{DyadicSequence, IndexSet, Tail};
pub use step::StepFunction;
