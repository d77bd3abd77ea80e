//! Exchangeability e-values for binary sequences.
//!
//! The main object is the UMM e-value ([`evalues::umm`]): the likelihood ratio
//! of a uniform mixture of binary Markov chains, conditioned on the number of
//! ones, against the exchangeability null. Alongside it the crate provides the
//! benchmark quantities it is compared with, exact Eulerian-path counting for
//! Markov types, a changepoint alternative with e-confidence regions, Monte
//! Carlo experiment drivers, and brute-force enumeration oracles for small
//! horizons.

#![forbid(unsafe_code)]

pub mod changepoint;
pub mod combinatorics;
pub mod error;
pub mod evalues;
pub mod experiments;
pub mod markov_sim;
pub mod numerics;
pub mod oracle;
pub mod types;

pub use error::{Error, Result};
pub use numerics::LogValue;
pub use types::{exch_type, markov_type, parse_sequence, BinarySequence, ExchType, MarkovType};
