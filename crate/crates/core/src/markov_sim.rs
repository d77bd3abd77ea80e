//! Sequence generators for the null and the Markov alternatives.
//!
//! Each replication gets its own ChaCha8 stream: the key comes from the master
//! seed and the stream id is the replication index, so a replication's bits do
//! not depend on how replications are scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evalues::MarkovParams;
use crate::types::BinarySequence;

/// Name of the random-number algorithm, recorded in experiment metadata.
pub const GENERATOR_ALGORITHM: &str =
    "ChaCha8 (rand_chacha 0.3), key = seed_from_u64(seed), stream = replication index";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum GeneratorKind {
    /// Fair first bit, then the chain with the given transition probabilities.
    FixedMarkov(MarkovParams),
    /// `π01, π10 ~ U[0,1]` per replication, then as `FixedMarkov`.
    UmmMixture,
    /// Independent bits equal to 1 with probability `p`.
    IidBernoulli { p: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    pub horizon: usize,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn new(kind: GeneratorKind, horizon: usize, seed: u64) -> Result<Self> {
        if horizon < 2 {
            return Err(Error::Length(horizon));
        }
        match kind {
            GeneratorKind::FixedMarkov(p) => {
                MarkovParams::new(p.pi01, p.pi10)?;
            }
            GeneratorKind::IidBernoulli { p } if !(0.0..=1.0).contains(&p) => {
                return Err(Error::Param(format!("p = {p} is not a probability")));
            }
            _ => {}
        }
        Ok(GeneratorSpec {
            kind,
            horizon,
            seed,
        })
    }

    /// Stationary probabilities of the data-generating chain, when it has a
    /// single one.
    pub fn stationary(&self) -> Option<(f64, f64)> {
        match self.kind {
            GeneratorKind::FixedMarkov(p) => p.stationary().ok(),
            GeneratorKind::IidBernoulli { p } => Some((1.0 - p, p)),
            GeneratorKind::UmmMixture => None,
        }
    }
}

/// The random stream of one replication.
pub fn replication_rng(seed: u64, replication_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replication_index);
    rng
}

fn markov_chain<R: Rng>(rng: &mut R, params: MarkovParams, n: usize) -> Vec<u8> {
    let mut bits = Vec::with_capacity(n);
    let mut current = u8::from(rng.gen_bool(0.5));
    bits.push(current);
    for _ in 1..n {
        current = if current == 0 {
            u8::from(rng.gen_bool(params.pi01))
        } else {
            u8::from(!rng.gen_bool(params.pi10))
        };
        bits.push(current);
    }
    bits
}

/// Draws replication `replication_index` of `spec`.
pub fn generate(spec: &GeneratorSpec, replication_index: u64) -> BinarySequence {
    let mut rng = replication_rng(spec.seed, replication_index);
    let n = spec.horizon;
    let bits = match spec.kind {
        GeneratorKind::FixedMarkov(params) => markov_chain(&mut rng, params, n),
        GeneratorKind::UmmMixture => {
            let pi01: f64 = rng.gen();
            let pi10: f64 = rng.gen();
            markov_chain(&mut rng, MarkovParams { pi01, pi10 }, n)
        }
        GeneratorKind::IidBernoulli { p } => (0..n).map(|_| u8::from(rng.gen_bool(p))).collect(),
    };
    BinarySequence::new(bits).expect("generated bits are binary and n >= 2")
}

/// Stationary distribution `(π0, π1)` of an irreducible chain.
pub fn stationary(params: &MarkovParams) -> Result<(f64, f64)> {
    params.stationary()
}
