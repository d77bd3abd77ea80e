//! Changepoint alternative and e-confidence regions for a single changepoint.
//!
//! The alternative mixes, uniformly over the split `n ∈ {1, .., N-1}`, two
//! independent Bernoulli segments with uniform priors on their success
//! probabilities:
//!
//! ```text
//! Q(z) = 1/(N-1) Σ_n B(k1+1, n-k1+1) · B(k2+1, N-n-k2+1)
//! ```
//!
//! with `k1`, `k2` the numbers of ones before and after the split. Testing a
//! hypothesised changepoint `τ` uses the same mixture with `n = τ` left out,
//! conditioned on the ones-counts of the two segments around `τ`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{log_beta_counts, log_binomial, log_sum, LogValue};
use crate::types::BinarySequence;

/// Ones-counts on either side of `tau`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChangepointSummary {
    pub tau: usize,
    pub k0: u64,
    pub k1: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceRegion {
    pub alpha: f64,
    pub members: Vec<usize>,
    /// `τ -> log10 E_τ` for every candidate changepoint.
    pub evalues: BTreeMap<usize, f64>,
}

/// Slack, in natural-log units, for the `E_τ <= 1/α` comparison.
const MEMBERSHIP_TOLERANCE: f64 = 1e-12;

fn prefix_ones(z: &BinarySequence) -> Vec<u64> {
    let mut prefix = Vec::with_capacity(z.len() + 1);
    prefix.push(0);
    let mut acc = 0;
    for &b in z.bits() {
        acc += u64::from(b);
        prefix.push(acc);
    }
    prefix
}

/// Per-split terms `B(k1+1, n-k1+1) B(k2+1, N-n-k2+1)` for `n = 1..N-1`
/// (index `n - 1`).
fn split_terms(z: &BinarySequence) -> Vec<LogValue> {
    let n_total = z.len() as u64;
    let prefix = prefix_ones(z);
    let ones = prefix[z.len()];
    (1..z.len())
        .map(|n| {
            let head = prefix[n];
            let tail = ones - head;
            let n = n as u64;
            log_beta_counts(head, n - head) * log_beta_counts(tail, n_total - n - tail)
        })
        .collect()
}

/// Changepoint-mixture probability of `z`.
pub fn cp_mixture_logprob(z: &BinarySequence) -> LogValue {
    log_sum(&split_terms(z)) / LogValue::from_linear((z.len() - 1) as f64)
}

/// Mass the changepoint mixture puts on sequences with `ones` ones.
///
/// Summing `C(n,k) B(k+1, n-k+1) = 1/(n+1)` over the feasible splits of the
/// ones gives `1/(N-1) Σ_n m(n) / ((n+1)(N-n+1))`, where `m(n)` counts the
/// feasible numbers of ones before the split.
pub fn cp_class_mass(n_total: usize, ones: usize) -> LogValue {
    let terms: f64 = (1..n_total)
        .map(|n| {
            let feasible = n.min(ones) + 1 - ones.saturating_sub(n_total - n);
            feasible as f64 / ((n + 1) as f64 * (n_total - n + 1) as f64)
        })
        .sum();
    LogValue::from_linear(terms / (n_total - 1) as f64)
}

/// Exchangeability e-value `C(N, N1) · Q(z) / Q(N1 ones)` for the changepoint
/// mixture.
pub fn cp_evalue(z: &BinarySequence) -> LogValue {
    let ones = z.ones();
    log_binomial(z.len() as u64, ones as i64) * cp_mixture_logprob(z) / cp_class_mass(z.len(), ones)
}

fn check_tau(z: &BinarySequence, tau: usize) -> Result<()> {
    if tau == 0 || tau >= z.len() {
        return Err(Error::TauRange {
            tau,
            max: z.len() - 1,
        });
    }
    Ok(())
}

pub fn cp_summary(z: &BinarySequence, tau: usize) -> Result<ChangepointSummary> {
    check_tau(z, tau)?;
    let k0 = z.bits()[..tau].iter().map(|&b| u64::from(b)).sum();
    let k1 = z.bits()[tau..].iter().map(|&b| u64::from(b)).sum();
    Ok(ChangepointSummary { tau, k0, k1 })
}

/// Sum over all sequences in the block `(τ, K0, K1)` of the split term at `n`.
///
/// For `n < τ` the split falls inside the first segment: with `j` ones among
/// the first `n` positions there are `C(n,j) C(τ-n, K0-j) C(N-τ, K1)` such
/// sequences, and `C(n,j) B(j+1, n-j+1) = 1/(n+1)`. The case `n > τ` is the
/// mirror image.
fn block_split_mass(n_total: u64, s: &ChangepointSummary, n: u64) -> LogValue {
    let tau = s.tau as u64;
    let ones = s.k0 + s.k1;
    let (inside, other_len, other_ones, gap, gap_ones, side_len) = if n < tau {
        // j ones in the head [1, n], K0 - j in (n, τ], the rest after the split.
        (n, n_total - tau, s.k1, tau - n, s.k0, n_total - n)
    } else {
        // j ones in the tail (n, N], K1 - j in (τ, n], the rest before the split.
        (n_total - n, tau, s.k0, n - tau, s.k1, n)
    };
    let lo = gap_ones.saturating_sub(gap);
    let hi = inside.min(gap_ones);
    let terms: Vec<LogValue> = (lo..=hi)
        .map(|j| {
            let rest = ones - j;
            log_binomial(gap, (gap_ones - j) as i64) * log_beta_counts(rest, side_len - rest)
        })
        .collect();
    log_binomial(other_len, other_ones as i64) * log_sum(&terms)
        / LogValue::from_linear((inside + 1) as f64)
}

fn tau_evalue_from_terms(z: &BinarySequence, terms: &[LogValue], tau: usize) -> Result<LogValue> {
    let s = cp_summary(z, tau)?;
    let n_total = z.len() as u64;
    let numerator: Vec<LogValue> = terms
        .iter()
        .enumerate()
        .filter(|&(i, _)| i + 1 != tau)
        .map(|(_, &t)| t)
        .collect();
    let block: Vec<LogValue> = (1..n_total)
        .filter(|&n| n != tau as u64)
        .map(|n| block_split_mass(n_total, &s, n))
        .collect();
    let size =
        log_binomial(tau as u64, s.k0 as i64) * log_binomial(n_total - tau as u64, s.k1 as i64);
    Ok(size * log_sum(&numerator) / log_sum(&block))
}

/// E-value for the null "the only changepoint is at `τ`".
pub fn cp_tau_evalue(z: &BinarySequence, tau: usize) -> Result<LogValue> {
    if z.len() < 3 {
        return Err(Error::HorizonTooSmall { n: z.len(), min: 3 });
    }
    check_tau(z, tau)?;
    tau_evalue_from_terms(z, &split_terms(z), tau)
}

/// `{τ : E_τ <= 1/α}` together with every `E_τ`.
pub fn cp_confidence_region(z: &BinarySequence, alpha: f64) -> Result<ConfidenceRegion> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::AlphaRange(alpha));
    }
    if z.len() < 3 {
        return Err(Error::HorizonTooSmall { n: z.len(), min: 3 });
    }
    let terms = split_terms(z);
    let values: Vec<(usize, LogValue)> = (1..z.len())
        .into_par_iter()
        .map(|tau| Ok((tau, tau_evalue_from_terms(z, &terms, tau)?)))
        .collect::<Result<_>>()?;
    let threshold = -alpha.ln() + MEMBERSHIP_TOLERANCE;
    let members = values
        .iter()
        .filter(|(_, e)| e.ln() <= threshold)
        .map(|&(tau, _)| tau)
        .collect();
    Ok(ConfidenceRegion {
        alpha,
        members,
        evalues: values.into_iter().map(|(t, e)| (t, e.log10())).collect(),
    })
}
