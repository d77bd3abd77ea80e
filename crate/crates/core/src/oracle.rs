//! Exhaustive-enumeration reference implementations.
//!
//! Everything here walks all of `{0,1}^N` (or all strings over a small
//! alphabet) and is only meant for small horizons. Rational formulas are
//! evaluated exactly over big integers; the changepoint mixture, which has no
//! convenient rational form, uses log-Beta floats in a direct double loop.

use std::collections::HashMap;
use std::f64::consts::LN_2;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::combinatorics::MarkovGraph;
use crate::error::{Error, Result};
use crate::numerics::{log_beta_counts, log_sum, LogValue};
use crate::types::{BinarySequence, MarkovType};

/// Cap for the UMM enumerations.
pub const UMM_CAP: usize = 16;
/// Cap for the changepoint enumerations.
pub const CP_CAP: usize = 14;

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::Length(n));
    }
    if n > cap {
        return Err(Error::HorizonTooLarge { n, cap });
    }
    Ok(())
}

/// A probability measure on `{0,1}^N` given as a full table, indexed by the
/// sequence read as a binary number (first bit most significant).
#[derive(Debug, Clone)]
pub struct EnumeratedMeasure {
    n: usize,
    mass: Vec<LogValue>,
}

impl EnumeratedMeasure {
    /// Masses must cover all `2^n` sequences and sum to 1 within `1e-10`.
    pub fn new(n: usize, mass: Vec<LogValue>) -> Result<Self> {
        check_cap(n, 20)?;
        if mass.len() != 1usize << n {
            return Err(Error::Param(format!(
                "expected {} masses, got {}",
                1usize << n,
                mass.len()
            )));
        }
        let measure = EnumeratedMeasure { n, mass };
        let total = measure.total();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::Param(format!("masses sum to {total}")));
        }
        Ok(measure)
    }

    pub fn uniform(n: usize) -> Result<Self> {
        check_cap(n, 20)?;
        let p = LogValue::from_ln(-(n as f64) * LN_2);
        Self::new(n, vec![p; 1usize << n])
    }

    pub fn point_mass(z: &BinarySequence) -> Self {
        let n = z.len();
        assert!(n <= 20, "point mass on too long a sequence");
        let target = sequence_index(z);
        let mass = (0..1u64 << n)
            .map(|i| {
                if i == target {
                    LogValue::ONE
                } else {
                    LogValue::ZERO
                }
            })
            .collect();
        EnumeratedMeasure { n, mass }
    }

    pub fn horizon(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    pub fn mass(&self, index: u64) -> LogValue {
        self.mass[index as usize]
    }

    pub fn masses(&self) -> &[LogValue] {
        &self.mass
    }

    /// Linear total, summed in index order.
    pub fn total(&self) -> f64 {
        self.mass.iter().map(|m| m.ln().exp()).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (BinarySequence, LogValue)> + '_ {
        self.mass.iter().enumerate().map(move |(i, &m)| {
            (
                BinarySequence::from_index(i as u64, self.n).expect("n >= 2"),
                m,
            )
        })
    }
}

pub fn sequence_index(z: &BinarySequence) -> u64 {
    z.bits()
        .iter()
        .fold(0u64, |acc, &b| (acc << 1) | u64::from(b))
}

fn bit(index: u64, n: usize, i: usize) -> u64 {
    (index >> (n - 1 - i)) & 1
}

fn ln_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().expect("finite").ln();
    }
    let shift = bits - 64;
    (x >> shift).to_f64().expect("finite").ln() + shift as f64 * LN_2
}

/// Natural log of a positive rational, without overflow.
pub fn ln_rational(r: &BigRational) -> f64 {
    assert!(r > &BigRational::zero(), "log of nonpositive rational");
    let num = r.numer().to_biguint().expect("positive");
    let den = r.denom().to_biguint().expect("positive");
    ln_biguint(&num) - ln_biguint(&den)
}

fn rational_to_log(r: &BigRational) -> LogValue {
    if r.is_zero() {
        LogValue::ZERO
    } else {
        LogValue::from_ln(ln_rational(r))
    }
}

fn factorials(n: usize) -> Vec<BigInt> {
    let mut f = vec![BigInt::one(); n + 2];
    for k in 1..f.len() {
        f[k] = &f[k - 1] * BigInt::from(k);
    }
    f
}

/// Exact UMM-alternative probabilities of every sequence of length `n`,
/// evaluated from the two Beta integrals
/// `1/2 · ∫(1-π01)^N00 π01^N01 dπ01 · ∫π10^N10 (1-π10)^N11 dπ10`.
fn exact_umm_masses(n: usize) -> Vec<BigRational> {
    let f = factorials(n + 1);
    // ∫ p^a (1-p)^b dp = a! b! / (a+b+1)!
    let beta = |a: usize, b: usize| BigRational::new(&f[a] * &f[b], f[a + b + 1].clone());
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    (0..1u64 << n)
        .map(|idx| {
            let mut c = [0usize; 4];
            for i in 0..n - 1 {
                c[(bit(idx, n, i) * 2 + bit(idx, n, i + 1)) as usize] += 1;
            }
            &half * beta(c[0], c[1]) * beta(c[3], c[2])
        })
        .collect()
}

/// The UMM alternative on `{0,1}^n`.
pub fn enumerate_umm(n: usize) -> Result<EnumeratedMeasure> {
    check_cap(n, UMM_CAP)?;
    let mass = exact_umm_masses(n).iter().map(rational_to_log).collect();
    EnumeratedMeasure::new(n, mass)
}

/// Exact optimal e-variable for the UMM alternative against exchangeability,
/// `E(z) = |class(z)| · Q(z) / Q(class(z))`, tabulated for every sequence.
pub struct UmmOracle {
    n: usize,
    masses: Vec<BigRational>,
    class_mass: Vec<BigRational>,
    class_size: Vec<u64>,
}

impl UmmOracle {
    pub fn new(n: usize) -> Result<Self> {
        check_cap(n, UMM_CAP)?;
        let masses = exact_umm_masses(n);
        let mut class_mass = vec![BigRational::zero(); n + 1];
        let mut class_size = vec![0u64; n + 1];
        for (idx, m) in masses.iter().enumerate() {
            let k = (idx as u64).count_ones() as usize;
            class_mass[k] += m;
            class_size[k] += 1;
        }
        Ok(UmmOracle {
            n,
            masses,
            class_mass,
            class_size,
        })
    }

    pub fn horizon(&self) -> usize {
        self.n
    }

    /// Exact e-value of the sequence with the given index.
    pub fn exact(&self, index: u64) -> BigRational {
        let k = index.count_ones() as usize;
        BigRational::from_integer(BigInt::from(self.class_size[k])) * &self.masses[index as usize]
            / &self.class_mass[k]
    }

    pub fn evalue(&self, index: u64) -> LogValue {
        rational_to_log(&self.exact(index))
    }

    /// Exact `(t_*Q)({k})`.
    pub fn class_mass(&self, ones: usize) -> &BigRational {
        &self.class_mass[ones]
    }
}

/// Brute-force UMM e-value of a single sequence (enumerates `2^N`).
pub fn brute_umm(z: &BinarySequence) -> Result<LogValue> {
    let oracle = UmmOracle::new(z.len())?;
    Ok(oracle.evalue(sequence_index(z)))
}

/// Counts the sequences of length `n` whose Markov type is `mt`.
pub fn brute_type_count(mt: &MarkovType, n: usize) -> Result<u64> {
    check_cap(n, UMM_CAP)?;
    Ok((0..1u64 << n)
        .filter(|&idx| {
            let mut c = [0u64; 4];
            for i in 0..n - 1 {
                c[(bit(idx, n, i) * 2 + bit(idx, n, i + 1)) as usize] += 1;
            }
            let first = bit(idx, n, 0) as u8;
            let last = bit(idx, n, n - 1) as u8;
            (first, c[0], c[1], c[2], c[3], last)
                == (mt.first, mt.n00, mt.n01, mt.n10, mt.n11, mt.last)
        })
        .count() as u64)
}

/// Mean of an e-variable over one summary class.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassMean {
    pub summary: String,
    pub size: u64,
    pub mean: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EVariableReport {
    pub horizon: usize,
    pub classes: Vec<ClassMean>,
    pub max_mean: f64,
    pub passed: bool,
}

/// Threshold for class means in [`verify_evariable`].
pub const EVARIABLE_TOLERANCE: f64 = 1e-9;

/// Checks that `e` averages to at most 1 over every preimage of `t`.
pub fn verify_evariable<S, E, T>(e: E, t: T, n: usize) -> Result<EVariableReport>
where
    S: std::hash::Hash + Eq + std::fmt::Debug + Ord,
    E: Fn(&BinarySequence) -> LogValue,
    T: Fn(&BinarySequence) -> S,
{
    check_cap(n, UMM_CAP)?;
    let mut sums: HashMap<S, (u64, f64)> = HashMap::new();
    for idx in 0..1u64 << n {
        let z = BinarySequence::from_index(idx, n)?;
        let entry = sums.entry(t(&z)).or_insert((0, 0.0));
        entry.0 += 1;
        entry.1 += e(&z).ln().exp();
    }
    let mut keys: Vec<&S> = sums.keys().collect();
    keys.sort();
    let classes: Vec<ClassMean> = keys
        .into_iter()
        .map(|k| {
            let (size, total) = sums[k];
            ClassMean {
                summary: format!("{k:?}"),
                size,
                mean: total / size as f64,
            }
        })
        .collect();
    let max_mean = classes
        .iter()
        .map(|c| c.mean)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(EVariableReport {
        horizon: n,
        classes,
        max_mean,
        passed: max_mean <= 1.0 + EVARIABLE_TOLERANCE,
    })
}

/// Changepoint-mixture probability of the sequence `idx`, optionally leaving
/// out one split point, by a direct double loop. Returns the unnormalized sum
/// over splits of the two Beta integrals.
fn cp_split_sum(idx: u64, n: usize, skip: Option<usize>) -> LogValue {
    let mut terms = Vec::with_capacity(n);
    for split in 1..n {
        if Some(split) == skip {
            continue;
        }
        let head_ones = (0..split).map(|i| bit(idx, n, i)).sum::<u64>();
        let tail_ones = (split..n).map(|i| bit(idx, n, i)).sum::<u64>();
        let head = log_beta_counts(head_ones, split as u64 - head_ones);
        let tail = log_beta_counts(tail_ones, (n - split) as u64 - tail_ones);
        terms.push(head * tail);
    }
    log_sum(&terms)
}

/// The changepoint mixture on `{0,1}^n`.
pub fn enumerate_cp(n: usize) -> Result<EnumeratedMeasure> {
    check_cap(n, CP_CAP)?;
    let norm = LogValue::from_linear((n - 1) as f64);
    let mass = (0..1u64 << n)
        .map(|idx| cp_split_sum(idx, n, None) / norm)
        .collect();
    EnumeratedMeasure::new(n, mass)
}

/// Enumerated changepoint e-values against exchangeability.
pub struct CpOracle {
    n: usize,
    measure: EnumeratedMeasure,
    class_mass: Vec<f64>,
}

impl CpOracle {
    pub fn new(n: usize) -> Result<Self> {
        let measure = enumerate_cp(n)?;
        let mut class_mass = vec![0.0; n + 1];
        for idx in 0..1u64 << n {
            class_mass[idx.count_ones() as usize] += measure.mass(idx).ln().exp();
        }
        Ok(CpOracle {
            n,
            measure,
            class_mass,
        })
    }

    pub fn measure(&self) -> &EnumeratedMeasure {
        &self.measure
    }

    pub fn class_mass(&self, ones: usize) -> f64 {
        self.class_mass[ones]
    }

    pub fn evalue(&self, index: u64) -> LogValue {
        let k = index.count_ones() as usize;
        let size = crate::numerics::log_binomial(self.n as u64, k as i64);
        size * self.measure.mass(index) / LogValue::from_linear(self.class_mass[k])
    }
}

/// Enumerated per-changepoint e-values `E_τ` for one fixed `τ`.
pub struct CpTauOracle {
    n: usize,
    tau: usize,
    masses: Vec<LogValue>,
    block_mass: HashMap<(u64, u64), f64>,
}

impl CpTauOracle {
    pub fn new(n: usize, tau: usize) -> Result<Self> {
        check_cap(n, CP_CAP)?;
        if n < 3 {
            return Err(Error::HorizonTooSmall { n, min: 3 });
        }
        if tau == 0 || tau >= n {
            return Err(Error::TauRange { tau, max: n - 1 });
        }
        let norm = LogValue::from_linear((n - 2) as f64);
        let masses: Vec<LogValue> = (0..1u64 << n)
            .map(|idx| cp_split_sum(idx, n, Some(tau)) / norm)
            .collect();
        let mut block_mass = HashMap::new();
        for (idx, m) in masses.iter().enumerate() {
            *block_mass
                .entry(Self::block_of(idx as u64, n, tau))
                .or_insert(0.0) += m.ln().exp();
        }
        Ok(CpTauOracle {
            n,
            tau,
            masses,
            block_mass,
        })
    }

    fn block_of(idx: u64, n: usize, tau: usize) -> (u64, u64) {
        let k0 = (0..tau).map(|i| bit(idx, n, i)).sum();
        let k1 = (tau..n).map(|i| bit(idx, n, i)).sum();
        (k0, k1)
    }

    /// Total mass of the `Q_τ` measure; 1 up to rounding.
    pub fn total(&self) -> f64 {
        self.masses.iter().map(|m| m.ln().exp()).sum()
    }

    pub fn evalue(&self, index: u64) -> LogValue {
        let (k0, k1) = Self::block_of(index, self.n, self.tau);
        let size = crate::numerics::log_binomial(self.tau as u64, k0 as i64)
            * crate::numerics::log_binomial((self.n - self.tau) as u64, k1 as i64);
        size * self.masses[index as usize] / LogValue::from_linear(self.block_mass[&(k0, k1)])
    }
}

/// Groups every string of length `len` over `{0, .., m-1}` by its Markov
/// graph and counts the members of each group.
pub fn brute_graph_counts(m: usize, len: usize) -> HashMap<MarkovGraph, u64> {
    assert!(m >= 1 && len >= 1);
    let total = m.pow(len as u32);
    let mut counts = HashMap::new();
    let mut symbols = vec![0usize; len];
    for mut code in 0..total {
        for s in symbols.iter_mut().rev() {
            *s = code % m;
            code /= m;
        }
        *counts
            .entry(MarkovGraph::from_symbols(&symbols, m))
            .or_insert(0) += 1;
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{exch_type, markov_type};

    fn seq(s: &str) -> BinarySequence {
        s.parse().unwrap()
    }

    #[test]
    fn umm_measure_small_cases() {
        let q = enumerate_umm(2).unwrap();
        for m in q.masses() {
            assert!((m.ln().exp() - 0.25).abs() < 1e-15);
        }
        let q = enumerate_umm(3).unwrap();
        assert!((q.mass(0b010).ln().exp() - 0.125).abs() < 1e-15);
        for n in 2..=12 {
            assert!((enumerate_umm(n).unwrap().total() - 1.0).abs() < 1e-10);
        }
        assert_eq!(
            enumerate_umm(17).unwrap_err(),
            Error::HorizonTooLarge { n: 17, cap: 16 }
        );
    }

    #[test]
    fn brute_umm_examples() {
        assert!((brute_umm(&seq("010")).unwrap().ln() - 1.125f64.ln()).abs() < 1e-14);
        assert!(brute_umm(&seq("01")).unwrap().ln().abs() < 1e-14);
        let oracle = UmmOracle::new(3).unwrap();
        assert_eq!(
            oracle.exact(0b001),
            BigRational::new(BigInt::from(3), BigInt::from(4))
        );
        assert_eq!(
            oracle.class_mass(1),
            &BigRational::new(BigInt::from(1), BigInt::from(3))
        );
    }

    #[test]
    fn type_count_examples() {
        assert_eq!(brute_type_count(&markov_type(&seq("010")), 3).unwrap(), 1);
        let zeros = MarkovType::new(0, 7, 0, 0, 0, 0).unwrap();
        assert_eq!(brute_type_count(&zeros, 8).unwrap(), 1);
        assert_eq!(brute_type_count(&zeros, 7).unwrap(), 0);
    }

    #[test]
    fn evariable_check() {
        let r = verify_evariable(crate::evalues::umm, exch_type, 10).unwrap();
        assert!(r.passed);
        assert!(r.classes.iter().all(|c| (c.mean - 1.0).abs() < 1e-9));
        let r = verify_evariable(crate::evalues::elb, exch_type, 10).unwrap();
        assert!(r.passed);
        let r = verify_evariable(|_| LogValue::from_linear(2.0), exch_type, 6).unwrap();
        assert!(!r.passed);
        assert!((r.max_mean - 2.0).abs() < 1e-15);
    }

    #[test]
    fn cp_measure_small_cases() {
        let q = enumerate_cp(2).unwrap();
        for m in q.masses() {
            assert!((m.ln().exp() - 0.25).abs() < 1e-15);
        }
        let q = enumerate_cp(3).unwrap();
        assert!((q.mass(0).ln().exp() - 1.0 / 6.0).abs() < 1e-15);
        for n in 2..=12 {
            assert!((enumerate_cp(n).unwrap().total() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn cp_tau_measure_normalizes() {
        for n in 3..=8 {
            for tau in 1..n {
                let o = CpTauOracle::new(n, tau).unwrap();
                assert!((o.total() - 1.0).abs() < 1e-10);
            }
        }
        assert!(CpTauOracle::new(2, 1).is_err());
        assert!(CpTauOracle::new(5, 5).is_err());
    }

    #[test]
    fn graph_counts_partition_all_strings() {
        let counts = brute_graph_counts(3, 5);
        assert_eq!(counts.values().sum::<u64>(), 243);
    }
}
