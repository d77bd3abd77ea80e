//! Exchangeability e-values against the uniformly mixed Markov (UMM)
//! alternative, and the benchmark quantities they are compared with.
//!
//! The alternative draws `π01, π10 ~ U[0,1]` independently, starts with a fair
//! bit, and then runs the binary Markov chain. The probability of any sequence
//! depends on it only through its Markov type:
//!
//! ```text
//! Q(z) = 1/2 · N00! N01! N10! N11! / ((N0* + 1)! (N1* + 1)!)
//! ```
//!
//! The UMM e-value is the likelihood ratio of `Q` conditioned on the number of
//! ones to the uniform distribution on that class. The class mass of `Q` is a
//! sum over Markov types compatible with `(N0, N1)`, which collapses into four
//! closed-form terms (one per choice of first and last bit), giving an O(N)
//! algorithm overall.

use std::collections::HashMap;
use std::f64::consts::{LN_2, PI};
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{log_binomial, log_factorial as lf, LogValue};
use crate::oracle::EnumeratedMeasure;
use crate::types::{exch_type, markov_type, BinarySequence, ExchType, MarkovType};

/// Transition probabilities of a binary Markov chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarkovParams {
    pub pi01: f64,
    pub pi10: f64,
}

impl MarkovParams {
    pub fn new(pi01: f64, pi10: f64) -> Result<Self> {
        for (name, p) in [("pi01", pi01), ("pi10", pi10)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Param(format!("{name} = {p} is not a probability")));
            }
        }
        Ok(MarkovParams { pi01, pi10 })
    }

    pub fn pi00(&self) -> f64 {
        1.0 - self.pi01
    }

    pub fn pi11(&self) -> f64 {
        1.0 - self.pi10
    }

    /// Stationary probabilities `(π0, π1) = (π10, π01) / (π01 + π10)`.
    pub fn stationary(&self) -> Result<(f64, f64)> {
        let total = self.pi01 + self.pi10;
        if total <= 0.0 {
            return Err(Error::ReducibleChain);
        }
        Ok((self.pi10 / total, self.pi01 / total))
    }
}

/// `ln(N00! N01! N10! N11! / ((N0*+1)! (N1*+1)!))`, the Beta-integral part of
/// the UMM alternative.
fn ln_beta_part(mt: &MarkovType) -> f64 {
    lf(mt.n00) + lf(mt.n01) + lf(mt.n10) + lf(mt.n11) - lf(mt.n0_star() + 1) - lf(mt.n1_star() + 1)
}

/// Probability under the UMM alternative of any one sequence of type `mt`.
pub fn umm_alternative_logprob(mt: &MarkovType) -> LogValue {
    LogValue::from_ln(ln_beta_part(mt) - LN_2)
}

/// Lower benchmark: alternative probability over the IID maximum likelihood
/// `(N0/N)^N0 (N1/N)^N1`.
///
/// Constant sequences are reported as [`Error::DegenerateType`], carrying the
/// value under the `0^0 = 1` convention.
pub fn lb(z: &BinarySequence) -> Result<LogValue> {
    let value = lb_with_convention(z);
    if exch_type(z).is_mixed() {
        Ok(value)
    } else {
        Err(Error::DegenerateType { convention: value })
    }
}

/// [`lb`] with `0^0 = 1` in the maximum-likelihood factor, never failing.
pub fn lb_with_convention(z: &BinarySequence) -> LogValue {
    let mt = markov_type(z);
    let et = exch_type(z);
    let n = et.horizon() as f64;
    let ml = |k: u64| {
        if k == 0 {
            0.0
        } else {
            k as f64 * (k as f64 / n).ln()
        }
    };
    umm_alternative_logprob(&mt) / LogValue::from_ln(ml(et.n0) + ml(et.n1))
}

/// Exchangeability lower benchmark `1/2 · C(N, N1) · N00!N01!N10!N11! /
/// ((N0*+1)!(N1*+1)!)`.
pub fn elb(z: &BinarySequence) -> LogValue {
    let mt = markov_type(z);
    let et = exch_type(z);
    umm_alternative_logprob(&mt) * log_binomial(et.horizon(), et.n1 as i64)
}

/// Upper benchmark: alternative probability over the IID likelihood with the
/// given stationary probabilities.
pub fn ub(z: &BinarySequence, pi0: f64, pi1: f64) -> Result<LogValue> {
    if !(0.0..=1.0).contains(&pi0) || !(0.0..=1.0).contains(&pi1) {
        return Err(Error::Param(format!(
            "({pi0}, {pi1}) are not probabilities"
        )));
    }
    if (pi0 + pi1 - 1.0).abs() > 1e-12 {
        return Err(Error::Param(format!("pi0 + pi1 = {} != 1", pi0 + pi1)));
    }
    let et = exch_type(z);
    let mut ln_null = 0.0;
    for (p, k) in [(pi0, et.n0), (pi1, et.n1)] {
        if k > 0 {
            if p == 0.0 {
                return Err(Error::Param(
                    "zero stationary probability for an observed symbol".into(),
                ));
            }
            ln_null += k as f64 * p.ln();
        }
    }
    Ok(umm_alternative_logprob(&markov_type(z)) / LogValue::from_ln(ln_null))
}

/// Sum over Markov types compatible with `(N0, N1)`, both positive, of
/// `n_{f,1-f} (N0-1)!(N1-1)! / ((n0*+1)!(n1*+1)!)`, split by first and last bit.
/// This is twice the class mass of the UMM alternative.
fn type_sum(n0: u64, n1: u64) -> f64 {
    debug_assert!(n0 > 0 && n1 > 0);
    let (a, b) = (n0 as u128, n1 as u128);
    let tri = |m: u128| m * (m + 1);
    let term = |num: u128, den: u128| num as f64 / den as f64;
    let ends_in_zero = 2 * a * b * (b + 1);
    let ends_in_one = 2 * a * (a + 1) * b;
    let mut sum = 0.0;
    // f = l = 0
    if n0 >= 2 {
        sum += term(tri((a - 1).min(b)), ends_in_zero);
    }
    // f = 0, l = 1
    sum += term(tri(a.min(b)), ends_in_one);
    // f = 1, l = 0
    sum += term(tri(a.min(b)), ends_in_zero);
    // f = l = 1
    if n1 >= 2 {
        sum += term(tri(a.min(b - 1)), ends_in_one);
    }
    sum
}

/// Push-forward mass `(t_*Q)({N1})` of the UMM alternative on the number of
/// ones.
pub fn umm_summary_mass(n0: u64, n1: u64) -> LogValue {
    let n = n0 + n1;
    assert!(n >= 2, "horizon must be at least 2");
    if n0 == 0 || n1 == 0 {
        return LogValue::from_ratio(1, 2 * n);
    }
    LogValue::from_linear(type_sum(n0, n1) / 2.0)
}

/// The UMM exchangeability e-value, in O(N).
///
/// Returns 1 for constant sequences. Otherwise the ratio of
/// `C(N,N1) · N00!N01!N10!N11! / ((N0*+1)!(N1*+1)!)` to the four-term type sum.
pub fn umm(z: &BinarySequence) -> LogValue {
    let et = exch_type(z);
    if !et.is_mixed() {
        return LogValue::ONE;
    }
    let mt = markov_type(z);
    umm_from_types(&mt, &et)
}

pub(crate) fn umm_from_types(mt: &MarkovType, et: &ExchType) -> LogValue {
    if !et.is_mixed() {
        return LogValue::ONE;
    }
    let unhalved_elb =
        log_binomial(et.horizon(), et.n1 as i64) * LogValue::from_ln(ln_beta_part(mt));
    unhalved_elb / LogValue::from_linear(type_sum(et.n0, et.n1))
}

/// e-power `Σ_z q(z) ln e(z)` over an enumerated measure. Sequences with zero
/// mass contribute nothing.
pub fn ep<F>(e: F, q: &EnumeratedMeasure) -> Result<f64>
where
    F: Fn(&BinarySequence) -> LogValue,
{
    let mut total = 0.0;
    for (z, mass) in q.iter() {
        if mass.is_zero() {
            continue;
        }
        let value = e(&z);
        if value.is_zero() {
            return Err(Error::Undefined);
        }
        total += mass.ln().exp() * value.ln();
    }
    Ok(total)
}

fn entropy(masses: impl Iterator<Item = f64>) -> f64 {
    masses.filter(|&p| p > 0.0).map(|p| -p * p.ln()).sum()
}

/// Maximum e-power of `q` against the compression model with summarising
/// statistic `t`: `∫ ln|t⁻¹(σ)| d(t_*q) + H(t_*q) − H(q)`, in nats.
pub fn mep<S, T>(t: T, q: &EnumeratedMeasure) -> f64
where
    S: Hash + Eq,
    T: Fn(&BinarySequence) -> S,
{
    let mut classes: HashMap<S, (u64, f64)> = HashMap::new();
    let mut masses = Vec::with_capacity(q.len());
    for (z, mass) in q.iter() {
        let p = mass.ln().exp();
        let entry = classes.entry(t(&z)).or_insert((0, 0.0));
        entry.0 += 1;
        entry.1 += p;
        masses.push(p);
    }
    let count_term: f64 = classes
        .values()
        .map(|&(size, p)| p * (size as f64).ln())
        .sum();
    count_term + entropy(classes.values().map(|&(_, p)| p)) - entropy(masses.into_iter())
}

/// `(2/3) ln 2 + (2/3) ln² 2 − π²/9 − 1/6`: the per-observation limit of the
/// `−H(Q)` term.
pub fn part_a() -> f64 {
    2.0 / 3.0 * LN_2 + 2.0 / 3.0 * LN_2 * LN_2 - PI * PI / 9.0 - 1.0 / 6.0
}

/// `2 ln 2 − π²/12`: the per-observation limit of the class-size term.
pub fn part_b() -> f64 {
    2.0 * LN_2 - PI * PI / 12.0
}

/// Limit of `ep_Q(UMM) / N` under the UMM alternative:
/// `(8/3) ln 2 + (2/3) ln² 2 − (7/36) π² − 1/6 ≈ 0.0829`.
pub fn mep_asymptotic_constant() -> f64 {
    8.0 / 3.0 * LN_2 + 2.0 / 3.0 * LN_2 * LN_2 - 7.0 / 36.0 * PI * PI - 1.0 / 6.0
}

/// Slack for bound comparisons on the log10 scale.
pub const BOUND_TOLERANCE: f64 = 1e-9;

/// Position of `UMM / ELB` relative to `[1, 2N]` and, for mixed sequences,
/// `[1, N]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub ratio_log10: f64,
    pub loose_ok: bool,
    pub tight_applicable: bool,
    pub tight_ok: bool,
}

impl BoundCheck {
    pub fn ratio(&self) -> f64 {
        10f64.powf(self.ratio_log10)
    }
}

pub(crate) fn bounds_from(ratio_log10: f64, n: u64, mixed: bool) -> BoundCheck {
    let n = n as f64;
    let above_one = ratio_log10 >= -BOUND_TOLERANCE;
    BoundCheck {
        ratio_log10,
        loose_ok: above_one && ratio_log10 <= (2.0 * n).log10() + BOUND_TOLERANCE,
        tight_applicable: mixed,
        tight_ok: mixed && above_one && ratio_log10 <= n.log10() + BOUND_TOLERANCE,
    }
}

pub fn check_bounds(z: &BinarySequence) -> BoundCheck {
    let et = exch_type(z);
    let ratio = umm(z) / elb(z);
    bounds_from(ratio.log10(), et.horizon(), et.is_mixed())
}

/// The four quantities for one sequence, as decimal logarithms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EValueReport {
    pub log10_umm: f64,
    pub log10_elb: f64,
    pub log10_lb: f64,
    /// True when the lower benchmark used the `0^0 = 1` convention.
    pub lb_degenerate: bool,
    pub log10_ub: Option<f64>,
    pub exch: ExchType,
    pub markov: MarkovType,
    pub bounds: BoundCheck,
}

/// Computes every quantity; the upper benchmark only when stationary
/// probabilities are supplied.
pub fn evaluate(z: &BinarySequence, ub_stationary: Option<(f64, f64)>) -> Result<EValueReport> {
    let log10_ub = match ub_stationary {
        Some((pi0, pi1)) => Some(ub(z, pi0, pi1)?.log10()),
        None => None,
    };
    let exch = exch_type(z);
    Ok(EValueReport {
        log10_umm: umm(z).log10(),
        log10_elb: elb(z).log10(),
        log10_lb: lb_with_convention(z).log10(),
        lb_degenerate: !exch.is_mixed(),
        log10_ub,
        exch,
        markov: markov_type(z),
        bounds: check_bounds(z),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::enumerate_umm;

    fn seq(s: &str) -> BinarySequence {
        s.parse().unwrap()
    }

    fn close(a: LogValue, b: f64) -> bool {
        (a.ln().exp() - b).abs() < 1e-12 * b.max(1.0)
    }

    #[test]
    fn alternative_examples() {
        assert!(close(
            umm_alternative_logprob(&markov_type(&seq("01"))),
            0.25
        ));
        assert!(close(
            umm_alternative_logprob(&markov_type(&seq("00000"))),
            0.1
        ));
        assert!(close(
            umm_alternative_logprob(&markov_type(&seq("010"))),
            0.125
        ));
    }

    #[test]
    fn lb_examples() {
        assert!(close(lb(&seq("010")).unwrap(), 27.0 / 32.0));
        assert!(close(lb(&seq("01")).unwrap(), 1.0));
        match lb(&seq("00000")) {
            Err(Error::DegenerateType { convention }) => assert!(close(convention, 0.1)),
            other => panic!("expected degenerate, got {other:?}"),
        }
    }

    #[test]
    fn elb_examples() {
        assert!(close(elb(&seq("010")), 0.375));
        assert!(close(elb(&seq("01")), 0.5));
        assert!(close(elb(&seq("00000")), 0.1));
    }

    #[test]
    fn ub_examples() {
        assert!(close(ub(&seq("010"), 0.5, 0.5).unwrap(), 1.0));
        assert!(close(ub(&seq("01"), 0.5, 0.5).unwrap(), 1.0));
        assert!(close(ub(&seq("00000"), 0.5, 0.5).unwrap(), 3.2));
        assert!(ub(&seq("010"), 0.5, 0.6).is_err());
        assert!(ub(&seq("010"), 1.0, 0.0).is_err());
        assert!(close(ub(&seq("00000"), 1.0, 0.0).unwrap(), 0.1));
    }

    #[test]
    fn summary_mass_examples() {
        assert!(close(umm_summary_mass(1, 1), 0.5));
        assert!(close(umm_summary_mass(2, 1), 1.0 / 3.0));
        assert!(close(umm_summary_mass(5, 0), 0.1));
        assert!(close(umm_summary_mass(0, 5), 0.1));
    }

    #[test]
    fn umm_examples() {
        assert!(close(umm(&seq("010")), 1.125));
        assert!(close(umm(&seq("001")), 0.75));
        assert!(close(umm(&seq("111111111")), 1.0));
        assert!(close(umm(&seq("01")), 1.0));
    }

    #[test]
    fn summary_mass_normalizes() {
        for n in [2u64, 3, 7, 10, 100, 1000, 10_000] {
            let total: f64 = (0..=n)
                .map(|n1| umm_summary_mass(n - n1, n1).ln().exp())
                .sum();
            assert!((total - 1.0).abs() < 1e-10, "n={n}: {total}");
        }
    }

    #[test]
    fn umm_times_mass_is_elb() {
        for idx in 0..(1u64 << 10) {
            let z = BinarySequence::from_index(idx, 10).unwrap();
            let et = exch_type(&z);
            let lhs = umm(&z) * umm_summary_mass(et.n0, et.n1);
            assert!((lhs.ln() - elb(&z).ln()).abs() < 1e-10, "{z}");
        }
    }

    #[test]
    fn stationary_examples() {
        assert_eq!(
            MarkovParams::new(0.1, 0.1).unwrap().stationary().unwrap(),
            (0.5, 0.5)
        );
        let (p0, p1) = MarkovParams::new(0.1, 0.3).unwrap().stationary().unwrap();
        assert!((p0 - 0.75).abs() < 1e-15 && (p1 - 0.25).abs() < 1e-15);
        assert_eq!(
            MarkovParams::new(1.0, 1.0).unwrap().stationary().unwrap(),
            (0.5, 0.5)
        );
        assert_eq!(
            MarkovParams::new(0.0, 0.0).unwrap().stationary(),
            Err(Error::ReducibleChain)
        );
        assert!(MarkovParams::new(1.5, 0.0).is_err());
    }

    #[test]
    fn constants() {
        assert!((mep_asymptotic_constant() - 0.08294).abs() < 5e-5);
        assert!((part_a() + 0.481).abs() < 1e-3);
        assert!((part_b() - 0.564).abs() < 1e-3);
        assert!((part_a() + part_b() - mep_asymptotic_constant()).abs() < 1e-15);
    }

    #[test]
    fn bound_examples() {
        let b = check_bounds(&seq("010"));
        assert!((b.ratio() - 3.0).abs() < 1e-9);
        assert!(b.loose_ok && b.tight_applicable && b.tight_ok);
        let b = check_bounds(&seq("00000"));
        assert!((b.ratio() - 10.0).abs() < 1e-9);
        assert!(b.loose_ok && !b.tight_applicable);
        let b = check_bounds(&seq("01"));
        assert!((b.ratio() - 2.0).abs() < 1e-9);
        assert!(b.tight_ok);
    }

    #[test]
    fn e_power_examples() {
        let n = 8;
        let uniform = EnumeratedMeasure::uniform(n).unwrap();
        assert_eq!(ep(|_| LogValue::ONE, &uniform).unwrap(), 0.0);
        assert!(ep(umm, &uniform).unwrap() <= 0.0);
        assert!(mep(exch_type, &uniform).abs() < 1e-12);
        assert_eq!(ep(|_| LogValue::ZERO, &uniform), Err(Error::Undefined));

        let q = enumerate_umm(n).unwrap();
        let lhs = ep(umm, &q).unwrap();
        let rhs = mep(exch_type, &q);
        assert!((lhs - rhs).abs() < 1e-10, "{lhs} vs {rhs}");
    }

    #[test]
    fn mep_point_mass() {
        let z = seq("0110100");
        let q = EnumeratedMeasure::point_mass(&z);
        let et = exch_type(&z);
        let expected = log_binomial(et.horizon(), et.n1 as i64).ln();
        assert!((mep(exch_type, &q) - expected).abs() < 1e-12);
    }

    #[test]
    fn report_fields() {
        let r = evaluate(&seq("010"), Some((0.5, 0.5))).unwrap();
        assert!((r.log10_umm - 1.125f64.log10()).abs() < 1e-12);
        assert!((r.log10_elb - 0.375f64.log10()).abs() < 1e-12);
        assert!(r.log10_ub.unwrap().abs() < 1e-12);
        assert!(!r.lb_degenerate);
        assert!(r.log10_umm >= r.log10_elb);
    }
}
