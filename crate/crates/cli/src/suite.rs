//! The oracle validation suite: fast paths against exhaustive enumeration.

use std::collections::HashMap;

use serde::Serialize;
use umm_core::changepoint::{cp_evalue, cp_tau_evalue};
use umm_core::combinatorics::{binary_type_count, eulerian_path_count, MarkovGraph};
use umm_core::evalues::{elb, umm, umm_summary_mass};
use umm_core::oracle::{
    brute_graph_counts, ln_rational, verify_evariable, CpOracle, CpTauOracle, UmmOracle, CP_CAP,
};
use umm_core::{exch_type, markov_type, BinarySequence, LogValue};

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub horizons: String,
    pub worst: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub max_n: usize,
    pub checks: Vec<Check>,
    pub passed: bool,
}

fn rel_err(fast: LogValue, exact: LogValue) -> f64 {
    (fast.ln() - exact.ln()).exp_m1().abs()
}

fn check(name: &'static str, lo: usize, hi: usize, worst: f64, tolerance: f64) -> Check {
    Check {
        name,
        horizons: format!("{lo}..={hi}"),
        worst,
        tolerance,
        passed: worst <= tolerance,
    }
}

/// Runs every check for horizons up to `max_n`. With `fault`, the fast UMM
/// value is perturbed by a relative `1e-6` so the suite must fail.
pub fn run(max_n: usize, fault: bool) -> SuiteReport {
    let perturb = if fault {
        LogValue::from_linear(1.0 + 1e-6)
    } else {
        LogValue::ONE
    };
    let mut checks = Vec::new();

    let mut umm_err = 0.0f64;
    let mut mass_err = 0.0f64;
    let mut mean_err = 0.0f64;
    let mut elb_excess = f64::NEG_INFINITY;
    for n in 2..=max_n {
        let oracle = UmmOracle::new(n).expect("horizon within cap");
        for idx in 0..1u64 << n {
            let z = BinarySequence::from_index(idx, n).expect("n >= 2");
            umm_err = umm_err.max(rel_err(umm(&z) * perturb, oracle.evalue(idx)));
        }
        for k in 0..=n {
            let exact = LogValue::from_ln(ln_rational(oracle.class_mass(k)));
            let fast = umm_summary_mass((n - k) as u64, k as u64);
            mass_err = mass_err.max(rel_err(fast, exact));
        }
        let report = verify_evariable(|z| umm(z) * perturb, exch_type, n).expect("cap");
        for c in &report.classes {
            mean_err = mean_err.max((c.mean - 1.0).abs());
        }
        let report = verify_evariable(elb, exch_type, n).expect("cap");
        elb_excess = elb_excess.max(report.max_mean - 1.0);
    }
    checks.push(check(
        "UMM e-value vs enumeration (relative)",
        2,
        max_n,
        umm_err,
        1e-9,
    ));
    checks.push(check(
        "summary mass vs exact rational (relative)",
        2,
        max_n,
        mass_err,
        1e-10,
    ));
    checks.push(check(
        "UMM class means |mean - 1|",
        2,
        max_n,
        mean_err,
        1e-9,
    ));
    checks.push(check(
        "ELB class means, excess over 1",
        2,
        max_n,
        elb_excess,
        1e-9,
    ));

    let mut count_mismatch = 0.0f64;
    for n in 2..=max_n {
        let mut groups: HashMap<_, u64> = HashMap::new();
        for idx in 0..1u64 << n {
            let z = BinarySequence::from_index(idx, n).expect("n >= 2");
            *groups.entry(markov_type(&z)).or_insert(0) += 1;
        }
        for (mt, count) in groups {
            let closed = binary_type_count(&mt);
            let best = eulerian_path_count(&MarkovGraph::from_markov_type(&mt));
            if closed != count.into() || best != count.into() {
                count_mismatch += 1.0;
            }
        }
    }
    checks.push(check(
        "binary type counts, mismatching types",
        2,
        max_n,
        count_mismatch,
        0.0,
    ));

    let general_len = max_n.min(9);
    let mut general_mismatch = 0.0f64;
    for m in 1..=3 {
        for len in 1..=general_len {
            for (g, count) in brute_graph_counts(m, len) {
                if eulerian_path_count(&g) != count.into() {
                    general_mismatch += 1.0;
                }
            }
        }
    }
    checks.push(check(
        "Eulerian path counts m<=3, mismatching graphs",
        1,
        general_len,
        general_mismatch,
        0.0,
    ));

    let cp_max = max_n.min(CP_CAP);
    let mut cp_err = 0.0f64;
    let mut tau_err = 0.0f64;
    for n in 2..=cp_max {
        let oracle = CpOracle::new(n).expect("cap");
        for idx in 0..1u64 << n {
            let z = BinarySequence::from_index(idx, n).expect("n >= 2");
            cp_err = cp_err.max(rel_err(cp_evalue(&z), oracle.evalue(idx)));
        }
        if n < 3 {
            continue;
        }
        for tau in 1..n {
            let oracle = CpTauOracle::new(n, tau).expect("cap");
            for idx in 0..1u64 << n {
                let z = BinarySequence::from_index(idx, n).expect("n >= 2");
                let fast = cp_tau_evalue(&z, tau).expect("valid tau");
                tau_err = tau_err.max(rel_err(fast, oracle.evalue(idx)));
            }
        }
    }
    checks.push(check(
        "changepoint e-value vs enumeration",
        2,
        cp_max,
        cp_err,
        1e-9,
    ));
    checks.push(check(
        "per-changepoint e-values vs enumeration",
        3,
        cp_max,
        tau_err,
        1e-9,
    ));

    let passed = checks.iter().all(|c| c.passed);
    SuiteReport {
        max_n,
        checks,
        passed,
    }
}
