//! Monte Carlo studies of the e-values under Markov and mixture alternatives.
//!
//! A run draws `K` sequences, computes the requested statistics on the log10
//! scale, and summarises them. Replication `i` always uses the same random
//! stream, and results are collected and reduced in index order, so the output
//! does not depend on the thread count.

use std::collections::BTreeMap;
use std::f64::consts::LN_10;
use std::fmt;
use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evalues::{self, bounds_from, mep_asymptotic_constant};
use crate::markov_sim::{generate, GeneratorSpec};
use crate::types::{exch_type, markov_type};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Statistic {
    Elb,
    Lb,
    Ub,
    Umm,
}

impl Statistic {
    pub const ALL: [Statistic; 4] = [Statistic::Elb, Statistic::Lb, Statistic::Ub, Statistic::Umm];

    pub fn name(self) -> &'static str {
        match self {
            Statistic::Elb => "ELB",
            Statistic::Lb => "LB",
            Statistic::Ub => "UB",
            Statistic::Umm => "UMM",
        }
    }
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Statistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "elb" => Ok(Statistic::Elb),
            "lb" => Ok(Statistic::Lb),
            "ub" => Ok(Statistic::Ub),
            "umm" => Ok(Statistic::Umm),
            other => Err(Error::Config(format!("unknown statistic {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub generator: GeneratorSpec,
    pub replications: u64,
    pub statistics: Vec<Statistic>,
    /// Stationary pair for the upper benchmark; defaults to the generator's.
    pub ub_stationary: Option<(f64, f64)>,
}

impl ExperimentSpec {
    /// Checks the configuration and resolves the upper-benchmark stationary
    /// pair (`None` when UB is not requested).
    pub fn validate(&self) -> Result<Option<(f64, f64)>> {
        if self.replications == 0 {
            return Err(Error::Config("at least one replication is required".into()));
        }
        if self.statistics.is_empty() {
            return Err(Error::Config("no statistics requested".into()));
        }
        if !self.statistics.contains(&Statistic::Ub) {
            if self.ub_stationary.is_some() {
                return Err(Error::Config(
                    "UB stationary pair given but UB not requested".into(),
                ));
            }
            return Ok(None);
        }
        let pair = self
            .ub_stationary
            .or_else(|| self.generator.stationary())
            .ok_or_else(|| {
                Error::Config(
                    "UB needs a stationary pair: the generator has none, supply one explicitly"
                        .into(),
                )
            })?;
        let (pi0, pi1) = pair;
        if !(0.0..=1.0).contains(&pi0)
            || !(0.0..=1.0).contains(&pi1)
            || (pi0 + pi1 - 1.0).abs() > 1e-12
        {
            return Err(Error::Config(format!(
                "invalid UB stationary pair ({pi0}, {pi1})"
            )));
        }
        Ok(Some(pair))
    }

    fn wants(&self, s: Statistic) -> bool {
        self.statistics.contains(&s)
    }
}

/// One replication, on the log10 scale. Unrequested statistics are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationRecord {
    pub replication_index: u64,
    pub n1: u64,
    pub log10_elb: Option<f64>,
    pub log10_lb: Option<f64>,
    pub log10_ub: Option<f64>,
    pub log10_umm: Option<f64>,
}

pub const QUANTILE_LEVELS: [f64; 5] = [0.05, 0.25, 0.5, 0.75, 0.95];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatSummary {
    pub mean: f64,
    pub std_dev: f64,
    /// At [`QUANTILE_LEVELS`].
    pub quantiles: [f64; 5],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub horizon: usize,
    pub replications: u64,
    pub statistics: BTreeMap<Statistic, StatSummary>,
    /// Mean of `log10 UMM - log10 ELB`.
    pub diff_mean: f64,
    pub diff_max: f64,
    /// `log10 N`, the bound on the difference for non-constant sequences.
    pub bound_log10: f64,
    /// `log10 2N`, the bound on the difference for every sequence.
    pub loose_bound_log10: f64,
    /// Replications where both symbols occur.
    pub tight_applicable: u64,
    /// Replications, among those, exceeding `log10 N`.
    pub tight_violations: u64,
    /// Replications whose difference exceeds `log10 N`, constant ones included.
    pub exceed_log10_n: u64,
    pub asymptotic_log10: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRun {
    pub spec: ExperimentSpec,
    pub summary: ExperimentSummary,
    pub records: Vec<ReplicationRecord>,
}

/// `N · c / ln 10`, the asymptotic mean of `log10 UMM` under the UMM
/// alternative.
pub fn asymptotic_log10(n: u64) -> f64 {
    n as f64 * mep_asymptotic_constant() / LN_10
}

/// Linear-interpolation quantile (type 7) of sorted data.
pub fn quantile_sorted(sorted: &[f64], level: f64) -> f64 {
    assert!(!sorted.is_empty());
    let h = (sorted.len() - 1) as f64 * level;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn summarize(values: &[f64]) -> StatSummary {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = if values.len() > 1 {
        values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    StatSummary {
        mean,
        std_dev: var.sqrt(),
        quantiles: QUANTILE_LEVELS.map(|q| quantile_sorted(&sorted, q)),
    }
}

struct Replication {
    record: ReplicationRecord,
    umm: f64,
    elb: f64,
    mixed: bool,
}

fn replicate(
    spec: &ExperimentSpec,
    ub_pair: Option<(f64, f64)>,
    index: u64,
) -> Result<Replication> {
    let z = generate(&spec.generator, index);
    let mt = markov_type(&z);
    let et = exch_type(&z);
    let umm = evalues::umm_from_types(&mt, &et).log10();
    let elb = evalues::elb(&z).log10();
    let lb = spec
        .wants(Statistic::Lb)
        .then(|| evalues::lb_with_convention(&z).log10());
    let ub = match ub_pair {
        Some((pi0, pi1)) => Some(evalues::ub(&z, pi0, pi1)?.log10()),
        None => None,
    };
    let bounds = bounds_from(umm - elb, et.horizon(), et.is_mixed());
    if !bounds.loose_ok {
        return Err(Error::Invariant {
            index,
            detail: format!(
                "log10 UMM - log10 ELB = {} outside [0, log10 2N]",
                umm - elb
            ),
        });
    }
    Ok(Replication {
        record: ReplicationRecord {
            replication_index: index,
            n1: et.n1,
            log10_elb: spec.wants(Statistic::Elb).then_some(elb),
            log10_lb: lb,
            log10_ub: ub,
            log10_umm: spec.wants(Statistic::Umm).then_some(umm),
        },
        umm,
        elb,
        mixed: et.is_mixed(),
    })
}

/// Runs the experiment on the global rayon pool.
pub fn run(spec: &ExperimentSpec) -> Result<ExperimentRun> {
    let ub_pair = spec.validate()?;
    let reps: Vec<Replication> = (0..spec.replications)
        .into_par_iter()
        .map(|i| replicate(spec, ub_pair, i))
        .collect::<Result<_>>()?;
    Ok(aggregate(spec, reps))
}

/// Runs the experiment on a dedicated pool with `threads` workers.
pub fn run_with_threads(spec: &ExperimentSpec, threads: usize) -> Result<ExperimentRun> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    pool.install(|| run(spec))
}

fn aggregate(spec: &ExperimentSpec, reps: Vec<Replication>) -> ExperimentRun {
    let n = spec.generator.horizon as u64;
    let count = reps.len() as f64;
    let bound = (n as f64).log10();
    let diffs: Vec<f64> = reps.iter().map(|r| r.umm - r.elb).collect();
    let tight_applicable = reps.iter().filter(|r| r.mixed).count() as u64;
    let tight_violations = reps
        .iter()
        .zip(&diffs)
        .filter(|(r, &d)| r.mixed && d > bound + evalues::BOUND_TOLERANCE)
        .count() as u64;
    let exceed_log10_n = diffs
        .iter()
        .filter(|&&d| d > bound + evalues::BOUND_TOLERANCE)
        .count() as u64;

    let mut statistics = BTreeMap::new();
    for stat in Statistic::ALL {
        if !spec.wants(stat) {
            continue;
        }
        let values: Vec<f64> = reps
            .iter()
            .map(|r| match stat {
                Statistic::Elb => Some(r.elb),
                Statistic::Umm => Some(r.umm),
                Statistic::Lb => r.record.log10_lb,
                Statistic::Ub => r.record.log10_ub,
            })
            .map(|v| v.expect("requested statistic computed"))
            .collect();
        statistics.insert(stat, summarize(&values));
    }

    let summary = ExperimentSummary {
        horizon: spec.generator.horizon,
        replications: spec.replications,
        statistics,
        diff_mean: diffs.iter().sum::<f64>() / count,
        diff_max: diffs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        bound_log10: bound,
        loose_bound_log10: (2.0 * n as f64).log10(),
        tight_applicable,
        tight_violations,
        exceed_log10_n,
        asymptotic_log10: asymptotic_log10(n),
    };
    ExperimentRun {
        spec: spec.clone(),
        summary,
        records: reps.into_iter().map(|r| r.record).collect(),
    }
}

pub const CSV_HEADER: &str = "replication_index,N1,log10_elb,log10_lb,log10_ub,log10_umm";

/// Writes the raw records as CSV: one header line, then one line per
/// replication with `\n` endings. Floats use the shortest representation that
/// round-trips; unrequested statistics are empty fields.
pub fn write_csv<W: Write>(records: &[ReplicationRecord], mut out: W) -> io::Result<()> {
    fn field(v: Option<f64>) -> String {
        v.map(|x| x.to_string()).unwrap_or_default()
    }
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.replication_index,
            r.n1,
            field(r.log10_elb),
            field(r.log10_lb),
            field(r.log10_ub),
            field(r.log10_umm)
        )?;
    }
    Ok(())
}
