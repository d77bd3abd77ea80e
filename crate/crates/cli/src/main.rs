//! `umm`: exchangeability e-values for binary sequences from the command line.
//!
//! Exit codes: 0 success, 1 validation failure, 2 input error, 3 usage error.

mod input;
mod suite;

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use umm_core::changepoint::{cp_confidence_region, cp_evalue};
use umm_core::evalues::{evaluate, MarkovParams};
use umm_core::experiments::{self, ExperimentRun, ExperimentSpec, Statistic};
use umm_core::markov_sim::{generate, GeneratorKind, GeneratorSpec, GENERATOR_ALGORITHM};
use umm_core::oracle::UMM_CAP;
use umm_core::Error;

use input::SequenceInput;

const VERSION: &str = env!("CARGO_PKG_VERSION");
const NO_GENERATOR: &str = "none (deterministic computation)";

#[derive(Debug)]
pub struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn validation(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }

    pub fn input(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 3,
            message: message.into(),
        }
    }

    /// Errors arising from flag values rather than data.
    fn from_flags(e: Error) -> Self {
        match e {
            Error::Invariant { .. } => Failure::validation(e.to_string()),
            _ => Failure::usage(e.to_string()),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Symbol { .. }
            | Error::Byte { .. }
            | Error::Length(_)
            | Error::HorizonTooSmall { .. } => Failure::input(e.to_string()),
            Error::Invariant { .. } => Failure::validation(e.to_string()),
            _ => Failure::usage(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::input(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "umm",
    version,
    about = "Exchangeability e-values for binary sequences"
)]
struct Cli {
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true, env = "UMM_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Gen {
    Markov,
    Umm,
    Iid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StatArg {
    Elb,
    Lb,
    Ub,
    Umm,
}

impl From<StatArg> for Statistic {
    fn from(s: StatArg) -> Self {
        match s {
            StatArg::Elb => Statistic::Elb,
            StatArg::Lb => Statistic::Lb,
            StatArg::Ub => Statistic::Ub,
            StatArg::Umm => Statistic::Umm,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CpMode {
    Evalue,
    Region,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// E-values of one sequence: UMM, ELB, LB and optionally UB.
    Evalue(EvalueArgs),
    /// Print sequences drawn from a generator.
    Simulate(SimulateArgs),
    /// Monte Carlo experiment: raw records and summary statistics.
    Experiment(ExperimentArgs),
    /// Changepoint e-value or e-confidence region for the changepoint.
    Changepoint(ChangepointArgs),
    /// Check the fast formulas against exhaustive enumeration.
    Oracle(OracleArgs),
}

#[derive(Debug, Args)]
struct UbPair {
    /// Stationary probability of 0 for the upper benchmark.
    #[arg(long, requires = "ub_pi1")]
    ub_pi0: Option<f64>,

    /// Stationary probability of 1 for the upper benchmark.
    #[arg(long, requires = "ub_pi0")]
    ub_pi1: Option<f64>,
}

impl UbPair {
    fn pair(&self) -> Option<(f64, f64)> {
        self.ub_pi0.zip(self.ub_pi1)
    }
}

#[derive(Debug, Args)]
struct EvalueArgs {
    #[command(flatten)]
    input: SequenceInput,

    /// Statistics to report; UB needs --ub-pi0/--ub-pi1.
    #[arg(long, value_enum, value_delimiter = ',')]
    stats: Option<Vec<StatArg>>,

    #[command(flatten)]
    ub: UbPair,

    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Debug, Args)]
struct GeneratorArgs {
    /// Data-generating process.
    #[arg(long = "gen", value_enum)]
    generator: Gen,

    /// Horizon N.
    #[arg(long)]
    n: usize,

    /// Transition probability 0 -> 1 (markov only).
    #[arg(long)]
    pi01: Option<f64>,

    /// Transition probability 1 -> 0 (markov only).
    #[arg(long)]
    pi10: Option<f64>,

    /// Probability of a 1 (iid only; default 0.5).
    #[arg(long)]
    p: Option<f64>,

    /// Master seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl GeneratorArgs {
    fn spec(&self) -> Result<GeneratorSpec, Failure> {
        let kind = match self.generator {
            Gen::Markov => {
                if self.p.is_some() {
                    return Err(Failure::usage("--p applies only to --gen iid"));
                }
                let (Some(pi01), Some(pi10)) = (self.pi01, self.pi10) else {
                    return Err(Failure::usage("--gen markov requires --pi01 and --pi10"));
                };
                GeneratorKind::FixedMarkov(
                    MarkovParams::new(pi01, pi10).map_err(Failure::from_flags)?,
                )
            }
            Gen::Umm => {
                if self.pi01.is_some() || self.pi10.is_some() || self.p.is_some() {
                    return Err(Failure::usage(
                        "--gen umm draws its own transition probabilities; drop --pi01/--pi10/--p",
                    ));
                }
                GeneratorKind::UmmMixture
            }
            Gen::Iid => {
                if self.pi01.is_some() || self.pi10.is_some() {
                    return Err(Failure::usage("--pi01/--pi10 apply only to --gen markov"));
                }
                GeneratorKind::IidBernoulli {
                    p: self.p.unwrap_or(0.5),
                }
            }
        };
        GeneratorSpec::new(kind, self.n, self.seed).map_err(Failure::from_flags)
    }
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    generator: GeneratorArgs,

    /// Number of sequences (replication indices 0..count).
    #[arg(long, default_value_t = 1)]
    count: u64,

    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    #[command(flatten)]
    generator: GeneratorArgs,

    /// Number of replications K.
    #[arg(long)]
    k: u64,

    /// Statistics to compute.
    #[arg(
        long,
        value_enum,
        value_delimiter = ',',
        default_value = "elb,lb,ub,umm"
    )]
    stats: Vec<StatArg>,

    /// Override the stationary pair used by UB (defaults: the chain's own for
    /// markov and iid, (0.5, 0.5) for umm).
    #[command(flatten)]
    ub: UbPair,

    /// Directory for records.csv and summary.json.
    #[arg(long)]
    out: Option<PathBuf>,

    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Debug, Args)]
struct ChangepointArgs {
    #[command(flatten)]
    input: SequenceInput,

    /// Significance level in (0, 1].
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,

    #[arg(long, value_enum, default_value = "evalue")]
    mode: CpMode,

    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Debug, Args)]
struct OracleArgs {
    /// Largest horizon to enumerate (at most 16).
    #[arg(long, default_value_t = 12)]
    max_n: usize,

    /// Perturb the fast UMM values so that the suite must fail.
    #[arg(long, hide = true)]
    inject_fault: bool,

    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Debug, Serialize)]
struct Metadata {
    program: &'static str,
    version: &'static str,
    seed: Option<u64>,
    generator: &'static str,
}

impl Metadata {
    fn new(seed: Option<u64>) -> Self {
        Metadata {
            program: "umm",
            version: VERSION,
            seed,
            generator: if seed.is_some() {
                GENERATOR_ALGORITHM
            } else {
                NO_GENERATOR
            },
        }
    }

    fn header(&self) -> String {
        let seed = self
            .seed
            .map_or_else(|| "none".to_string(), |s| s.to_string());
        format!(
            "# {} {} | seed: {seed} | generator: {}",
            self.program, self.version, self.generator
        )
    }
}

/// Twelve significant digits, without trailing zeros or a negative zero.
fn significant(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{}", x.abs());
    }
    let magnitude = x.abs().log10().floor() as i32;
    if !(-4..12).contains(&magnitude) {
        return format!("{x:.11e}");
    }
    let decimals = (11 - magnitude).max(0) as usize;
    let mut s = format!("{x:.decimals$}");
    if s.contains('.') {
        s = s.trim_end_matches('0').trim_end_matches('.').to_string();
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

fn log10_text(log10: f64) -> String {
    let s = format!("{log10:.12}");
    if s.trim_start_matches('-')
        .chars()
        .all(|c| c == '0' || c == '.')
    {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

fn linear(log10: f64) -> String {
    if log10.abs() <= 300.0 {
        significant(10f64.powf(log10))
    } else {
        "-".to_string()
    }
}

fn print_json(value: &serde_json::Value) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| Failure::input(e.to_string()))?;
    writeln!(out)?;
    Ok(())
}

fn stat_entry(log10: f64) -> serde_json::Value {
    let value = (log10.abs() <= 300.0).then(|| 10f64.powf(log10));
    json!({ "log10": log10, "value": value })
}

fn cmd_evalue(args: &EvalueArgs) -> Result<(), Failure> {
    let pair = args.ub.pair();
    let stats: Vec<StatArg> = match &args.stats {
        Some(s) => s.clone(),
        None if pair.is_some() => vec![StatArg::Umm, StatArg::Elb, StatArg::Lb, StatArg::Ub],
        None => vec![StatArg::Umm, StatArg::Elb, StatArg::Lb],
    };
    let wants_ub = stats.contains(&StatArg::Ub);
    if wants_ub && pair.is_none() {
        return Err(Failure::usage("UB requested without --ub-pi0/--ub-pi1"));
    }
    if !wants_ub && pair.is_some() {
        return Err(Failure::usage(
            "--ub-pi0/--ub-pi1 given but UB not requested",
        ));
    }
    let z = args.input.read()?;
    let r = evaluate(&z, pair).map_err(Failure::from_flags)?;
    let value_of = |s: StatArg| match s {
        StatArg::Umm => r.log10_umm,
        StatArg::Elb => r.log10_elb,
        StatArg::Lb => r.log10_lb,
        StatArg::Ub => r.log10_ub.expect("pair checked above"),
    };
    let meta = Metadata::new(None);
    match args.format {
        Format::Json => {
            let mut statistics = serde_json::Map::new();
            for &s in &stats {
                statistics.insert(
                    Statistic::from(s).name().to_string(),
                    stat_entry(value_of(s)),
                );
            }
            print_json(&json!({
                "metadata": meta,
                "length": z.len(),
                "exch": r.exch,
                "markov": r.markov,
                "statistics": statistics,
                "lb_degenerate": r.lb_degenerate,
                "bounds": r.bounds,
            }))
        }
        Format::Text => {
            let m = r.markov;
            println!("{}", meta.header());
            println!(
                "N = {}, N0 = {}, N1 = {}, Markov type (F={}, N00={}, N01={}, N10={}, N11={}, L={})",
                z.len(),
                r.exch.n0,
                r.exch.n1,
                m.first,
                m.n00,
                m.n01,
                m.n10,
                m.n11,
                m.last
            );
            println!("{:<5} {:>24} {:>24}", "stat", "log10", "value");
            for &s in &stats {
                let v = value_of(s);
                println!(
                    "{:<5} {:>24} {:>24}",
                    Statistic::from(s).name(),
                    log10_text(v),
                    linear(v)
                );
            }
            if r.lb_degenerate && stats.contains(&StatArg::Lb) {
                println!("note: constant sequence; LB uses the convention 0^0 = 1");
            }
            let b = r.bounds;
            let tight = if b.tight_applicable {
                if b.tight_ok {
                    "ok"
                } else {
                    "exceeded"
                }
            } else {
                "not applicable"
            };
            println!(
                "UMM/ELB = {} (log10 {:.6}); within [1, 2N]: {}; within [1, N]: {tight}",
                linear(b.ratio_log10),
                b.ratio_log10,
                if b.loose_ok { "ok" } else { "exceeded" }
            );
            Ok(())
        }
    }
}

fn cmd_simulate(args: &SimulateArgs) -> Result<(), Failure> {
    let spec = args.generator.spec()?;
    let meta = Metadata::new(Some(spec.seed));
    match args.format {
        Format::Json => {
            let sequences: Vec<String> = (0..args.count)
                .map(|i| generate(&spec, i).to_string())
                .collect();
            print_json(&json!({ "metadata": meta, "spec": spec, "sequences": sequences }))
        }
        Format::Text => {
            let mut out = io::BufWriter::new(io::stdout().lock());
            writeln!(out, "{}", meta.header())?;
            writeln!(
                out,
                "# spec: {}",
                serde_json::to_string(&spec).expect("spec serializes")
            )?;
            for i in 0..args.count {
                writeln!(out, "{}", generate(&spec, i))?;
            }
            out.flush()?;
            Ok(())
        }
    }
}

fn summary_document(meta: &Metadata, run: &ExperimentRun) -> serde_json::Value {
    json!({
        "metadata": meta,
        "generator_algorithm": GENERATOR_ALGORITHM,
        "spec": run.spec,
        "summary": run.summary,
    })
}

fn fmt_opt(v: Option<f64>, digits: usize) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.digits$}"))
}

fn print_experiment_text(meta: &Metadata, run: &ExperimentRun, gen: &GeneratorArgs) {
    let s = &run.summary;
    let mean = |stat: Statistic| s.statistics.get(&stat).map(|x| x.mean);
    println!("{}", meta.header());
    println!(
        "# spec: {}",
        serde_json::to_string(&run.spec).expect("spec serializes")
    );
    println!();
    println!(
        "{:<6} {:>12} {:>10} {:>10} {:>10} {:>10} {:>12}",
        "stat", "mean", "sd", "q05", "q25", "q50", "q75 / q95"
    );
    for (stat, x) in &s.statistics {
        println!(
            "{:<6} {:>12.4} {:>10.4} {:>10.3} {:>10.3} {:>10.3} {:>6.3} / {:.3}",
            stat.name(),
            x.mean,
            x.std_dev,
            x.quantiles[0],
            x.quantiles[1],
            x.quantiles[2],
            x.quantiles[3],
            x.quantiles[4]
        );
    }
    println!();
    let (elb, umm) = (mean(Statistic::Elb), mean(Statistic::Umm));
    match gen.generator {
        Gen::Markov => {
            println!(
                "{:>8} {:>10} {:>10} {:>10} {:>10} {:>12}",
                "N", "pi01/pi10", "ELB", "UMM", "UMM-ELB", "upper bound"
            );
            println!(
                "{:>8} {:>10} {:>10} {:>10} {:>10.3} {:>12.3}",
                s.horizon,
                format!(
                    "{}/{}",
                    gen.pi01.unwrap_or_default(),
                    gen.pi10.unwrap_or_default()
                ),
                fmt_opt(elb, 3),
                fmt_opt(umm, 3),
                s.diff_mean,
                s.bound_log10
            );
        }
        Gen::Umm => {
            let q = s
                .statistics
                .get(&Statistic::Umm)
                .map(|x| {
                    let parts: Vec<String> =
                        x.quantiles.iter().map(|v| format!("{v:.2}")).collect();
                    format!("[{}]", parts.join(", "))
                })
                .unwrap_or_else(|| "-".into());
            println!(
                "{:>8} {:>8} {:>10} {:>10} {:>10} {:>10}  UMM quantiles",
                "N", "K", "ELB", "LB", "UMM", "as."
            );
            println!(
                "{:>8} {:>8} {:>10} {:>10} {:>10} {:>10.2}  {q}",
                s.horizon,
                s.replications,
                fmt_opt(elb, 2),
                fmt_opt(mean(Statistic::Lb), 2),
                fmt_opt(umm, 2),
                s.asymptotic_log10
            );
            println!();
            println!(
                "{:>8} {:>8} {:>10} {:>10} {:>10} {:>12}",
                "N", "K", "ELB", "UMM", "UMM-ELB", "upper bound"
            );
            println!(
                "{:>8} {:>8} {:>10} {:>10} {:>10.3} {:>12.3}",
                s.horizon,
                s.replications,
                fmt_opt(elb, 2),
                fmt_opt(umm, 2),
                s.diff_mean,
                s.bound_log10
            );
        }
        Gen::Iid => {
            println!(
                "{:>8} {:>8} {:>10} {:>10} {:>10} {:>12}",
                "N", "K", "ELB", "UMM", "UMM-ELB", "upper bound"
            );
            println!(
                "{:>8} {:>8} {:>10} {:>10} {:>10.3} {:>12.3}",
                s.horizon,
                s.replications,
                fmt_opt(elb, 3),
                fmt_opt(umm, 3),
                s.diff_mean,
                s.bound_log10
            );
        }
    }
    println!();
    println!(
        "log10 UMM - log10 ELB: max {:.4}, all within log10 2N = {:.4}",
        s.diff_max, s.loose_bound_log10
    );
    println!(
        "above log10 N = {:.4}: {} of {} replications ({} of {} with both symbols)",
        s.bound_log10, s.exceed_log10_n, s.replications, s.tight_violations, s.tight_applicable
    );
}

fn cmd_experiment(args: &ExperimentArgs) -> Result<(), Failure> {
    let generator = args.generator.spec()?;
    let statistics: Vec<Statistic> = args.stats.iter().map(|&s| s.into()).collect();
    let ub_stationary = match args.ub.pair() {
        Some(pair) => Some(pair),
        None if args.generator.generator == Gen::Umm && statistics.contains(&Statistic::Ub) => {
            Some((0.5, 0.5))
        }
        None => None,
    };
    let spec = ExperimentSpec {
        generator,
        replications: args.k,
        statistics,
        ub_stationary,
    };
    spec.validate().map_err(Failure::from_flags)?;
    let run = experiments::run(&spec).map_err(Failure::from_flags)?;
    let meta = Metadata::new(Some(generator.seed));
    let doc = summary_document(&meta, &run);

    if let Some(dir) = &args.out {
        fs::create_dir_all(dir)?;
        let mut csv = io::BufWriter::new(fs::File::create(dir.join("records.csv"))?);
        experiments::write_csv(&run.records, &mut csv)?;
        csv.flush()?;
        let mut text = serde_json::to_string_pretty(&doc).expect("summary serializes");
        text.push('\n');
        fs::write(dir.join("summary.json"), text)?;
    }

    match args.format {
        Format::Json => print_json(&doc),
        Format::Text => {
            print_experiment_text(&meta, &run, &args.generator);
            Ok(())
        }
    }
}

fn cmd_changepoint(args: &ChangepointArgs) -> Result<(), Failure> {
    if !(args.alpha > 0.0 && args.alpha <= 1.0) {
        return Err(Failure::usage(Error::AlphaRange(args.alpha).to_string()));
    }
    let z = args.input.read()?;
    let meta = Metadata::new(None);
    match args.mode {
        CpMode::Evalue => {
            let e = cp_evalue(&z).log10();
            match args.format {
                Format::Json => print_json(&json!({
                    "metadata": meta,
                    "length": z.len(),
                    "evalue": stat_entry(e),
                })),
                Format::Text => {
                    println!("{}", meta.header());
                    println!(
                        "changepoint e-value: log10 = {}, value = {}",
                        log10_text(e),
                        linear(e)
                    );
                    Ok(())
                }
            }
        }
        CpMode::Region => {
            let region = cp_confidence_region(&z, args.alpha)?;
            match args.format {
                Format::Json => print_json(&json!({
                    "metadata": meta,
                    "length": z.len(),
                    "region": region,
                })),
                Format::Text => {
                    println!("{}", meta.header());
                    println!("{:>6} {:>14} {:>7}", "tau", "log10 E_tau", "member");
                    for (tau, e) in &region.evalues {
                        let member = region.members.contains(tau);
                        println!(
                            "{tau:>6} {e:>14.6} {:>7}",
                            if member { "yes" } else { "no" }
                        );
                    }
                    let members: Vec<String> =
                        region.members.iter().map(|t| t.to_string()).collect();
                    println!(
                        "region at alpha = {}: {{{}}} ({} of {} candidates)",
                        args.alpha,
                        members.join(", "),
                        region.members.len(),
                        region.evalues.len()
                    );
                    Ok(())
                }
            }
        }
    }
}

fn cmd_oracle(args: &OracleArgs) -> Result<(), Failure> {
    if args.max_n < 2 || args.max_n > UMM_CAP {
        return Err(Failure::usage(format!(
            "--max-n {} outside 2..={UMM_CAP}; exhaustive enumeration is capped at N = {UMM_CAP}",
            args.max_n
        )));
    }
    let report = suite::run(args.max_n, args.inject_fault);
    let meta = Metadata::new(None);
    match args.format {
        Format::Json => print_json(&json!({ "metadata": meta, "report": report }))?,
        Format::Text => {
            println!("{}", meta.header());
            println!(
                "{:<48} {:>9} {:>12} {:>10} result",
                "check", "N", "worst", "tolerance"
            );
            for c in &report.checks {
                println!(
                    "{:<48} {:>9} {:>12.3e} {:>10.1e} {}",
                    c.name,
                    c.horizons,
                    c.worst,
                    c.tolerance,
                    if c.passed { "PASS" } else { "FAIL" }
                );
            }
            println!(
                "oracle suite: {}",
                if report.passed { "PASS" } else { "FAIL" }
            );
        }
    }
    if report.passed {
        Ok(())
    } else {
        Err(Failure::validation("oracle suite failed"))
    }
}

fn configure_threads(threads: Option<usize>) -> Result<(), Failure> {
    if let Some(n) = threads {
        if n == 0 {
            return Err(Failure::usage("thread count must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::usage(format!("cannot configure threads: {e}")))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = configure_threads(cli.threads).and_then(|()| match &cli.command {
        Command::Evalue(a) => cmd_evalue(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Experiment(a) => cmd_experiment(a),
        Command::Changepoint(a) => cmd_changepoint(a),
        Command::Oracle(a) => cmd_oracle(a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
