use umm_core::evalues::MarkovParams;
use umm_core::experiments::{run, write_csv, ExperimentSpec, Statistic, CSV_HEADER};
use umm_core::markov_sim::{GeneratorKind, GeneratorSpec};
use umm_core::Error;

fn spec(kind: GeneratorKind, stats: Vec<Statistic>, ub: Option<(f64, f64)>) -> ExperimentSpec {
    ExperimentSpec {
        generator: GeneratorSpec::new(kind, 50, 3).unwrap(),
        replications: 40,
        statistics: stats,
        ub_stationary: ub,
    }
}

#[test]
fn mixture_needs_explicit_stationary_pair() {
    let s = spec(GeneratorKind::UmmMixture, vec![Statistic::Ub], None);
    assert!(matches!(run(&s), Err(Error::Config(_))));
    let s = spec(
        GeneratorKind::UmmMixture,
        vec![Statistic::Ub],
        Some((0.5, 0.5)),
    );
    assert!(run(&s).is_ok());
}

#[test]
fn fixed_markov_derives_stationary_pair() {
    let kind = GeneratorKind::FixedMarkov(MarkovParams::new(0.2, 0.6).unwrap());
    let s = spec(kind, Statistic::ALL.to_vec(), None);
    let (pi0, pi1) = s.validate().unwrap().unwrap();
    assert!((pi0 - 0.75).abs() < 1e-12 && (pi1 - 0.25).abs() < 1e-12);
    let r = run(&s).unwrap();
    assert!(r.records.iter().all(|rec| rec.log10_ub.is_some()));
}

#[test]
fn csv_has_one_line_per_replication() {
    let s = spec(
        GeneratorKind::IidBernoulli { p: 0.3 },
        vec![Statistic::Elb, Statistic::Umm],
        None,
    );
    let r = run(&s).unwrap();
    let mut buf = Vec::new();
    write_csv(&r.records, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines.len(), 41);
    for (i, line) in lines[1..].iter().enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 6);
        assert_eq!(fields[0], i.to_string());
        assert!(fields[3].is_empty() && fields[4].is_empty());
        let elb: f64 = fields[2].parse().unwrap();
        let umm: f64 = fields[5].parse().unwrap();
        assert!(umm >= elb - 1e-9);
    }
}

#[test]
fn summary_round_trips_through_json() {
    let s = spec(GeneratorKind::UmmMixture, vec![Statistic::Umm], None);
    let r = run(&s).unwrap();
    let json = serde_json::to_string(&r.summary).unwrap();
    let back: umm_core::experiments::ExperimentSummary = serde_json::from_str(&json).unwrap();
    assert_eq!(back.replications, 40);
}
