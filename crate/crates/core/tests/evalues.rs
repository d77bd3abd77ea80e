use umm_core::evalues::{
    check_bounds, elb, ep, evaluate, lb, lb_with_convention, mep, ub, umm, umm_alternative_logprob,
    umm_summary_mass,
};
use umm_core::oracle::{enumerate_umm, EnumeratedMeasure};
use umm_core::{exch_type, markov_type, BinarySequence, Error, LogValue};

fn seq(s: &str) -> BinarySequence {
    s.parse().unwrap()
}

fn assert_lin(x: LogValue, expected: f64) {
    let got = x.ln().exp();
    assert!(
        (got - expected).abs() <= 1e-12 * expected.max(1.0),
        "{got} != {expected}"
    );
}

#[test]
fn alternative_probabilities() {
    assert_lin(umm_alternative_logprob(&markov_type(&seq("01"))), 0.25);
    assert_lin(umm_alternative_logprob(&markov_type(&seq("00000"))), 0.1);
    assert_lin(umm_alternative_logprob(&markov_type(&seq("010"))), 0.125);
}

#[test]
fn benchmarks() {
    assert_lin(lb(&seq("010")).unwrap(), 27.0 / 32.0);
    assert_lin(lb(&seq("01")).unwrap(), 1.0);
    match lb(&seq("00000")) {
        Err(Error::DegenerateType { convention }) => assert_lin(convention, 0.1),
        other => panic!("{other:?}"),
    }
    assert_lin(lb_with_convention(&seq("00000")), 0.1);

    assert_lin(elb(&seq("010")), 0.375);
    assert_lin(elb(&seq("01")), 0.5);
    assert_lin(elb(&seq("00000")), 0.1);

    assert_lin(ub(&seq("010"), 0.5, 0.5).unwrap(), 1.0);
    assert_lin(ub(&seq("01"), 0.5, 0.5).unwrap(), 1.0);
    assert_lin(ub(&seq("00000"), 0.5, 0.5).unwrap(), 3.2);
    assert!(ub(&seq("01"), 0.7, 0.7).is_err());
}

#[test]
fn summary_masses() {
    assert_lin(umm_summary_mass(1, 1), 0.5);
    assert_lin(umm_summary_mass(2, 1), 1.0 / 3.0);
    assert_lin(umm_summary_mass(5, 0), 0.1);
}

#[test]
fn umm_values() {
    assert_lin(umm(&seq("010")), 1.125);
    assert_lin(umm(&seq("001")), 0.75);
    assert_lin(umm(&seq("111111111")), 1.0);
    assert_lin(umm(&seq("01")), 1.0);
}

#[test]
fn umm_is_elb_over_class_mass() {
    for s in ["0110100111", "0000000001", "1111", "10", "0101010101011"] {
        let z = seq(s);
        let et = exch_type(&z);
        let lhs = umm(&z) * umm_summary_mass(et.n0, et.n1);
        assert!((lhs.ln() - elb(&z).ln()).abs() < 1e-10, "{s}");
    }
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

/// With a single 1 the ratio is `2N(N-1)/(N+1)`, which exceeds `N` from `N = 4`.
#[test]
fn single_one_exceeds_horizon() {
    let b = check_bounds(&seq("1000"));
    assert!((b.ratio() - 4.8).abs() < 1e-9);
    assert!(b.loose_ok && b.tight_applicable && !b.tight_ok);
    for n in [3usize, 4, 10, 1000] {
        let mut bits = vec![0u8; n];
        bits[n / 2] = 1;
        let r = check_bounds(&BinarySequence::new(bits).unwrap()).ratio();
        let nf = n as f64;
        assert!((r / (2.0 * nf * (nf - 1.0) / (nf + 1.0)) - 1.0).abs() < 1e-9);
    }
}

#[test]
fn e_power() {
    let q = EnumeratedMeasure::uniform(6).unwrap();
    assert!(ep(|_| LogValue::ONE, &q).unwrap().abs() < 1e-15);
    assert!(ep(umm, &q).unwrap() <= 1e-12);
    assert!(mep(exch_type, &q).abs() < 1e-12);

    let z = seq("0110100");
    let point = EnumeratedMeasure::point_mass(&z);
    let expected = (35f64).ln();
    assert!((mep(exch_type, &point) - expected).abs() < 1e-12);

    let q = enumerate_umm(8).unwrap();
    assert!((ep(umm, &q).unwrap() - mep(exch_type, &q)).abs() < 1e-10);
}

#[test]
fn report_collects_everything() {
    let r = evaluate(&seq("0110"), Some((0.5, 0.5))).unwrap();
    assert!(!r.lb_degenerate);
    assert!(r.log10_ub.is_some());
    assert_eq!(r.exch, exch_type(&seq("0110")));
    let r = evaluate(&seq("1111"), None).unwrap();
    assert!(r.lb_degenerate && r.log10_ub.is_none());
    assert!(r.log10_umm.abs() < 1e-12);
}
