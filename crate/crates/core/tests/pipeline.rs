//! End-to-end runs through several modules.

use ptf_fool::battery::{unit_battery, BatteryOptions};
use ptf_fool::budget::Budget;
use ptf_fool::fool::{expectation_error_bound, fooling_curve_with, sign_expectation, ExperimentConfig};
use ptf_fool::krand::{IidSampler, KWiseSampler, KWiseSpec, FieldSpec, Target};
use ptf_fool::mollify::Mollifier;
use ptf_fool::structure::{decompose, default_schedule, verify_decomposition, DecomposeOptions, VerifyConstants};
use ptf_fool::{ExactDecomp, ExactPoly, Rational, Scalar};

#[test]
fn decomposition_survives_json() {
    let battery = unit_battery(&BatteryOptions { size: 6, max_vars: 7, seed: 5, ..Default::default() });
    for p in &battery {
        let d = p.degree();
        let dec = decompose(p, &DecomposeOptions::new(default_schedule(4, d))).unwrap();
        let back = ExactDecomp::parse_json(&dec.to_json_string()).unwrap();
        assert_eq!(back.reconstruct().unwrap(), *p);
        let report = verify_decomposition(&back, p, VerifyConstants::for_degree(d), Budget::from_env());
        assert!(report.passed(), "{}", report.to_csv());
    }
}

#[test]
fn decomposition_of_floats_reconstructs_pointwise() {
    let p = ExactPoly::from_index_terms(
        6,
        [
            (vec![0, 1], Rational::from_ratio(3, 5)),
            (vec![2, 3, 4], Rational::from_ratio(-4, 5)),
        ],
    )
    .unwrap()
    .to_f64();
    let dec = decompose(&p, &DecomposeOptions::new(default_schedule(4, 3))).unwrap();
    let x = [0.3, -1.2, 0.7, 2.0, -0.4, 1.1];
    assert!((dec.evaluate_f64(&x).unwrap() - p.evaluate(&x).unwrap()).abs() < 1e-9);
}

#[test]
fn config_file_with_relative_polynomial() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("p.txt"), "0.6 * x0 * x1\n0.8 * x2 * x3\n").unwrap();
    std::fs::write(
        dir.path().join("exp.json"),
        r#"{"polynomials": [{"file": "p.txt", "name": "pair"}], "k_list": [2, 8], "samples": 20000, "seed": 4}"#,
    )
    .unwrap();
    let cfg = ExperimentConfig::load(&dir.path().join("exp.json")).unwrap();
    let report = fooling_curve_with(&cfg, Budget::new(u128::MAX)).unwrap();
    assert_eq!(report.curves.len(), 1);
    let curve = &report.curves[0];
    assert_eq!(curve.name, "pair");
    assert_eq!(curve.rows.iter().map(|r| r.k).collect::<Vec<_>>(), vec![2, 8]);
    assert!(curve.rows.iter().all(|r| r.estimate.abs() <= 1.0));
    // Flipping x0 and x2 negates p, and that symmetry involves all four
    // coordinates jointly, so it holds for 4-wise families but not pairwise ones.
    let r8 = &curve.rows[1];
    assert!(r8.ci_lo == 0.0, "{r8:?}");
    let out = dir.path().join("out.csv");
    let written = report.write(&out).unwrap();
    assert!(written.iter().all(|p| p.exists()));
    assert!(std::fs::read_to_string(&out).unwrap().starts_with("k,estimate,stderr,baseline,fooling_error,ci_lo,ci_hi\n"));
}

#[test]
fn sign_expectations_agree_between_families() {
    let p = ExactPoly::from_index_terms(3, [(vec![0], Rational::from_int(1)), (vec![1, 2], Rational::from_int(1))])
        .unwrap()
        .to_f64()
        .compile();
    let iid = sign_expectation(&p, &IidSampler::new(3, 8, 0), 100_000).unwrap();
    let spec = KWiseSpec { k: 6, field: FieldSpec::Prime(65537), n: 3, target: Target::Gaussian };
    let kw = sign_expectation(&p, &KWiseSampler::new(spec, 8, 0).unwrap(), 100_000).unwrap();
    let hw = 4.0 * (iid.std_error.powi(2) + kw.std_error.powi(2)).sqrt();
    assert!((iid.estimate - kw.estimate).abs() <= hw, "{iid:?} {kw:?}");
}

#[test]
fn expectation_bound_holds_for_linear_form() {
    let p = ExactPoly::from_index_terms(2, [(vec![0], Rational::from_ratio(3, 5)), (vec![1], Rational::from_ratio(4, 5))])
        .unwrap();
    let dec = decompose(&p, &DecomposeOptions::new(vec![4])).unwrap();
    let dims = dec.part_counts().into_iter().filter(|&c| c > 0).collect::<Vec<_>>();
    let m = Mollifier::new(vec![50.0; dims.len()], dims).unwrap();
    let b = vec![4.0; m.dims().len()];
    let report = expectation_error_bound(&p, &dec, &m, &b, &IidSampler::new(2, 3, 0), 2000, 1000, 3).unwrap();
    assert!(report.holds, "{}", report.to_csv());
    assert!(report.m > 0.0);
}
