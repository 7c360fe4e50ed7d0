use std::collections::HashMap;
use std::fs;

use slpn::harness::{
    advantage, empirical_tv, empirical_tv_counts, exact_tv, run_decryption_curve, run_experiment,
    tv_to_exact, tv_to_exact_counts, wilson, Assertion, DecryptionRow, ExperimentKind,
    ExperimentSpec, Grid, NoiseSpec, Rows, MAX_OUTCOMES,
};
use slpn::par::Execution;
use slpn::reductions::{BruteForceOracle, CoinOracle, WitnessOracle};
use slpn::sampling::gen_symplpn;
use slpn::{Error, Rng};

fn curve_spec(n: Vec<usize>, p: Vec<f64>, trials: usize) -> ExperimentSpec {
    ExperimentSpec {
        name: "curve".into(),
        experiment: ExperimentKind::DecryptionCurve,
        grid: Grid {
            n,
            k: vec![],
            p: p.into_iter().map(NoiseSpec::Value).collect(),
            trials,
        },
        seed: 2024,
        output: None,
        assertions: vec![],
        plot: false,
        isd: None,
    }
}

#[test]
fn tv_anchors() {
    let a: Vec<u32> = (0..100).collect();
    assert_eq!(empirical_tv(&a, &a).unwrap(), 0.0);
    let b: Vec<u32> = (100..200).collect();
    assert!((empirical_tv(&a, &b).unwrap() - 1.0).abs() < 1e-12);

    // Uniform on 64 outcomes against uniform on a 16-outcome subset: 1 − 1/4.
    let full: HashMap<u32, f64> = (0..64).map(|i| (i, 1.0 / 64.0)).collect();
    let sub: HashMap<u32, f64> = (0..16).map(|i| (i, 1.0 / 16.0)).collect();
    assert!((exact_tv(&full, &sub) - 0.75).abs() < 1e-12);
    let samples: Vec<u32> = (0..16).cycle().take(1600).collect();
    assert!((tv_to_exact(&samples, &full).unwrap() - 0.75).abs() < 1e-12);

    assert_eq!(empirical_tv_counts(&[5, 5, 0], &[10, 10, 0]).unwrap(), 0.0);
    assert!((tv_to_exact_counts(&[1, 0], &[0.5, 0.5]).unwrap() - 0.5).abs() < 1e-15);
}

#[test]
fn tv_rejects_huge_outcome_spaces() {
    let big = vec![1u64; MAX_OUTCOMES + 1];
    assert!(matches!(empirical_tv_counts(&big, &big), Err(Error::TooLarge(_))));
    let many: Vec<u32> = (0..(MAX_OUTCOMES as u32 + 1)).collect();
    assert!(matches!(empirical_tv(&many, &many), Err(Error::TooLarge(_))));
}

#[test]
fn wilson_properties() {
    for n in [1, 10, 1000] {
        for s in 0..=n.min(10) {
            let (lo, hi) = wilson(s, n);
            let phat = s as f64 / n as f64;
            assert!(lo <= phat && phat <= hi);
            assert!((0.0..=1.0).contains(&lo) && (0.0..=1.0).contains(&hi));
        }
    }
    assert_eq!(wilson(0, 50).0, 0.0);
    assert_eq!(wilson(50, 50).1, 1.0);
}

#[test]
fn advantage_anchors() {
    let rng = Rng::new(1);
    let gs = |r: &mut Rng| gen_symplpn(r, 8, 8, 0.05, true);
    let gu = |r: &mut Rng| gen_symplpn(r, 8, 8, 0.05, false);

    let coin = advantage(&CoinOracle, gs, gu, 2000, &rng, Execution::Parallel).unwrap();
    assert!(coin.ci_low <= 0.0, "{coin:?}");

    let peek = advantage(&WitnessOracle, gs, gu, 500, &rng, Execution::Parallel).unwrap();
    assert_eq!(peek.estimate, 1.0);

    // Structured words decode at weight 0 when e = 0 (0.95^8) and almost
    // never otherwise; uniform words hit the code w.p. 2^-8.
    let brute = advantage(&BruteForceOracle::default(), gs, gu, 2000, &rng, Execution::Parallel).unwrap();
    let calib = 0.95f64.powi(8) - 1.0 / 256.0;
    assert!((brute.estimate - calib).abs() < 0.05, "{brute:?}");
    assert!(brute.ci_low <= brute.estimate && brute.estimate <= brute.ci_high);

    assert!(advantage(&CoinOracle, gs, gu, 99, &rng, Execution::Parallel).is_err());
}

#[test]
fn decryption_curve_covers_predictions() {
    let ps: Vec<f64> = (0..20).map(|i| 0.01 * i as f64).collect();
    let mut spec = curve_spec(vec![8, 16, 32], ps, 1000);
    spec.assertions = vec![Assertion::PredictedCoverage { min_fraction: 0.95 }];
    let report = run_experiment(&spec, Execution::Parallel).unwrap();
    let Rows::Decryption(rows) = &report.rows else {
        panic!("wrong row kind")
    };
    assert_eq!(rows.len(), 60);
    assert!(report.passed(), "{:?}", report.assertions);
}

#[test]
fn runs_are_reproducible_across_execution_modes() {
    let spec = curve_spec(vec![12, 20], vec![0.0, 0.1, 0.2], 300);
    let a = run_decryption_curve(&spec, Execution::Parallel).unwrap();
    let b = run_decryption_curve(&spec, Execution::Sequential).unwrap();
    let c = run_decryption_curve(&spec, Execution::Parallel).unwrap();
    assert_eq!(a, b);
    assert_eq!(a, c);
    assert_eq!(a[0].measured, 1.0);
}

#[test]
fn output_round_trips_and_resumes() {
    let dir = tempfile::tempdir().unwrap();
    let mut spec = curve_spec(vec![10], vec![0.0, 0.05, 0.1, 0.15], 200);
    spec.output = Some(dir.path().to_path_buf());
    spec.plot = true;
    let first = run_experiment(&spec, Execution::Parallel).unwrap();
    assert_eq!(first.resumed, 0);
    let Rows::Decryption(rows) = first.rows else {
        panic!("wrong row kind")
    };

    let csv_path = dir.path().join("results.csv");
    let mut rdr = csv::Reader::from_path(&csv_path).unwrap();
    let read: Vec<DecryptionRow> = rdr.deserialize().map(|r| r.unwrap()).collect();
    assert_eq!(read, rows);

    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["spec_hash"], spec.hash());
    assert_eq!(manifest["seed"], 2024);
    assert!(fs::read_to_string(dir.path().join("plot.svg")).unwrap().starts_with("<svg"));

    // Keep the header and two rows plus a torn third row.
    let text = fs::read_to_string(&csv_path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    let torn = format!("{}\n{}\n{}\n{}", lines[0], lines[1], lines[2], &lines[3][..5]);
    fs::write(&csv_path, torn).unwrap();
    let second = run_experiment(&spec, Execution::Sequential).unwrap();
    assert_eq!(second.resumed, 2);
    let Rows::Decryption(again) = second.rows else {
        panic!("wrong row kind")
    };
    assert_eq!(again, rows);
    let mut rdr = csv::Reader::from_path(&csv_path).unwrap();
    let read: Vec<DecryptionRow> = rdr.deserialize().map(|r| r.unwrap()).collect();
    assert_eq!(read, rows);

    let mut other = spec.clone();
    other.seed += 1;
    assert!(matches!(run_experiment(&other, Execution::Parallel), Err(Error::Format(_))));
}

#[test]
fn spec_file_parses_with_auto_noise_and_assertions() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("exp.json");
    fs::write(
        &path,
        r#"{
  "name": "auto",
  "experiment": "decryption_curve",
  "grid": { "n": [16], "p": ["auto:0.75", 0.0], "trials": 2000 },
  "seed": 5,
  "assertions": [
    { "type": "measured_near", "target": 0.75, "tolerance": 0.04, "n": 16 },
    { "type": "max_runtime", "seconds": 120 }
  ]
}"#,
    )
    .unwrap();
    let spec = ExperimentSpec::from_file(&path).unwrap();
    assert_eq!(spec.grid.p.len(), 2);
    let report = run_experiment(&spec, Execution::Parallel).unwrap();
    // The p = 0 row sits at 1.0, so measured_near fails on it.
    assert!(!report.assertions[0].passed);
    assert!(report.assertions[1].passed);
    assert!(!report.passed());

    fs::write(&path, r#"{"name":"x","experiment":"decryption_curve","grid":{"n":[],"p":[0.1],"trials":1},"seed":0}"#).unwrap();
    assert!(ExperimentSpec::from_file(&path).is_err());
    fs::write(&path, r#"{"name":"x","experiment":"nope","grid":{"n":[4],"p":[0.1],"trials":1},"seed":0}"#).unwrap();
    assert!(ExperimentSpec::from_file(&path).is_err());
}

#[test]
fn matched_isd_spec_runs_with_assertions() {
    let spec: ExperimentSpec = serde_json::from_str(
        r#"{
  "name": "isd",
  "experiment": "matched_isd",
  "grid": { "n": [24], "p": [0.0, 0.02], "trials": 9 },
  "seed": 11,
  "isd": { "max_iters": 20000, "weight_factor": 2.5 },
  "assertions": [
    { "type": "success_rate", "attack": "symp_pair", "min": 0.8 },
    { "type": "measured_near", "target": 0.5, "tolerance": 0.1 }
  ]
}"#,
    )
    .unwrap();
    let report = run_experiment(&spec, Execution::Parallel).unwrap();
    let Rows::Isd(rows) = &report.rows else {
        panic!("wrong row kind")
    };
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0].symp_pair_median_iterations, 1.0);
    assert!(report.assertions[0].passed, "{:?}", report.assertions[0]);
    // Decryption assertions do not apply to ISD rows.
    assert!(!report.assertions[1].passed);
}
