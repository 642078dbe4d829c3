use hdpath::config::{default_dims, parse_noise};
use hdpath::counts::{read_counts, write_counts};
use hdpath::{certify_records, run_certify, run_compile, run_simulate, simulate_records, CertifyOptions, CompileArtifact,
    CompileRequest, NormalizationChoice, PipelineError, RunConfig};
use hdpath_core::measure::{ArmBasis, Sign};

fn calibrated(cfg: &RunConfig) -> NormalizationChoice {
    NormalizationChoice::Calibrated { coincidence_rate_hz: cfg.coincidence_rate() }
}

#[test]
fn sampled_pure_state_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = RunConfig::new(16);
    cfg.seed = 5;
    let counts = dir.path().join("c.csv");
    run_simulate(&cfg, &counts).unwrap();
    let options = CertifyOptions { normalization: calibrated(&cfg), n_resamples: 100, seed: 1, ..Default::default() };
    let doc = run_certify(&counts, &options, None, None).unwrap();
    assert_eq!(doc.rows.len(), 8);
    for row in &doc.rows {
        let sigma = row.fidelity_std.unwrap();
        assert!((row.fidelity - 1.0).abs() <= 3.0 * sigma, "d={} F={} +/- {sigma}", row.d, row.fidelity);
    }
}

#[test]
fn noisy_source_trends() {
    // Measured crosstalk bound plus path dephasing: larger blocks lose
    // fidelity but gain entanglement. Global white noise instead makes the
    // bound peak below d = 32.
    let mut cfg = RunConfig::new(32);
    cfg.noise = parse_noise("crosstalk:4.49e-5,dephase:0.2").unwrap();
    cfg.exact = true;
    let recs = simulate_records(&cfg).unwrap();
    let options = CertifyOptions { normalization: calibrated(&cfg), n_resamples: 0, ..Default::default() };
    let doc = certify_records(&recs, "mem", &options).unwrap();
    assert_eq!(doc.rows.iter().map(|r| r.d).collect::<Vec<_>>(), default_dims(32));
    for w in doc.rows.windows(2) {
        assert!(w[1].fidelity < w[0].fidelity);
        assert!(w[1].eof.unwrap() > w[0].eof.unwrap());
    }
}

#[test]
fn counts_file_round_trip_preserves_certification() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = RunConfig::new(8);
    cfg.noise = parse_noise("fidelity:0.8").unwrap();
    cfg.imaginary = true;
    cfg.full_grid = true;
    let recs = simulate_records(&cfg).unwrap();
    let path = dir.path().join("c.csv");
    write_counts(&path, &recs).unwrap();
    let back = read_counts(&path).unwrap();
    for norm in [NormalizationChoice::FullGrid, calibrated(&cfg), NormalizationChoice::Auto] {
        let options = CertifyOptions { normalization: norm, n_resamples: 0, ..Default::default() };
        let a = certify_records(&recs, "x", &options).unwrap();
        let b = certify_records(&back, "x", &options).unwrap();
        assert_eq!(a.rows, b.rows);
    }
    let auto = certify_records(&back, "x", &CertifyOptions { normalization: NormalizationChoice::Auto, n_resamples: 0, ..Default::default() }).unwrap();
    assert_eq!(auto.meta.normalization, "full-grid");
}

#[test]
fn accidentals_lower_fidelity() {
    let mut cfg = RunConfig::new(8);
    cfg.seed = 2;
    let options = CertifyOptions { normalization: calibrated(&cfg), n_resamples: 0, ..Default::default() };
    let clean = certify_records(&simulate_records(&cfg).unwrap(), "x", &options).unwrap();
    cfg.singles_hz = Some(2e5);
    let noisy = certify_records(&simulate_records(&cfg).unwrap(), "x", &options).unwrap();
    assert!(noisy.row(8).unwrap().fidelity < clean.row(8).unwrap().fidelity);
    cfg.exact = true;
    assert!(matches!(simulate_records(&cfg), Err(PipelineError::Config(_))));
}

#[test]
fn report_meta_records_assumed_crosstalk() {
    let mut cfg = RunConfig::new(4);
    cfg.exact = true;
    let recs = simulate_records(&cfg).unwrap();
    let options = CertifyOptions { normalization: NormalizationChoice::Assumed { per_cell: 1e-4 }, n_resamples: 0, ..Default::default() };
    let doc = certify_records(&recs, "x", &options).unwrap();
    assert_eq!(doc.meta.crosstalk_assumed, Some(1e-4));
    assert_eq!(doc.provenance.tool_version, env!("CARGO_PKG_VERSION"));
}

#[test]
fn compile_examples() {
    let a = run_compile(&CompileRequest::Subspace { dim: 32, pair: Some((0, 1)), basis: ArmBasis::X, sign: Sign::Plus }).unwrap();
    assert!(a.passed());
    assert_eq!(a.json["stages"][0]["role"], "SSM");
    let m = run_compile(&CompileRequest::Mub { n: 3, phases: vec![], computational: false }).unwrap();
    assert!(m.passed());
    assert_eq!(m.json["network"]["inputs"].as_array().unwrap().len(), 8);
    let c = run_compile(&CompileRequest::Mub { n: 2, phases: vec![], computational: true }).unwrap();
    assert!(c.passed());
    let err = run_compile(&CompileRequest::Subspace { dim: 32, pair: Some((5, 5)), basis: ArmBasis::X, sign: Sign::Plus })
        .unwrap_err();
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn failed_verification_maps_to_exit_three() {
    let artifact = CompileArtifact {
        json: serde_json::Value::Null,
        text: String::new(),
        failure: Some(("HWPA3".into(), "leakage".into())),
    };
    assert_eq!(artifact.into_result().unwrap_err().exit_code(), 3);
}
