use super::*;

fn w1() -> WindowSetting {
    WindowSetting {
        window: Window::cube(2, -1.0, 1.0).unwrap(),
        mu_star: 200.0,
    }
}

fn small(replications: usize) -> ExperimentConfig {
    ExperimentConfig::new(ModelId::Two, &["poisson"], vec![w1()], replications, 7)
}

#[test]
fn single_replication_mse_is_squared_error() {
    let mut cfg = small(1);
    cfg.estimators = vec![EstimatorSpec::vare(TestFnKind::DivZ, None)];
    let rows = run_experiment(&cfg).unwrap();
    assert_eq!(rows.len(), 1);
    let est = rows[0].estimates[0].as_ref().unwrap();
    assert_eq!(rows[0].mse[0], (est[0] - 1.0).powi(2));
    assert_eq!(rows[0].mse[1], (est[1] - 4.0).powi(2));
    assert_eq!(rows[0].amse, 0.5 * (rows[0].mse[0] + rows[0].mse[1]));
}

#[test]
fn worker_count_does_not_change_results() {
    let mut a = small(24);
    a.workers = Some(1);
    let mut b = a.clone();
    b.workers = Some(3);
    let ra = run_experiment(&a).unwrap();
    let rb = run_experiment(&b).unwrap();
    let (mut ca, mut cb) = (Vec::new(), Vec::new());
    write_results_with(&ra, &mut ca, false).unwrap();
    write_results_with(&rb, &mut cb, false).unwrap();
    assert_eq!(ca, cb);
    for (x, y) in ra.iter().zip(&rb) {
        assert_eq!(x.estimates, y.estimates);
    }
    let mut c = a.clone();
    c.seed = 8;
    assert_ne!(run_experiment(&c).unwrap()[0].estimates, ra[0].estimates);
}

#[test]
fn amse_recomputes_from_estimates() {
    let rows = run_experiment(&small(30)).unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[1].eps, 0.1);
    for r in &rows {
        let ok: Vec<&Vec<f64>> = r.estimates.iter().flatten().collect();
        let mut total = 0.0;
        for (i, t) in [1.0, 4.0].iter().enumerate() {
            total += ok.iter().map(|e| (e[i] - t) * (e[i] - t)).sum::<f64>() / ok.len() as f64;
        }
        assert!((total / 2.0 - r.amse).abs() < 1e-12);
        assert_eq!(r.attempted, 30);
    }
}

#[test]
fn failures_are_counted_not_fatal() {
    let mut cfg = small(40);
    cfg.windows[0].mu_star = 1.5;
    cfg.estimators = vec![EstimatorSpec::vare(TestFnKind::DivZ, None)];
    let r = &run_experiment(&cfg).unwrap()[0];
    assert_eq!(r.attempted, 40);
    assert!(r.failures() > 0 && r.succeeded > 0);
    assert_eq!(r.estimates.iter().filter(|e| e.is_none()).count(), r.failures());
}

#[test]
fn empty_table_is_header_only() {
    let mut out = Vec::new();
    write_results(&[], &mut out).unwrap();
    assert_eq!(
        String::from_utf8(out).unwrap(),
        "model,process,window,estimator,eps,R,succeeded,mse_1,amse,mean_time_s\n"
    );
}

#[test]
fn csv_quotes_window_field() {
    let rows = run_experiment(&small(3)).unwrap();
    let mut out = Vec::new();
    write_results(&rows, &mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "model,process,window,estimator,eps,R,succeeded,mse_1,mse_2,amse,mean_time_s"
    );
    assert!(lines.next().unwrap().starts_with("2,poisson,\"-1,-1..1,1\",vare(div-z),0,3,3,"));
}

#[test]
fn config_round_trip() {
    let mut cfg = small(10);
    cfg.processes.push(ProcessChoice::Custom(ProcessKind::thomas(50.0, 0.1)));
    cfg.estimators.push(EstimatorSpec::mcle(20).local(20));
    cfg.workers = Some(2);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.json");
    write_config(&cfg, &path).unwrap();
    assert_eq!(load_config(&path).unwrap(), cfg);
}

#[test]
fn minimal_config_uses_defaults() {
    let text = r#"{
        "model": "2",
        "processes": ["poisson", "lgcp1"],
        "windows": [{"window": {"lower": [-1, -1], "upper": [1, 1]}, "mu_star": 200}],
        "replications": 5,
        "seed": 1
    }"#;
    let cfg = parse_config(text, "inline").unwrap();
    assert_eq!(cfg.estimators, default_estimators());
    assert_eq!(cfg.true_theta(), vec![1.0, 4.0]);
    assert_eq!(cfg.processes[1].kind().unwrap(), ProcessKind::lgcp(0.5, 1.0 / 15.0));
}

#[test]
fn unknown_key_is_named() {
    let text = r#"{"model": "2", "processes": ["poisson"], "windows": [], "replications": 5,
        "seed": 1, "colour": "red"}"#;
    match parse_config(text, "inline") {
        Err(Error::Parse { location, message }) => {
            assert!(message.contains("colour"), "{message}");
            assert!(location.starts_with("inline:"));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn invalid_values_are_rejected() {
    let mut cfg = small(0);
    assert!(matches!(cfg.validate(), Err(Error::Parse { .. })));
    cfg.replications = 1;
    cfg.processes = vec![ProcessChoice::Named("gibbs".into())];
    assert!(matches!(cfg.validate(), Err(Error::Parse { .. })));
    let mut cfg = small(1);
    cfg.theta = Some(vec![1.0]);
    assert!(cfg.validate().is_err());
}

#[test]
fn robust_time_is_median_of_batch_means() {
    assert_eq!(robust_mean_time(&[1.0, 2.0, 3.0]), 2.0);
    let mut t = vec![1.0; 100];
    t[0] = 1000.0;
    assert_eq!(robust_mean_time(&t), 1.0);
}

#[test]
fn replication_streams_differ() {
    use rand::Rng;
    let a: u64 = replication_rng(1, 0, 0).random();
    let b: u64 = replication_rng(1, 0, 1).random();
    let c: u64 = replication_rng(1, 1, 0).random();
    assert!(a != b && a != c && b != c);
    assert_eq!(a, replication_rng(1, 0, 0).random::<u64>());
}

#[test]
fn scaling_rows_cover_grid_of_settings() {
    let rows = run_dimension_scaling(&[2], &[0.5, 2.0], 200.0, 8, 3).unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0].n_dummy, 100);
    assert_eq!(rows[1].n_dummy, 400);
    assert_eq!(rows[0].amse_vare, rows[1].amse_vare);
    assert!(rows.iter().all(|r| r.ratio().is_finite()));
}

#[test]
fn local_config_lists_four_estimator_families() {
    let cfg = local_covariate_config(w1(), &[20, 40], 2, 1);
    let labels: Vec<String> = cfg.estimators.iter().map(EstimatorSpec::display_label).collect();
    assert_eq!(
        labels,
        ["vare(div-z)", "vare-loc(div-z,20)", "mcle(20)", "mcle-loc(20)", "vare-loc(div-z,40)", "mcle(40)", "mcle-loc(40)"]
    );
    let rows = run_local_covariate(&cfg).unwrap();
    assert_eq!(rows.len(), 7);
}
