use std::fs;
use std::process::Command;

use pointvar::{GridCovariate, Grid, ModelId, PointPattern, Window, builtin};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pointvar"))
}

#[test]
fn simulate_then_estimate() {
    let dir = tempfile::tempdir().unwrap();
    let pattern = dir.path().join("x.txt");
    let status = bin()
        .args(["simulate", "--process", "poisson", "--model", "2", "--window=-1,-1..1,1"])
        .args(["--mu", "200", "--seed", "5", "--out"])
        .arg(&pattern)
        .status()
        .unwrap();
    assert!(status.success());
    let text = fs::read_to_string(&pattern).unwrap();
    assert!(text.starts_with("# d=2 window=-1,-1..1,1 process=poisson seed=5\n"));
    let x = PointPattern::read_from(text.as_bytes()).unwrap();
    assert!(x.len() > 100);

    let out = bin()
        .args(["estimate", "--method", "vare", "--test-fn", "div-z", "--model", "2", "--ci", "--pattern"])
        .arg(&pattern)
        .output()
        .unwrap();
    assert!(out.status.success());
    let line = String::from_utf8(out.stdout).unwrap();
    let fields: Vec<f64> = line.trim().split(',').map(|v| v.parse().unwrap()).collect();
    // theta_1, theta_2, cond, se_1, se_2
    assert_eq!(fields.len(), 5);
    assert!(fields[2] >= 1.0);
    assert!(fields[3] > 0.0 && fields[4] > 0.0);

    let out = bin()
        .args(["estimate", "--method", "mcle", "--model", "2", "--grid", "40", "--pattern"])
        .arg(&pattern)
        .output()
        .unwrap();
    let line = String::from_utf8(out.stdout).unwrap();
    // theta_1, theta_2, cond, beta_hat
    assert_eq!(line.trim().split(',').count(), 4);
}

#[test]
fn estimate_with_gridded_covariate() {
    let dir = tempfile::tempdir().unwrap();
    let w = Window::cube(2, -1.0, 1.0).unwrap();
    let grid = Grid::uniform(&w, 80).unwrap();
    let zg = GridCovariate::sample(&builtin(ModelId::Two, 2).unwrap(), grid);
    let cov = dir.path().join("z.txt");
    zg.write_to(fs::File::create(&cov).unwrap()).unwrap();
    let pattern = dir.path().join("x.txt");
    assert!(bin()
        .args(["simulate", "--process", "thomas1", "--model", "2", "--window=-1,-1..1,1", "--mu", "200", "--out"])
        .arg(&pattern)
        .status()
        .unwrap()
        .success());
    let out = bin()
        .args(["estimate", "--method", "vare", "--model", "2", "--covariate"])
        .arg(&cov)
        .arg("--pattern")
        .arg(&pattern)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim().split(',').count(), 3);
}

#[test]
fn experiment_runs_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(
        &cfg,
        r#"{
            "model": "3",
            "processes": ["poisson"],
            "windows": [{"window": {"lower": [-1, -1], "upper": [1, 1]}, "mu_star": 200}],
            "replications": 12,
            "seed": 4,
            "estimators": [{"method": "vare"}, {"method": "mcle", "grid": 30}]
        }"#,
    )
    .unwrap();
    let run = |name: &str, workers: &str| {
        let out = dir.path().join(name);
        let status = bin()
            .args(["experiment", "--workers", workers, "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.success());
        fs::read_to_string(out).unwrap()
    };
    let strip_time = |s: &str| -> Vec<String> {
        s.lines().map(|l| l.rsplit_once(',').unwrap().0.to_string()).collect()
    };
    let a = run("a.csv", "1");
    let b = run("b.csv", "4");
    assert!(a.starts_with("model,process,window,estimator,eps,R,succeeded,mse_1,amse,mean_time_s\n"));
    assert_eq!(a.lines().count(), 3);
    assert_eq!(strip_time(&a), strip_time(&b));
}

#[test]
fn config_errors_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, r#"{"model": "2", "processes": ["poisson"], "windows": [], "replications": 1, "seed": 0, "speed": 9}"#)
        .unwrap();
    let out = bin()
        .args(["experiment", "--config"])
        .arg(&cfg)
        .args(["--out", "/dev/null"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("speed"));
    let missing = bin()
        .args(["experiment", "--config", "/nonexistent/cfg.json", "--out", "/dev/null"])
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn bad_pattern_file_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let pattern = dir.path().join("x.txt");
    fs::write(&pattern, "# d=2 window=-1,-1..1,1 process=poisson seed=1\n0.5 abc\n").unwrap();
    let out = bin()
        .args(["estimate", "--method", "vare", "--model", "2", "--pattern"])
        .arg(&pattern)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}
