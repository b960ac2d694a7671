use std::fs;
use std::process::{Command, Output};

use hrcalc::qlms::{read_csv, run_system_identification};
use hrcalc::Quaternion;

fn hrcalc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hrcalc")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8")
}

fn gradient_lines(out: &Output) -> Vec<(String, String)> {
    stdout(out)
        .lines()
        .map(|l| {
            let (k, v) = l.split_once(' ').expect("key value");
            (k.to_string(), v.to_string())
        })
        .collect()
}

fn slot(out: &Output, key: &str) -> Quaternion {
    let lines = gradient_lines(out);
    lines.iter().find(|(k, _)| k == key).expect("slot present").1.parse().expect("quaternion")
}

#[test]
fn eval_grad_exp_at_zero() {
    let out = hrcalc(&["eval-grad", "exp", "0+0i+0j+0k"]);
    assert_eq!(out.status.code(), Some(0));
    let lines = gradient_lines(&out);
    assert_eq!(lines[0], ("side".into(), "left".into()));
    assert_eq!(lines.iter().map(|l| l.0.as_str()).collect::<Vec<_>>(), ["side", "d1", "dI", "dJ", "dK"]);
    assert_eq!(slot(&out, "d1"), Quaternion::ONE);
}

#[test]
fn eval_grad_square() {
    let q = "1+2i+3j+4k";
    for side in ["left", "right"] {
        let out = hrcalc(&["eval-grad", "power:2", q, "--side", side]);
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(gradient_lines(&out)[0].1, side);
        assert_eq!(slot(&out, "d1"), Quaternion::new(2.0, 2.0, 3.0, 4.0));
        assert!(slot(&out, "dI").max_abs_diff(Quaternion::new(0.0, 2.0, 0.0, 0.0)) < 1e-14);
        assert!(slot(&out, "dJ").max_abs_diff(Quaternion::new(0.0, 0.0, 3.0, 0.0)) < 1e-14);
        assert!(slot(&out, "dK").max_abs_diff(Quaternion::new(0.0, 0.0, 0.0, 4.0)) < 1e-14);
    }
}

#[test]
fn eval_grad_power_with_center_and_negative_point() {
    let out = hrcalc(&["eval-grad", "power:-1:1+0i+0j+0k", "-1+0.5i+0j+0k"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let q = Quaternion::new(-2.0, 0.5, 0.0, 0.0);
    let inv = q.inverse().unwrap();
    // for n = -1 the HR derivative is -½(q̃⁻² + |q̃|⁻²)
    let want = (inv * inv + Quaternion::real(1.0 / q.norm_sqr())) * -0.5;
    assert!(slot(&out, "d1").max_abs_diff(want) < 1e-14);
}

#[test]
fn eval_grad_tanh_and_ln_succeed_off_the_singular_set() {
    for f in ["tanh", "ln"] {
        let out = hrcalc(&["eval-grad", f, "0.5-0.25i+0.1j+0.3k"]);
        assert_eq!(out.status.code(), Some(0), "{f}");
        assert_eq!(gradient_lines(&out).len(), 5);
    }
}

#[test]
fn eval_grad_domain_errors_exit_2() {
    let out = hrcalc(&["eval-grad", "ln", "0+0i+0j+0k"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("ln"));
    assert_eq!(hrcalc(&["eval-grad", "ln", "-3+0i+0j+0k"]).status.code(), Some(2));
    assert_eq!(hrcalc(&["eval-grad", "tanh", "0+1.5707963267948966i+0j+0k"]).status.code(), Some(2));
    assert_eq!(hrcalc(&["eval-grad", "power:-2", "0+0i+0j+0k"]).status.code(), Some(2));
}

#[test]
fn eval_grad_parse_errors_exit_1() {
    assert_eq!(hrcalc(&["eval-grad", "sin", "1+0i+0j+0k"]).status.code(), Some(1));
    assert_eq!(hrcalc(&["eval-grad", "exp", "1+2i"]).status.code(), Some(1));
    assert_eq!(hrcalc(&["eval-grad", "power:two", "1+0i+0j+0k"]).status.code(), Some(1));
    assert_eq!(hrcalc(&["eval-grad", "exp", "1+0i+0j+0k", "--side", "up"]).status.code(), Some(1));
    assert_eq!(hrcalc(&["eval-grad", "exp", "1+0i+0j+0k", "--colour"]).status.code(), Some(1));
    assert_eq!(hrcalc(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(hrcalc(&[]).status.code(), Some(1));
}

#[test]
fn validate_single_suites() {
    let out = hrcalc(&["validate", "algebra"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let summary = text.lines().last().unwrap();
    assert!(summary.starts_with("algebra") && summary.contains(" 0 failed"), "{summary}");

    let out = hrcalc(&["validate", "consistency"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().filter(|l| l.trim_end().ends_with("decreasing")).collect();
    assert_eq!(rows.len(), 40);
    assert!(rows.iter().all(|r| !r.contains("NOT")));

    let out = hrcalc(&["validate", "fd"]);
    assert_eq!(out.status.code(), Some(0));
    let slopes: Vec<f64> = stdout(&out)
        .lines()
        .filter_map(|l| l.split("central slope ").nth(1))
        .map(|s| s.trim().parse().unwrap())
        .collect();
    assert!(!slopes.is_empty());
    assert!(slopes.iter().all(|s| (s - 2.0).abs() < 0.2), "{slopes:?}");
}

#[test]
fn validate_all() {
    let out = hrcalc(&["validate", "all"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    for suite in ["algebra", "rules", "series", "consistency", "fd"] {
        assert!(text.lines().any(|l| l.starts_with(suite) && l.contains(" 0 failed")), "{suite}");
    }
    assert_eq!(hrcalc(&["validate", "everything"]).status.code(), Some(1));
}

const CONFIG: &str = "# noiseless identification\nM=4\nmu=0.05\niterations=2000\nnoise_power=0\nseed=11\n";

#[test]
fn qlms_run_converges_and_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    let csv_path = dir.path().join("out.csv");
    fs::write(&cfg, CONFIG).unwrap();
    let out = hrcalc(&["qlms-run", cfg.to_str().unwrap(), csv_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let text = stdout(&out);
    let value = |key: &str| -> f64 {
        text.lines().find_map(|l| l.strip_prefix(key)).unwrap().trim().parse().unwrap()
    };
    let initial = value("initial_weight_error_norm");
    let fin = value("final_weight_error_norm");
    assert!(fin <= 1e-6 * initial, "{fin} vs {initial}");

    let rows = read_csv(fs::File::open(&csv_path).unwrap()).unwrap();
    assert_eq!(rows.len(), 2000);
    assert_eq!(rows.last().unwrap().weight_error_norm, fin);

    // the file matches the in-process record exactly at the printed precision
    let record = run_system_identification(&hrcalc_cli_config(CONFIG)).unwrap();
    assert_eq!(rows, record.rows().collect::<Vec<_>>());

    // same seed, same bytes
    let again = dir.path().join("again.csv");
    let out = hrcalc(&["qlms-run", cfg.to_str().unwrap(), again.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(fs::read(&csv_path).unwrap(), fs::read(&again).unwrap());
}

fn hrcalc_cli_config(text: &str) -> hrcalc::qlms::ExperimentConfig {
    let get = |k: &str| text.lines().find_map(|l| l.strip_prefix(&format!("{k}="))).unwrap();
    let m: usize = get("M").parse().unwrap();
    let seed: u64 = get("seed").parse().unwrap();
    hrcalc::qlms::ExperimentConfig {
        filter_length: m,
        true_weights: hrcalc::qlms::ExperimentConfig::random_true_weights(m, seed),
        noise_power: get("noise_power").parse().unwrap(),
        step_size: get("mu").parse().unwrap(),
        iterations: get("iterations").parse().unwrap(),
        rng_seed: seed,
    }
}

#[test]
fn qlms_run_with_explicit_weights() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    let csv_path = dir.path().join("out.csv");
    fs::write(&cfg, "M=2\nmu=0.05\niterations=500\nnoise_power=0.01\nseed=2\ntrue_weights=1+0i+0j+0k;0+0.5i-0.5j+0k\n").unwrap();
    let out = hrcalc(&["qlms-run", cfg.to_str().unwrap(), csv_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let rows = read_csv(fs::File::open(&csv_path).unwrap()).unwrap();
    assert_eq!(rows.len(), 500);
    assert_eq!(rows[0].iteration, 1);
    assert!(rows.last().unwrap().weight_error_norm < 0.05);
}

#[test]
fn qlms_run_divergence_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    let csv_path = dir.path().join("out.csv");
    fs::write(&cfg, CONFIG.replace("mu=0.05", "mu=3")).unwrap();
    let out = hrcalc(&["qlms-run", cfg.to_str().unwrap(), csv_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("diverged"), "{err}");
    assert!(err.contains("stability bound"), "{err}");
    let rows = read_csv(fs::File::open(&csv_path).unwrap()).unwrap();
    assert!(rows.len() < 2000);
}

#[test]
fn qlms_run_config_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("out.csv");
    let missing = dir.path().join("missing.cfg");
    let out = hrcalc(&["qlms-run", missing.to_str().unwrap(), csv_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!csv_path.exists());

    let bad = dir.path().join("bad.cfg");
    fs::write(&bad, "M=4\nmu=0.05\n").unwrap();
    let out = hrcalc(&["qlms-run", bad.to_str().unwrap(), csv_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(hrcalc(&["qlms-run", bad.to_str().unwrap()]).status.code(), Some(1));
}
