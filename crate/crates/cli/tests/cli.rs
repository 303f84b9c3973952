use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn qtradeoff(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qtradeoff"))
        .args(args)
        .env_remove("QTRADEOFF_SEED")
        .output()
        .expect("binary runs")
}

fn sweep(dir: &Path, scheme: &str, steps: usize) -> Vec<Vec<String>> {
    let out = dir.join(format!("{scheme}.csv"));
    let o = qtradeoff(&["sweep", "--scheme", scheme, "--steps", &steps.to_string(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.ends_with('\n'));
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "scheme,param,delta_closed,Delta_closed,delta_numeric,Delta_numeric,kind"
    );
    lines.map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn optimal_sweep_starts_at_the_boundary() {
    let dir = TempDir::new().unwrap();
    let rows = sweep(dir.path(), "optimal", 11);
    assert_eq!(rows.len(), 11);
    assert_eq!(rows[0][2], "0.500000000000");
    assert_eq!(rows[0][3], "0.00000000000");
    for r in &rows {
        assert_eq!(r[6], "worst-case-trace-norm");
        assert!((num(&r[2]) - num(&r[4])).abs() < 1e-6);
        assert!((num(&r[3]) - num(&r[5])).abs() < 1e-6);
        for field in &r[1..6] {
            let digits = field.trim_start_matches('-').split('e').next().unwrap().replace('.', "");
            assert_eq!(digits.trim_start_matches('0').len().max(1), if num(field) == 0.0 { 1 } else { 12 }, "{field}");
        }
    }
}

#[test]
fn swap_sweep_midpoint() {
    let dir = TempDir::new().unwrap();
    let rows = sweep(dir.path(), "swap", 3);
    assert!((num(&rows[1][2]) - 0.25).abs() < 1e-12);
    assert!((num(&rows[1][3]) - 0.25).abs() < 1e-12);
    assert!((num(&rows[1][4]) - 0.25).abs() < 1e-6);
}

#[test]
fn cloner_sweep_satisfies_the_curve() {
    let dir = TempDir::new().unwrap();
    for r in sweep(dir.path(), "cloner", 5) {
        let (d, dd) = (num(&r[2]), num(&r[3]));
        let curve = 0.25 * ((2.0 - 3.0 * d).sqrt() - d.sqrt()).powi(2);
        assert!((dd - curve).abs() < 1e-10);
    }
}

#[test]
fn diagonal_sweep_runs() {
    let dir = TempDir::new().unwrap();
    let rows = sweep(dir.path(), "diagonal", 4);
    assert_eq!(rows.len(), 4);
}

#[test]
fn bad_sweep_inputs_exit_2() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("x.csv");
    let out = out.to_str().unwrap();
    assert_eq!(qtradeoff(&["sweep", "--scheme", "bogus", "--steps", "3", "--out", out]).status.code(), Some(2));
    assert_eq!(qtradeoff(&["sweep", "--scheme", "swap", "--steps", "1", "--out", out]).status.code(), Some(2));
    assert_eq!(
        qtradeoff(&["sweep", "--scheme", "swap", "--steps", "3", "--kind", "nope", "--out", out]).status.code(),
        Some(2)
    );
    let unwritable = dir.path().join("missing/dir/x.csv");
    let o = qtradeoff(&["sweep", "--scheme", "swap", "--steps", "3", "--out", unwritable.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn runs_log_kind_and_strategy() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("s.csv");
    let o = qtradeoff(&["sweep", "--scheme", "swap", "--steps", "2", "--kind", "hs", "--out", out.to_str().unwrap()]);
    let log = String::from_utf8_lossy(&o.stderr);
    assert!(log.contains("measure kind: worst-case-hilbert-schmidt"), "{log}");
    assert!(log.contains("strategy:"), "{log}");
}

fn eval(dir: &Path, json: &str, kind: &str) -> Output {
    let path = dir.join("ins.json");
    fs::write(&path, json).unwrap();
    qtradeoff(&["eval", "--instrument", path.to_str().unwrap(), "--kind", kind])
}

#[test]
fn eval_examples() {
    let dir = TempDir::new().unwrap();
    let o = eval(dir.path(), r#"{"family":"optimal","gamma":1.0}"#, "trace");
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["delta"].as_f64().unwrap().abs() < 1e-9);
    assert!((v["Delta"].as_f64().unwrap() - 0.5).abs() < 1e-6);
    assert_eq!(v["kind"], "worst-case-trace-norm");
    assert!(v["argmax_states"]["Delta"]["bloch"].is_array());

    let o = eval(dir.path(), r#"{"family":"diagonal","b1":0.5,"b2":0.5}"#, "trace");
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["delta"].as_f64().unwrap() - 0.25).abs() < 1e-6);
    assert!((v["Delta"].as_f64().unwrap() - 0.066987).abs() < 1e-6);
}

#[test]
fn eval_rejects_bad_instruments() {
    let dir = TempDir::new().unwrap();
    let raw = r#"{"family":"raw","k1":[[[1,0],[0,0]],[[0,0],[1,0]]],"k2":[[[1,0],[0,0]],[[0,0],[1,0]]]}"#;
    let o = eval(dir.path(), raw, "trace");
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not normalized"));

    let o = eval(dir.path(), r#"{"family":"optimal","gamma":"high"}"#, "trace");
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("at `gamma`"));

    let o = eval(dir.path(), r#"{"family":"raw","k1":[[[1,0],[0,0]],[[0,0],[1]]],"k2":[]}"#, "trace");
    assert!(String::from_utf8_lossy(&o.stderr).contains("at `k1[1][1]`"));

    let o = eval(dir.path(), r#"{"gamma":0.5}"#, "trace");
    assert!(String::from_utf8_lossy(&o.stderr).contains("at `family`"));
}

fn experiment(dir: &Path, config: &str, out: &str, seed: Option<&str>) -> Output {
    let cfg = dir.join("cfg.json");
    fs::write(&cfg, config).unwrap();
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qtradeoff"));
    cmd.args(["experiment", "--config", cfg.to_str().unwrap(), "--out", dir.join(out).to_str().unwrap()])
        .env_remove("QTRADEOFF_SEED");
    if let Some(s) = seed {
        cmd.env("QTRADEOFF_SEED", s);
    }
    cmd.output().unwrap()
}

fn read(dir: &Path, out: &str, file: &str) -> String {
    fs::read_to_string(dir.join(out).join(file)).unwrap()
}

// α = (π − arcsin ½)/2, φ = π/2 gives γ = ½, β = 0.
const HALF: &str = r#"{"alpha":1.3089969389957472,"phi":1.5707963267948966,"shots":1000000,"seed":7}"#;

#[test]
fn experiment_writes_reproducible_outputs() {
    let dir = TempDir::new().unwrap();
    let o = experiment(dir.path(), HALF, "a", None);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).contains("gamma = 0.500000"));
    assert!(experiment(dir.path(), HALF, "b", None).status.success());
    for f in ["dataset.json", "estimate.json"] {
        assert_eq!(read(dir.path(), "a", f), read(dir.path(), "b", f));
    }
    let est: Value = serde_json::from_str(&read(dir.path(), "a", "estimate.json")).unwrap();
    assert!((est["gamma"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    let analytic = &est["analytic"];
    for (a, e) in [("delta", "delta_hat"), ("Delta", "Delta_hat")] {
        let diff = analytic[a].as_f64().unwrap() - est["estimate"][e].as_f64().unwrap();
        assert!(diff.abs() < 3e-3, "{a}: {diff}");
    }
    let data: Value = serde_json::from_str(&read(dir.path(), "a", "dataset.json")).unwrap();
    assert!(data["records"][0]["n_plus"].is_u64());
}

#[test]
fn exact_mode_matches_analytic() {
    let dir = TempDir::new().unwrap();
    let cfg = HALF.replace("1000000", "\"exact\"");
    assert!(experiment(dir.path(), &cfg, "x", None).status.success());
    let est: Value = serde_json::from_str(&read(dir.path(), "x", "estimate.json")).unwrap();
    assert!((est["analytic"]["delta"].as_f64().unwrap() - est["estimate"]["delta_hat"].as_f64().unwrap()).abs() < 1e-6);
    assert!((est["analytic"]["Delta"].as_f64().unwrap() - est["estimate"]["Delta_hat"].as_f64().unwrap()).abs() < 1e-6);
}

#[test]
fn seed_variable_overrides_config() {
    let dir = TempDir::new().unwrap();
    experiment(dir.path(), HALF, "plain", None);
    let o = experiment(dir.path(), &HALF.replace("\"seed\":7", "\"seed\":99"), "env", Some("7"));
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("QTRADEOFF_SEED"));
    assert_eq!(read(dir.path(), "plain", "dataset.json"), read(dir.path(), "env", "dataset.json"));
    assert_eq!(experiment(dir.path(), HALF, "bad", Some("seven")).status.code(), Some(2));
}

#[test]
fn experiment_config_errors_name_the_field() {
    let dir = TempDir::new().unwrap();
    let o = experiment(dir.path(), r#"{"alpha":0.5,"phi":0.1,"shots":10,"seed":1,"colour":"red"}"#, "x", None);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("colour"));
    let o = experiment(dir.path(), r#"{"alpha":0.5,"phi":"up","shots":10,"seed":1}"#, "x", None);
    assert!(String::from_utf8_lossy(&o.stderr).contains("at `phi`"));
}

#[test]
fn verify_quick_passes_and_canary_fails() {
    let o = qtradeoff(&["verify", "--level", "quick"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let o = qtradeoff(&["verify", "--level", "quick", "--frontier-offset", "-1e-3"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL dominance"));
}
