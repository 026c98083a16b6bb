use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const WORDS: &str = r#"[
    {"name": "twist1", "factors": [{"type": "twist", "m": 1, "poly_r2": [1.0], "exp": 1}]},
    {"name": "shear", "factors": [{"type": "ham", "k": 1, "q": [[0.0, 1.0]], "time": 0.3, "exp": 1}]},
    {"name": "flow", "factors": [{"type": "ham", "k": 1, "q": [[1.0, 0.0, 0.5]], "time": 0.4, "exp": 1}]},
    {"name": "still", "factors": []}
]"#;

fn fluxlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fluxlab")).args(args).env_remove("FLUXLAB_JOBS").output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn eval(dir: &Path, word: &str, op: &str) -> (i32, Option<Value>, String) {
    let cfg = write_config(dir, "words.json", &format!(r#"{{"words": {WORDS}}}"#));
    let o = fluxlab(&["eval", "--config", cfg.to_str().unwrap(), word, op]);
    let v = serde_json::from_slice(&o.stdout).ok();
    (code(&o), v, String::from_utf8_lossy(&o.stderr).into_owned())
}

#[test]
fn all_identities_pass_and_are_listed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", r#"{"identities": "all", "n_instances": 3}"#);
    let rep = dir.path().join("r.json");
    let o = fluxlab(&["verify", "--config", cfg.to_str().unwrap(), "--report", rep.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&rep).unwrap()).unwrap();
    let suites = r["suites"].as_array().unwrap();
    assert!(suites.len() >= 19);
    assert!(suites.iter().all(|s| s["verdict"] == "pass"));
    for key in ["coboundary", "hamiltonian_sign", "wedge_order"] {
        assert!(r["conventions"][key].is_string());
    }
    assert_eq!(r["environment"]["seed"], 20240601);
}

#[test]
fn reports_are_byte_identical_across_runs_and_job_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        r#"{"identities": ["PROP_3_3", "ILM_COCYCLE", "STOKES_5_4"], "n_instances": 3, "seed": 7}"#,
    );
    let mut bodies = Vec::new();
    for (i, jobs) in ["1", "2"].iter().enumerate() {
        let rep = dir.path().join(format!("r{i}.json"));
        let o =
            fluxlab(&["verify", "--config", cfg.to_str().unwrap(), "--jobs", jobs, "--report", rep.to_str().unwrap()]);
        assert_eq!(code(&o), 0);
        bodies.push(std::fs::read(&rep).unwrap());
    }
    assert_eq!(bodies[0], bodies[1]);
}

#[test]
fn suite_flag_selects_one_identity() {
    let dir = tempfile::tempdir().unwrap();
    let rep = dir.path().join("r.json");
    let o = fluxlab(&["verify", "--suite", "PROP_3_3", "--seed", "3", "--report", rep.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&rep).unwrap()).unwrap();
    let suites = r["suites"].as_array().unwrap();
    assert_eq!(suites.len(), 1);
    assert_eq!(suites[0]["id"], "PROP_3_3");
    assert_eq!(suites[0]["n"], 20);
    assert_eq!(r["environment"]["seed"], 3);
}

#[test]
fn unreachable_tolerance_fails_with_accuracy_flag() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        r#"{"identities": ["PROP_3_3"], "n_instances": 2, "tolerances": {"PROP_3_3": 1e-20}}"#,
    );
    let rep = dir.path().join("r.json");
    let o = fluxlab(&["verify", "--config", cfg.to_str().unwrap(), "--report", rep.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&rep).unwrap()).unwrap();
    let s = &r["suites"][0];
    assert_ne!(s["verdict"], "pass");
    assert!(s.to_string().contains("accuracy not reached"), "{s}");
}

#[test]
fn tol_scale_flag_reaches_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let rep = dir.path().join("r.json");
    let o = fluxlab(&[
        "verify",
        "--suite",
        "PROP_3_3",
        "--seed",
        "5",
        "--tol-scale",
        "1e-20",
        "--report",
        rep.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 2);
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&rep).unwrap()).unwrap();
    assert_eq!(r["environment"]["tol_scale"], 1e-20);
}

#[test]
fn configuration_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let bad_id = write_config(dir.path(), "a.json", r#"{"identities": ["PROP_9_9"]}"#);
    let bad_json = write_config(dir.path(), "b.json", "{not json");
    let bad_word = write_config(
        dir.path(),
        "c.json",
        r#"{"words": [{"name": "w", "factors": [{"type": "twist", "m": 1, "poly_r2": [1.0], "exp": 3}]}]}"#,
    );
    for args in [
        vec!["verify", "--config", bad_id.to_str().unwrap()],
        vec!["verify", "--config", bad_json.to_str().unwrap()],
        vec!["verify", "--config", bad_word.to_str().unwrap()],
        vec!["verify", "--config", "/nonexistent/fluxlab.json"],
        vec!["verify", "--suite", "NOT_AN_ID"],
        vec!["verify", "--jobs", "0", "--suite", "PROP_3_3"],
        vec!["verify", "--bogus-flag"],
        vec!["eval", "twist1", "flux"],
        vec!["eval", "twist1", "volume"],
        vec!["convergence", "PROP_3_3", "--ladder", "2,4"],
        vec!["convergence", "CAL_HOM"],
    ] {
        let o = fluxlab(&args);
        assert_eq!(code(&o), 3, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn jobs_env_var_is_validated() {
    let o = Command::new(env!("CARGO_BIN_EXE_fluxlab"))
        .args(["verify", "--suite", "PROP_3_3"])
        .env("FLUXLAB_JOBS", "0")
        .output()
        .unwrap();
    assert_eq!(code(&o), 3);
}

#[test]
fn eval_matches_twist_oracles() {
    let dir = tempfile::tempdir().unwrap();
    // Analytic values for β(u) = 1 − u: flux −1/4, Calabi −π/6.
    let (c, v, _) = eval(dir.path(), "twist1", "flux");
    let v = v.unwrap();
    assert_eq!(c, 0);
    assert!((v["value"].as_f64().unwrap() + 0.25).abs() <= 1e-10 + v["est_error"].as_f64().unwrap());
    assert!(v["quadrature"]["gl_order"].is_u64());
    let (c, v, _) = eval(dir.path(), "twist1", "calabi");
    let v = v.unwrap();
    assert_eq!(c, 0);
    assert!((v["value"].as_f64().unwrap() + PI / 6.0).abs() <= 1e-8);
    for op in ["tau", "kappa", "tau_prime"] {
        let (c, v, _) = eval(dir.path(), "twist1", op);
        assert_eq!(c, 0, "{op}");
        assert_eq!(v.unwrap()["op"], op);
    }
}

#[test]
fn eval_outside_domain_names_the_subgroup() {
    let dir = tempfile::tempdir().unwrap();
    let (c, v, err) = eval(dir.path(), "shear", "tau");
    assert_eq!(c, 2);
    assert!(v.is_none());
    assert!(err.contains("in_G"), "{err}");
    let (c, _, err) = eval(dir.path(), "flow", "calabi");
    assert_eq!(c, 2);
    assert!(err.contains("in_H_rel"), "{err}");
}

#[test]
fn convergence_ladders() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "words.json", &format!(r#"{{"words": {WORDS}}}"#));
    let cfg = cfg.to_str().unwrap();
    let rep = dir.path().join("conv.json");
    let o = fluxlab(&["convergence", "PROP_3_3", "--report", rep.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&rep).unwrap()).unwrap();
    let e: Vec<f64> = r["record"]["errors"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert_eq!(e.len(), 3);
    assert!(e.windows(2).all(|w| w[1] <= w[0]), "{e:?}");
    assert_eq!(r["record"]["monotone"], true);

    let o = fluxlab(&[
        "convergence",
        "STOKES_5_4",
        "--config",
        cfg,
        "--word",
        "flow",
        "--ladder",
        "4,8,16",
        "--report",
        rep.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&rep).unwrap()).unwrap();
    let top = r["record"]["errors"].as_array().unwrap().last().unwrap().as_f64().unwrap();
    assert!(top <= 1e-6);

    let o =
        fluxlab(&["convergence", "PROP_3_3", "--config", cfg, "--word", "still", "--report", rep.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&rep).unwrap()).unwrap();
    assert!(r["record"]["errors"].as_array().unwrap().iter().all(|x| x.as_f64().unwrap() < 1e-14));
}
