use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};

fn grushin(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_grushin")).args(args).current_dir(cwd).output().unwrap()
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let p = dir.join("exp.toml");
    fs::write(&p, body).unwrap();
    p
}

fn report(dir: &Path, kind: &str) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join(format!("{kind}.json"))).unwrap()).unwrap()
}

/// sha256 of every artifact except the wall-clock file.
fn hashes(dir: &Path) -> BTreeMap<String, String> {
    let mut m = BTreeMap::new();
    for e in fs::read_dir(dir).unwrap() {
        let e = e.unwrap();
        let name = e.file_name().into_string().unwrap();
        if name != "timing.json" {
            let digest = Sha256::digest(fs::read(e.path()).unwrap());
            m.insert(name, digest.iter().map(|b| format!("{b:02x}")).collect());
        }
    }
    m
}

fn strip_nulls(v: &mut Value) {
    if let Value::Object(m) = v {
        m.retain(|_, x| !x.is_null());
        m.values_mut().for_each(strip_nulls);
    }
}

const UNIT_SQUARE_K0: &str = "[problem]\nk = 0\n[domain]\nshape = \"rectangle\"\nx = [0.0, 1.0]\ny = [0.0, 1.0]\n";

#[test]
fn eigen_of_the_unit_square() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), UNIT_SQUARE_K0);
    let o = grushin(&["eigen", "--config", cfg.to_str().unwrap(), "--resolution", "128", "--out", "run"], tmp.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&tmp.path().join("run"), "eigen");
    let l1 = r["results"]["runs"][0]["summary"]["lambda1"].as_f64().unwrap();
    assert!((l1 / 19.739 - 1.0).abs() < 0.01, "{l1}");
    assert_eq!(r["flagged"], Value::Bool(false));
}

#[test]
fn reruns_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "resolutions = [24]\n[inequalities]\ntrials = 10\n");
    let args = ["inequalities", "--config", cfg.to_str().unwrap(), "--out", "run", "--seed", "3"];
    assert!(grushin(&args, tmp.path()).status.success());
    let first = hashes(&tmp.path().join("run"));
    assert!(grushin(&args, tmp.path()).status.success());
    assert_eq!(first, hashes(&tmp.path().join("run")));

    let other = ["inequalities", "--config", cfg.to_str().unwrap(), "--out", "run", "--seed", "4"];
    assert!(grushin(&other, tmp.path()).status.success());
    assert_ne!(first["interpolation.csv"], hashes(&tmp.path().join("run"))["interpolation.csv"]);
}

#[test]
fn config_echo_round_trips() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "seed = 9\nresolutions = [16, 32]\nbetas = [0.0, 0.5]\n[problem]\nbeta = 0.25\n[domain]\nshape = \"ellipse\"\ncenter = [0.0, 0.0]\naxes = [1.0, 0.5]\n",
    );
    let o = grushin(&["eigen", "--config", cfg.to_str().unwrap(), "--out", "a"], tmp.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let a = tmp.path().join("a");

    // the echoed TOML and the report's config agree
    let echo: toml::Value = toml::from_str(&fs::read_to_string(a.join("config.toml")).unwrap()).unwrap();
    let mut from_report = report(&a, "eigen")["config"].clone();
    strip_nulls(&mut from_report);
    assert_eq!(serde_json::to_value(&echo).unwrap(), from_report);

    // and rerunning from the echo reproduces every artifact
    let before = hashes(&a);
    let echo_path = tmp.path().join("echo.toml");
    fs::copy(a.join("config.toml"), &echo_path).unwrap();
    assert!(grushin(&["eigen", "--config", echo_path.to_str().unwrap()], tmp.path()).status.success());
    assert_eq!(before, hashes(&a));
}

#[test]
fn q_above_p_is_rejected_with_the_precondition() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "[problem]\nk = 1\nq = 9.0\nmu = 1.0\n");
    let o = grushin(&["solve-case2", "--config", cfg.to_str().unwrap(), "--out", "run"], tmp.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("1<q<p"));
    assert!(!tmp.path().join("run").exists());
}

#[test]
fn validation_lists_every_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "resolutions = [4]\n[problem]\nbeta = -0.75\ntol = 0.5\n");
    let o = grushin(&["eigen", "--config", cfg.to_str().unwrap()], tmp.path());
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    for needle in ["resolutions", "problem.beta", "problem.tol"] {
        assert!(err.contains(needle), "{needle} missing from {err}");
    }
}

#[test]
fn unknown_keys_are_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "[problem]\nk = 1\nlamda = 2.0\n");
    let o = grushin(&["solve-case1", "--config", cfg.to_str().unwrap()], tmp.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("lamda"));
}

#[test]
fn shifted_rectangle_is_not_starshaped() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "[domain]\nshape = \"rectangle\"\nx = [0.5, 1.5]\ny = [0.5, 1.5]\n");
    let o = grushin(&["starshape", "--config", cfg.to_str().unwrap(), "--out", "run"], tmp.path());
    assert!(o.status.success());
    let verdict = fs::read_to_string(tmp.path().join("run/verdict.txt")).unwrap();
    assert!(verdict.starts_with("not G-starshaped"), "{verdict}");
}

#[test]
fn empty_sweep_writes_the_header_only() {
    let tmp = tempfile::tempdir().unwrap();
    assert!(grushin(&["eigen", "--resolution", "16", "--out", "run"], tmp.path()).status.success());
    let body = fs::read_to_string(tmp.path().join("run/eigen_beta.csv")).unwrap();
    let lines: Vec<&str> = body.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with('#'));
    assert_eq!(lines[1], "beta,lambda1");
}

#[test]
fn concentration_exits_flagged() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "[problem]\nlambda = 0.0\n");
    let o = grushin(&["solve-case1", "--config", cfg.to_str().unwrap(), "--resolution", "32,64", "--out", "run"], tmp.path());
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&tmp.path().join("run"), "case1");
    assert_eq!(r["flagged"], Value::Bool(true));
    assert_eq!(r["results"]["classification"]["citation"], "Theorem 2.1(b)");
}

#[test]
fn convergence_rates_of_the_laplacian() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), UNIT_SQUARE_K0);
    let o = grushin(&["converge", "--config", cfg.to_str().unwrap(), "--resolution", "16,32,64", "--out", "run"], tmp.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&tmp.path().join("run"), "convergence");
    let rate = r["results"]["quantities"]["lambda1"]["rates"][2].as_f64().unwrap();
    assert!((rate - 2.0).abs() < 0.3, "{rate}");

    let o = grushin(&["converge", "--resolution", "16,32", "--out", "bad"], tmp.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn writes_stay_inside_the_output_directory() {
    let tmp = tempfile::tempdir().unwrap();
    let o = grushin(&["asymptotics", "--resolution", "32", "--out", "run"], tmp.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let top: Vec<_> = fs::read_dir(tmp.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(top, vec![std::ffi::OsString::from("run")]);

    let dir = tmp.path().join("run");
    let r = report(&dir, "asymptotics");
    let mut listed: Vec<String> = r["files"].as_array().unwrap().iter().map(|v| v.as_str().unwrap().to_string()).collect();
    listed.extend(["asymptotics.json".to_string(), "timing.json".to_string()]);
    listed.sort();
    let mut present: Vec<String> = fs::read_dir(&dir).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    present.sort();
    assert_eq!(listed, present);
    let header = fs::read_to_string(dir.join("asymptotics.csv")).unwrap();
    assert_eq!(header.lines().nth(1), Some("eps,norm_S2_sq,norm_Lp1k_sq,norm_L2beta_sq"));
}
