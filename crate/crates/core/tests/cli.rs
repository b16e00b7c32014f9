use std::path::Path;
use std::process::{Command, Output};

fn theta_check(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_theta-check")).args(args).output().expect("spawn theta-check")
}

fn golden_dir() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/golden"))
}

const FAST: &str = "theta-axioms,mahler-roundtrip,pi-digits,qexp-congruence,cohomology-presets";

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(theta_check(&["--check", "no-such-check"]).status.code(), Some(2));
    assert_eq!(theta_check(&["--prime", "5", "--check", "qexp-congruence"]).status.code(), Some(2));
    assert_eq!(theta_check(&["--prime", "7"]).status.code(), Some(2));
    assert_eq!(theta_check(&["--regenerate-golden"]).status.code(), Some(2));
}

#[test]
fn list_names_every_check() {
    let out = theta_check(&["--list"]);
    assert!(out.status.success());
    let names = String::from_utf8(out.stdout).unwrap();
    assert_eq!(names.lines().count(), thetakit::checks::CHECK_NAMES.len());
}

#[test]
fn structured_output_parses_and_is_deterministic() {
    let args = ["--prime", "3", "--check", FAST, "--format", "structured", "--no-timings", "--trials", "20"];
    let (a, b) = (theta_check(&args), theta_check(&args));
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stdout));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    let checks = v["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 5);
    assert!(checks.iter().all(|c| c["status"] == "pass"));
    assert_eq!(v["params"]["prime"], 3);
}

#[test]
fn skipped_checks_at_five() {
    let out = theta_check(&["--prime", "5", "--check", "all", "--format", "structured", "--trials", "5", "--no-timings"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let skipped: Vec<&str> = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["status"] == "skipped")
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert_eq!(skipped.len(), 4);
    assert!(skipped.iter().all(|n| thetakit::checks::is_modular(n)));
}

#[test]
fn shipped_golden_files_match() {
    for p in ["2", "3"] {
        let out = theta_check(&["--prime", p, "--check", FAST, "--golden", golden_dir().to_str().unwrap()]);
        assert!(out.status.success(), "p = {p}: {}", String::from_utf8_lossy(&out.stdout));
    }
}

#[test]
fn regenerate_then_compare() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    // nothing there yet
    let missing = theta_check(&["--check", "pi-digits", "--golden", d]);
    assert_eq!(missing.status.code(), Some(1));
    let regen = theta_check(&["--check", "pi-digits,qexp-congruence", "--golden", d, "--regenerate-golden"]);
    assert!(regen.status.success());
    assert!(dir.path().join("pi-digits-p2-M64-N12.txt").exists());
    let again = theta_check(&["--check", "pi-digits,qexp-congruence", "--golden", d]);
    assert!(again.status.success());
    for name in ["pi-digits-p2-M64-N12.txt", "qexp-congruence-p2-M64-N12.txt"] {
        let fresh = std::fs::read_to_string(dir.path().join(name)).unwrap();
        let shipped = std::fs::read_to_string(golden_dir().join(name)).unwrap();
        assert_eq!(fresh, shipped, "{name}");
    }
    // a tampered value is reported as a failure
    let path = dir.path().join("pi-digits-p2-M64-N12.txt");
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::write(&path, text.replacen("alpha", "gamma", 1)).unwrap();
    let tampered = theta_check(&["--check", "pi-digits", "--golden", d]);
    assert_eq!(tampered.status.code(), Some(1));
}
