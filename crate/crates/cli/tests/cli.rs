use std::process::Command;

const BIN: &str = env!("CARGO_BIN_EXE_maass-hecke");

fn cli(args: &[&str]) -> std::process::Output {
    Command::new(BIN).args(args).env_remove("MAASS_HECKE_CACHE_DIR").output().unwrap()
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(cli(&["transfer", "--N", "4", "--p", "2"]).status.code(), Some(2));
    assert_eq!(cli(&["transfer", "--N", "5", "--p", "4"]).status.code(), Some(2));
    assert_eq!(cli(&["transfer", "--N", "0"]).status.code(), Some(2));
    assert_eq!(cli(&["spectrum", "--N", "3", "--precision", "40"]).status.code(), Some(2));
    assert_eq!(cli(&["transfer", "--N", "1", "--lambda", "0.5", "--exact"]).status.code(), Some(2));
    assert_eq!(cli(&["poisson", "--y-range", "-1,1"]).status.code(), Some(2));
}

#[test]
fn unwritable_output_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("no/such/dir/out.json");
    assert_eq!(cli(&["cusps", "--N", "5", "--out", bad.to_str().unwrap()]).status.code(), Some(4));
}

#[test]
fn negative_lambda_warns() {
    let out = cli(&["spectrum", "--N", "1", "--lambda", "-0.25", "--format", "csv"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
}

#[test]
fn only_filter_runs_one_check() {
    let out = cli(&["verify", "--only", "lemma1"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let checks = v["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 1);
    assert_eq!(checks[0]["name"], "derivative-rule-residual");
    assert_eq!(v["schema"], 1);
}

#[test]
fn cache_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let run = || {
        Command::new(BIN)
            .args(["transfer", "--N", "5", "--p", "3", "--s", "1", "--exact"])
            .env("MAASS_HECKE_CACHE_DIR", dir.path())
            .output()
            .unwrap()
    };
    let first = run();
    assert!(first.status.success());
    let file = dir.path().join("N5.json");
    let cached: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&file).unwrap()).unwrap();
    assert_eq!(cached["schema"], 1);
    assert_eq!(cached["cosets"]["3"].as_array().unwrap().len(), 4);
    let second = run();
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(first.stdout, cli(&["transfer", "--N", "5", "--p", "3", "--s", "1", "--exact"]).stdout);
}

#[test]
fn multi_prime_spectrum_csv_has_det_column() {
    let out = cli(&["spectrum", "--N", "5", "--p", "2,3", "--s", "1", "--lambda", "0.5", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("det,re,im,radius,residual\n"));
    assert_eq!(text.lines().count(), 1 + 2 * 8);
}
