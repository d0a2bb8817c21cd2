use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn pbt(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pbt"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("spawn pbt")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn default_pool_has_header_plus_all_products() {
    let dir = tempfile::tempdir().unwrap();
    let out = pbt(dir.path(), &["generate-pool", "--out", "pool.csv"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = fs::read_to_string(dir.path().join("pool.csv")).unwrap();
    assert_eq!(text.lines().count(), 80 * 250 + 1);
    assert!(text.starts_with("category_id,prompt_id,phi,sigma\n"));
    assert!(!text.contains('\r'));
    assert!(dir.path().join("pool.csv.labels.json").exists());
}

#[test]
fn generate_pool_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["a.csv", "b.csv"] {
        let out = pbt(
            dir.path(),
            &["generate-pool", "--seed", "42", "--out", name],
        );
        assert!(out.status.success());
    }
    assert_eq!(
        fs::read(dir.path().join("a.csv")).unwrap(),
        fs::read(dir.path().join("b.csv")).unwrap()
    );
}

#[test]
fn malformed_spec_exits_with_usage_code() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("spec.json"), "{\"n_categories\": ").unwrap();
    let out = pbt(dir.path(), &["generate-pool", "--config", "spec.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("error"));
    fs::write(
        dir.path().join("spec.json"),
        r#"{"per_category": 3, "colour": 1}"#,
    )
    .unwrap();
    let out = pbt(dir.path(), &["generate-pool", "--config", "spec.json"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn missing_pool_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("run.json"),
        r#"{"pool": "absent.csv", "T": 3}"#,
    )
    .unwrap();
    let out = pbt(dir.path(), &["run", "--config", "run.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("pool not found"), "{}", stderr(&out));
}

#[test]
fn bad_arguments_exit_with_usage_code() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(pbt(dir.path(), &["run", "--bogus"]).status.code(), Some(1));
    assert_eq!(
        pbt(dir.path(), &["run", "--policy", "best"]).status.code(),
        Some(1)
    );
    assert_eq!(pbt(dir.path(), &["run", "--K", "0"]).status.code(), Some(1));
    assert_eq!(pbt(dir.path(), &["--help"]).status.code(), Some(0));
}

#[test]
fn run_then_delta_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let common = ["--T", "50", "--N", "12", "--seed", "9", "--out", "o"];
    for policy in ["greedy", "optimal"] {
        let mut args = vec!["run", "--policy", policy];
        args.extend(common);
        let out = pbt(dir.path(), &args);
        assert!(out.status.success(), "{}", stderr(&out));
    }
    let greedy = fs::read_to_string(dir.path().join("o/greedy.csv")).unwrap();
    assert_eq!(greedy.lines().count(), 51);
    let summary: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(dir.path().join("o/greedy.summary.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(summary["iterations"], 50);

    let out = pbt(
        dir.path(),
        &[
            "delta",
            "--alg",
            "o/greedy.csv",
            "--optimal",
            "o/optimal.csv",
            "--out",
            "d.csv",
        ],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let delta = fs::read_to_string(dir.path().join("d.csv")).unwrap();
    assert!(delta.starts_with("t,delta_poc,delta_pop,delta_pos\n"));
    assert_eq!(delta.lines().count(), 51);

    let out = pbt(
        dir.path(),
        &[
            "delta",
            "--alg",
            "o/optimal.csv",
            "--optimal",
            "o/optimal.csv",
        ],
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().skip(1).all(|l| l.ends_with(",0,0,0")));
}

#[test]
fn every_command_is_byte_identical_when_repeated() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    fs::write(
        p.join("sweep.json"),
        r#"{"axis": "K", "values": [2, 3], "seeds": [1, 2], "T": 20, "N": 10, "M": 2}"#,
    )
    .unwrap();
    fs::write(
        p.join("sens.json"),
        r#"{"axis": "SoP", "fixed_iteration": 10, "T": 20, "N": 10}"#,
    )
    .unwrap();
    for round in ["1", "2"] {
        let runs: Vec<Vec<String>> = vec![
            vec![
                "generate-pool".into(),
                "--N".into(),
                "8".into(),
                "--out".into(),
                format!("pool{round}.csv"),
            ],
            vec![
                "run".into(),
                "--T".into(),
                "30".into(),
                "--N".into(),
                "10".into(),
                "--out".into(),
                format!("run{round}"),
            ],
            vec![
                "sweep".into(),
                "--config".into(),
                "sweep.json".into(),
                "--out".into(),
                format!("sweep{round}.csv"),
            ],
            vec![
                "sensitivity".into(),
                "--config".into(),
                "sens.json".into(),
                "--out".into(),
                format!("sens{round}.csv"),
            ],
        ];
        for args in runs {
            let args: Vec<&str> = args.iter().map(String::as_str).collect();
            let out = pbt(p, &args);
            assert!(out.status.success(), "{args:?}: {}", stderr(&out));
        }
    }
    for (a, b) in [
        ("pool1.csv", "pool2.csv"),
        ("run1/greedy.csv", "run2/greedy.csv"),
        ("run1/greedy.summary.json", "run2/greedy.summary.json"),
        ("sweep1.csv", "sweep2.csv"),
        ("sens1.csv", "sens2.csv"),
    ] {
        assert_eq!(
            fs::read(p.join(a)).unwrap(),
            fs::read(p.join(b)).unwrap(),
            "{a}"
        );
    }
    let sweep = fs::read_to_string(p.join("sweep1.csv")).unwrap();
    assert_eq!(sweep.lines().count(), 1 + 2 * 2 * 5);
}

#[test]
fn sweep_flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = pbt(
        dir.path(),
        &[
            "sweep", "--axis", "T", "--values", "5,10", "--N", "6", "--K", "2", "--M", "1",
            "--out", "s.csv",
        ],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let text = fs::read_to_string(dir.path().join("s.csv")).unwrap();
    assert_eq!(text.lines().count(), 1 + 2 * 5);
    let out = pbt(dir.path(), &["sweep", "--axis", "T", "--values", "10,5"]);
    assert_eq!(out.status.code(), Some(1));
    let out = pbt(dir.path(), &["sweep", "--axis", "Z"]);
    assert_eq!(out.status.code(), Some(1));
}
