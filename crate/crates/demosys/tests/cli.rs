//! End-to-end tests of the demosys binary: flag handling, exit codes,
//! artifact structure, and round-tripping of CSV values.

use std::process::Command;

fn demosys(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_demosys"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(args: &[&str]) -> String {
    let out = demosys(args);
    assert!(
        out.status.success(),
        "command {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf8 output")
}

/// Rows of a CSV artifact, with the comment block skipped.
fn csv_rows(artifact: &str) -> Vec<Vec<String>> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(artifact.as_bytes());
    rdr.records()
        .map(|r| r.expect("row parses").iter().map(str::to_string).collect())
        .collect()
}

#[test]
fn norm_closed_form_examples() {
    let out = stdout_of(&["norm", "--n", "1", "--l", "1", "--p", "2"]);
    let value: f64 = out.split_whitespace().next().unwrap().parse().unwrap();
    assert!((value - 1.0).abs() < 1e-12);

    let out = stdout_of(&["norm", "--n", "1", "--l", "1", "--p", "4"]);
    let value: f64 = out.split_whitespace().next().unwrap().parse().unwrap();
    assert!((value - 1.057_371_263_440_564_1).abs() < 1e-12);
    assert!(out.contains("method=closed-form"));
}

#[test]
fn norm_spec_file_pair() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pair.json");
    let coeff = 1.0 / 1.25f64.powf(0.25);
    std::fs::write(
        &path,
        format!(r#"{{"l": 1.0, "p": 4.0, "groups": [{{"n": 1, "count": 2, "coeff": {coeff}}}]}}"#),
    )
    .unwrap();
    let out = stdout_of(&["norm", "--spec", path.to_str().unwrap()]);
    let value: f64 = out.split_whitespace().next().unwrap().parse().unwrap();
    assert!((value - 1.337_480_609_952_844).abs() < 1e-10);
}

#[test]
fn norm_malformed_spec_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{not json").unwrap();
    let out = demosys(&["norm", "--spec", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    // Missing file is also a malformed-spec failure.
    let out = demosys(&["norm", "--spec", "/no/such/file.json"]);
    assert_eq!(out.status.code(), Some(2));
    // Duplicate indices in an otherwise well-formed spec.
    let path = dir.path().join("dup.json");
    std::fs::write(
        &path,
        r#"{"l": 1.0, "p": 4.0, "terms": [{"n": 1, "j": 1, "coeff": 1.0}, {"n": 1, "j": 1, "coeff": 2.0}]}"#,
    )
    .unwrap();
    let out = demosys(&["norm", "--spec", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn norm_domain_violations_exit_3() {
    let out = demosys(&["norm", "--n", "1", "--l", "1", "--p", "0.5"]);
    assert_eq!(out.status.code(), Some(3));
    let out = demosys(&["norm", "--n", "1", "--l", "-2", "--p", "2"]);
    assert_eq!(out.status.code(), Some(3));
    let out = demosys(&["norm", "--n", "0", "--l", "1", "--p", "2"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn unwritable_output_exits_4() {
    let out = demosys(&[
        "phi",
        "--l", "1",
        "--p", "2",
        "--m", "4",
        "--out", "/no/such/dir/artifact.csv",
    ]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn phi_artifact_round_trips() {
    let artifact = stdout_of(&["phi", "--l", "1", "--p", "2", "--m", "16"]);
    assert!(artifact.starts_with("# demosys-artifact v1\n"));
    assert!(artifact.contains("# seed = "));
    assert!(artifact.contains("\"command\":\"phi\""));
    let rows = csv_rows(&artifact);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0], "16");
    // CSV values re-parse to exactly what the library reports.
    let parsed: f64 = rows[0][1].parse().unwrap();
    let params = demosys::system::SystemParams::new(1.0).unwrap();
    let p = demosys::system::NormExponent::new(2.0).unwrap();
    let entry = demosys::fundamental::phi(
        16,
        &params,
        p,
        demosys::fundamental::PhiKind::Primal,
        &demosys::fundamental::SearchConfig::default(),
    )
    .unwrap();
    assert_eq!(parsed.to_bits(), entry.value.to_f64().to_bits());
    assert!((parsed - 4.0).abs() < 1e-9);
}

#[test]
fn witness_table_ratio_increases() {
    let artifact = stdout_of(&["witness", "--l", "2", "--r", "1.5", "--n-max", "10"]);
    let rows = csv_rows(&artifact);
    assert_eq!(rows.len(), 9); // n = 2..=10
    let ratios: Vec<f64> = rows.iter().map(|r| r[3].parse().unwrap()).collect();
    for w in ratios.windows(2) {
        assert!(w[1] > w[0], "ratio not strictly increasing: {ratios:?}");
    }
}

#[test]
fn artifacts_are_deterministic() {
    let a = stdout_of(&["witness", "--l", "2", "--r", "1.5", "--n-max", "8"]);
    let b = stdout_of(&["witness", "--l", "2", "--r", "1.5", "--n-max", "8"]);
    assert_eq!(a, b);
}

#[test]
fn json_format_mirrors_csv() {
    let json = stdout_of(&[
        "democracy", "--l", "2", "--p", "1.5", "--m", "6", "--format", "json",
    ]);
    let value: serde_json::Value = serde_json::from_str(&json).expect("valid json");
    let rows = value["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["m"], 6);
    // 17-significant-digit numbers survive the round trip.
    let ratio: f64 = rows[0]["ratio"].as_str().map(|s| s.parse().unwrap()).unwrap_or_else(|| rows[0]["ratio"].as_f64().unwrap());
    assert!(ratio >= 1.0);
    assert_eq!(value["config"]["command"], "democracy");
}

#[test]
fn verify_subset_runs_and_passes() {
    let out = demosys(&["verify", "--criteria", "2"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("criterion  2 [PASS]"), "got: {text}");
}

#[test]
fn precision_env_var_is_honored() {
    let out = Command::new(env!("CARGO_BIN_EXE_demosys"))
        .args(["phi", "--l", "1", "--p", "2", "--m", "4"])
        .env("DEMOSYS_PRECISION_BITS", "128")
        .output()
        .expect("binary runs");
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"precision_bits\":128"));
}
