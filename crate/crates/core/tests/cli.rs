use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    format!("{}/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qrandomness"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn field(text: &str, label: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(label))
        .unwrap_or_else(|| panic!("no {label:?} in {text}"))
        .trim()
        .parse()
        .unwrap()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qrandomness-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn measures_bb84_label_state() {
    let out = run(&["measures", &data("bb84_rho_a.json")]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("R^Q    1.000000"), "{text}");
    assert!(text.contains("R^C    1.500000"), "{text}");
}

#[test]
fn measures_trivial_states() {
    let text = stdout(&run(&["measures", &data("maximally_mixed_qubit.json")]));
    for label in ["R^Q", "R^C", "gap"] {
        assert_eq!(field(&text, label), 0.0);
    }
    let text = stdout(&run(&["measures", &data("plus_projector.json")]));
    for label in ["H(p)", "R^Q", "R^C"] {
        assert_eq!(field(&text, label), 1.0);
    }
    let text = stdout(&run(&[
        "measures",
        &data("plus_projector.json"),
        "--basis",
        "x",
    ]));
    assert_eq!(field(&text, "H(p)"), 0.0);
}

#[test]
fn measures_with_discord_reports_residual() {
    let out = run(&["measures", &data("bb84_rho_a.json"), "--discord", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!((v["discord"].as_f64().unwrap() - 0.5).abs() < 2e-3);
    assert!(v["residual"].as_f64().unwrap() <= 2e-3);
}

#[test]
fn invalid_state_exits_with_input_error() {
    let bad = scratch(
        "neg.json",
        r#"{"dim":2,"matrix":[[[1.1,0],[0,0]],[[0,0],[-0.1,0]]]}"#,
    );
    let out = run(&["measures", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr).to_lowercase();
    assert!(
        err.contains("positive") || err.contains("eigenvalue"),
        "{err}"
    );

    let out = run(&["measures", "/nonexistent/state.json"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["verify-gap"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["sweep", "--start", "0.8", "--stop", "0.2"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["measures", &data("plus_projector.json"), "--basis", "file:"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_gap_on_files() {
    let out = run(&["verify-gap", &data("pure_qubit.json"), "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(v["max_residual"].as_f64().unwrap() <= 1e-6);

    let out = run(&["verify-gap", &data("diagonal_qutrit.json"), "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let row = &v["rows"][0];
    for key in ["r_classical", "r_quantum", "discord", "residual"] {
        assert!(
            row[key].as_f64().unwrap().abs() < 1e-6,
            "{key} = {}",
            row[key]
        );
    }
}

#[test]
fn sweep_csv_round_trips() {
    let out = run(&["sweep", "--steps", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("v,r_c_closed,r_c_numeric,r_q,gap"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 6);
    for (line, row) in text.lines().skip(1).zip(&rows) {
        let again = row
            .iter()
            .map(|x| format!("{x:.6}"))
            .collect::<Vec<_>>()
            .join(",");
        assert_eq!(again, line);
    }
    assert_eq!(rows[0], vec![0.0; 5]);
    assert_eq!(rows[5], vec![1.0, 1.0, 1.0, 1.0, 0.0]);
}

#[test]
fn bb84_command_passes_and_json_agrees_with_table() {
    let table = run(&["bb84"]);
    assert_eq!(table.status.code(), Some(0));
    let text = stdout(&table);
    assert_eq!(text.matches("PASS").count(), 4, "{text}");
    let json = run(&["bb84", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&json)).unwrap();
    assert_eq!(v["pass"], true);
    let rc = v["report"]["key_before_measurement"].as_f64().unwrap();
    assert!(text.contains(&format!("R^C   {rc:.6}")), "{text}");
}

#[test]
fn degraded_bb84_run_still_prints_values() {
    let out = run(&["bb84", "--restarts", "1", "--seed", "7"]);
    assert!(matches!(out.status.code(), Some(0 | 1)));
    assert!(stdout(&out).contains("key before measurement"));
}

#[test]
fn locking_accepts_preset_and_file() {
    let preset = run(&["locking", "bb84", "--json"]);
    let file = run(&["locking", &data("bb84_scenario.json"), "--json"]);
    assert_eq!(preset.status.code(), Some(0));
    assert_eq!(file.status.code(), Some(0));
    let a: serde_json::Value = serde_json::from_str(&stdout(&preset)).unwrap();
    let b: serde_json::Value = serde_json::from_str(&stdout(&file)).unwrap();
    for key in [
        "key_after_measurement",
        "key_before_measurement",
        "locking_advantage",
    ] {
        assert!(
            (a[key].as_f64().unwrap() - b[key].as_f64().unwrap()).abs() < 1e-9,
            "{key}"
        );
    }
}

#[test]
fn json_output_is_reproducible() {
    let args = ["verify-gap", "--random", "3", "--seed", "4", "--json"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.is_empty());
}
