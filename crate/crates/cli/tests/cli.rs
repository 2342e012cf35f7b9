use std::f64::consts::SQRT_2;
use std::path::Path;
use std::process::{Command, Output};

fn nonlocal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nonlocal"))
        .args(args)
        .env_remove("NONLOCAL_MAX_QUBITS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Header and rows of a CSV document.
fn csv(o: &Output) -> (Vec<String>, Vec<Vec<String>>) {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(o);
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

fn num(s: &str) -> f64 {
    s.parse().unwrap_or_else(|_| panic!("not a number: '{s}'"))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn star5(dir: &Path) -> String {
    write(dir, "star5.g", "# star\nn 5\ne 1 2\ne 1 3\ne 1 4\ne 1 5\n")
}

#[test]
fn ghz_sweep_matches_closed_form() {
    let (header, rows) = csv(&nonlocal(&["sweep", "--family", "ghz", "--channel", "dephasing-z", "--n", "3", "--steps", "101"]));
    assert_eq!(
        header,
        ["p", "m_chsh", "prob", "content_bound_paired", "content_bound_weighted", "closed_form", "abs_diff"]
    );
    assert_eq!(rows.len(), 101);
    assert!(rows.iter().all(|r| num(&r[6]) < 1e-9));
    assert!((num(&rows[0][3]) - (SQRT_2 - 1.0)).abs() < 1e-11);
    assert_eq!(num(&rows[100][0]), 1.0);
}

#[test]
fn star_sweep_reaches_zero_at_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let g = star5(dir.path());
    let (_, rows) = csv(&nonlocal(&["sweep", "--family", "graph", "--graph", &g, "--channel", "dephasing-z"]));
    let pc = 1.0 - 0.5f64.sqrt();
    for r in &rows {
        let (p, bound) = (num(&r[0]), num(&r[3]));
        assert_eq!(bound == 0.0, p >= pc, "p = {p}");
    }
}

#[test]
fn twelve_significant_digits() {
    let (_, rows) = csv(&nonlocal(&["sweep", "--steps", "2"]));
    assert_eq!(rows[0][3], "0.414213562373");
    assert_eq!(rows[1][0], "1.00000000000");
}

#[test]
fn config_errors_exit_2() {
    for args in [
        vec!["sweep", "--steps", "1"],
        vec!["sweep", "--p-min", "0.6", "--p-max", "0.4"],
        vec!["sweep", "--family", "cluster"],
        vec!["sweep", "--family", "graph"],
        vec!["sweep", "--channel", "{\"p\": 2}"],
        vec!["sweep", "--pair", "1,1"],
        vec!["sweep", "--n", "40"],
        vec!["sweep", "--format", "xml"],
        vec!["threshold", "--method", "mk", "--n", "4"],
        vec!["optimize", "--inequality", "/does/not/exist"],
        vec!["sweep", "--no-such-flag"],
    ] {
        let o = nonlocal(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn qubit_cap_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_nonlocal"))
        .args(["sweep", "--n", "5", "--steps", "2"])
        .env("NONLOCAL_MAX_QUBITS", "4")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains('4'));
}

#[test]
fn thresholds() {
    let (_, rows) = csv(&nonlocal(&["threshold", "--family", "ghz", "--n", "5"]));
    assert_eq!(num(&rows[0][4]), 1.0);
    assert_eq!(rows[0][3], "conditioned-chsh");
    let dir = tempfile::tempdir().unwrap();
    let g = star5(dir.path());
    let (_, rows) = csv(&nonlocal(&["threshold", "--family", "graph", "--graph", &g]));
    assert!((num(&rows[0][4]) - (1.0 - 0.5f64.sqrt())).abs() < 1e-6);
    let (_, rows) = csv(&nonlocal(&["threshold", "--method", "mk", "--n", "3"]));
    assert!((num(&rows[0][4]) - 0.20630).abs() < 1e-5);
}

#[test]
fn json_output_and_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "run.json",
        r#"{"family": "w", "n": 4, "channel": {"kind": "dephasing-z", "p": 0.3}, "steps": 5, "format": "json"}"#,
    );
    let o = nonlocal(&["sweep", "--config", &cfg]);
    assert!(o.status.success());
    let rows: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[0]["prob"], 0.5);
    let keys: Vec<&String> = rows[0].as_object().unwrap().keys().collect();
    assert_eq!(keys[0], "p");
    // Flags override the file.
    let (_, rows) = csv(&nonlocal(&["sweep", "--config", &cfg, "--format", "csv", "--n", "5"]));
    assert_eq!(num(&rows[0][2]), 0.4);
    let bad = write(dir.path(), "bad.json", r#"{"familly": "w"}"#);
    assert_eq!(nonlocal(&["sweep", "--config", &bad]).status.code(), Some(2));
}

#[test]
fn output_file_and_pair() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("curve.csv");
    let o = nonlocal(&["sweep", "--n", "4", "--pair", "1,3", "--steps", "3", "--output", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert!(text.lines().nth(1).unwrap().starts_with("0,1.41421356237,"));
}

#[test]
fn sweep_is_deterministic() {
    let args = ["sweep", "--channel", "depolarizing", "--n", "4", "--steps", "31"];
    assert_eq!(nonlocal(&args).stdout, nonlocal(&args).stdout);
}

#[test]
fn optimize_mk_and_inequality_files() {
    let args = ["optimize", "--n", "3", "--p-max", "0.2", "--steps", "3", "--restarts", "6", "--seed", "11"];
    let first = nonlocal(&args);
    assert_eq!(first.stdout, nonlocal(&args).stdout);
    let (header, rows) = csv(&first);
    assert_eq!(header, ["p", "inequality", "value", "local_bound", "content_bound"]);
    for r in &rows {
        let p = num(&r[0]);
        assert!(num(&r[2]) >= 2.0 * (1.0 - p).powi(3) - 1e-6);
        assert!(r[4].is_empty());
    }

    let dir = tempfile::tempdir().unwrap();
    // Party 1's single setting multiplies every CHSH term of parties 2 and 3.
    let chsh = write(
        dir.path(),
        "xchsh.ineq",
        "parties 3 settings 1 2 2 local 2 ns 4\n1 0 0 0\n1 0 0 1\n1 0 1 0\n-1 0 1 1\n",
    );
    let (_, rows) = csv(&nonlocal(&["optimize", "--n", "3", "--steps", "2", "--restarts", "6", "--inequality", &chsh]));
    assert_eq!(rows.len(), 2);
    assert!((num(&rows[0][2]) - 2.0 * SQRT_2).abs() < 1e-6);
    assert!((num(&rows[0][4]) - (SQRT_2 - 1.0)).abs() < 1e-6);
    assert_eq!(num(&rows[1][4]), 0.0);

    let wrong = write(dir.path(), "two.ineq", "parties 2 settings 2 2 local 2\n1 0 0\n");
    assert_eq!(nonlocal(&["optimize", "--inequality", &wrong]).status.code(), Some(2));
    let malformed = write(dir.path(), "bad.ineq", "parties 3 settings 2 2 2 local 1\n1 0 0 7\n");
    let o = nonlocal(&["optimize", "--inequality", &malformed]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

#[test]
fn verify_passes_and_corruption_is_detected() {
    let o = nonlocal(&["verify", "--only", "7,9"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(stdout(&o).matches("[PASS]").count(), 2);
    let o = nonlocal(&["verify", "--only", "9", "--corrupt-ghz"]);
    assert_ne!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("[FAIL]"));
}
