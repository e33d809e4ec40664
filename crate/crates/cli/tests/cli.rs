use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};

fn config(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "configs", name].iter().collect();
    p.to_str().unwrap().to_string()
}

fn fdrs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fdrs")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn outage_matches_rayleigh_example() {
    let o = fdrs(&["outage", "--config", &config("rayleigh.toml"), "--protocol", "ndl", "--rate", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let p = v["analytic"]["outage"].as_f64().unwrap();
    assert!((p - 0.075_936).abs() < 1e-6, "{p}");
    assert!(v.get("mc").is_none());
    assert!(stderr(&o).contains("\"config_digest\":\"sha256:"));
}

#[test]
fn validate_reference_scenario_passes() {
    let o = fdrs(&["validate", "--config", &config("fig2a.toml"), "--rate", "2", "--trials", "1000000", "--seed", "11"]);
    let out = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{out}{}", stderr(&o));
    assert_eq!(out.matches("PASS").count(), 5, "{out}");
    assert!(out.contains("overall: PASS"));
}

#[test]
fn relay_count_sweep_emits_one_row_per_cell() {
    let o = fdrs(&[
        "sweep", "--config", &config("fig3.toml"), "--axis", "relay_count", "--from", "1", "--to", "8",
        "--protocols", "ndl,sdf", "--cognitive",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("axis,protocol,method,outage,throughput,stderr,trials,seed"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 16);
    assert!(rows.iter().all(|r| r.len() == 8 && r[2] == "analytic" && r[5].is_empty()));
    assert_eq!(rows[0][0], "1");
    assert_eq!(rows[15][0], "8");
}

#[test]
fn simulated_sweeps_are_byte_identical() {
    let args = [
        "sweep", "--config", &config("fig2a.toml"), "--axis", "rate_bpcu", "--from", "1", "--to", "3", "--steps", "3",
        "--protocols", "idl,hd_mrc", "--method", "mc", "--trials", "50000", "--seed", "4",
    ];
    let a = fdrs(&args);
    let b = fdrs(&args);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let out = stdout(&a);
    let row: Vec<&str> = out.lines().nth(2).unwrap().split(',').collect();
    assert_eq!(row[1], "hd_mrc");
    assert_eq!(&row[5..], &[row[5], "50000", "4"]);
}

#[test]
fn sweep_reports_skipped_protocols() {
    let o = fdrs(&[
        "sweep", "--config", &config("fig2a.toml"), "--axis", "power_db", "--from", "0", "--to", "10", "--steps", "3",
        "--protocols", "ndl,hd_sdf",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stdout(&o).lines().count(), 4);
    assert!(stderr(&o).contains("HD-SDF"), "{}", stderr(&o));
}

#[test]
fn feasibility_table() {
    let o = fdrs(&["pl", "--config", &config("fig2b.toml"), "--trials", "100000"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "l,p_analytic,p_mc,stderr");
    assert_eq!(lines.len(), 6);
    assert!(lines[5].starts_with("source_only,"));
    let total: f64 = lines[1..5].iter().map(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-9);
    let o = fdrs(&["pl", "--config", &config("fig2a.toml")]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn diversity_of_relay_only_scheme() {
    let o = fdrs(&[
        "diversity", "--config", &config("fig4.toml"), "--protocol", "ndl", "--pmin-db", "10", "--pmax-db", "50",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["slope"].as_f64().unwrap() - 3.0).abs() < 0.3, "{v}");
    assert_eq!(v["floor_detected"], Value::Bool(false));
    let o = fdrs(&[
        "diversity", "--config", &config("fig4_lambda1.toml"), "--protocol", "idl", "--pmin-db", "10", "--pmax-db", "50",
    ]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["floor_detected"], Value::Bool(true), "{v}");
}

#[test]
fn config_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(config("fig2b.toml")).unwrap();

    let bad = dir.path().join("lambda.toml");
    std::fs::write(&bad, text.replace("lambda = 1", "lambda = 1.5")).unwrap();
    let o = fdrs(&["outage", "--config", bad.to_str().unwrap(), "--protocol", "ndl", "--rate", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("lambda"), "{}", stderr(&o));
    assert!(stderr(&o).contains("line 16"), "{}", stderr(&o));

    let bad = dir.path().join("ith.toml");
    std::fs::write(&bad, text.replace("ith_db = 3", "")).unwrap();
    let o = fdrs(&["outage", "--config", bad.to_str().unwrap(), "--protocol", "ndl", "--rate", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("ith_db"), "{}", stderr(&o));

    let o = fdrs(&["outage", "--config", &config("fig2a.toml"), "--protocol", "warp", "--rate", "1"]);
    assert_eq!(o.status.code(), Some(1));
    let o = fdrs(&["outage", "--config", &config("fig2a.toml"), "--protocol", "hd_mrc", "--rate", "1"]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
}

#[test]
fn output_file_gets_a_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cell.json");
    let o = fdrs(&[
        "--out", out.to_str().unwrap(), "outage", "--config", &config("fig2b.toml"), "--protocol", "sdf", "--rate", "1",
        "--cognitive", "--method", "both", "--trials", "20000", "--seed", "3",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
    let data: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(data["mc"]["trials"], 20000);
    let m: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("cell.json.manifest.json")).unwrap()).unwrap();
    assert_eq!(m["subcommand"], "outage");
    assert_eq!(m["seed"], 3);
    assert!(m["timestamp"].as_u64().unwrap() > 0);
}
