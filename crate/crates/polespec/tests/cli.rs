use std::process::{Command, Output};

use serde_json::Value;

fn polespec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polespec")).args(args).env_remove("POLESPEC_JOBS").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn tmp(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("polespec-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn row(doc: &Value, table: usize, name: &str) -> Vec<i64> {
    let rows = doc["tables"][table]["rows"].as_array().unwrap();
    let r = rows.iter().find(|r| r["name"] == name).unwrap();
    r["values"].as_array().unwrap().iter().map(|v| v.as_i64().unwrap()).collect()
}

#[test]
fn e1_boolean_first_row() {
    let o = polespec(&["e1", "boolean4", "--kmax", "12", "--format", "structured"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(&row(&doc, 0, "mu")[4..8], &[1, 4, 10, 16]);
}

#[test]
fn lattice_generic5() {
    let o = polespec(&["lattice", "generic5", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("facts,tjurinaSection,,10\n"));
    assert!(s.contains("facts,chiU,,-1\n"));
}

#[test]
fn pages_on_lines_stop_after_second() {
    let o = polespec(&["pages", "generic(3,5)", "--r", "3", "--format", "structured"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    for c in ["mu", "nu", "rho"] {
        assert_eq!(row(&doc, 0, &format!("{c}(2)")), row(&doc, 0, &format!("{c}(3)")));
    }
    assert_eq!(doc["facts"]["nonzeroDifferentials"][1], 0);
}

#[test]
fn builtin_text() {
    let o = polespec(&["builtin", "boolean(4)"]);
    assert_eq!(stdout(&o), "1 0 0 0\n0 1 0 0\n0 0 1 0\n0 0 0 1\n");
    let o = polespec(&["builtin", "braid-essentialized(4)"]);
    assert_eq!(stdout(&o).lines().count(), 7);
    assert_eq!(polespec(&["builtin", "nosuch"]).status.code(), Some(2));
}

#[test]
fn verify_exit_codes() {
    let out = tmp("b4.json");
    let o = polespec(&["verify", "boolean4", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["passed"], true);
    assert_eq!(report["regularity"]["regDerLog"], 0);

    let file = tmp("flat.txt");
    std::fs::write(&file, "1 0 0 0\n0 1 0 0\n1 1 0 0\n").unwrap();
    let o = polespec(&["verify", file.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("rank 2"));

    std::fs::write(&file, "1 0\n0 1\n").unwrap();
    assert_eq!(polespec(&["verify", file.to_str().unwrap()]).status.code(), Some(2));
    std::fs::write(&file, "1 x 0\n").unwrap();
    assert_eq!(polespec(&["e1", file.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(polespec(&["verify", "boolean4", "--format", "xml"]).status.code(), Some(2));
    assert_eq!(polespec(&["verify", "boolean4", "--jobs", "0"]).status.code(), Some(2));
    assert_eq!(polespec(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn low_kmax_is_raised_with_warning() {
    let o = polespec(&["verify", "boolean4", "--kmax", "5", "--format", "structured"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
    let report: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["kmax"], 15);
}

fn without_volatile(s: &str) -> Value {
    let mut v: Value = serde_json::from_str(s).unwrap();
    v.as_object_mut().unwrap().remove("volatile");
    v
}

#[test]
fn deterministic_across_runs_and_job_counts() {
    let a = polespec(&["verify", "generic(3,5)", "--format", "structured", "--jobs", "1"]);
    let b = Command::new(env!("CARGO_BIN_EXE_polespec"))
        .args(["verify", "generic(3,5)", "--format", "structured"])
        .env("POLESPEC_JOBS", "3")
        .output()
        .unwrap();
    assert_eq!(without_volatile(&stdout(&a)), without_volatile(&stdout(&b)));
    let x = polespec(&["pages", "boolean4", "--r", "3"]);
    let y = polespec(&["pages", "boolean4", "--r", "3"]);
    assert_eq!(x.stdout, y.stdout);
}

#[test]
fn report_has_schema_fields() {
    let schema: Value =
        serde_json::from_str(&std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../schema/verify-report.schema.json")).unwrap())
            .unwrap();
    for input in ["boolean4", "nearpencil(5)"] {
        let o = polespec(&["verify", input, "--format", "structured"]);
        let report: Value = serde_json::from_str(&stdout(&o)).unwrap();
        let keys: Vec<&str> = report.as_object().unwrap().keys().map(|s| s.as_str()).collect();
        let required: Vec<&str> = schema["required"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
        let mut a = keys.clone();
        let mut b = required.clone();
        a.sort();
        b.sort();
        assert_eq!(a, b);
        for section in ["identities", "lattice", "convention"] {
            for k in schema["properties"][section]["required"].as_array().unwrap() {
                assert!(report[section].get(k.as_str().unwrap()).is_some(), "{section}.{k}");
            }
        }
    }
}
