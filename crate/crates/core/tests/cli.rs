use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_reduction-engine");

fn run(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("REDUCTION_ENGINE_SEED")
        .output()
        .unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn without_manifest(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("manifest");
    v
}

const SQRT2: &str = r#"{"algebraics":[{"name":"r2","minpoly":[-2,0,1]}],"set":{"a":"r2"},
"constraints":{"custom":["r2 - 1"]},"options":{"mode":"strict","primes":"2:50"}}"#;

#[test]
fn reduce_reports_maps() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "s.json", SQRT2);
    let out = run(&["reduce", "-i", &spec]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    let maps = r["maps"].as_array().unwrap();
    assert_eq!(maps.len(), 5);
    assert_eq!(maps[0]["p"], Value::from(7));
    assert_eq!(r["manifest"]["command"], Value::from("reduce"));
    assert_eq!(r["manifest"]["input_sha256"].as_str().unwrap().len(), 64);
    assert_eq!(r["composition"]["f_theta"], serde_json::json!([-2, 0, 1]));

    let out_path = dir.path().join("out.json");
    let out = run(&[
        "reduce",
        "-i",
        &spec,
        "--max-maps",
        "1",
        "-o",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(out_path).unwrap()).unwrap();
    assert_eq!(r["maps"].as_array().unwrap().len(), 1);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let none = write(
        dir.path(),
        "none.json",
        r#"{"algebraics":[{"name":"i","minpoly":[1,0,1]}],"constraints":{"custom":["i"]},"options":{"primes":"2:3"}}"#,
    );
    let empty = write(
        dir.path(),
        "empty.json",
        r#"{"algebraics":[{"name":"i","minpoly":[]}]}"#,
    );
    let reducible = write(
        dir.path(),
        "red.json",
        r#"{"algebraics":[{"name":"s","minpoly":[-4,0,1]}]}"#,
    );
    let unknown = write(
        dir.path(),
        "unk.json",
        r#"{"algebraics":[],"options":{"colour":"red"}}"#,
    );
    let cases: &[(&[&str], i32)] = &[
        (&["reduce", "-i", &none], 1),
        (&["reduce", "-i", &empty], 2),
        (&["reduce", "-i", &reducible], 2),
        (&["reduce", "-i", &unknown], 2),
        (&["reduce", "-i", "/nonexistent/spec.json"], 2),
        (&["reduce", "-i", &none, "--primes", "9:3"], 2),
        (&["density", "-f", "1,2,1"], 2),
        (&["density", "-f", "x"], 2),
        (&["harness", "nope"], 2),
        (&["harness", "sumprod", "--domain", "octonions"], 2),
        (&["--workers", "0", "density", "-f", "-2,0,1"], 2),
        (&["frobnicate"], 2),
        (&["--help"], 0),
        (&["--version"], 0),
        (&["density", "-f", "-2,0,1", "--bound", "1000"], 0),
        (&["harness", "matrix", "--size", "2", "--exhaustive"], 0),
        (&["harness", "sumprod", "--size", "1", "--trials", "1"], 0),
        (&["--seed", "7", "harness", "sl2", "--trials", "5"], 0),
        (&["density", "-f", "1,0,1", "--bound", "100"], 0),
    ];
    for (args, code) in cases {
        let out = run(args);
        assert_eq!(
            out.status.code(),
            Some(*code),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        if *code == 2 && args[0] != "frobnicate" {
            assert!(!out.stderr.is_empty(), "{args:?}");
        }
    }
}

#[test]
fn density_counts() {
    let out = run(&[
        "density",
        "-f",
        "-2,0,1",
        "--bound",
        "1000",
        "--predict",
        "1,1=1/2;2=1/2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let d = &json(&out)["density"];
    assert_eq!(d["ramified"], Value::from(1));
    assert_eq!(d["counts"]["1,1"], Value::from(80));
    assert_eq!(d["counts"]["2"], Value::from(87));
    assert!(d["deviations"]["1,1"].as_f64().unwrap() < 0.05);
}

#[test]
fn reports_are_stable_across_runs_and_workers() {
    let args = |w: &'static str| ["--seed", "42", "--workers", w, "harness", "incidence", "--trials", "6"];
    let a = run(&args("1"));
    let b = run(&args("4"));
    let c = run(&args("4"));
    assert_eq!(a.status.code(), Some(0));
    let (a, b, c) = (json(&a), json(&b), json(&c));
    assert_eq!(a["harness"], b["harness"]);
    let strip = |v: Value| serde_json::to_string(&without_manifest(v)).unwrap();
    assert_eq!(strip(b), strip(c));

    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "s.json", SQRT2);
    let one = json(&run(&["--workers", "1", "reduce", "-i", &spec]));
    let many = json(&run(&["--workers", "3", "reduce", "-i", &spec]));
    assert_eq!(without_manifest(one), without_manifest(many));
}

#[test]
fn seed_from_environment() {
    let with_env = Command::new(BIN)
        .args(["harness", "sumprod", "--size", "4", "--trials", "2"])
        .env("REDUCTION_ENGINE_SEED", "9")
        .output()
        .unwrap();
    let with_flag = run(&["--seed", "9", "harness", "sumprod", "--size", "4", "--trials", "2"]);
    let (e, f) = (json(&with_env), json(&with_flag));
    assert_eq!(e["harness"]["config"]["seed"], Value::from(9));
    assert_eq!(e["harness"], f["harness"]);
}
