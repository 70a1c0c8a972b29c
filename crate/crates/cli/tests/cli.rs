use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn qcompile(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcompile"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// The report is the last line on standard output.
fn report(out: &Output) -> Value {
    let text = stdout(out);
    serde_json::from_str(text.lines().last().expect("report line")).unwrap()
}

fn write(dir: &TempDir, name: &str, v: &Value) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, serde_json::to_string_pretty(v).unwrap()).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

struct Fixtures {
    dir: TempDir,
    bell: PathBuf,
    channel: PathBuf,
    povm: PathBuf,
    instrument: PathBuf,
}

fn fixtures() -> Fixtures {
    let dir = TempDir::new().unwrap();
    let h = 1.0 / 2f64.sqrt();
    let bell = write(&dir, "bell.json", &json!({"matrix": [[h], [0.0], [0.0], [h]]}));
    let g: f64 = 1.0 / 3.0;
    let channel = write(
        &dir,
        "ad.json",
        &json!({"kraus": [[[1.0, 0.0], [0.0, (1.0 - g).sqrt()]], [[0.0, g.sqrt()], [0.0, 0.0]]]}),
    );
    let r = 2f64.sqrt();
    let povm = write(
        &dir,
        "pgm.json",
        &json!({"effects": [
            [[0.25, 0.25], [0.25, 0.25]],
            [[(3.0 + 2.0 * r) / 8.0, -0.125], [-0.125, (3.0 - 2.0 * r) / 8.0]],
            [[(3.0 - 2.0 * r) / 8.0, -0.125], [-0.125, (3.0 + 2.0 * r) / 8.0]]
        ]}),
    );
    let instrument = write(
        &dir,
        "inst.json",
        &json!({"branches": [[[[1.0, 0.0], [0.0, 0.0]]], [[[0.0, 0.0], [0.0, [0.0, 1.0]]]]]}),
    );
    Fixtures { dir, bell, channel, povm, instrument }
}

#[test]
fn bell_to_qasm_has_one_cx() {
    let f = fixtures();
    let out = qcompile(&["compile", "iso", "--method", "auto", s(&f.bell), "--format", "qasm"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert_eq!(text.lines().filter(|l| l.starts_with("cx ")).count(), 1);
    let rep = report(&out);
    assert_eq!(rep["cnots"], 1);
    assert!(rep["residual"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn amplitude_damping_report() {
    let f = fixtures();
    let out = qcompile(&["compile", "channel", s(&f.channel)]);
    assert_eq!(code(&out), 0);
    let rep = report(&out);
    assert!(rep["cnots"].as_u64().unwrap() <= 2);
    assert!(rep["residual"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn every_kind_and_format_compiles() {
    let f = fixtures();
    for (kind, path) in [("iso", &f.bell), ("channel", &f.channel), ("povm", &f.povm), ("instrument", &f.instrument)] {
        for format in ["json", "qasm", "latex"] {
            let target = f.dir.path().join(format!("{kind}.{format}"));
            let out = qcompile(&["compile", kind, s(path), "--format", format, "--output", s(&target)]);
            assert_eq!(code(&out), 0, "{kind} {format}: {}", String::from_utf8_lossy(&out.stderr));
            let written = fs::read_to_string(&target).unwrap();
            assert!(!written.is_empty());
            // with --output the report is all that goes to stdout
            assert_eq!(stdout(&out).lines().count(), 1);
        }
        let out = qcompile(&["compile", kind, s(path), "--target", "xx", "--format", "json"]);
        assert_eq!(code(&out), 0, "{kind} xx");
    }
}

#[test]
fn output_is_deterministic() {
    let f = fixtures();
    let a = qcompile(&["compile", "povm", s(&f.povm), "--seed", "7"]);
    let b = qcompile(&["compile", "povm", s(&f.povm), "--seed", "7"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn non_isometry_exits_3() {
    let f = fixtures();
    let bad = write(&f.dir, "bad.json", &json!({"matrix": [[1.0], [1.0]]}));
    let out = qcompile(&["compile", "iso", s(&bad)]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("defect"));
}

#[test]
fn incomplete_kraus_exits_3() {
    let f = fixtures();
    let bad = write(&f.dir, "bad.json", &json!({"kraus": [[[1.0, 0.0], [0.0, 0.5]]]}));
    assert_eq!(code(&qcompile(&["compile", "channel", s(&bad)])), 3);
}

#[test]
fn corrupted_json_exits_2_with_location() {
    let f = fixtures();
    let p = f.dir.path().join("broken.json");
    fs::write(&p, "{\"matrix\": [[1.0],\n [0.0,]]}").unwrap();
    let out = qcompile(&["validate", "iso", s(&p)]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn wrong_shape_exits_2() {
    let f = fixtures();
    let bad = write(&f.dir, "bad.json", &json!({"matrix": [[1.0], [0.0], [0.0]]}));
    assert_eq!(code(&qcompile(&["compile", "iso", s(&bad)])), 2);
    let missing = write(&f.dir, "missing.json", &json!({"effects": []}));
    assert_eq!(code(&qcompile(&["compile", "channel", s(&missing)])), 2);
}

#[test]
fn residual_over_tolerance_exits_4() {
    let f = fixtures();
    let out = qcompile(&["compile", "channel", s(&f.channel), "--tolerance=-1"]);
    assert_eq!(code(&out), 4);
    let out = qcompile(&["roundtrip", "channel", s(&f.channel), "--tolerance=-1"]);
    assert_eq!(code(&out), 4);
}

#[test]
fn xx_with_qasm_is_refused() {
    let f = fixtures();
    let out = qcompile(&["compile", "iso", s(&f.bell), "--target", "xx", "--format", "qasm"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn stateprep_needs_a_state() {
    let f = fixtures();
    let out = qcompile(&["compile", "iso", s(&f.bell), "--method", "stateprep"]);
    assert_eq!(code(&out), 0);
    assert_eq!(report(&out)["method"], "STATEPREP");
    let cnot = write(
        &f.dir,
        "cnot.json",
        &json!({"matrix": [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]]}),
    );
    assert_eq!(code(&qcompile(&["compile", "iso", s(&cnot), "--method", "stateprep"])), 3);
}

#[test]
fn validate_reports() {
    let f = fixtures();
    let out = qcompile(&["validate", "iso", s(&f.bell)]);
    assert_eq!(code(&out), 0);
    assert_eq!(report(&out)["status"], "ok");
    let out = qcompile(&["validate", "povm", s(&f.povm)]);
    assert_eq!(code(&out), 0);
    assert!(report(&out)["effect_sum_defect"].as_f64().unwrap() <= 1e-12);
}

#[test]
fn roundtrip_prints_residual_only() {
    let f = fixtures();
    let out = qcompile(&["roundtrip", "instrument", s(&f.instrument)]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).lines().count(), 1);
    assert!(report(&out)["residual"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn convert_and_export_chain() {
    let f = fixtures();
    let circ = f.dir.path().join("c.json");
    let out = qcompile(&["compile", "iso", s(&f.bell), "--method", "qsd", "--output", s(&circ)]);
    assert_eq!(code(&out), 0);

    let xx = f.dir.path().join("xx.json");
    assert_eq!(code(&qcompile(&["convert", "to-xx", s(&circ), "--output", s(&xx)])), 0);
    let back = f.dir.path().join("back.json");
    assert_eq!(code(&qcompile(&["convert", "to-cnot", s(&xx), "--output", s(&back)])), 0);
    let out = qcompile(&["validate", "circuit", s(&back)]);
    assert_eq!(code(&out), 0);

    let out = qcompile(&["export", "qasm", s(&circ)]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("OPENQASM 2.0;"));
    let out = qcompile(&["export", "latex", s(&xx), "--precision", "2"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("\\Qcircuit"));
    // the QASM subset has no XX gate
    assert_ne!(code(&qcompile(&["export", "qasm", s(&xx)])), 0);
}

#[test]
fn sample_then_compile() {
    let f = fixtures();
    let p = f.dir.path().join("iso.json");
    let out = qcompile(&["sample", "iso", "--m", "1", "--n", "3", "--seed", "5", "--output", s(&p)]);
    assert_eq!(code(&out), 0);
    for method in ["auto", "generic", "qsd", "knill", "householder"] {
        let out = qcompile(&["compile", "iso", s(&p), "--method", method, "--no-simplify"]);
        assert_eq!(code(&out), 0, "{method}");
    }
}

#[test]
fn unknown_method_is_a_usage_error() {
    let f = fixtures();
    assert_eq!(code(&qcompile(&["compile", "iso", s(&f.bell), "--method", "magic"])), 2);
}
