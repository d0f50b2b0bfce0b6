use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use wittbox::count::{verify, CountOptions};
use wittbox::instance::instance_to_json;
use wittbox::suite::{instance_rng, random_instance};

fn wittbox(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wittbox")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn instances_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../instances")
}

fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn record(line: &str) -> serde_json::Value {
    serde_json::from_str(line).expect("record is JSON")
}

#[test]
fn sum_polynomials_at_two() {
    let out = wittbox(&["witt-polys", "--p", "2", "--r", "2", "--nmax", "1"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "S_0 = x0 + y0\nS_1 = -x0*y0 + x1 + y1\n");
    let out = wittbox(&["witt-polys", "--p", "3", "--r", "2", "--nmax", "0"]);
    assert_eq!(stdout(&out), "S_0 = x0 + y0\n");
}

#[test]
fn product_polynomials_at_two() {
    let out = wittbox(&["witt-polys", "--p", "2", "--nmax", "1", "--mul"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "M_0 = x0*y0\nM_1 = x0^2*y1 + y0^2*x1 + 2*x1*y1\n");
}

#[test]
fn witt_polys_budget_exit_code() {
    let out = wittbox(&["witt-polys", "--p", "5", "--r", "6", "--nmax", "3", "--budget", "50"]);
    assert_eq!(out.status.code(), Some(5));
}

#[test]
fn count_product_box_record() {
    let path = instances_dir().join("product_box_a1.json");
    let out = wittbox(&["count", "--format", "records", path.to_str().unwrap()]);
    assert!(out.status.success());
    let r = record(stdout(&out).trim());
    assert_eq!(r["schema"], 1);
    assert_eq!(r["count"], 7);
    assert_eq!(r["ordp"], 0);
    assert_eq!(r["bound"], 1);
    assert_eq!(r["tier"], "none");
    assert_eq!(r["verdict"]["status"], "informational");
    assert_eq!(r["verdict"]["satisfied"], false);
    assert!(r.get("timings").is_none());
}

#[test]
fn empty_system_counts_every_point() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(&dir, "empty.json", r#"{"p":3,"h":1,"m":1,"n":3,"box":{"kind":"teichmuller"},"polys":[]}"#);
    let out = wittbox(&["count", "--format", "records", &path]);
    assert!(out.status.success());
    assert_eq!(record(stdout(&out).trim())["count"], 27);
}

#[test]
fn exit_codes_by_outcome() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(&dir, "bad.json", "{ not json");
    assert_eq!(wittbox(&["count", &bad]).status.code(), Some(2));
    let missing = dir.path().join("missing.json");
    assert_eq!(wittbox(&["count", missing.to_str().unwrap()]).status.code(), Some(2));
    let path = instances_dir().join("power_box_47258.json");
    let out = wittbox(&["count", "--cap", "100", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(5));
    assert_eq!(wittbox(&["count", "--cap", "0", path.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(wittbox(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn reduce_prints_one_polynomial_per_digit() {
    let path = instances_dir().join("teichmuller_mixed_moduli.json");
    let out = wittbox(&["reduce", "--format", "records", path.to_str().unwrap()]);
    assert!(out.status.success());
    let lines: Vec<_> = stdout(&out).lines().map(record).collect();
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[0]["poly"], "x1 + x2");
    assert_eq!(lines[3]["k"], 2);
    assert_eq!(lines[3]["route"], "symbolic");
}

#[test]
fn box_interp_reports_degrees() {
    let path = instances_dir().join("product_box_a1.json");
    let out = wittbox(&["box-interp", path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("g_1,1 [deg 4] = x1*x2*x3*x4 + 1"), "{text}");
    assert!(text.contains("weak degree condition: fails"));
}

#[test]
fn suite_is_deterministic_across_workers() {
    let args = ["prop-suite", "--seed", "0", "--count", "200", "--max-q", "4", "--format", "records"];
    let a = wittbox(&args);
    assert!(a.status.success(), "{}", stdout(&a));
    let b = wittbox(&[&args[..], &["--workers", "3"]].concat());
    assert_eq!(a.stdout, b.stdout);
    let r = record(stdout(&a).trim());
    assert_eq!(r["instances"], 200);
    assert_eq!(r["failures"].as_array().unwrap().len(), 0);
}

#[test]
fn replayed_instance_gives_the_same_verdict() {
    let dir = tempfile::tempdir().unwrap();
    for index in 0..5 {
        let inst = random_instance(&mut instance_rng(3, index)).unwrap();
        let expected = verify(&inst, &CountOptions::default()).unwrap();
        let path = write(&dir, &format!("i{index}.json"), &instance_to_json(&inst));
        let out = wittbox(&["count", "--format", "records", &path]);
        assert!(out.status.success());
        let r = record(stdout(&out).trim());
        assert_eq!(r["count"], expected.count);
        assert_eq!(r["verdict"], serde_json::to_value(expected.verdict).unwrap());
    }
}

#[test]
fn repro_lists_differing_rows() {
    let out = wittbox(&["repro-paper"]);
    let text = stdout(&out);
    // two published values disagree with the computed counts
    assert_eq!(out.status.code(), Some(1));
    let diffs: Vec<&str> = text.lines().filter(|l| l.starts_with("DIFF")).collect();
    assert_eq!(diffs.len(), 2, "{text}");
    assert!(text.contains("ok   power box u = (4,7,2,5,8): |V|, ord_p: got 660, 1"));
    assert!(text.contains("ok   power box u = (4,7,2,5,8): 3u mod q-1: got [4, 5, 6, 7, 8]"));
}
