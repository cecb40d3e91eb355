use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use semigroup_cli::formats::{write_json, MatrixJson, PolynomialJson, TupleJson, VnCaseJson, read_json};
use semigroup_core::vn::crabb_davie_fixture;
use semigroup_core::{CMatrix, C64};
use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_semigroup"));
    c.env_remove("SEMIGROUP_TOL").env_remove("SEMIGROUP_MAX_ENTRIES");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn fixture() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join("crabb_davie.json")
}

fn write_tuple(dir: &TempDir, name: &str, mats: &[CMatrix]) -> PathBuf {
    let p = dir.path().join(name);
    write_json(&p, &TupleJson::from_mats(mats)).unwrap();
    p
}

fn small_tuple() -> Vec<CMatrix> {
    let a = CMatrix::from_rows(&[
        vec![C64::new(0.3, 0.1), C64::new(0.2, 0.0)],
        vec![C64::new(0.0, -0.1), C64::new(0.4, 0.0)],
    ])
    .unwrap();
    let b = &(&a * &a).scale_real(0.8) + &a.scale_real(0.2);
    vec![a, b]
}

#[test]
fn shipped_fixture_matches_construction() {
    let case: VnCaseJson = read_json(&fixture()).unwrap();
    let (tuple, poly) = crabb_davie_fixture();
    assert_eq!(case.tuple, TupleJson::from_mats(tuple.mats()));
    assert_eq!(case.poly, PolynomialJson::from(&poly));
}

#[test]
fn interp_check_passes_on_commuting_tuple() {
    let dir = TempDir::new().unwrap();
    let t = write_tuple(&dir, "t.json", &small_tuple());
    let out = run(&["interp", "check", "--tuple", path_str(&t), "--N", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["status"], "pass");
    assert_eq!(v["config"]["N"], 3);
    assert_eq!(v["config"]["max_num"], 6);
}

#[test]
fn interp_eval_writes_matrix() {
    let dir = TempDir::new().unwrap();
    let t = write_tuple(&dir, "t.json", &small_tuple());
    let m = dir.path().join("m.json");
    let out = run(&["interp", "eval", "--tuple", path_str(&t), "--N", "2", "--t", "1/2,3/2", "--out", path_str(&m)]);
    assert_eq!(out.status.code(), Some(0));
    let mat: MatrixJson = read_json(&m).unwrap();
    assert_eq!((mat.rows, mat.cols), (8, 8));
}

#[test]
fn non_commuting_tuple_is_input_error() {
    let dir = TempDir::new().unwrap();
    let a = CMatrix::from_real(&[&[0.0, 0.5], &[0.0, 0.0]]).unwrap();
    let b = CMatrix::from_real(&[&[0.0, 0.0], &[0.5, 0.0]]).unwrap();
    let t = write_tuple(&dir, "t.json", &[a, b]);
    let out = run(&["interp", "check", "--tuple", path_str(&t), "--N", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn vn_constant_holds() {
    let dir = TempDir::new().unwrap();
    let t = write_tuple(&dir, "t.json", &small_tuple());
    let p = dir.path().join("p.json");
    std::fs::write(&p, r#"{"d": 2, "terms": [{"alpha": [0, 0], "coeff": [1.0, 0.0]}]}"#).unwrap();
    let out = run(&["vn", "--tuple", path_str(&t), "--poly", path_str(&p), "--grid", "16"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["status"], "HOLDS");
}

#[test]
fn vn_fixture_is_violated() {
    let dir = TempDir::new().unwrap();
    let case: VnCaseJson = read_json(&fixture()).unwrap();
    let t = dir.path().join("t.json");
    let p = dir.path().join("p.json");
    write_json(&t, &case.tuple).unwrap();
    write_json(&p, &case.poly).unwrap();
    let out = run(&["vn", "--tuple", path_str(&t), "--poly", path_str(&p)]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["status"], "VIOLATED");
    let r = &v["result"];
    assert!(r["lhs"].as_f64().unwrap() - r["sup_upper"].as_f64().unwrap() > 1e-3);
}

#[test]
fn vn_search_is_deterministic_and_flags_fixture() {
    let args = ["vn-search", "--d", "3", "--dim", "3", "--trials", "20", "--seed", "11", "--grid", "32"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);

    let fx = fixture();
    let mut with_case: Vec<&str> = args[..args.len() - 1].to_vec();
    with_case.extend(["256", "--case", path_str(&fx)]);
    let c = run(&with_case);
    assert_eq!(c.status.code(), Some(1));
    let v = json(&c);
    assert_eq!(v["status"], "VIOLATED");
    assert_eq!(v["result"]["violations"][0]["index"], 20);
}

#[test]
fn env_tolerance_is_echoed() {
    let out = bin().args(["bscr", "--N", "3"]).env("SEMIGROUP_TOL", "1e-7").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["config"]["tol"], 1e-7);
}

#[test]
fn tiny_entry_cap_is_input_error() {
    let dir = TempDir::new().unwrap();
    let t = write_tuple(&dir, "t.json", &small_tuple());
    let out = bin()
        .args(["interp", "check", "--tuple", path_str(&t), "--N", "4"])
        .env("SEMIGROUP_MAX_ENTRIES", "10")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bscr_trace_csv() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("trace.csv");
    let out = run(&["bscr", "--N", "4", "--trace", "1/4,3/4", "--out", path_str(&csv)]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("theta,re,im"));
    assert!(lines.count() >= 4);
}

#[test]
fn approx_csv_sweep() {
    let dir = TempDir::new().unwrap();
    let g = write_tuple(
        &dir,
        "g.json",
        &[CMatrix::diag_real(&[-1.0, -3.0]), CMatrix::diag_real(&[-2.0, -1.0])],
    );
    let csv = dir.path().join("sweep.csv");
    let out = run(&[
        "approx", "--generators", path_str(&g), "--eps-list", "0.5,0.25,0.125", "--tmax", "2", "--steps", "10",
        "--format", "csv", "--out", path_str(&csv),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("eps,sup_error\n"));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn dilate_and_structure() {
    let dir = TempDir::new().unwrap();
    let m = dir.path().join("s.json");
    write_json(&m, &MatrixJson::from(&CMatrix::from_real(&[&[0.5, 0.2], &[0.1, 0.3]]).unwrap())).unwrap();
    let out = run(&["dilate", "--matrix", path_str(&m), "--m", "4", "--verify"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["result"]["dilation_dim"], 10);

    let out = run(&["structure", "--matrix", path_str(&m)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["result"]["is_contraction"], true);
}

#[test]
fn parrott_products_vanish() {
    let dir = TempDir::new().unwrap();
    let r1 = dir.path().join("r1.json");
    let r2 = dir.path().join("r2.json");
    write_json(&r1, &MatrixJson::from(&CMatrix::from_real(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap())).unwrap();
    write_json(&r2, &MatrixJson::from(&CMatrix::from_real(&[&[1.0, 0.0], &[0.0, -1.0]]).unwrap())).unwrap();
    let out = run(&["parrott", "--r1", path_str(&r1), "--r2", path_str(&r2)]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["result"]["pairwise_products_zero"], true);
    assert_eq!(v["result"]["inputs_commute"], false);
}

#[test]
fn usage_and_input_errors_exit_two() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["bscr"]).status.code(), Some(2));
    assert_eq!(run(&["bscr", "--N", "0"]).status.code(), Some(2));
    assert_eq!(run(&["vn", "--tuple", "/nonexistent/t.json", "--poly", "/nonexistent/p.json"]).status.code(), Some(2));
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"rows\": 2}").unwrap();
    assert_eq!(run(&["structure", "--matrix", path_str(&bad)]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}
