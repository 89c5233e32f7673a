use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name);
    p.to_str().unwrap().to_owned()
}

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name)
}

fn minkbill(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_minkbill"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_ok(args: &[&str]) -> Value {
    let out = minkbill(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn strip_timings(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timings");
    v
}

fn check_golden(name: &str, v: &Value) {
    let path = golden(name);
    let text = serde_json::to_string_pretty(v).unwrap() + "\n";
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        fs::create_dir_all(path.parent().unwrap()).unwrap();
        fs::write(&path, &text).unwrap();
    }
    let want = fs::read_to_string(&path).expect("golden file exists; rerun with UPDATE_GOLDEN=1");
    assert_eq!(text, want, "{name} drifted from its golden file");
}

#[test]
fn shortest_square_pair_matches_golden() {
    let v = json_ok(&["shortest", &data("rect_K.json"), &data("diamond_T.json")]);
    assert!((v["min"].as_f64().unwrap() - 4.0).abs() < 1e-6);
    assert_eq!(v["version"], 1);
    assert!(v["timings"]["two_bounce_ms"].is_number());
    check_golden("shortest_rect_diamond.json", &strip_timings(v));
}

#[test]
fn shortest_is_stable_across_thread_modes() {
    let a = json_ok(&["shortest", &data("rect_K.json"), &data("diamond_T.json")]);
    let b = json_ok(&[
        "shortest",
        "--sequential",
        &data("rect_K.json"),
        &data("diamond_T.json"),
    ]);
    let c = json_ok(&[
        "--threads",
        "2",
        "shortest",
        &data("rect_K.json"),
        &data("diamond_T.json"),
    ]);
    assert_eq!(strip_timings(a.clone()), strip_timings(b));
    assert_eq!(strip_timings(a), strip_timings(c));
}

#[test]
fn equilateral_winner_has_three_bounces() {
    let v = json_ok(&[
        "shortest",
        &data("equilateral_K.json"),
        &data("round64_T.json"),
    ]);
    assert_eq!(v["argmin"]["m"], 3);
    let two_min = v["candidates"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["m"] == 2 && c["certified"] == true)
        .map(|c| c["length"].as_f64().unwrap())
        .fold(f64::INFINITY, f64::min);
    assert!(v["min"].as_f64().unwrap() < two_min);
}

#[test]
fn obtuse_triangle_winner_has_two_bounces() {
    let v = json_ok(&["shortest", &data("obtuse_K.json"), &data("round64_T.json")]);
    assert_eq!(v["argmin"]["m"], 2);
    assert!(v["candidates"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["m"] == 2));
    check_golden("shortest_obtuse_round64.json", &strip_timings(v));
}

#[test]
fn single_phase_commands() {
    let two = json_ok(&[
        "two-bounce",
        &data("equilateral_K.json"),
        &data("round64_T.json"),
    ]);
    assert!(two["candidates"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["m"] == 2));
    let three = json_ok(&[
        "three-bounce",
        &data("equilateral_K.json"),
        &data("round64_T.json"),
    ]);
    let cands = three["candidates"].as_array().unwrap();
    assert!(!cands.is_empty() && cands.iter().all(|c| c["m"] == 3));
}

#[test]
fn invalid_input_exits_2_with_the_invariant() {
    let out = minkbill(&["shortest", &data("bad_cw.json"), &data("diamond_T.json")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("counterclockwise"));

    let dir = tempfile::tempdir().unwrap();
    let garbled = dir.path().join("g.json");
    fs::write(&garbled, "{\"vertices\": [[0, 0], [1, 0]]}").unwrap();
    let out = minkbill(&[
        "shortest",
        garbled.to_str().unwrap(),
        &data("diamond_T.json"),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("at least 3"));

    fs::write(&garbled, "not json").unwrap();
    let out = minkbill(&[
        "shortest",
        garbled.to_str().unwrap(),
        &data("diamond_T.json"),
    ]);
    assert_eq!(out.status.code(), Some(2));

    assert_eq!(
        minkbill(&["shortest", &data("rect_K.json")]).status.code(),
        Some(2)
    );
    let out = minkbill(&[
        "shortest",
        "--tol",
        "-1",
        &data("rect_K.json"),
        &data("diamond_T.json"),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = minkbill(&["obtuse", &data("rect_K.json"), &data("round64_T.json")]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn gen_is_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        let out = minkbill(&[
            "gen",
            "5",
            "7",
            "--seed",
            "42",
            "--out",
            d.path().to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    for f in ["K.json", "T.json"] {
        assert_eq!(
            fs::read(a.path().join(f)).unwrap(),
            fs::read(b.path().join(f)).unwrap()
        );
    }
    let k: Value = serde_json::from_slice(&fs::read(a.path().join("K.json")).unwrap()).unwrap();
    let t: Value = serde_json::from_slice(&fs::read(a.path().join("T.json")).unwrap()).unwrap();
    assert_eq!(k["vertices"].as_array().unwrap().len(), 5);
    assert_eq!(t["vertices"].as_array().unwrap().len(), 7);
    // generated files feed straight back in
    let v = json_ok(&[
        "shortest",
        a.path().join("K.json").to_str().unwrap(),
        a.path().join("T.json").to_str().unwrap(),
    ]);
    assert!(v["min"].as_f64().unwrap() > 0.0);
    assert_eq!(minkbill(&["gen", "2", "5"]).status.code(), Some(2));
}

#[test]
fn verify_accepts_fresh_reports_and_rejects_tampered_ones() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = minkbill(&["shortest", &data("rect_K.json"), &data("diamond_T.json")]);
    fs::write(&path, &out.stdout).unwrap();
    let v = json_ok(&["verify", path.to_str().unwrap(), "--grid", "32"]);
    assert_eq!(v["min_matches"], true);
    assert_eq!(v["oracle"]["agrees"], true);

    let mut r: Value = serde_json::from_slice(&out.stdout).unwrap();
    r["min"] = Value::from(3.5);
    fs::write(&path, serde_json::to_string(&r).unwrap()).unwrap();
    let out = minkbill(&["verify", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

fn plot_of(k: &str, t: &str, edit: impl Fn(&mut Value)) -> String {
    let dir = tempfile::tempdir().unwrap();
    let (rp, sp) = (dir.path().join("r.json"), dir.path().join("p.svg"));
    let out = minkbill(&["shortest", &data(k), &data(t)]);
    let mut r: Value = serde_json::from_slice(&out.stdout).unwrap();
    edit(&mut r);
    fs::write(&rp, serde_json::to_string(&r).unwrap()).unwrap();
    let out = minkbill(&["plot", rp.to_str().unwrap(), "-o", sp.to_str().unwrap()]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    fs::read_to_string(sp).unwrap()
}

#[test]
fn plots() {
    let svg = plot_of("rect_K.json", "diamond_T.json", |_| {});
    assert_eq!(svg.matches("class=\"q-vertex\"").count(), 2);
    assert_eq!(svg, plot_of("rect_K.json", "diamond_T.json", |_| {}));

    let svg = plot_of("equilateral_K.json", "round64_T.json", |_| {});
    assert_eq!(svg.matches("class=\"q-vertex\"").count(), 3);

    let svg = plot_of("rect_K.json", "diamond_T.json", |r| {
        r["argmin"] = Value::Null;
        r["min"] = Value::Null;
    });
    assert!(svg.contains("body-k") && svg.contains("body-t"));
    assert!(!svg.contains("q-vertex"));
}

#[test]
fn fagnano_bounces_are_interior_to_facets() {
    let v = json_ok(&[
        "three-bounce",
        &data("equilateral_K.json"),
        &data("round64_T.json"),
    ]);
    let best = v["argmin"]["pair"].clone();
    for f in best["k_faces"].as_array().unwrap() {
        assert_eq!(f["kind"], "edge");
    }
    let corners: Vec<(f64, f64)> = v["inputs"]["k"]["vertices"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| (c[0].as_f64().unwrap(), c[1].as_f64().unwrap()))
        .collect();
    for q in best["q"].as_array().unwrap() {
        let (x, y) = (q[0].as_f64().unwrap(), q[1].as_f64().unwrap());
        assert!(corners.iter().all(|c| (c.0 - x).hypot(c.1 - y) > 1e-3));
    }
}

#[test]
fn bench_single_size_gives_single_row() {
    let v = json_ok(&[
        "bench",
        "--sizes",
        "5x6",
        "--instances",
        "1",
        "--repeats",
        "1",
        "--json",
    ]);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["nk"], 5);
    assert_eq!(rows[0]["nt"], 6);
    assert!(v["trends"].is_null());
    assert_eq!(
        minkbill(&["bench", "--sizes", "5by5"]).status.code(),
        Some(2)
    );
}

#[test]
fn obtuse_subcommand() {
    let v = json_ok(&["obtuse", &data("obtuse_K.json"), &data("round64_T.json")]);
    assert!(v["max_angle_deg"].as_f64().unwrap() > 100.0);
    assert_eq!(v["regular_three_bounce_exists"], false);
    assert!(v["in_family"].is_null());
}
