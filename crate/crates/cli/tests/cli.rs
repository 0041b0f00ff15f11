use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn hombundle(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hombundle"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hombundle-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn e2_relations_include_known_cubic() {
    let out = hombundle(&["cohomology", "--family", "E", "--alpha", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let rels: Vec<&str> = v["relations"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r.as_str().unwrap())
        .collect();
    assert!(rels.contains(&"x1^2*x3 + 2*x1*x3^2"), "{rels:?}");
    assert_eq!(v["betti"], serde_json::json!([1, 0, 3, 0, 6, 0, 5]));
}

#[test]
fn m0_quadric_relation_up_to_sign() {
    let out = hombundle(&["cohomology", "--family", "M", "--a", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let rels = v["relations"].as_array().unwrap();
    assert!(rels
        .iter()
        .any(|r| r.as_str() == Some("x1^2 + x1*y1 - y1*x2 - x2^2")));
}

#[test]
fn cohomology_from_spec_file() {
    let path = scratch("e1.spec");
    std::fs::write(
        &path,
        "base cp2^5\neuler 1 1 1 1 0\neuler 1 0 3 0 1\nfinal 6\n",
    )
    .unwrap();
    let out = hombundle(&["cohomology", "--spec", path.to_str().unwrap()]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(
        json(&out)["betti"],
        serde_json::json!([1, 0, 3, 0, 6, 0, 5])
    );
}

#[test]
fn iso_check_outcomes() {
    let out = hombundle(&["iso-check", "E:1", "E:2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["result"], "not-iso");
    assert!(v.get("refutation").is_some());

    let out = hombundle(&["iso-check", "E:3", "E:3"]);
    let v = json(&out);
    assert_eq!(v["result"], "iso");
    assert!(v.get("certificate").is_some());
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["cohomology", "--family", "E"][..],
        &["cohomology", "--family", "E", "--alpha", "0"],
        &["cohomology", "--family", "Q", "--alpha", "1"],
        &[
            "curvature",
            "--family",
            "E",
            "--alpha",
            "1",
            "--seed",
            "1",
            "--t-list",
            "0",
        ],
        &[
            "curvature",
            "--family",
            "E",
            "--alpha",
            "1",
            "--seed",
            "1",
            "--t-list",
            "1.5",
        ],
        &["curvature", "--family", "E", "--alpha", "1"],
        &["iso-check", "E:1", "K:2"],
        &["certify", "--criteria", "1"],
        &["certify", "--seed", "1", "--criteria", "99"],
        &[
            "diameter", "--family", "E", "--alpha", "1", "--format", "csv",
        ],
    ] {
        let out = hombundle(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn curvature_report_is_reproducible() {
    let args = [
        "curvature",
        "--family",
        "M",
        "--a",
        "2",
        "--t-list",
        "0.5",
        "--seed",
        "7",
        "--samples",
        "100",
    ];
    let a = hombundle(&args);
    let b = hombundle(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    let r = &v["records"][0];
    assert!(r["min_sec"].as_f64().unwrap() >= -1e-9);
    assert!(r["ricci_min"].as_f64().unwrap() > 0.0);
}

#[test]
fn anco_sweep_csv_columns() {
    let out = hombundle(&[
        "anco-sweep",
        "--family",
        "M",
        "--a",
        "2",
        "--t-list",
        "1,0.5",
        "--seed",
        "3",
        "--samples",
        "50",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("t,min_sec,ricci_min,lambda_min,D,lambda_min_D2")
    );
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 2);
    for r in &rows {
        assert_eq!(r.len(), 6);
        assert!((r[3] * r[4] * r[4] - r[5]).abs() <= 1e-9 * r[5].abs().max(1.0));
    }
}

#[test]
fn diameter_text() {
    let out = hombundle(&["diameter", "--family", "M", "--a", "3", "--format", "text"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("M_3 D <= 7.90616"), "{text}");
}

#[test]
fn certificate_round_trip_and_tamper() {
    let path = scratch("cert.json");
    let p = path.to_str().unwrap();
    let out = hombundle(&[
        "certify",
        "--seed",
        "5",
        "--criteria",
        "1,12,13",
        "--out",
        p,
    ]);
    assert_eq!(out.status.code(), Some(0));
    let first = std::fs::read(&path).unwrap();

    let again = scratch("cert2.json");
    hombundle(&[
        "certify",
        "--seed",
        "5",
        "--criteria",
        "1,12,13",
        "--out",
        again.to_str().unwrap(),
    ]);
    assert_eq!(first, std::fs::read(&again).unwrap());

    let out = hombundle(&["certify", "--verify", p]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["verified"], true);

    let tampered =
        String::from_utf8(first)
            .unwrap()
            .replacen("\"passed\": true", "\"passed\": false", 1);
    std::fs::write(&path, tampered).unwrap();
    let out = hombundle(&["certify", "--verify", p]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["digest_ok"], false);

    std::fs::write(&path, "{not json").unwrap();
    let out = hombundle(&["certify", "--verify", p]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn failing_criterion_exits_1() {
    let out = hombundle(&[
        "certify",
        "--seed",
        "1",
        "--family",
        "M",
        "--a",
        "2",
        "--criteria",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["all_passed"], false);
}
