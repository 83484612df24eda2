//! Behavior tests against the real binary: exit codes, artifact shape,
//! and SVG output.

use std::process::{Command, Output};

fn potlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_potlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn usage_and_input_errors_exit_2() {
    let cases: &[&[&str]] = &[
        &["capacity", "--scene", "/nonexistent/scene.json"],
        &["capacity", "--scene", "cantor_discs:depth=99"],
        &["capacity", "--scene", "random_discs:bogus=1"],
        &[
            "harmonic-measure",
            "--scene",
            "cantor_discs:depth=0",
            "--components",
            "c0",
            "--ball",
            "0,0,1",
        ],
        &["verify", "--scene", "cantor_discs:depth=0", "--suite", "bogus"],
        &["render"], // needs exactly one of --scene / --trace
        &["green-eval", "--scene", "cantor_discs:depth=0", "--at", "1;2"],
    ];
    for args in cases {
        let out = potlab(args);
        assert_eq!(
            out.status.code(),
            Some(2),
            "{args:?}: stderr {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn numerical_failures_exit_1() {
    // g grows monotonically along the outward ray from the anchor, so a
    // level below g(anchor) is never bracketed
    let out = potlab(&[
        "trace-level",
        "--scene",
        "cantor_discs:depth=0",
        "--nodes",
        "48",
        "--level",
        "0.05",
        "--anchor",
        "0.4,0",
        "--dir",
        "1,0",
    ]);
    assert_eq!(
        out.status.code(),
        Some(1),
        "stderr {}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(!out.stderr.is_empty(), "failure must be reported on stderr");

    // asking for the measure of a component the scene does not have
    let out = potlab(&[
        "harmonic-measure",
        "--scene",
        "cantor_discs:depth=0",
        "--nodes",
        "48",
        "--components",
        "zz",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn capacity_artifact_has_the_documented_shape() {
    let out = potlab(&["capacity", "--scene", "cantor_discs:depth=0", "--nodes", "64"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).expect("stdout is JSON");
    assert_eq!(v["nodes"], 64);
    let capacity = v["capacity"].as_f64().unwrap();
    assert!((capacity - 0.35).abs() < 1e-3, "single r=0.35 disc, got {capacity}");
    let robin = v["robin"].as_f64().unwrap();
    assert!((robin + 0.35f64.ln()).abs() < 1e-2);
    let masses = v["component_masses"].as_object().unwrap();
    assert_eq!(masses.len(), 1);
    assert!((masses["c0"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn render_writes_a_wellformed_svg() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scene.svg");
    let out = potlab(&[
        "render",
        "--scene",
        "grid_squares:n=2",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let svg = std::fs::read_to_string(&path).unwrap();
    assert!(svg.starts_with("<svg"), "got {}", &svg[..svg.len().min(60)]);
    assert!(svg.trim_end().ends_with("</svg>"));
    assert!(svg.contains("viewBox"));
    // four squares drawn with the scene class
    assert_eq!(svg.matches("class=\"k\"").count(), 4);
}
