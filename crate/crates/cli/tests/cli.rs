//! End-to-end tests that invoke the `nem` binary and check outputs and the
//! exit-status contract (0 success, 1 strict-audit violations, 2 usage).

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn nem(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nem"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn write_corpus(dir: &Path) {
    let manifest = r#"{
        "resample_n": 24,
        "cost_model": { "ground": "angular-abs" },
        "shapes": [
            { "name": "circle", "spec": { "kind": "circle", "radius": 1.0, "point_count": 48 } },
            { "name": "near-circle", "spec": { "kind": "ellipse", "a": 1.1, "b": 1.0, "point_count": 48 } },
            { "name": "wide-ellipse", "spec": { "kind": "ellipse", "a": 2.0, "b": 1.0, "point_count": 48 } },
            { "name": "from-file", "file": "fixture.json" }
        ]
    }"#;
    fs::write(dir.join("corpus.json"), manifest).unwrap();
    let gen = nem(
        dir,
        &[
            "gen",
            "--kind",
            "regular-polygon",
            "--radius",
            "1.0",
            "--sides",
            "5",
            "--n",
            "48",
            "--out",
            "fixture.json",
        ],
    );
    assert!(gen.status.success());
}

#[test]
fn gen_writes_a_valid_contour_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "gen", "--kind", "ellipse", "--a", "2", "--b", "1", "--n", "64", "--noise", "0.05",
        "--seed", "7", "--out", "e.json",
    ];
    assert!(nem(dir.path(), &args).status.success());
    let first = fs::read(dir.path().join("e.json")).unwrap();
    let reread: nem_core::Contour64 =
        nem_core::load_contour(dir.path().join("e.json")).unwrap();
    assert_eq!(reread.len(), 64);
    assert!(reread.closed());

    let args2 = [
        "gen", "--kind", "ellipse", "--a", "2", "--b", "1", "--n", "64", "--noise", "0.05",
        "--seed", "7", "--out", "e2.json",
    ];
    assert!(nem(dir.path(), &args2).status.success());
    let second = fs::read(dir.path().join("e2.json")).unwrap();
    assert_eq!(first, second, "repeated runs must be byte-identical");
}

#[test]
fn dist_of_a_contour_with_itself_prints_total_zero() {
    let dir = tempfile::tempdir().unwrap();
    let gen = nem(
        dir.path(),
        &["gen", "--kind", "circle", "--radius", "1", "--n", "32", "--out", "c.json"],
    );
    assert!(gen.status.success());
    let out = nem(dir.path(), &["dist", "--x", "c.json", "--y", "c.json"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("total 0\n"), "stdout: {text}");
}

#[test]
fn dist_writes_mapping_and_report_files() {
    let dir = tempfile::tempdir().unwrap();
    for (name, kind, extra) in [
        ("c.json", "circle", vec!["--radius", "1"]),
        ("e.json", "ellipse", vec!["--a", "2", "--b", "1"]),
    ] {
        let mut args = vec!["gen", "--kind", kind, "--n", "16", "--out", name];
        args.extend(extra);
        assert!(nem(dir.path(), &args).status.success());
    }
    let out = nem(
        dir.path(),
        &[
            "dist",
            "--x",
            "c.json",
            "--y",
            "e.json",
            "--r",
            "0.5",
            "--mapping-out",
            "map.txt",
            "--out",
            "report.json",
        ],
    );
    assert!(out.status.success());
    let mapping_text = fs::read_to_string(dir.path().join("map.txt")).unwrap();
    assert!(mapping_text.starts_with("16 16\n1 1\n"));
    let mapping = nem_core::Mapping::from_text(&mapping_text).unwrap();
    assert!(nem_core::validate_mapping(&mapping).valid);
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap())
            .unwrap();
    assert!(report["total"].as_f64().unwrap() >= 0.0);
}

#[test]
fn sweep_r_emits_nondecreasing_totals() {
    let dir = tempfile::tempdir().unwrap();
    for (name, kind, extra) in [
        ("c.json", "circle", vec!["--radius", "1"]),
        ("e.json", "ellipse", vec!["--a", "2", "--b", "1"]),
    ] {
        let mut args = vec!["gen", "--kind", kind, "--n", "32", "--out", name];
        args.extend(extra);
        assert!(nem(dir.path(), &args).status.success());
    }
    let out = nem(
        dir.path(),
        &[
            "sweep-r", "--x", "c.json", "--y", "e.json", "--r", "0:2:0.25", "--out", "sweep.csv",
        ],
    );
    assert!(out.status.success());
    let csv = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("r,total,stretch_part,distance_part"));
    let totals: Vec<f64> = lines
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(totals.len(), 9);
    for w in totals.windows(2) {
        assert!(w[1] >= w[0], "totals decreased: {totals:?}");
    }
}

#[test]
fn audit_passes_and_strict_violation_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    write_corpus(dir.path());

    let ok = nem(
        dir.path(),
        &["audit", "--corpus", "corpus.json", "--strict", "--out", "audit.json"],
    );
    assert_eq!(ok.status.code(), Some(0), "{}", stdout(&ok));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("audit.json")).unwrap())
            .unwrap();
    assert_eq!(report["report"]["identity_ok"], true);
    assert_eq!(report["report"]["violations"].as_array().unwrap().len(), 0);

    let bound = nem(
        dir.path(),
        &["audit", "--corpus", "corpus.json", "--r", "1.5707963267948966", "--strict"],
    );
    assert_eq!(bound.status.code(), Some(0), "{}", stdout(&bound));
    assert!(stdout(&bound).contains("bound 2"));

    // an absurd constant bound must trip the strict exit
    let strict = nem(
        dir.path(),
        &["audit", "--corpus", "corpus.json", "--theta", "0.4", "--strict"],
    );
    assert_eq!(strict.status.code(), Some(1));

    // without --strict the same violations only get reported
    let lax = nem(
        dir.path(),
        &["audit", "--corpus", "corpus.json", "--theta", "0.4"],
    );
    assert_eq!(lax.status.code(), Some(0));
}

#[test]
fn retrieve_ranks_and_writes_matrix() {
    let dir = tempfile::tempdir().unwrap();
    write_corpus(dir.path());
    let gen = nem(
        dir.path(),
        &["gen", "--kind", "circle", "--radius", "1", "--n", "48", "--out", "q.json"],
    );
    assert!(gen.status.success());
    let out = nem(
        dir.path(),
        &[
            "retrieve", "--corpus", "corpus.json", "--query", "q.json", "-k", "2",
            "--matrix-out", "m.csv", "--out", "ranked.csv",
        ],
    );
    assert!(out.status.success(), "{}", stdout(&out));
    let text = stdout(&out);
    let first_rank = text
        .lines()
        .find(|l| !l.starts_with("wrote "))
        .unwrap()
        .to_string();
    assert!(first_rank.starts_with("circle,"), "got {first_rank}");

    let matrix: nem_core::DistanceMatrix64 =
        nem_core::load_matrix(dir.path().join("m.csv")).unwrap();
    assert_eq!(matrix.len(), 4);
    let ranked = fs::read_to_string(dir.path().join("ranked.csv")).unwrap();
    assert_eq!(ranked.lines().count(), 3); // header + k rows
}

#[test]
fn demo_robots_reports_the_violation() {
    let dir = tempfile::tempdir().unwrap();
    let out = nem(dir.path(), &["demo-robots", "--out", "demo.json"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("gap(green, purple) = 6"), "{text}");
    assert!(text.contains("VIOLATED"), "{text}");
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("demo.json")).unwrap())
            .unwrap();
    assert_eq!(
        report["nem_sigma_audit"]["violations"].as_array().unwrap().len(),
        0
    );
}

#[test]
fn demo_robots_moves_shapes_with_velocities() {
    let dir = tempfile::tempdir().unwrap();
    let out = nem(
        dir.path(),
        &["demo-robots", "--velocities", "0,1,0", "--t", "1"],
    );
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("gap(green, blue)   = 3"), "{text}");
    assert!(text.contains("gap(blue, purple)  = 1"), "{text}");
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = nem(dir.path(), &["dist", "--bogus-flag"]);
    assert_eq!(unknown.status.code(), Some(2));

    let missing = nem(dir.path(), &["dist", "--x", "no.json", "--y", "no.json"]);
    assert_eq!(missing.status.code(), Some(2));

    let gen = nem(
        dir.path(),
        &["gen", "--kind", "circle", "--radius", "1", "--n", "16", "--out", "c.json"],
    );
    assert!(gen.status.success());
    let bad_range = nem(
        dir.path(),
        &["sweep-r", "--x", "c.json", "--y", "c.json", "--r", "2:0:0.25", "--out", "s.csv"],
    );
    assert_eq!(bad_range.status.code(), Some(2));

    let bad_model = nem(
        dir.path(),
        &["gen", "--kind", "ellipse", "--a", "2", "--n", "8", "--out", "x.json"],
    );
    assert_eq!(bad_model.status.code(), Some(2));
}
