use assert_cmd::Command;
use predicates::prelude::*;

fn crossmin() -> Command {
    Command::cargo_bin("crossmin").unwrap()
}

#[test]
fn generated_complete_graph_reports_reference() {
    crossmin()
        .args(["--gen", "complete", "6", "--perms", "5"])
        .assert()
        .success()
        .stdout(predicate::str::contains("best crossings: 3"))
        .stdout(predicate::str::contains("reference: 3"));
}

#[test]
fn edge_list_input_with_labels() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("triangle.txt");
    std::fs::write(&input, "# a triangle with sparse labels\n5 7\n7 9\n5 9\n").unwrap();
    let out = dir.path().join("tri");
    crossmin()
        .args(["--input"])
        .arg(&input)
        .args(["--perms", "1", "--emit", "rotation"])
        .args(["--out"])
        .arg(&out)
        .assert()
        .success()
        .stdout(predicate::str::contains("best crossings: 0"));
    let doc: crossmin::embed::RotationDoc =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("tri.rotation.json")).unwrap())
            .unwrap();
    assert_eq!(doc.labels, Some(vec![5, 7, 9]));
    let es = crossmin::EmbeddingState::from_doc(&doc).unwrap();
    assert_eq!(es.num_crossings(), 0);
}

#[test]
fn malformed_edge_list_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.txt");
    std::fs::write(&input, "1 2\nthree four\n").unwrap();
    crossmin()
        .args(["--input"])
        .arg(&input)
        .assert()
        .failure()
        .code(2)
        .stderr(predicate::str::contains("line 2"));
}

#[test]
fn unknown_generator_exits_2() {
    crossmin()
        .args(["--gen", "hypercube", "4"])
        .assert()
        .failure()
        .code(2);
}

#[test]
fn svg_without_coordinates_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("k5");
    crossmin()
        .args(["--gen", "complete", "5", "--perms", "1", "--emit", "svg", "--out"])
        .arg(&out)
        .assert()
        .failure()
        .code(3)
        .stderr(predicate::str::contains("no coordinates"));
}

#[test]
fn svg_of_circle_k5_has_all_segments_and_crossings() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("k5");
    crossmin()
        .args([
            "--gen", "complete", "5", "--init", "circle", "--perms", "1", "--emit", "svg",
            "--out",
        ])
        .arg(&out)
        .assert()
        .success();
    let svg = std::fs::read_to_string(dir.path().join("k5.svg")).unwrap();
    assert_eq!(svg.matches("<line ").count(), 10);
    assert_eq!(svg.matches("fill=\"red\"").count(), 5);
}

#[test]
fn json_report_has_per_permutation_runs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("k5");
    crossmin()
        .args(["--gen", "complete", "5", "--perms", "7", "--out"])
        .arg(&out)
        .assert()
        .success();
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("k5.json")).unwrap())
            .unwrap();
    assert_eq!(v["best_cr"], 1);
    assert_eq!(v["runs"].as_array().unwrap().len(), 7);
    assert_eq!(v["reference"], 1);
}

#[test]
fn missing_source_is_a_usage_error() {
    crossmin().assert().failure().code(2);
}

#[test]
fn seeded_runs_are_reproducible() {
    let run = || {
        let out = crossmin()
            .args(["--gen", "petersen", "6", "2", "--perms", "10", "--seed", "42"])
            .output()
            .unwrap();
        assert!(out.status.success());
        String::from_utf8(out.stdout)
            .unwrap()
            .lines()
            .filter(|l| l.starts_with("best crossings"))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(run(), run());
}
