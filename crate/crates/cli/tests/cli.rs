//! End-to-end runs of the binary: exit codes, artifact shapes, and
//! fixed-seed reproducibility.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lexcluster"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Two triangles joined by a bridge.
fn write_bridge(dir: &Path) -> PathBuf {
    let path = dir.join("bridge.txt");
    fs::write(&path, "# fixture\n0 1\n1 2\n0 2\n3 4\n4 5\n3 5\n2 3\n").unwrap();
    path
}

fn manifest(dir: &Path) -> serde_json::Value {
    let text = fs::read_to_string(dir.join("out/manifest.json")).unwrap();
    serde_json::from_str(&text).unwrap()
}

#[test]
fn help_is_not_an_error_but_bad_usage_is() {
    let tmp = TempDir::new().unwrap();
    assert_eq!(exit_code(&run_in(tmp.path(), &["--help"])), 0);
    assert_eq!(exit_code(&run_in(tmp.path(), &["cluster", "--help"])), 0);

    // Missing subcommand, missing --input, unknown flag, bad flag values.
    assert_eq!(exit_code(&run_in(tmp.path(), &[])), 1);
    assert_eq!(exit_code(&run_in(tmp.path(), &["cluster"])), 1);
    assert_eq!(exit_code(&run_in(tmp.path(), &["cluster", "--frobnicate"])), 1);
    let out = run_in(tmp.path(), &["cluster", "--input", "g.txt", "--runs", "0"]);
    assert_eq!(exit_code(&out), 1);
    let out = run_in(tmp.path(), &["cluster", "--input", "g.txt", "--algo", "louvain"]);
    assert_eq!(exit_code(&out), 1);
    let out =
        run_in(tmp.path(), &["convergence", "--input", "g.txt", "--window", "fast"]);
    assert_eq!(exit_code(&out), 1);
    assert!(stderr(&out).contains("1%"));
}

#[test]
fn unreadable_and_edgeless_inputs_are_data_errors_with_manifests() {
    let tmp = TempDir::new().unwrap();
    let out = run_in(tmp.path(), &["cluster", "--input", "absent.txt"]);
    assert_eq!(exit_code(&out), 2);
    assert!(stderr(&out).contains("absent.txt"));
    // The manifest still appears, recording what went wrong.
    let man = manifest(tmp.path());
    assert_ne!(man["status"], "ok");
    assert!(man.get("input_sha256").is_none());

    fs::write(tmp.path().join("hollow.txt"), "# comments only\n5 5\n").unwrap();
    let out = run_in(tmp.path(), &["cluster", "--input", "hollow.txt"]);
    assert_eq!(exit_code(&out), 2);
    assert!(stderr(&out).contains("no edges"));
    let man = manifest(tmp.path());
    assert_eq!(man["status"], "hollow.txt: input contains no edges");
    // The file itself was readable, so its checksum is recorded.
    assert!(man["input_sha256"].is_string());
}

#[test]
fn convergence_rejects_a_single_run_as_usage() {
    let tmp = TempDir::new().unwrap();
    write_bridge(tmp.path());
    let out = run_in(tmp.path(), &["convergence", "--input", "bridge.txt", "--runs", "1"]);
    assert_eq!(exit_code(&out), 1);
    assert!(stderr(&out).contains("at least 2"));
}

#[test]
fn cluster_finds_the_two_triangles_on_the_bridge() {
    let tmp = TempDir::new().unwrap();
    write_bridge(tmp.path());
    let out = run_in(tmp.path(), &["cluster", "--input", "bridge.txt"]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));

    // Six nodes, one component: five merge events.
    let dendro = fs::read_to_string(tmp.path().join("out/dendrogram.csv")).unwrap();
    assert_eq!(dendro.lines().count(), 1 + 5);

    // The best-compactness cut is the two triangles (L = 6 beats every
    // other step, including the whole graph's 7/3).
    let cut = fs::read_to_string(tmp.path().join("out/clustering_best_compactness.csv")).unwrap();
    assert_eq!(cut, "node_id,cluster_label\n0,0\n1,0\n2,0\n3,3\n4,3\n5,3\n");

    let man = manifest(tmp.path());
    assert_eq!(man["best"]["compactness"]["step"], 4);
    assert_eq!(man["best"]["compactness"]["value"], 6.0);
    let q = man["best"]["modularity"]["value"].as_f64().unwrap();
    assert!((q - 5.0 / 14.0).abs() < 1e-12);
    assert_eq!(man["nodes"], 6);
    assert_eq!(man["edges"], 7);
    assert_eq!(man["algo"], "lexdfs");
}

#[test]
fn cluster_runs_the_baseline_when_asked() {
    let tmp = TempDir::new().unwrap();
    write_bridge(tmp.path());
    let out = run_in(tmp.path(), &["cluster", "--input", "bridge.txt", "--algo", "cnm"]);
    assert_eq!(exit_code(&out), 0);
    let man = manifest(tmp.path());
    assert_eq!(man["algo"], "cnm");
    // Greedy modularity also ends at the two-triangle cut.
    assert_eq!(man["best"]["modularity"]["step"], 4);
    let cut = fs::read_to_string(tmp.path().join("out/clustering_best_compactness.csv")).unwrap();
    assert_eq!(cut, "node_id,cluster_label\n0,0\n1,0\n2,0\n3,3\n4,3\n5,3\n");
}

#[test]
fn cluster_triangle_best_step_is_the_final_merge() {
    let tmp = TempDir::new().unwrap();
    fs::write(tmp.path().join("triangle.txt"), "0 1\n1 2\n0 2\n").unwrap();
    let out = run_in(
        tmp.path(),
        &["cluster", "--input", "triangle.txt", "--runs", "5", "--seed", "1"],
    );
    assert_eq!(exit_code(&out), 0);
    let dendro = fs::read_to_string(tmp.path().join("out/dendrogram.csv")).unwrap();
    assert_eq!(dendro.lines().count(), 1 + 2);
    let man = manifest(tmp.path());
    assert_eq!(man["best"]["compactness"]["step"], 2);
    assert_eq!(man["best"]["compactness"]["value"], 3.0);
}

#[test]
fn quality_reports_the_bridge_fixture_values() {
    let tmp = TempDir::new().unwrap();
    write_bridge(tmp.path());
    fs::write(
        tmp.path().join("cut.csv"),
        "node_id,cluster_label\n0,0\n1,0\n2,0\n3,1\n4,1\n5,1\n",
    )
    .unwrap();
    let out = run_in(
        tmp.path(),
        &["quality", "--input", "bridge.txt", "--clustering", "cut.csv"],
    );
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));

    let global = fs::read_to_string(tmp.path().join("out/global_quality.csv")).unwrap();
    let mut lines = global.lines();
    assert_eq!(
        lines.next().unwrap(),
        "nodes,edges,clusters,coverage,modularity,conductance,compactness"
    );
    let fields: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(&fields[..3], ["6", "7", "2"]);
    let q: f64 = fields[4].parse().unwrap();
    assert!((q - 5.0 / 14.0).abs() < 1e-12);
    let phi: f64 = fields[5].parse().unwrap();
    assert_eq!(phi, 1.0 / 7.0);
    assert_eq!(fields[6], "6");

    let rows = fs::read_to_string(tmp.path().join("out/cluster_quality.csv")).unwrap();
    assert_eq!(rows.lines().count(), 1 + 2);

    // The whole-graph clustering has no defined conductance.
    fs::write(
        tmp.path().join("whole.csv"),
        "node_id,cluster_label\n0,0\n1,0\n2,0\n3,0\n4,0\n5,0\n",
    )
    .unwrap();
    let out = run_in(
        tmp.path(),
        &["quality", "--input", "bridge.txt", "--clustering", "whole.csv"],
    );
    assert_eq!(exit_code(&out), 0);
    let global = fs::read_to_string(tmp.path().join("out/global_quality.csv")).unwrap();
    let fields: Vec<&str> = global.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(fields[4], "0"); // modularity of the whole graph
    assert_eq!(fields[5], "nan");
}

#[test]
fn quality_lists_unlabeled_nodes() {
    let tmp = TempDir::new().unwrap();
    write_bridge(tmp.path());
    fs::write(tmp.path().join("partial.csv"), "node_id,cluster_label\n0,0\n1,0\n2,0\n3,1\n")
        .unwrap();
    let out = run_in(
        tmp.path(),
        &["quality", "--input", "bridge.txt", "--clustering", "partial.csv"],
    );
    assert_eq!(exit_code(&out), 2);
    let err = stderr(&out);
    assert!(err.contains('4') && err.contains('5'), "stderr: {err}");
}

#[test]
fn compare_agrees_with_itself_on_the_bridge() {
    let tmp = TempDir::new().unwrap();
    write_bridge(tmp.path());
    let out = run_in(
        tmp.path(),
        &["compare", "--input", "bridge.txt", "--trials", "3", "--runs", "10"],
    );
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));

    // Both algorithms reach the two-triangle step: maxima agree.
    let summary = fs::read_to_string(tmp.path().join("out/summary.csv")).unwrap();
    let value = |algo: &str, measure: &str| -> f64 {
        summary
            .lines()
            .find(|l| l.starts_with(&format!("{algo},{measure},")))
            .unwrap()
            .rsplit(',')
            .next()
            .unwrap()
            .parse()
            .unwrap()
    };
    assert!((value("lexdfs", "modularity") - 5.0 / 14.0).abs() < 1e-12);
    assert_eq!(value("lexdfs", "modularity"), value("cnm", "modularity"));
    assert_eq!(value("lexdfs", "compactness"), 6.0);
    assert_eq!(value("cnm", "compactness"), 6.0);

    for name in ["trace.csv", "envelope.csv", "profile.csv", "trace.gp", "profile.gp"] {
        assert!(tmp.path().join("out").join(name).exists(), "{name} missing");
    }
    let trace = fs::read_to_string(tmp.path().join("out/trace.csv")).unwrap();
    assert!(trace.starts_with("algorithm,step,modularity,compactness\n"));
    // Six steps (0..=5) per algorithm.
    assert_eq!(trace.lines().count(), 1 + 6 + 6);
    let envelope = fs::read_to_string(tmp.path().join("out/envelope.csv")).unwrap();
    assert!(envelope.lines().next().unwrap().contains("modularity_min"));

    let man = manifest(tmp.path());
    assert_eq!(man["trials"], 3);
    assert_eq!(man["best"]["cnm_compactness"]["value"], 6.0);
}

#[test]
fn convergence_resolves_and_deduplicates_windows() {
    let tmp = TempDir::new().unwrap();
    write_bridge(tmp.path());
    let out = run_in(tmp.path(), &["convergence", "--input", "bridge.txt", "--runs", "4"]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));

    // 1% of 7 edges rounds to 0, so the defaults collapse to {0, 20}.
    let man = manifest(tmp.path());
    assert_eq!(man["windows"], serde_json::json!([0, 20]));
    let csv = fs::read_to_string(tmp.path().join("out/convergence.csv")).unwrap();
    assert!(csv.starts_with("run_index,w,c_i\n"));
    // Two windows, three consecutive-run comparisons each.
    assert_eq!(csv.lines().count(), 1 + 2 * 3);
    let script = fs::read_to_string(tmp.path().join("out/convergence.gp")).unwrap();
    assert!(script.contains("w=20"));
}

#[test]
fn fixed_seeds_reproduce_byte_for_byte() {
    let tmp = TempDir::new().unwrap();
    write_bridge(tmp.path());
    for dir in ["a", "b"] {
        let out = run_in(
            tmp.path(),
            &["cluster", "--input", "bridge.txt", "--seed", "7", "--out-dir", dir],
        );
        assert_eq!(exit_code(&out), 0);
    }
    for name in
        ["dendrogram.csv", "clustering_best_modularity.csv", "clustering_best_compactness.csv"]
    {
        let a = fs::read(tmp.path().join("a").join(name)).unwrap();
        let b = fs::read(tmp.path().join("b").join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }
    // Manifests agree except for wall-clock timings.
    let read = |dir: &str| -> serde_json::Value {
        let text = fs::read_to_string(tmp.path().join(dir).join("manifest.json")).unwrap();
        let mut man: serde_json::Value = serde_json::from_str(&text).unwrap();
        man.as_object_mut().unwrap().remove("timings_ms");
        man
    };
    assert_eq!(read("a"), read("b"));
}

#[test]
fn known_dataset_size_mismatch_warns_but_proceeds() {
    let tmp = TempDir::new().unwrap();
    let path = tmp.path().join("facebook_combined.txt");
    fs::write(&path, "0 1\n1 2\n0 2\n").unwrap();
    let out = run_in(tmp.path(), &["cluster", "--input", "facebook_combined.txt"]);
    assert_eq!(exit_code(&out), 0);
    let err = stderr(&out);
    assert!(err.contains("4039") && err.contains("88234"), "stderr: {err}");
}
