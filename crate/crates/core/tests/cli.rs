mod common;

use std::path::Path;

use common::{assert_ok, run_cli};

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn extracted(dir: &Path) -> std::path::PathBuf {
    let pairs = dir.join("pairs.jsonl");
    let corpus = common::synthetic_dir().join("corpus");
    assert_ok(
        &run_cli(&["extract", "--in", s(&corpus), "--out", s(&pairs)]),
        "extract",
    );
    pairs
}

#[test]
fn extract_matches_committed_pairs() {
    let tmp = tempfile::tempdir().unwrap();
    let pairs = extracted(tmp.path());
    let golden = std::fs::read(common::synthetic_dir().join("golden/pairs.jsonl")).unwrap();
    assert_eq!(std::fs::read(&pairs).unwrap(), golden);
    let manifest: serde_json::Value = serde_json::from_slice(
        &std::fs::read(tmp.path().join("pairs.jsonl.manifest.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(manifest["command"], "extract");
    assert_eq!(manifest["outputs"][0]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn sequential_and_parallel_extraction_agree() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let corpus = common::synthetic_dir().join("corpus");
    let pa = a.path().join("pairs.jsonl");
    let pb = b.path().join("pairs.jsonl");
    assert_ok(
        &run_cli(&[
            "extract",
            "--in",
            s(&corpus),
            "--out",
            s(&pa),
            "--threads",
            "4",
        ]),
        "parallel",
    );
    assert_ok(
        &run_cli(&[
            "--sequential",
            "extract",
            "--in",
            s(&corpus),
            "--out",
            s(&pb),
        ]),
        "sequential",
    );
    assert_eq!(std::fs::read(pa).unwrap(), std::fs::read(pb).unwrap());
}

#[test]
fn train_without_labels_points_to_label() {
    let tmp = tempfile::tempdir().unwrap();
    let pairs = extracted(tmp.path());
    let model = tmp.path().join("nb.json");
    let o = run_cli(&[
        "train",
        "--dataset",
        s(&pairs),
        "--algorithm",
        "nb",
        "--out",
        s(&model),
    ]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("commentum label"), "{err}");
    assert!(!model.exists());
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(
        run_cli(&["train", "--algorithm", "nope", "--out", "x"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(run_cli(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run_cli(&["--help"]).status.code(), Some(0));
    let missing = run_cli(&[
        "extract",
        "--in",
        "/nonexistent/dir",
        "--out",
        "/tmp/x.jsonl",
    ]);
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn malformed_dataset_is_validation_error() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.jsonl");
    std::fs::write(&bad, "{\"id\": 1}\n").unwrap();
    let o = run_cli(&[
        "train",
        "--dataset",
        s(&bad),
        "--algorithm",
        "nb",
        "--out",
        s(&tmp.path().join("m.json")),
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn import_refuses_silent_relabel() {
    let tmp = tempfile::tempdir().unwrap();
    let pairs = extracted(tmp.path());
    let labels = common::synthetic_dir().join("labels.jsonl");
    assert_ok(
        &run_cli(&["label", "--dataset", s(&pairs), "--import", s(&labels)]),
        "import",
    );
    let first = std::fs::read_to_string(&labels)
        .unwrap()
        .lines()
        .next()
        .unwrap()
        .to_string();
    let row: serde_json::Value = serde_json::from_str(&first).unwrap();
    let flipped = if row["label"] == "useful" || row["label"] == 1 {
        "not_useful"
    } else {
        "useful"
    };
    let relabel = tmp.path().join("relabel.jsonl");
    std::fs::write(
        &relabel,
        format!("{{\"id\":{},\"label\":\"{flipped}\"}}\n", row["id"]),
    )
    .unwrap();
    let before = std::fs::read(&pairs).unwrap();
    let o = run_cli(&["label", "--dataset", s(&pairs), "--import", s(&relabel)]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(std::fs::read(&pairs).unwrap(), before);
    assert_ok(
        &run_cli(&[
            "label",
            "--dataset",
            s(&pairs),
            "--import",
            s(&relabel),
            "--force-relabel",
        ]),
        "forced import",
    );
    assert_ne!(std::fs::read(&pairs).unwrap(), before);
}

#[test]
fn train_eval_discrepancies() {
    let tmp = tempfile::tempdir().unwrap();
    let pairs = extracted(tmp.path());
    let labels = common::synthetic_dir().join("labels.jsonl");
    assert_ok(
        &run_cli(&["label", "--dataset", s(&pairs), "--import", s(&labels)]),
        "import",
    );
    let model = tmp.path().join("models/logreg.json");
    assert_ok(
        &run_cli(&[
            "train",
            "--dataset",
            s(&pairs),
            "--algorithm",
            "logreg",
            "--out",
            s(&model),
        ]),
        "train",
    );
    assert!(tmp
        .path()
        .join("models/logreg.json.manifest.json")
        .is_file());

    let metrics = tmp.path().join("eval.json");
    assert_ok(
        &run_cli(&[
            "eval",
            "--dataset",
            s(&pairs),
            "--model",
            s(&model),
            "--out",
            s(&metrics),
        ]),
        "eval",
    );
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&metrics).unwrap()).unwrap();
    assert_eq!(v["metrics"]["support"], 40);
    let cm = &v["confusion"];
    let total: u64 = ["tp", "fp", "fn", "tn"]
        .iter()
        .map(|k| cm[k].as_u64().unwrap())
        .sum();
    assert_eq!(total, 40);

    let disc = tmp.path().join("disc.jsonl");
    assert_ok(
        &run_cli(&[
            "discrepancies",
            "--dataset",
            s(&pairs),
            "--model",
            s(&model),
            "--out",
            s(&disc),
        ]),
        "discrepancies",
    );
    let rows: Vec<serde_json::Value> = std::fs::read_to_string(&disc)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    let scores: Vec<f64> = rows
        .iter()
        .map(|r| r["score"].as_f64().unwrap().abs())
        .collect();
    assert!(scores.windows(2).all(|w| w[0] >= w[1]));
    assert!(rows
        .iter()
        .all(|r| r["manual_label"] != r["predicted_label"]));
}

#[test]
fn eval_with_missing_model_is_validation_error() {
    let tmp = tempfile::tempdir().unwrap();
    let pairs = extracted(tmp.path());
    let o = run_cli(&[
        "eval",
        "--dataset",
        s(&pairs),
        "--model",
        s(&tmp.path().join("none.json")),
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn full_pipeline_reproduces_golden_report() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let first = common::run_pipeline(a.path()).unwrap();
    let second = common::run_pipeline(b.path()).unwrap();
    let golden = common::synthetic_dir().join("golden");
    assert_eq!(first.report_json, second.report_json);
    assert_eq!(
        first.report_json,
        std::fs::read(golden.join("report.json")).unwrap()
    );
    assert_eq!(
        first.report_md,
        std::fs::read(golden.join("report.md")).unwrap()
    );
    assert_eq!(
        first.pairs,
        std::fs::read(golden.join("pairs.jsonl")).unwrap()
    );
}

#[test]
fn config_file_drives_compare() {
    let tmp = tempfile::tempdir().unwrap();
    let pairs = extracted(tmp.path());
    let labels = common::synthetic_dir().join("labels.jsonl");
    assert_ok(
        &run_cli(&["label", "--dataset", s(&pairs), "--import", s(&labels)]),
        "import",
    );
    let cfg = tmp.path().join("commentum.toml");
    std::fs::write(
        &cfg,
        format!(
            "[paths]\ndataset = {:?}\nreports = {:?}\n\n[split]\nseed = 7\n\n[[algorithms]]\nalgorithm = \"nb\"\nalpha = 0.5\n",
            s(&pairs),
            s(&tmp.path().join("out"))
        ),
    )
    .unwrap();
    assert_ok(&run_cli(&["--config", s(&cfg), "compare"]), "compare");
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(tmp.path().join("out/report.json")).unwrap())
            .unwrap();
    assert_eq!(report["metadata"]["split_seed"], 7);
    assert_eq!(report["metadata"]["dropped_duplicates"], 0);
    assert_eq!(report["rows"].as_array().unwrap().len(), 1);
    assert_eq!(report["rows"][0]["delta"]["f1"], 0.0);

    std::fs::write(&cfg, "[split]\nsed = 7\n").unwrap();
    assert_eq!(
        run_cli(&["--config", s(&cfg), "compare"]).status.code(),
        Some(1)
    );
}
