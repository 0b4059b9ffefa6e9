mod common;

use common::*;
use serde_json::Value;
use tagzero::error::{EXIT_DATA, EXIT_NUMERICAL, EXIT_USAGE};
use tagzero_core::synthetic::ClusteredSpec;

fn small() -> ClusteredSpec {
    ClusteredSpec {
        labels: 8,
        per_label: 30,
        ..ClusteredSpec::default()
    }
}

fn args<'a>(head: &[&'a str], tail: &[&'a str]) -> Vec<&'a str> {
    head.iter().chain(DATA.iter()).chain(tail.iter()).copied().collect()
}

#[test]
fn ingest_matches_the_golden_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("clean.jsonl");
    let o = tagzero(
        &["ingest", "--in", fixture("ingest/raw.jsonl").to_str().unwrap(), "--out", out.to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(
        std::fs::read(&out).unwrap(),
        std::fs::read(fixture("ingest/clean.golden.jsonl")).unwrap()
    );
    assert!(stdout(&o).contains("dropped: duplicate        2"), "{}", stdout(&o));
}

#[test]
fn ingest_writes_catalog_report_and_embedding_corpus() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(fixture("ingest/raw.jsonl"), dir.path().join("raw.jsonl")).unwrap();
    let o = tagzero(
        &[
            "ingest", "--in", "raw.jsonl", "--out", "c.jsonl", "--labels", "l.json", "--report", "r.json",
            "--embed-corpus", "corpus.txt", "--min-tweets", "3", "--json",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let printed: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let report: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(printed, report);
    assert_eq!(report["report"]["kept"], 17);
    assert_eq!(report["config"]["min_tweets"], 3);
    let catalog: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("l.json")).unwrap()).unwrap();
    let labels: Vec<&str> = catalog["labels"].as_array().unwrap().iter().map(|l| l["label"].as_str().unwrap()).collect();
    assert_eq!(labels, ["ai", "nba"]);
    let corpus = std::fs::read_to_string(dir.path().join("corpus.txt")).unwrap();
    assert!(corpus.starts_with("user check out the new #python release today folks\n"));
    assert!(!corpus.contains("http"));
}

#[test]
fn defaults_follow_the_fifty_by_two_hundred_configuration() {
    let dir = tempfile::tempdir().unwrap();
    let o = tagzero(
        &["ingest", "--in", fixture("ingest/raw.jsonl").to_str().unwrap(), "--out", "c.jsonl", "--json"],
        dir.path(),
    );
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!((v["config"]["top_n"].as_u64(), v["config"]["min_tweets"].as_u64()), (Some(50), Some(200)));
    assert_eq!(v["labels"], 0);
}

#[test]
fn usage_and_data_errors_have_distinct_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("empty.jsonl"), "").unwrap();
    std::fs::write(dir.path().join("bad.jsonl"), "{\"id_str\":\"1\",\"text\":\"x\"}\n{oops\n").unwrap();

    let o = tagzero(&["ingest", "--in", "empty.jsonl", "--out", "c.jsonl"], dir.path());
    assert_eq!(code(&o), EXIT_DATA as i32);
    let o = tagzero(&["ingest", "--in", "bad.jsonl", "--out", "c.jsonl"], dir.path());
    assert_eq!(code(&o), EXIT_DATA as i32);
    assert!(stderr(&o).contains("bad.jsonl:2:"), "{}", stderr(&o));
    let o = tagzero(&["ingest", "--in", "missing.jsonl", "--out", "c.jsonl"], dir.path());
    assert_eq!(code(&o), EXIT_DATA as i32);

    let o = tagzero(&["ingest", "--out", "c.jsonl"], dir.path());
    assert_eq!(code(&o), EXIT_USAGE as i32);
    assert!(stderr(&o).contains("missing --in"));
    let o = tagzero(&["ingest", "--bogus"], dir.path());
    assert_eq!(code(&o), EXIT_USAGE as i32);
    let o = tagzero(&["zsl", "--splits", "40-10"], dir.path());
    assert_eq!(code(&o), EXIT_USAGE as i32);
    let o = tagzero(&["--help"], dir.path());
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("recommend"));
}

#[test]
fn embedding_training_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let sentences: String = (0..60).map(|i| format!("w{} w{} w{} #t{}\n", i % 7, (i + 1) % 7, (i * 3) % 7, i % 3)).collect();
    std::fs::write(dir.path().join("corpus.txt"), sentences).unwrap();
    let train = |seed: &str, out: &str| {
        let o = tagzero(
            &["train-embeddings", "--corpus", "corpus.txt", "--out", out, "--dim", "8", "--epochs", "3", "--seed", seed],
            dir.path(),
        );
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        std::fs::read_to_string(dir.path().join(out)).unwrap()
    };
    let a = train("1", "a.txt");
    let b = train("1", "b.txt");
    let c = train("2", "c.txt");
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert_eq!(a.lines().next(), c.lines().next());
    assert_eq!(a.lines().next(), Some("10 8"));

    let o = tagzero(&["train-embeddings", "--corpus", "corpus.txt", "--out", "d.txt"], dir.path());
    assert_eq!(code(&o), 0);
    assert!(std::fs::read_to_string(dir.path().join("d.txt")).unwrap().starts_with("10 150\n"));

    std::fs::write(dir.path().join("blank.txt"), "\n\n").unwrap();
    let o = tagzero(&["train-embeddings", "--corpus", "blank.txt", "--out", "e.txt"], dir.path());
    assert_eq!(code(&o), EXIT_DATA as i32, "{}", stderr(&o));
}

#[test]
fn train_then_recommend() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write_workspace(dir.path(), &small());
    let o = tagzero(&args(&["train-baseline", "--out", "model.json"], &FAST), dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let bundle: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("model.json")).unwrap()).unwrap();
    assert_eq!(bundle["embeddings"]["sha256"].as_str().unwrap().len(), 64);
    assert_eq!(bundle["config"]["hidden_units"], 64);

    let text: Vec<String> = corpus.dataset.examples[0].tokens.clone();
    let text = text.join(" ");
    for method in ["conse", "eszsl", "dem"] {
        let o = tagzero(
            &["recommend", "--model", "model.json", "--text", &text, "--k", "5", "--method", method, "--json"],
            dir.path(),
        );
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
        let labels: Vec<&str> = v["ranked"].as_array().unwrap().iter().map(|r| r["label"].as_str().unwrap()).collect();
        assert_eq!(labels.len(), 5);
        let distinct: std::collections::BTreeSet<_> = labels.iter().collect();
        assert_eq!(distinct.len(), 5);
        assert_eq!(labels[0], corpus.dataset.label_set[0], "{method}");
    }

    let o = tagzero(&["recommend", "--model", "model.json", "--text", &text, "--candidates", "#topic01,topic02,#topic00"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let table = stdout(&o);
    assert_eq!(table.lines().count(), 5);
    assert!(table.lines().nth(2).unwrap().contains("#topic00"), "{table}");

    let o = tagzero(&["recommend", "--model", "model.json", "--text", &text, "--candidates", "nosuchtag"], dir.path());
    assert_eq!(code(&o), EXIT_DATA as i32);
    assert!(stderr(&o).contains("nosuchtag") && stderr(&o).contains("hint:"), "{}", stderr(&o));

    let mut vec = std::fs::read_to_string(dir.path().join("vec.txt")).unwrap();
    vec.push('\n');
    std::fs::write(dir.path().join("vec2.txt"), vec).unwrap();
    let o = tagzero(&["recommend", "--model", "model.json", "--text", &text, "--embeddings", "vec2.txt"], dir.path());
    assert_eq!(code(&o), EXIT_DATA as i32);
    assert!(stderr(&o).contains("sha256"));
}

#[test]
fn eval_reports_accuracy_precision_recall_f1() {
    let dir = tempfile::tempdir().unwrap();
    write_workspace(dir.path(), &small());
    let o = tagzero(&args(&["eval", "--json", "--out", "eval.json"], &FAST[..4]), dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["experiment"], "supervised");
    assert_eq!(v["cells"].as_array().unwrap().len(), 5);
    let mut keys: Vec<&str> = v["mean"].as_object().unwrap().keys().map(String::as_str).collect();
    keys.sort();
    assert_eq!(keys, ["accuracy", "averaging", "f1", "precision", "recall"]);
    assert_eq!(v["mean"]["precision"], v["mean"]["accuracy"]);

    let o = tagzero(&args(&["eval", "--averaging", "macro"], &FAST[..4]), dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let table = stdout(&o);
    assert!(table.starts_with(" ") || table.starts_with("  "), "{table}");
    assert!(table.lines().next().unwrap().contains("Accuracy (%)  Precision  Recall"));
    assert_eq!(table.lines().count(), 8);
}

#[test]
fn zsl_grid_and_few_shot_reduction() {
    let dir = tempfile::tempdir().unwrap();
    write_workspace(dir.path(), &small());
    let sweep = ["--splits", "5/3,4/4", "--seeds", "3,4"];
    let zsl_args = args(&["zsl", "--json"], &[&FAST[..], &sweep[..]].concat());
    let o = tagzero(&zsl_args, dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let zsl: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(zsl["cells"].as_array().unwrap().len(), 2 * 2 * 3);

    let fsl_args = args(&["fsl", "--json", "--shots", "0"], &[&FAST[..], &sweep[..]].concat());
    let o = tagzero(&fsl_args, dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let fsl: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let strip = |v: &Value| -> Vec<Value> {
        v["cells"]
            .as_array()
            .unwrap()
            .iter()
            .map(|c| {
                let mut c = c.clone();
                c.as_object_mut().unwrap().remove("setting");
                c
            })
            .collect()
    };
    assert_eq!(strip(&zsl), strip(&fsl));
    assert_eq!(fsl["cells"][0]["setting"], "fsl");

    let o = tagzero(&args(&["zsl"], &[&FAST[..], &sweep[..]].concat()), dir.path());
    let table = stdout(&o);
    let lines: Vec<&str> = table.lines().collect();
    assert!(lines[0].starts_with("Zero-shot"));
    assert!(lines[1].starts_with("Seen/Unseen") && lines[1].contains("ConSE@1") && lines[1].contains("DEM@5"));
    assert!(lines[3].starts_with("5/3") && lines[4].starts_with("4/4"));
}

#[test]
fn config_file_layers_under_flags() {
    let dir = tempfile::tempdir().unwrap();
    write_workspace(dir.path(), &small());
    std::fs::write(
        dir.path().join("cfg.json"),
        r#"{"eval": {"data": "clean.jsonl", "labels": "labels.json", "embeddings": "vec.txt",
                     "folds": 3, "epochs": 5, "hidden_units": 16, "seed": 8}}"#,
    )
    .unwrap();
    let o = std::process::Command::new(env!("CARGO_BIN_EXE_tagzero"))
        .args(["eval", "--json", "--seed", "9"])
        .env("TAGZERO_CONFIG", "cfg.json")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["config"]["folds"], 3);
    assert_eq!(v["config"]["seed"], 9);
    assert_eq!(v["cells"].as_array().unwrap().len(), 3);

    std::fs::write(dir.path().join("bad.json"), r#"{"eval": {"fold": 3}}"#).unwrap();
    let o = tagzero(&["--config", "bad.json", "eval"], dir.path());
    assert_eq!(code(&o), EXIT_USAGE as i32);
    assert!(stderr(&o).contains("unknown key \"fold\""), "{}", stderr(&o));
}

#[test]
fn numerical_failures_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    write_workspace(dir.path(), &small());
    let o = tagzero(
        &args(&["train-baseline", "--out", "m.json", "--learning-rate", "1e308", "--methods", "conse"], &FAST[..4]),
        dir.path(),
    );
    assert_eq!(code(&o), EXIT_NUMERICAL as i32, "{}", stderr(&o));
}
