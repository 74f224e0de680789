//! End-to-end tests driving the compiled binary through temp directories.

use std::fs;
use std::path::Path;
use std::process::Command;
use std::sync::Arc;

use rovi_core::{dataset, oracle_search};

fn rovi() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rovi"))
}

/// Runs the command, asserting success, and returns stdout.
fn ok(cmd: &mut Command) -> String {
    let out = cmd.output().expect("binary runs");
    assert!(
        out.status.success(),
        "command failed\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf8 stdout")
}

/// Runs the command, asserting failure, and returns stderr.
fn fail(cmd: &mut Command) -> String {
    let out = cmd.output().expect("binary runs");
    assert!(!out.status.success(), "command unexpectedly succeeded");
    String::from_utf8(out.stderr).expect("utf8 stderr")
}

fn path_arg(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().expect("utf8 path").to_owned()
}

/// Generates a small dataset plus workload under `dir` and returns the three
/// file paths.
fn gen_small(dir: &Path, seed: u64) -> (String, String, String) {
    let users = path_arg(dir, "users.jsonl");
    let vocab = path_arg(dir, "vocab.jsonl");
    let queries = path_arg(dir, "queries.jsonl");
    ok(rovi().args([
        "gen-data",
        "--users",
        "300",
        "--vocab-size",
        "60",
        "--seed",
        &seed.to_string(),
        "--out",
        &users,
        "--vocab",
        &vocab,
    ]));
    ok(rovi().args([
        "gen-queries",
        "--data",
        &users,
        "--vocab",
        &vocab,
        "--queries",
        "10",
        "--query-words",
        "5",
        "--fraction",
        "0.04",
        "--gamma-g",
        "0.15",
        "--gamma-v",
        "0.2",
        "--seed",
        &seed.to_string(),
        "--out",
        &queries,
    ]));
    (users, vocab, queries)
}

#[test]
fn generation_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    fs::create_dir_all(&a).unwrap();
    fs::create_dir_all(&b).unwrap();
    let (ua, va, qa) = gen_small(&a, 11);
    let (ub, vb, qb) = gen_small(&b, 11);
    for (x, y) in [(ua, ub), (va, vb), (qa, qb)] {
        assert_eq!(fs::read(x).unwrap(), fs::read(y).unwrap(), "same seed, same bytes");
    }
}

#[test]
fn build_query_pipeline_matches_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let (users, vocab, _) = gen_small(dir.path(), 23);
    let index = path_arg(dir.path(), "index.qiv");
    ok(rovi()
        .args(["build", "--index", "qiv", "--data", &users, "--vocab", &vocab, "--out", &index]));

    let query_json =
        r#"{"mbr":[0.1,0.1,0.55,0.55],"words":[0,1,2,3,4],"gamma_g":0.02,"gamma_v":0.05}"#;
    let stdout = ok(rovi().args(["query", "--index-file", &index, "--query", query_json]));
    let answer: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    let got: Vec<u64> =
        answer["ids"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap()).collect();

    let store = Arc::new(dataset::read_users(Path::new(&users)).unwrap());
    let vocabulary = Arc::new(dataset::read_vocabulary(Path::new(&vocab)).unwrap());
    let query = dataset::parse_query(query_json).unwrap();
    let expected = oracle_search(&store, &vocabulary, &query);
    assert_eq!(got, expected.ids(), "snapshot answer equals the oracle");
    assert_eq!(answer["count"].as_u64().unwrap() as usize, expected.len());
}

#[test]
fn validate_writes_an_all_match_report() {
    let dir = tempfile::tempdir().unwrap();
    let (users, vocab, queries) = gen_small(dir.path(), 37);
    let report = path_arg(dir.path(), "report.json");
    ok(rovi().args([
        "validate",
        "--data",
        &users,
        "--vocab",
        &vocab,
        "--queries",
        &queries,
        "--report",
        &report,
    ]));
    let parsed: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(parsed["all_match"], serde_json::Value::Bool(true));
    assert_eq!(parsed["indexes"].as_array().unwrap().len(), 4);
    assert_eq!(parsed["queries"].as_array().unwrap().len(), 10);
}

#[test]
fn baseline_build_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let (users, vocab, _) = gen_small(dir.path(), 41);
    for name in ["di", "vfi", "sfi"] {
        let stderr = fail(rovi().args([
            "build",
            "--index",
            name,
            "--data",
            &users,
            "--vocab",
            &vocab,
            "--out",
            &path_arg(dir.path(), "nope.idx"),
        ]));
        assert!(stderr.contains("no snapshot format"), "got: {stderr}");
    }
}

#[test]
fn unknown_query_word_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let (users, vocab, _) = gen_small(dir.path(), 43);
    let index = path_arg(dir.path(), "index.qiv");
    ok(rovi()
        .args(["build", "--index", "qiv", "--data", &users, "--vocab", &vocab, "--out", &index]));
    let stderr = fail(rovi().args([
        "query",
        "--index-file",
        &index,
        "--query",
        r#"{"mbr":[0.1,0.1,0.5,0.5],"words":[9999],"gamma_g":0.1,"gamma_v":0.1}"#,
    ]));
    assert!(stderr.contains("not in the vocabulary"), "got: {stderr}");
}

#[test]
fn bench_report_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let report = path_arg(dir.path(), "bench.json");
    let svg = path_arg(dir.path(), "curves.svg");
    // Small run with the pre-run oracle check left on.
    ok(rovi().args([
        "bench",
        "--users",
        "400",
        "--vocab-size",
        "50",
        "--queries",
        "5",
        "--query-words",
        "4",
        "--fraction",
        "0.04",
        "--gamma-g",
        "0.1",
        "--gamma-v",
        "0.1",
        "--warmup",
        "1",
        "--repeats",
        "2",
        "--indexes",
        "qiv,di",
        "--seed",
        "3",
        "--report",
        &report,
    ]));
    let parsed: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(parsed["n_users"].as_u64(), Some(400));
    assert_eq!(parsed["indexes"].as_array().unwrap().len(), 2);

    ok(rovi().args(["bench", "plot", "--report", &report, "--out", &svg]));
    let body = fs::read_to_string(&svg).unwrap();
    assert!(body.starts_with("<svg"), "plot emits svg");
    assert!(body.contains("<polyline"), "plot draws curves");
}

#[test]
fn sweep_report_plots_five_point_curves() {
    let dir = tempfile::tempdir().unwrap();
    let report = path_arg(dir.path(), "sweep.json");
    let svg = path_arg(dir.path(), "sweep.svg");
    ok(rovi().args([
        "bench",
        "--sweep",
        "gamma-v",
        "--skip-validate",
        "--users",
        "250",
        "--vocab-size",
        "50",
        "--queries",
        "4",
        "--query-words",
        "4",
        "--fraction",
        "0.04",
        "--gamma-g",
        "0.1",
        "--warmup",
        "0",
        "--repeats",
        "1",
        "--indexes",
        "qiv",
        "--seed",
        "3",
        "--report",
        &report,
    ]));
    let parsed: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(parsed["axis"], serde_json::Value::String("gamma-v".into()));
    assert_eq!(parsed["points"].as_array().unwrap().len(), 5);

    ok(rovi().args(["bench", "plot", "--report", &report, "--out", &svg]));
    let body = fs::read_to_string(&svg).unwrap();
    // One curve with all five sweep points marked.
    assert_eq!(body.matches("<polyline").count(), 1);
    assert_eq!(body.matches("<circle").count(), 5);
}

#[test]
fn data_dir_env_var_anchors_relative_paths() {
    let dir = tempfile::tempdir().unwrap();
    ok(rovi().env("ROVI_DATA_DIR", dir.path()).args([
        "gen-data",
        "--users",
        "50",
        "--vocab-size",
        "60",
        "--seed",
        "2",
        "--out",
        "users.jsonl",
        "--vocab",
        "vocab.jsonl",
    ]));
    assert!(dir.path().join("users.jsonl").is_file());
    assert!(dir.path().join("vocab.jsonl").is_file());
}
