use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::tempdir;

fn levelcert(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_levelcert"))
        .args(args)
        .env_remove("LEVELCERT_ORACLE_BOUND")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json_of(args: &[&str]) -> Value {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let out = levelcert(&full);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_str(&stdout(&out)).unwrap()
}

fn read(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn words_queries() {
    assert_eq!(
        stdout(&levelcert(&["words", "sn", "--n", "4"])).trim(),
        "0100"
    );
    assert_eq!(json_of(&["words", "psi", "--n", "4"]), json!("01"));
    assert_eq!(json_of(&["words", "psi-inv", "--s", "01"]), json!(4));
    assert_eq!(
        json_of(&["words", "pair", "--n", "0", "--p", "1"]),
        json!(2)
    );
    assert_eq!(json_of(&["words", "unpair", "--q", "4"]), json!([1, 1]));
    assert_eq!(json_of(&["words", "phi-inv", "--q", "3"]), json!([0, 1]));
    assert_eq!(json_of(&["words", "phi-inv", "--q", "1"]), json!([1, 0]));
    assert_eq!(json_of(&["words", "phi", "--n", "0", "--p", "1"]), json!(3));
}

#[test]
fn pairing_overflow_is_a_usage_error() {
    let out = levelcert(&["words", "pair", "--n", "18446744073709551615", "--p", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn level_t3_has_seven_pairs() {
    let v = json_of(&["level", "t", "--l", "3"]);
    assert_eq!(v["level"], 3);
    let pairs = v["pairs"].as_array().unwrap();
    assert_eq!(pairs.len(), 7);
    let mut sorted = pairs.clone();
    sorted.sort_by_key(|p| p.to_string());
    assert_eq!(&sorted, pairs);
}

#[test]
fn level_kinds_all_answer() {
    for kind in ["t", "b", "b0", "t0", "u0", "gsg0", "h0", "d"] {
        let v = json_of(&["level", kind, "--l", "3"]);
        assert!(v["pairs"].is_array(), "{kind}");
    }
    // B_l is a tree on 2^l: 2^l − 1 undirected edges, each stored both ways
    assert_eq!(
        json_of(&["level", "b", "--l", "4"])["pairs"]
            .as_array()
            .unwrap()
            .len(),
        30
    );
}

#[test]
fn level_path_example() {
    let v = json_of(&["level", "path", "--l", "2", "--from", "11", "--to", "00"]);
    assert_eq!(v, json!(["11", "01", "00"]));
    let v = json_of(&["level", "path", "--l", "3", "--from", "000", "--to", "000"]);
    assert_eq!(v, json!(["000"]));
    let out = levelcert(&["level", "path", "--l", "2", "--from", "11"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn frame_build_verify_and_tree() {
    let dir = tempdir().unwrap();
    let frame = dir.path().join("frame.json");
    let f = frame.to_str().unwrap();
    let out = levelcert(&["frame", "build", "--depth", "16", "--out", f]);
    assert_eq!(out.status.code(), Some(0));
    let v = read(&frame);
    assert_eq!(v["entries"].as_array().unwrap().len(), 17);
    assert_eq!(v["entries"][0], json!(["", ""]));
    assert_eq!(v["entries"][1], json!(["0", "1"]));

    assert_eq!(
        levelcert(&["frame", "verify", "--in", f]).status.code(),
        Some(0)
    );

    // corrupt one entry
    let mut bad = v.clone();
    bad["entries"][5][1] = json!("00000");
    let bad_path = dir.path().join("bad.json");
    fs::write(&bad_path, bad.to_string()).unwrap();
    let out = levelcert(&["frame", "verify", "--in", bad_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));

    let t = json_of(&["frame", "tree", "--l", "2", "--frame", f]);
    assert_eq!(
        t["pairs"],
        json!([["00", "10"], ["00", "11"], ["01", "11"]])
    );
    assert_eq!(t["report"]["tree_connected"], true);
}

#[test]
fn frame_density_needs_depth() {
    let dir = tempdir().unwrap();
    let frame = dir.path().join("frame.json");
    let f = frame.to_str().unwrap();
    levelcert(&["frame", "build", "--depth", "2000", "--out", f]);
    let ok = levelcert(&[
        "frame",
        "verify",
        "--in",
        f,
        "--density-pq",
        "2",
        "--density-w",
        "1",
    ]);
    assert_eq!(ok.status.code(), Some(0), "{}", stdout(&ok));
    levelcert(&["frame", "build", "--depth", "8", "--out", f]);
    let short = levelcert(&[
        "frame",
        "verify",
        "--in",
        f,
        "--density-pq",
        "2",
        "--density-w",
        "1",
    ]);
    assert_eq!(short.status.code(), Some(1));
}

#[test]
fn ideal_membership() {
    assert_eq!(
        stdout(&levelcert(&[
            "ideal", "member", "--ideal", "fin", "--prefix", "1", "--period", "0"
        ]))
        .trim(),
        "in"
    );
    let v = json_of(&[
        "ideal", "member", "--ideal", "fin", "--prefix", "1", "--period", "0",
    ]);
    assert_eq!(v, json!({ "verdict": "in", "bound": 64 }));
    let v = json_of(&[
        "ideal", "member", "--ideal", "i3", "--period", "1", "--bound", "9",
    ]);
    assert_eq!(v, json!({ "verdict": "out", "bound": 9 }));

    let dir = tempdir().unwrap();
    let expr = dir.path().join("expr.json");
    fs::write(&expr, r#"{"op":"M","children":[{"op":"FIN"}]}"#).unwrap();
    let v = json_of(&[
        "ideal",
        "member",
        "--ideal",
        expr.to_str().unwrap(),
        "--prefix",
        "0",
        "--period",
        "0",
    ]);
    assert_eq!(v["verdict"], "in");

    let out = levelcert(&["ideal", "member", "--ideal", "nope", "--period", "0"]);
    assert_eq!(out.status.code(), Some(2));
    let out = levelcert(&["ideal", "member", "--ideal", "fin", "--period", ""]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn embed_writes_embedding_json() {
    let dir = tempdir().unwrap();
    let emb = dir.path().join("emb.json");
    let out = levelcert(&[
        "embed",
        "g0-scheme",
        "--depth",
        "4",
        "--out",
        emb.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = read(&emb);
    assert_eq!(v["kind"], "g0-scheme");
    assert_eq!(v["delta"], json!([0, 1, 2, 3]));
    assert_eq!(v["k"], json!([0, 1, 2, 3, 4]));
    assert_eq!(v["psi"].as_object().unwrap().len(), 31);
    assert_eq!(v["psi"]["0110"], "0110");
}

#[test]
fn embed_with_oracle_and_frame_files() {
    let dir = tempdir().unwrap();
    let oracle = dir.path().join("oracle.json");
    fs::write(
        &oracle,
        json!({
            "kind": "complement-of-boxes",
            "family": "boxes",
            "levels": { "0": [["01", "1"]], "1": [["1", "01"]], "3": [["001", "0001"]] },
        })
        .to_string(),
    )
    .unwrap();
    let frame = dir.path().join("frame.json");
    levelcert(&[
        "frame",
        "build",
        "--depth",
        "400",
        "--out",
        frame.to_str().unwrap(),
    ]);
    let v = json_of(&[
        "embed",
        "tree-interleave",
        "--depth",
        "3",
        "--oracle",
        oracle.to_str().unwrap(),
        "--frame",
        frame.to_str().unwrap(),
    ]);
    assert_eq!(v["kind"], "tree-interleave");
    assert_ne!(v["delta"], json!([0, 0, 0]));
}

#[test]
fn embed_errors() {
    assert_eq!(
        levelcert(&["embed", "nope", "--depth", "2"]).status.code(),
        Some(2)
    );
    assert_eq!(levelcert(&["embed", "g0-scheme"]).status.code(), Some(2));
    assert_eq!(
        levelcert(&["embed", "g0-scheme", "--depth", "0"])
            .status
            .code(),
        Some(2)
    );

    let dir = tempdir().unwrap();
    let oracle = dir.path().join("oracle.json");
    fs::write(&oracle, r#"{"kind":"full-space"}"#).unwrap();
    // nothing avoids the whole space, so the search runs out
    let out = levelcert(&[
        "embed",
        "g0-scheme",
        "--depth",
        "2",
        "--oracle",
        oracle.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bound 65536"));
}

#[test]
fn oracle_bound_from_environment() {
    let dir = tempdir().unwrap();
    let oracle = dir.path().join("oracle.json");
    fs::write(&oracle, r#"{"kind":"full-space"}"#).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_levelcert"))
        .args([
            "embed",
            "g0-scheme",
            "--depth",
            "2",
            "--oracle",
            oracle.to_str().unwrap(),
        ])
        .env("LEVELCERT_ORACLE_BOUND", "7")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bound 7"));
}

#[test]
fn labels_from_tree_pairs() {
    let v = json_of(&["labels", "--depth", "2"]);
    assert_eq!(v["kind"], "transfer-labels");
    assert_eq!(v["n"], "1");
    assert_eq!(v["labels"][""], "2");
    assert_eq!(v["labels"].as_object().unwrap().len(), 7);

    let v = json_of(&["labels", "--u", "00", "--v", "11", "--depth", "2"]);
    assert_eq!(v["uv"], json!(["00", "11"]));

    let out = levelcert(&["labels", "--u", "00", "--v", "01", "--depth", "2"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn labels_reject_a_foreign_frame() {
    let dir = tempdir().unwrap();
    let frame = dir.path().join("frame.json");
    fs::write(
        &frame,
        json!({ "entries": [["", ""], ["1", "0"]] }).to_string(),
    )
    .unwrap();
    let out = levelcert(&["labels", "--frame", frame.to_str().unwrap(), "--depth", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_scopes() {
    let v = json_of(&["verify", "words", "--list"]);
    assert_eq!(v.as_array().unwrap().len(), 7);
    let all = json_of(&["verify", "--list"]);
    assert!(all.as_array().unwrap().len() >= 25);

    let dir = tempdir().unwrap();
    let cert = dir.path().join("cert.json");
    let out = levelcert(&[
        "verify",
        "words",
        "--depth",
        "3",
        "--seed",
        "7",
        "--out",
        cert.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.lines().any(|l| l.starts_with("pass  words.sn-length")));
    let c = read(&cert);
    assert_eq!(c["status"], "pass");
    assert_eq!(c["params"]["seed"], 7);
    assert_eq!(c["params"]["depth"], 3);
    assert_eq!(c["checks"].as_array().unwrap().len(), 7);

    assert_eq!(levelcert(&["verify", "nowhere"]).status.code(), Some(2));
    assert_eq!(
        levelcert(&["verify", "words", "--depth", "0"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn unknown_command_is_usage() {
    assert_eq!(levelcert(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        levelcert(&["level", "t", "--l", "99"]).status.code(),
        Some(2)
    );
}
