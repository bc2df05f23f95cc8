//! Acceptance run: each criterion executes at its pinned parameters and time
//! budget and prints one pass/fail line. Exits nonzero if any criterion fails.

use std::collections::BTreeSet;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use levelcert::checks::{Certificate, CheckRecord, CheckRegistry, RunConfig, Status};
use levelcert::levelgraphs::{is_acyclic, is_connected, t_level};
use serde_json::Value;

type Outcome = Result<String, String>;

struct Criterion {
    name: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

const DEPTH: u32 = 10;
const SEED: u64 = 1;

fn run_checks(ids: &[&str]) -> Result<Vec<CheckRecord>, String> {
    let reg = CheckRegistry::standard();
    let cfg = RunConfig::new(DEPTH, SEED);
    let mut out = Vec::new();
    for id in ids {
        let cert = reg.run(id, &cfg).map_err(|e| e.to_string())?;
        out.extend(cert.checks);
    }
    for r in &out {
        if r.status != Status::Pass {
            return Err(format!("{} {:?}: {}", r.id, r.status, r.details));
        }
    }
    Ok(out)
}

fn record<'a>(records: &'a [CheckRecord], id: &str) -> &'a CheckRecord {
    records.iter().find(|r| r.id == id).expect("ran")
}

/// `checked` count of a named verification condition in an engine record.
fn condition_checked(r: &CheckRecord, name: &str) -> Option<u64> {
    r.details["conditions"]
        .as_array()?
        .iter()
        .find(|c| c["condition"] == name && c["passed"] == true)?["checked"]
        .as_u64()
}

fn words_suite() -> Outcome {
    let ids = [
        "words.sn-length",
        "words.sn-density",
        "words.pair-round-trip",
        "words.pair-enumeration",
        "words.pair-successor",
        "words.phi-round-trip",
        "words.m-of-sum",
    ];
    let recs = run_checks(&ids)?;
    let n: u64 = recs
        .iter()
        .map(|r| r.details["checked"].as_u64().unwrap_or(0))
        .sum();
    Ok(format!("{} checks, {n} instances", recs.len()))
}

fn t_levels_are_trees() -> Outcome {
    for l in 1..=16 {
        let g = t_level(l)
            .map_err(|e| e.to_string())?
            .symmetrize()
            .as_graph();
        if !is_acyclic(&g) || !is_connected(&g) {
            return Err(format!("level {l} is not a tree"));
        }
    }
    Ok("levels 1..=16 connected and acyclic".into())
}

fn lift_lemma() -> Outcome {
    let recs = run_checks(&[
        "levelgraphs.lift-lemma-exhaustive",
        "levelgraphs.lift-negative-control",
    ])?;
    let exhaustive = record(&recs, "levelgraphs.lift-lemma-exhaustive");
    let control = record(&recs, "levelgraphs.lift-negative-control");
    let cycle = control.details["lift_cycle"].as_array().map_or(0, Vec::len);
    if cycle != 4 {
        return Err(format!("negative control cycle has {cycle} vertices"));
    }
    Ok(format!(
        "{} relations, 0 counterexamples, control cycle {}",
        exhaustive.details["checked"], control.details["lift_cycle"]
    ))
}

fn frame_suite() -> Outcome {
    let recs = run_checks(&[
        "frames.build-verify",
        "frames.density-witness",
        "frames.tree-acyclic",
    ])?;
    let density = record(&recs, "frames.density-witness");
    Ok(format!(
        "{} density queries, scan strictly shorter on {}",
        density.details["checked"], density.details["scan_strictly_smaller"]
    ))
}

fn embedding_engines() -> Outcome {
    let recs = run_checks(&[
        "constructors.g0-scheme",
        "constructors.tree-interleave",
        "constructors.b0-scheme",
        "constructors.scheme-mutations",
    ])?;
    let xor = condition_checked(
        record(&recs, "constructors.tree-interleave"),
        "xor-identity",
    );
    if xor != Some(4096) {
        return Err(format!("xor identity checked on {xor:?} pairs"));
    }
    let mutations = &record(&recs, "constructors.scheme-mutations").details["checked"];
    Ok(format!(
        "xor identity on 4096 pairs, {mutations} mutations caught"
    ))
}

fn transfer_labels() -> Outcome {
    let recs = run_checks(&["constructors.transfer-labels"])?;
    let window = condition_checked(&recs[0], "transfer-window");
    if window != Some(64) {
        return Err(format!("transfer window checked on {window:?} values"));
    }
    Ok("transfer window holds for all 64 values".into())
}

fn ideal_suite() -> Outcome {
    let recs = run_checks(&[
        "ideals.i3-truncation-scan",
        "ideals.transfer-injection",
        "ideals.truncation-properties",
        "ideals.section-assembly",
    ])?;
    let samples: Vec<String> = recs
        .iter()
        .map(|r| format!("{}", r.details["checked"]))
        .collect();
    Ok(format!("checked {}", samples.join("/")))
}

fn verify_all_once(path: &std::path::Path) -> Result<(Certificate, Duration), String> {
    let start = Instant::now();
    let status = Command::new(env!("CARGO_BIN_EXE_levelcert"))
        .args([
            "verify", "all", "--depth", "10", "--seed", "1", "--format", "json", "--out",
        ])
        .arg(path)
        .env_remove("LEVELCERT_ORACLE_BOUND")
        .status()
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    if !status.success() {
        return Err(format!("verify all exited with {status}"));
    }
    let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
    let cert = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    Ok((cert, elapsed))
}

fn strip_timing(text: &str) -> Value {
    let mut v: Value = serde_json::from_str(text).expect("certificate json");
    for c in v["checks"].as_array_mut().expect("checks") {
        c["duration_ms"] = 0.into();
    }
    v
}

fn certificate_run() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    let (cert, t1) = verify_all_once(&a)?;
    let (_, t2) = verify_all_once(&b)?;
    let ids: BTreeSet<&str> = cert.checks.iter().map(|r| r.id.as_str()).collect();
    if ids.len() < 25 {
        return Err(format!("only {} distinct check ids", ids.len()));
    }
    if !cert.passed() {
        return Err("certificate status is not pass".into());
    }
    let slowest = t1.max(t2);
    if slowest >= Duration::from_secs(60) {
        return Err(format!("a run took {:.1} s", slowest.as_secs_f64()));
    }
    let read = |p| std::fs::read_to_string(p).map_err(|e: std::io::Error| e.to_string());
    if strip_timing(&read(&a)?) != strip_timing(&read(&b)?) {
        return Err("certificates differ outside timing fields".into());
    }
    Ok(format!(
        "{} ids, runs {:.1} s and {:.1} s, identical modulo timing",
        ids.len(),
        t1.as_secs_f64(),
        t2.as_secs_f64()
    ))
}

fn main() -> ExitCode {
    let criteria = [
        Criterion {
            name: "enumeration suite",
            budget: Duration::from_secs(5),
            run: words_suite,
        },
        Criterion {
            name: "T levels are trees up to 16",
            budget: Duration::from_secs(10),
            run: t_levels_are_trees,
        },
        Criterion {
            name: "lift lemma exhaustive",
            budget: Duration::from_secs(5),
            run: lift_lemma,
        },
        Criterion {
            name: "frame suite",
            budget: Duration::from_secs(10),
            run: frame_suite,
        },
        Criterion {
            name: "embedding engines",
            budget: Duration::from_secs(30),
            run: embedding_engines,
        },
        Criterion {
            name: "transfer labels",
            budget: Duration::from_secs(10),
            run: transfer_labels,
        },
        Criterion {
            name: "ideal suite",
            budget: Duration::from_secs(20),
            run: ideal_suite,
        },
        // each of the two runs carries its own 60 s limit
        Criterion {
            name: "verify all certificate",
            budget: Duration::from_secs(120),
            run: certificate_run,
        },
    ];
    let mut failed = 0;
    for (i, c) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(_) if elapsed > c.budget => Err(format!("over budget of {} s", c.budget.as_secs())),
            o => o,
        };
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        if outcome.is_err() {
            failed += 1;
        }
        println!(
            "{tag} [{}] {:<28} {:>7.2} s / {:>3} s  {detail}",
            i + 1,
            c.name,
            elapsed.as_secs_f64(),
            c.budget.as_secs()
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
