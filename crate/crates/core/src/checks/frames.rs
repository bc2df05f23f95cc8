use std::sync::Arc;

use num_bigint::BigUint;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::{Check, CheckError, FnCheck, Outcome, RunConfig};
use crate::frames::{
    build_frame, density_scan, density_witness, t_tree_level, t_tree_member, verify_frame,
    verify_tree_acyclicity, BigFrame, FrameView, StandardFrame,
};
use crate::words::{fst, Word};

const BUILD_DEPTH: u64 = 64;
const DENSITY_PQ: u64 = 5;
const DENSITY_W: usize = 4;

pub(super) fn checks() -> Vec<Arc<dyn Check>> {
    vec![
        FnCheck::boxed(
            "frames.build-verify",
            "the built standard frame satisfies uniqueness and generation, and a corrupted copy does not",
            |_| json!({ "depth": BUILD_DEPTH }),
            build_verify,
        ),
        FnCheck::boxed(
            "frames.views-agree",
            "explicit, lazy and arbitrary-precision standard frames have the same entries",
            |_| json!({ "depth": BUILD_DEPTH }),
            views_agree,
        ),
        FnCheck::boxed(
            "frames.density-witness",
            "the closed-form density witness is a valid entry and the brute-force scan finds one no longer",
            |_| json!({ "max_p": DENSITY_PQ, "max_q": DENSITY_PQ, "max_w": DENSITY_W }),
            density,
        ),
        FnCheck::boxed(
            "frames.tree-acyclic",
            "s(T_l) is connected and acyclic and s(G_{T_l}) is acyclic",
            |cfg| json!({ "levels": [1, tree_top(cfg)] }),
            tree_acyclic,
        ),
        FnCheck::boxed(
            "frames.tree-halves",
            "every pair of T_l lies in N_0 × N_1",
            |cfg| json!({ "levels": [1, tree_top(cfg)] }),
            tree_halves,
        ),
        FnCheck::boxed(
            "frames.tree-membership",
            "forward closure of the frame gives exactly the pairs the membership predicate accepts",
            |cfg| json!({ "levels": [0, pairwise_top(cfg)] }),
            tree_membership,
        ),
    ]
}

fn tree_top(cfg: &RunConfig) -> u32 {
    (cfg.depth + 4).min(14)
}

fn pairwise_top(cfg: &RunConfig) -> u32 {
    cfg.depth.min(7)
}

fn build_verify(_: &RunConfig, _: &mut ChaCha8Rng) -> Result<Outcome, CheckError> {
    let frame = build_frame(BUILD_DEPTH)?;
    let report = verify_frame(&frame);
    let mut broken = frame.clone();
    broken.entries[BUILD_DEPTH as usize / 2].1.flip(0);
    let caught = !verify_frame(&broken).passed();
    Ok(Outcome {
        passed: report.passed() && frame.entries.len() as u64 == BUILD_DEPTH + 1 && caught,
        details: json!({
            "entries": frame.entries.len(),
            "violations": report.violations,
            "corruption_caught": caught,
        }),
    })
}

fn views_agree(_: &RunConfig, _: &mut ChaCha8Rng) -> Result<Outcome, CheckError> {
    let frame = build_frame(BUILD_DEPTH)?;
    let lazy = StandardFrame::new(BUILD_DEPTH);
    let mut failures = Vec::new();
    for (len, (u, v)) in frame.entries.iter().enumerate() {
        if lazy.entry(len as u64).as_ref() != Some(&(u.clone(), v.clone())) {
            failures.push(format!("lazy entry {len}"));
        }
        let (bu, bv) = BigFrame.entry(&BigUint::from(len))?;
        if bu.to_word(usize::MAX).as_ref() != Some(u) || bv.to_word(usize::MAX).as_ref() != Some(v)
        {
            failures.push(format!("big entry {len}"));
        }
    }
    Ok(Outcome::from_failures(frame.entries.len() as u64, failures))
}

fn density(_: &RunConfig, _: &mut ChaCha8Rng) -> Result<Outcome, CheckError> {
    let frame = StandardFrame::unbounded();
    let mut failures = Vec::new();
    let mut checked = 0;
    let mut strictly_smaller = 0;
    for q in 0..=DENSITY_PQ {
        let (uq, vq) = frame.entry(q).ok_or("frame entry")?;
        for wl in 0..=DENSITY_W {
            for w in Word::all_of_length(wl) {
                for p in 0..=DENSITY_PQ {
                    checked += 1;
                    let n = density_witness(&frame, p, q, &w)?;
                    let len = q + 1 + wl as u64 + n;
                    // the entry itself, materialized
                    let mut want_u = uq.with_bit(false).concat(&w);
                    let mut want_v = vq.with_bit(true).concat(&w);
                    want_u.push_zeros(n as usize);
                    want_v.push_zeros(n as usize);
                    if frame.entry(len) != Some((want_u, want_v)) || fst(len) != p {
                        failures.push(format!("p={p} q={q} w={w}: witness N={n} is not an entry"));
                        continue;
                    }
                    match density_scan(&frame, p, q, &w, len) {
                        Some(m) if m <= n => strictly_smaller += (m < n) as u64,
                        other => failures.push(format!(
                            "p={p} q={q} w={w}: scan {other:?}, closed form {n}"
                        )),
                    }
                }
            }
        }
    }
    let mut o = Outcome::from_failures(checked, failures);
    o.details["scan_strictly_smaller"] = strictly_smaller.into();
    Ok(o)
}

fn tree_acyclic(cfg: &RunConfig, _: &mut ChaCha8Rng) -> Result<Outcome, CheckError> {
    let frame = StandardFrame::unbounded();
    let reports = verify_tree_acyclicity(&frame, tree_top(cfg))?;
    let failures = reports
        .iter()
        .filter(|r| !(r.tree_acyclic && r.tree_connected && r.lift_acyclic))
        .map(|r| format!("{r:?}"))
        .collect();
    Ok(Outcome::from_failures(reports.len() as u64, failures))
}

fn tree_halves(cfg: &RunConfig, _: &mut ChaCha8Rng) -> Result<Outcome, CheckError> {
    let frame = StandardFrame::unbounded();
    let mut failures = Vec::new();
    let mut checked = 0;
    for l in 1..=tree_top(cfg) {
        for (u, v) in t_tree_level(&frame, l)?.iter_words() {
            checked += 1;
            if u.get(0) || !v.get(0) {
                failures.push(format!("({u}, {v}) ∈ T_{l}"));
            }
        }
    }
    Ok(Outcome::from_failures(checked, failures))
}

fn tree_membership(cfg: &RunConfig, _: &mut ChaCha8Rng) -> Result<Outcome, CheckError> {
    let frame = StandardFrame::unbounded();
    let mut failures = Vec::new();
    let mut checked = 0;
    for l in 0..=pairwise_top(cfg) {
        let level = t_tree_level(&frame, l)?;
        for u in Word::all_of_length(l as usize) {
            for v in Word::all_of_length(l as usize) {
                checked += 1;
                if level.contains(&u, &v) != t_tree_member(&frame, &u, &v) {
                    failures.push(format!("({u}, {v}) at level {l}"));
                }
            }
        }
    }
    Ok(Outcome::from_failures(checked, failures))
}
