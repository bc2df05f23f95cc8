use std::sync::Arc;

use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::{Check, CheckError, FnCheck, Outcome, RunConfig};
use crate::constructors::oracles::OracleRegistry;
use crate::constructors::{reference_oracle, EngineContext, EngineRegistry, PartialEmbedding};

const ENGINE_DEPTH: u32 = 6;
const LABEL_MUTATION_DEPTH: u32 = 2;
const DETERMINISM_DEPTH: u32 = 4;
const SCHEMES: [&str; 3] = ["g0-scheme", "b0-scheme", "tree-interleave"];

pub(super) fn checks() -> Vec<Arc<dyn Check>> {
    vec![
        FnCheck::boxed(
            "constructors.g0-scheme",
            "the g0 scheme over the symmetrized 𝔾₀ oracle passes every construction condition",
            |cfg| json!({ "depth": engine_depth(cfg), "oracle": reference_oracle("g0-scheme") }),
            |cfg, _| engine_passes("g0-scheme", cfg),
        ),
        FnCheck::boxed(
            "constructors.b0-scheme",
            "the b0 scheme over the closure-of-𝔹₀ oracle passes every construction condition",
            |cfg| json!({ "depth": engine_depth(cfg), "oracle": reference_oracle("b0-scheme") }),
            |cfg, _| engine_passes("b0-scheme", cfg),
        ),
        FnCheck::boxed(
            "constructors.tree-interleave",
            "the interleaving map over the frame-tree oracle passes every condition, the xor identity included",
            |cfg| json!({ "depth": engine_depth(cfg), "oracle": reference_oracle("tree-interleave") }),
            |cfg, _| engine_passes("tree-interleave", cfg),
        ),
        FnCheck::boxed(
            "constructors.transfer-labels",
            "the labels over the full-space oracle pass every condition and the transfer window holds for every β",
            |cfg| json!({ "depth": engine_depth(cfg), "oracle": reference_oracle("transfer-labels") }),
            |cfg, _| engine_passes("transfer-labels", cfg),
        ),
        FnCheck::boxed(
            "constructors.scheme-mutations",
            "flipping any single bit of a scheme's ψ, δ or k table makes verification fail",
            |cfg| json!({ "depth": engine_depth(cfg), "engines": SCHEMES }),
            scheme_mutations,
        ),
        FnCheck::boxed(
            "constructors.label-mutations",
            "flipping any single bit of a label or of ψ makes label verification fail",
            |cfg| json!({ "depth": cfg.depth.min(LABEL_MUTATION_DEPTH) }),
            label_mutations,
        ),
        FnCheck::boxed(
            "constructors.determinism",
            "repeated construction yields byte-identical embeddings",
            |cfg| json!({ "depth": cfg.depth.min(DETERMINISM_DEPTH) }),
            determinism,
        ),
    ]
}

fn engine_depth(cfg: &RunConfig) -> u32 {
    cfg.depth.min(ENGINE_DEPTH)
}

fn context(engine: &str, cfg: &RunConfig) -> Result<EngineContext, CheckError> {
    let spec = reference_oracle(engine).ok_or("no reference oracle")?;
    let handle = OracleRegistry::standard().from_json(&spec, cfg.oracle_bound)?;
    Ok(EngineContext::from_oracle(&handle))
}

fn build(
    engine: &str,
    cfg: &RunConfig,
    depth: u32,
) -> Result<(PartialEmbedding, EngineContext), CheckError> {
    let ctx = context(engine, cfg)?;
    let emb = EngineRegistry::standard()
        .get(engine)?
        .construct(&ctx, depth)?;
    Ok((emb, ctx))
}

fn engine_passes(engine: &str, cfg: &RunConfig) -> Result<Outcome, CheckError> {
    let (emb, ctx) = build(engine, cfg, engine_depth(cfg))?;
    let report = EngineRegistry::standard().get(engine)?.verify(&emb, &ctx);
    let identity = emb.psi.iter().all(|(s, img)| s == img);
    let conditions: Vec<_> = report
        .conditions
        .iter()
        .map(|c| json!({ "condition": c.condition, "passed": c.passed, "checked": c.checked, "witness": c.witness }))
        .collect();
    let mut details = json!({ "conditions": conditions, "identity": identity, "delta": emb.delta });
    if engine == "transfer-labels" {
        details["n"] = json!(emb.n.as_ref().map(|n| n.to_string()));
        details["max_label_bits"] = json!(emb.labels.values().map(|l| l.0.bits()).max());
    }
    Ok(Outcome {
        passed: report.passed(),
        details,
    })
}

fn sweep(
    engine: &str,
    emb: &PartialEmbedding,
    ctx: &EngineContext,
) -> Result<(u64, Vec<String>), CheckError> {
    let e = EngineRegistry::standard().get(engine)?;
    let sites = emb.mutation_sites();
    let missed = sites
        .iter()
        .filter(|m| e.verify(&emb.mutated(m), ctx).passed())
        .map(|m| format!("{engine}: {m:?}"))
        .collect();
    Ok((sites.len() as u64, missed))
}

fn scheme_mutations(cfg: &RunConfig, _: &mut ChaCha8Rng) -> Result<Outcome, CheckError> {
    let mut checked = 0;
    let mut failures = Vec::new();
    for engine in SCHEMES {
        let (emb, ctx) = build(engine, cfg, engine_depth(cfg))?;
        let (n, missed) = sweep(engine, &emb, &ctx)?;
        checked += n;
        failures.extend(missed);
    }
    Ok(Outcome::from_failures(checked, failures))
}

fn label_mutations(cfg: &RunConfig, _: &mut ChaCha8Rng) -> Result<Outcome, CheckError> {
    let engine = "transfer-labels";
    let (emb, ctx) = build(engine, cfg, cfg.depth.min(LABEL_MUTATION_DEPTH))?;
    let (checked, failures) = sweep(engine, &emb, &ctx)?;
    Ok(Outcome::from_failures(checked, failures))
}

fn determinism(cfg: &RunConfig, _: &mut ChaCha8Rng) -> Result<Outcome, CheckError> {
    let depth = cfg.depth.min(DETERMINISM_DEPTH);
    let mut failures = Vec::new();
    let names: Vec<&str> = EngineRegistry::standard().names().collect();
    for engine in &names {
        let (a, _) = build(engine, cfg, depth)?;
        let (b, _) = build(engine, cfg, depth)?;
        if a.to_json() != b.to_json() {
            failures.push(format!("{engine} differs between runs"));
        }
    }
    Ok(Outcome::from_failures(names.len() as u64, failures))
}
