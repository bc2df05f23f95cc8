use std::path::Path;
use std::sync::Arc;

use anyhow::{anyhow, Context};
use levelcert::checks::{CheckRegistry, RunConfig, RunError, Status};
use levelcert::constructors::oracles::OracleRegistry;
use levelcert::constructors::{reference_oracle, EngineContext, EngineRegistry};
use levelcert::frames::{
    build_frame, t_tree_level, verify_density_bounded, verify_frame, verify_tree_acyclicity, Frame,
    FrameView, StandardFrame,
};
use levelcert::ideals::{ideal_member, named_ideal, EpPoint, IdealExpr, Membership};
use levelcert::levelgraphs::{
    b_level, d_level, injective_path, lift_level, t_level, LevelRelation, LiftKind, MAX_GRAPH_LEVEL,
};
use levelcert::words::{pair, phi, phi_inv, psi, psi_inv, sn, unpair, PairCode, Word};
use serde_json::{json, Value};

use crate::{
    usage, EmbedArgs, FrameCmd, Global, IdealCmd, LabelsArgs, LevelArgs, LevelKind, PathRelation,
    Report, VerifyArgs, WordsCmd,
};

const DEFAULT_VERIFY_DEPTH: u32 = 10;

fn word(name: &str, s: &str) -> anyhow::Result<Word> {
    s.parse().map_err(|e| usage(format!("--{name} {s:?}: {e}")))
}

fn read_json(path: &Path) -> anyhow::Result<Value> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn read_frame(path: &Path) -> anyhow::Result<Frame> {
    serde_json::from_value(read_json(path)?)
        .map_err(|e| usage(format!("{}: not a frame: {e}", path.display())))
}

fn frame_view(path: Option<&Path>) -> anyhow::Result<Arc<dyn FrameView>> {
    Ok(match path {
        Some(p) => Arc::new(read_frame(p)?),
        None => Arc::new(StandardFrame::unbounded()),
    })
}

fn depth(g: &Global) -> anyhow::Result<u32> {
    g.depth.ok_or_else(|| usage("--depth is required"))
}

pub fn words(cmd: WordsCmd) -> anyhow::Result<Report> {
    let overflow = |e: levelcert::words::WordsError| usage(e.to_string());
    Ok(match cmd {
        WordsCmd::Psi { n } => {
            let s = psi(n).to_string();
            Report::ok(json!(s), s)
        }
        WordsCmd::PsiInv { s } => {
            let n = psi_inv(&word("s", &s)?).map_err(overflow)?;
            Report::ok(json!(n), n.to_string())
        }
        WordsCmd::Sn { n } => {
            if n > 1 << 24 {
                return Err(usage("--n above 2^24 would print more than 16M bits"));
            }
            let s = sn(n).to_string();
            Report::ok(json!(s), s)
        }
        WordsCmd::Pair { n, p } => {
            let q = pair(n, p).map_err(overflow)?.0;
            Report::ok(json!(q), q.to_string())
        }
        WordsCmd::Unpair { q } => {
            let (n, p) = unpair(PairCode(q));
            Report::ok(json!([n, p]), format!("{n} {p}"))
        }
        WordsCmd::Phi { n, p } => {
            let q = phi(n, p).map_err(overflow)?.0;
            Report::ok(json!(q), q.to_string())
        }
        WordsCmd::PhiInv { q } => {
            let (n, p) = phi_inv(PairCode(q));
            Report::ok(json!([n, p]), format!("{n} {p}"))
        }
    })
}

fn relation_report(rel: &LevelRelation) -> Report {
    let text = rel
        .iter_words()
        .map(|(s, t)| format!("{s} {t}"))
        .collect::<Vec<_>>()
        .join("\n");
    Report::ok(
        serde_json::to_value(rel).expect("relations serialize"),
        text,
    )
}

pub fn level(a: LevelArgs) -> anyhow::Result<Report> {
    if a.l > MAX_GRAPH_LEVEL {
        return Err(usage(format!("--l must be at most {MAX_GRAPH_LEVEL}")));
    }
    let lift = |k| lift_level(k, a.l);
    let rel = match a.kind {
        LevelKind::T => t_level(a.l),
        LevelKind::B => b_level(a.l),
        LevelKind::B0 => lift(LiftKind::B0),
        LevelKind::T0 => lift(LiftKind::T0),
        LevelKind::U0 => lift(LiftKind::U0),
        LevelKind::Gsg0 => lift(LiftKind::Gsg0),
        LevelKind::H0 => lift(LiftKind::H0),
        LevelKind::D => d_level(frame_view(a.frame.as_deref())?.as_ref(), a.l),
        LevelKind::Path => return path(&a),
    }
    .map_err(|e| usage(e.to_string()))?;
    Ok(relation_report(&rel))
}

fn path(a: &LevelArgs) -> anyhow::Result<Report> {
    let (Some(from), Some(to)) = (&a.from, &a.to) else {
        return Err(usage("level path needs --from and --to"));
    };
    let (from, to) = (word("from", from)?, word("to", to)?);
    if from.len() != a.l as usize || to.len() != a.l as usize {
        return Err(usage(format!("--from and --to must have length {}", a.l)));
    }
    let rel = match a.relation {
        PathRelation::T => t_level(a.l),
        PathRelation::B => b_level(a.l),
    }
    .map_err(|e| usage(e.to_string()))?;
    let g = rel.symmetrize().as_graph();
    let codes = injective_path(&g, from.to_index()?, to.to_index()?).map_err(|e| anyhow!("{e}"))?;
    let words: Vec<String> = codes.iter().map(|&c| rel.word(c).to_string()).collect();
    Ok(Report::ok(json!(words), words.join(" ")))
}

pub fn frame(cmd: FrameCmd, g: &Global) -> anyhow::Result<Report> {
    match cmd {
        FrameCmd::Build => {
            let f = build_frame(depth(g)? as u64)?;
            let text = format!("standard frame with {} entries", f.entries.len());
            Ok(Report::ok(serde_json::to_value(&f)?, text))
        }
        FrameCmd::Verify {
            input,
            density_pq,
            density_w,
        } => {
            let f = read_frame(&input)?;
            let report = verify_frame(&f);
            let density = match (density_pq, density_w) {
                (Some(pq), Some(w)) => Some(verify_density_bounded(&f, pq, w)),
                _ => None,
            };
            let passed = report.passed() && density.as_ref().is_none_or(|d| d.is_empty());
            let mut text = format!(
                "{}: depth {}, {} violations",
                if passed { "pass" } else { "FAIL" },
                report.depth,
                report.violations.len()
            );
            if let Some(d) = &density {
                text += &format!(", {} unwitnessed density triples", d.len());
            }
            Ok(Report {
                json: json!({ "passed": passed, "report": report, "density": density }),
                text,
                passed,
            })
        }
        FrameCmd::Tree { l, frame } => {
            if l > MAX_GRAPH_LEVEL {
                return Err(usage(format!("--l must be at most {MAX_GRAPH_LEVEL}")));
            }
            let f = frame_view(frame.as_deref())?;
            let rel = t_tree_level(f.as_ref(), l)?;
            let report = if l == 0 {
                None
            } else {
                verify_tree_acyclicity(f.as_ref(), l)?.pop()
            };
            let passed = report.as_ref().is_none_or(|r| r.passed());
            let mut out = relation_report(&rel);
            if let Some(r) = &report {
                out.text += &format!(
                    "\nacyclic {}, connected {}, lift acyclic {}, halves {}",
                    r.tree_acyclic, r.tree_connected, r.lift_acyclic, r.prefix_classes
                );
            }
            out.json["report"] = json!(report);
            out.passed = passed;
            Ok(out)
        }
    }
}

fn ideal_expr(name: &str) -> anyhow::Result<IdealExpr> {
    let path = Path::new(name);
    if path.is_file() {
        return serde_json::from_value(read_json(path)?).map_err(|e| usage(format!("{name}: {e}")));
    }
    named_ideal(name).map_err(|e| usage(e.to_string()))
}

pub fn ideal(cmd: IdealCmd) -> anyhow::Result<Report> {
    let IdealCmd::Member {
        ideal,
        prefix,
        period,
        bound,
    } = cmd;
    let e = ideal_expr(&ideal)?;
    let x = EpPoint::new(word("prefix", &prefix)?, word("period", &period)?)
        .map_err(|e| usage(e.to_string()))?;
    let verdict = match ideal_member(&e, &x, bound) {
        Membership::In => "in",
        Membership::Out => "out",
        Membership::Unknown { .. } => "unknown",
    };
    Ok(Report::ok(
        json!({ "verdict": verdict, "bound": bound }),
        verdict,
    ))
}

fn context(engine: &str, oracle: Option<&Path>, g: &Global) -> anyhow::Result<EngineContext> {
    let spec = match oracle {
        Some(p) => read_json(p)?,
        None => reference_oracle(engine)
            .ok_or_else(|| usage(format!("no reference oracle for {engine}")))?,
    };
    let handle = OracleRegistry::standard()
        .from_json(&spec, g.oracle_bound)
        .map_err(|e| usage(e.to_string()))?;
    Ok(EngineContext::from_oracle(&handle))
}

fn run_engine(engine: &str, ctx: &EngineContext, depth: u32) -> anyhow::Result<Report> {
    let e = EngineRegistry::standard().get(engine)?;
    let emb = e.construct(ctx, depth)?;
    let report = e.verify(&emb, ctx);
    let passed = report.passed();
    let text = format!(
        "{engine} at depth {depth}: {}\n{}",
        if passed { "pass" } else { "FAIL" },
        report.to_string().trim_end()
    );
    Ok(Report {
        json: serde_json::to_value(&emb)?,
        text,
        passed,
    })
}

pub fn embed(a: EmbedArgs, g: &Global) -> anyhow::Result<Report> {
    let registry = EngineRegistry::standard();
    if registry.get(&a.engine).is_err() {
        let names: Vec<_> = registry.names().collect();
        return Err(usage(format!(
            "unknown engine {:?}; expected one of {}",
            a.engine,
            names.join(", ")
        )));
    }
    let depth = depth(g)?;
    let mut ctx = context(&a.engine, a.oracle.as_deref(), g)?;
    if let Some(p) = &a.frame {
        ctx.frame = Arc::new(read_frame(p)?);
    }
    run_engine(&a.engine, &ctx, depth)
}

pub fn labels(a: LabelsArgs, g: &Global) -> anyhow::Result<Report> {
    let engine = "transfer-labels";
    let depth = depth(g)?;
    if let Some(p) = &a.frame {
        // labels address entries far past any explicit file, so the file can
        // only confirm it is a prefix of the standard frame
        let f = read_frame(p)?;
        let standard = StandardFrame::unbounded();
        if let Some(len) = (0..=f.depth()).find(|&len| f.entry(len) != standard.entry(len)) {
            return Err(usage(format!(
                "{} differs from the standard frame at length {len}",
                p.display()
            )));
        }
    }
    let mut ctx = context(engine, a.oracle.as_deref(), g)?;
    ctx.uv = (word("u", &a.u)?, word("v", &a.v)?);
    run_engine(engine, &ctx, depth)
}

pub fn verify(a: VerifyArgs, g: &Global) -> anyhow::Result<Report> {
    let registry = CheckRegistry::standard();
    let run_error = |e: RunError| usage(e.to_string());
    if a.list {
        let ids = registry.select(&a.scope).map_err(run_error)?;
        return Ok(Report::ok(json!(ids), ids.join("\n")));
    }
    let mut cfg = RunConfig::new(g.depth.unwrap_or(DEFAULT_VERIFY_DEPTH), g.seed);
    cfg.oracle_bound = g.oracle_bound;
    let cert = registry.run(&a.scope, &cfg).map_err(run_error)?;
    let mut lines: Vec<String> = cert
        .checks
        .iter()
        .map(|r| {
            let mark = match r.status {
                Status::Pass => "pass ",
                Status::Fail => "FAIL ",
                Status::Error => "ERROR",
            };
            format!("{mark} {} ({:.1} ms)", r.id, r.duration_ms)
        })
        .collect();
    let failed = cert
        .checks
        .iter()
        .filter(|r| r.status != Status::Pass)
        .count();
    lines.push(format!(
        "{}: {} checks, {failed} not passing, depth {}, seed {}",
        if cert.passed() { "pass" } else { "FAIL" },
        cert.checks.len(),
        cfg.depth,
        cfg.seed
    ));
    Ok(Report {
        json: serde_json::to_value(&cert)?,
        text: lines.join("\n"),
        passed: cert.passed(),
    })
}
