use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::{Check, CheckError, FnCheck, Outcome, RunConfig};
use crate::frames::StandardFrame;
use crate::levelgraphs::{
    b_level, b_member, check_edge_reflection, check_lift_acyclicity, cycle_witness, d_level,
    injective_path, is_acyclic, is_connected, lift_level, t_level, t_member, undirected_edge_count,
    Decoration, FiniteGraphInstance, LevelRelation, LiftDirection, LiftKind, PreconditionError,
    Verdict,
};
use crate::words::{sn, Word};

const REFLECTION_SAMPLES: usize = 1000;

pub(super) fn checks() -> Vec<Arc<dyn Check>> {
    vec![
        FnCheck::boxed(
            "levelgraphs.t-tree",
            "s(𝒯_l) is a connected acyclic graph on 2^l with 2^l − 1 edges",
            |cfg| json!({ "levels": [1, tree_top(cfg)] }),
            t_tree,
        ),
        FnCheck::boxed(
            "levelgraphs.t-closed-form",
            "𝒯_l equals the pairs (s_n 0 w, s_n 1 w) and membership matches box templates",
            |cfg| json!({ "set_levels": [0, closed_top(cfg)], "pairwise_levels": [0, pairwise_top(cfg)] }),
            t_closed_form,
        ),
        FnCheck::boxed(
            "levelgraphs.b-tree",
            "B_l is symmetric, connected, acyclic, with 2^l − 1 undirected edges",
            |cfg| json!({ "levels": [1, tree_top(cfg)], "membership_levels": [1, pairwise_top(cfg)] }),
            b_tree,
        ),
        FnCheck::boxed(
            "levelgraphs.lift-symmetrizations",
            "𝕋₀ and s(𝕌₀) levels are acyclic and 𝕋₀, 𝕌₀, G_{s(𝔾₀)} share symmetrizations",
            |cfg| json!({ "levels": [1, closed_top(cfg)] }),
            lift_symmetrizations,
        ),
        FnCheck::boxed(
            "levelgraphs.unique-path",
            "injective_path returns the only injective path of s(𝒯_l)",
            |cfg| json!({ "levels": [1, path_top(cfg)] }),
            unique_path,
        ),
        FnCheck::boxed(
            "levelgraphs.lift-lemma-exhaustive",
            "lift acyclicity holds in both directions for every relation on at most 3 points",
            |_| json!({ "points": [1, 3] }),
            lift_lemma_exhaustive,
        ),
        FnCheck::boxed(
            "levelgraphs.lift-negative-control",
            "the lift of the reflexive s(𝒯̄_1) has a 4-cycle, so the irreflexive-or-antisymmetric hypothesis is needed",
            |_| json!({ "level": 1 }),
            lift_negative_control,
        ),
        FnCheck::boxed(
            "levelgraphs.edge-reflection-random",
            "an injective homomorphism from a connected acyclic graph into an acyclic graph reflects edges",
            |_| json!({ "samples": REFLECTION_SAMPLES, "max_vertices": 10 }),
            edge_reflection_random,
        ),
        FnCheck::boxed(
            "levelgraphs.decorations",
            "R^□ is reflexive, decorations keep antisymmetry, and s(R^□) = s(R)^□",
            |cfg| json!({ "levels": [1, pairwise_top(cfg)] }),
            decorations,
        ),
        FnCheck::boxed(
            "levelgraphs.d-acyclic",
            "D_l is acyclic for the standard frame",
            |cfg| json!({ "levels": [1, closed_top(cfg)] }),
            d_acyclic,
        ),
    ]
}

fn tree_top(cfg: &RunConfig) -> u32 {
    (cfg.depth + 6).min(16)
}

fn closed_top(cfg: &RunConfig) -> u32 {
    (cfg.depth + 2).min(12)
}

fn pairwise_top(cfg: &RunConfig) -> u32 {
    cfg.depth.min(7)
}

fn path_top(cfg: &RunConfig) -> u32 {
    cfg.depth.min(6)
}

fn t_tree(cfg: &RunConfig, _: &mut ChaCha8Rng) -> Result<Outcome, CheckError> {
    let mut failures = Vec::new();
    for l in 1..=tree_top(cfg) {
        let g = t_level(l)?.as_graph();
        if let Some(c) = cycle_witness(&g) {
            failures.push(format!("level {l}: cycle {c:?}"));
        }
        if !is_connected(&g) {
            failures.push(format!("level {l}: disconnected"));
        }
        if undirected_edge_count(&g) as u64 != (1 << l) - 1 {
            failures.push(format!("level {l}: {} edges", undirected_edge_count(&g)));
        }
    }
    Ok(Outcome::from_failures(tree_top(cfg) as u64, failures))
}

/// Box `N_s × N_t` meets `𝔾₀` off the diagonal: both extend a template
/// `(s_n 0 γ, s_n 1 γ)` with `n < l`.
fn meets_template(s: &Word, t: &Word) -> bool {
    let l = s.len();
    (0..l).any(|n| {
        let head = sn(n as u64);
        s.prefix(n) == head
            && t.prefix(n) == head
            && !s.get(n)
            && t.get(n)
            && s.suffix_from(n + 1) == t.suffix_from(n + 1)
    })
}

fn t_closed_form(cfg: &RunConfig, _: &mut ChaCha8Rng) -> Result<Outcome, CheckError> {
    let mut failures = Vec::new();
    let mut checked = 0;
    for l in 0..=closed_top(cfg) {
        let mut built = BTreeSet::new();
        for n in 0..l as usize {
            for w in Word::all_of_length(l as usize - n - 1) {
                let head = sn(n as u64);
                built.insert((
                    head.with_bit(false).concat(&w),
                    head.with_bit(true).concat(&w),
                ));
            }
        }
        let listed: BTreeSet<(Word, Word)> = t_level(l)?.iter_words().collect();
        if built != listed {
            failures.push(format!(
                "level {l}: {} listed, {} built",
                listed.len(),
                built.len()
            ));
        }
        checked += 1;
    }
    for l in 0..=pairwise_top(cfg) {
        let level = t_level(l)?;
        for s in Word::all_of_length(l as usize) {
            for t in Word::all_of_length(l as usize) {
                let want = meets_template(&s, &t);
                if want != level.contains(&s, &t) || want != t_member(&s, &t) {
                    failures.push(format!("({s}, {t}): template says {want}"));
                }
                checked += 1;
            }
        }
    }
    Ok(Outcome::from_failures(checked, failures))
}

fn b_tree(cfg: &RunConfig, _: &mut ChaCha8Rng) -> Result<Outcome, CheckError> {
    let mut failures = Vec::new();
    for l in 1..=tree_top(cfg) {
        let b = b_level(l)?;
        let g = b.as_graph();
        if !b.predicates().symmetric {
            failures.push(format!("level {l}: not symmetric"));
        }
        if !is_acyclic(&g) || !is_connected(&g) {
            failures.push(format!("level {l}: not a tree"));
        }
        if undirected_edge_count(&g) as u64 != (1 << l) - 1 {
            failures.push(format!("level {l}: {} edges", undirected_edge_count(&g)));
        }
    }
    for l in 1..=pairwise_top(cfg) {
        let b = b_level(l)?;
        for s in Word::all_of_length(l as usize) {
            for t in Word::all_of_length(l as usize) {
                if b.contains(&s, &t) != b_member(&s, &t) {
                    failures.push(format!("({s}, {t}): membership disagrees"));
                }
            }
        }
    }
    Ok(Outcome::from_failures(tree_top(cfg) as u64, failures))
}

fn lift_symmetrizations(cfg: &RunConfig, _: &mut ChaCha8Rng) -> Result<Outcome, CheckError> {
    let mut failures = Vec::new();
    for l in 1..=closed_top(cfg) {
        let t0 = lift_level(LiftKind::T0, l)?;
        let u0 = lift_level(LiftKind::U0, l)?;
        let g = lift_level(LiftKind::Gsg0, l)?;
        if !is_acyclic(&t0.as_graph()) {
            failures.push(format!("level {l}: 𝕋₀ has a cycle"));
        }
        if !is_acyclic(&u0.symmetrize().as_graph()) {
            failures.push(format!("level {l}: s(𝕌₀) has a cycle"));
        }
        let (a, b, c) = (t0.symmetrize(), u0.symmetrize(), g.symmetrize());
        if a != b || b != c {
            failures.push(format!("level {l}: symmetrizations differ"));
        }
    }
    Ok(Outcome::from_failures(closed_top(cfg) as u64, failures))
}

/// Every injective path from `s` to `t`, by depth-first enumeration.
fn all_paths(adj: &BTreeMap<u64, Vec<u64>>, s: u64, t: u64) -> Vec<Vec<u64>> {
    fn go(adj: &BTreeMap<u64, Vec<u64>>, t: u64, path: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        let x = *path.last().expect("nonempty path");
        if x == t {
            out.push(path.clone());
            return;
        }
        for &y in adj.get(&x).into_iter().flatten() {
            if !path.contains(&y) {
                path.push(y);
                go(adj, t, path, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(adj, t, &mut vec![s], &mut out);
    out
}

fn adjacency(g: &FiniteGraphInstance) -> BTreeMap<u64, Vec<u64>> {
    let mut adj: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    for &(x, y) in &g.edges {
        if x != y {
            adj.entry(x).or_default().push(y);
            adj.entry(y).or_default().push(x);
        }
    }
    for v in adj.values_mut() {
        v.sort_unstable();
        v.dedup();
    }
    adj
}

fn unique_path(cfg: &RunConfig, _: &mut ChaCha8Rng) -> Result<Outcome, CheckError> {
    let mut failures = Vec::new();
    let mut checked = 0;
    for l in 1..=path_top(cfg) {
        let g = t_level(l)?.as_graph();
        let adj = adjacency(&g);
        for &s in &g.vertices {
            for &t in &g.vertices {
                let paths = all_paths(&adj, s, t);
                let got = injective_path(&g, s, t)?;
                if paths.len() != 1 || paths[0] != got {
                    failures.push(format!(
                        "level {l}, {s} → {t}: {} paths, got {got:?}",
                        paths.len()
                    ));
                }
                checked += 1;
            }
        }
    }
    Ok(Outcome::from_failures(checked, failures))
}

/// Acyclicity of the symmetrization by searching for an injective path
/// `x_0 … x_n`, `n ≥ 2`, with `x_n` adjacent to `x_0`.
fn brute_acyclic(g: &FiniteGraphInstance) -> bool {
    let adj = adjacency(g);
    for &s in &g.vertices {
        for &t in adj.get(&s).into_iter().flatten() {
            if all_paths(&adj, s, t).iter().any(|p| p.len() >= 3) {
                return false;
            }
        }
    }
    true
}

fn relations(k: u64) -> impl Iterator<Item = FiniteGraphInstance> {
    let cells: Vec<(u64, u64)> = (0..k).flat_map(|x| (0..k).map(move |y| (x, y))).collect();
    (0..1u64 << cells.len()).map(move |mask| {
        let edges = cells
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &e)| e);
        FiniteGraphInstance::new(0..k, edges)
    })
}

fn lift_lemma_exhaustive(_: &RunConfig, _: &mut ChaCha8Rng) -> Result<Outcome, CheckError> {
    let mut failures = Vec::new();
    let (mut qualifying_a, mut qualifying_b, mut checked) = (0u64, 0u64, 0u64);
    for k in 1..=3u64 {
        for a in relations(k) {
            checked += 1;
            let lift = a.g_lift();
            if is_acyclic(&a) != brute_acyclic(&a) || is_acyclic(&lift) != brute_acyclic(&lift) {
                failures.push(format!("acyclicity oracle disagrees on {:?}", a.edges));
            }
            match check_lift_acyclicity(&a, &LiftDirection::A) {
                Ok(Verdict::Holds) => qualifying_a += 1,
                Ok(Verdict::Violated(w)) => {
                    failures.push(format!("direction A: {:?} gives {w:?}", a.edges))
                }
                Err(_) => {}
            }
            // every split of the points into X0, X1 and unused
            for labels in 0..3u64.pow(k as u32) {
                let part = |v: u64| labels / 3u64.pow(v as u32) % 3;
                let x0: BTreeSet<u64> = (0..k).filter(|&v| part(v) == 0).collect();
                let x1: BTreeSet<u64> = (0..k).filter(|&v| part(v) == 1).collect();
                if !a
                    .edges
                    .iter()
                    .all(|(x, y)| x0.contains(x) && x1.contains(y))
                {
                    continue;
                }
                match check_lift_acyclicity(&a, &LiftDirection::B { x0, x1 }) {
                    Ok(Verdict::Holds) => qualifying_b += 1,
                    Ok(Verdict::Violated(w)) => {
                        failures.push(format!("direction B: {:?} gives {w:?}", a.edges))
                    }
                    Err(_) => {}
                }
            }
        }
    }
    let mut o = Outcome::from_failures(checked, failures);
    o.details["qualifying_a"] = qualifying_a.into();
    o.details["qualifying_b"] = qualifying_b.into();
    o.passed &= qualifying_a > 0 && qualifying_b > 0;
    Ok(o)
}

fn lift_negative_control(_: &RunConfig, _: &mut ChaCha8Rng) -> Result<Outcome, CheckError> {
    let closure = t_level(1)?.symmetrize().decorate(Decoration::Square)?;
    let a = closure.as_graph();
    let lift = a.g_lift();
    let witness = cycle_witness(&lift);
    let valid = witness.as_ref().is_some_and(|c| {
        let distinct: BTreeSet<_> = c.iter().collect();
        let adjacent = |x: u64, y: u64| lift.contains_edge(x, y) || lift.contains_edge(y, x);
        c.len() == 4
            && distinct.len() == 4
            && c.windows(2).all(|p| adjacent(p[0], p[1]))
            && adjacent(c[3], c[0])
    });
    let rejected = matches!(
        check_lift_acyclicity(&a, &LiftDirection::A),
        Err(PreconditionError::NeitherIrreflexiveNorAntisymmetric)
    );
    Ok(Outcome {
        passed: is_acyclic(&a) && valid && rejected,
        details: json!({
            "relation_acyclic": is_acyclic(&a),
            "lift_cycle": witness,
            "hypothesis_rejected": rejected,
        }),
    })
}

/// A connected acyclic graph `G`, an acyclic `H` and an injection `h` that is
/// a homomorphism, with extra `H` edges added only when they keep `H` acyclic.
fn random_triple(
    rng: &mut ChaCha8Rng,
) -> (FiniteGraphInstance, FiniteGraphInstance, BTreeMap<u64, u64>) {
    let k = rng.gen_range(1..=10u64);
    let mut g_edges = Vec::new();
    for v in 1..k {
        let p = rng.gen_range(0..v);
        g_edges.extend([(p, v), (v, p)]);
    }
    let g = FiniteGraphInstance::new(0..k, g_edges);
    let n = k + rng.gen_range(0..=5);
    let mut targets: Vec<u64> = (0..n).collect();
    targets.shuffle(rng);
    let h: BTreeMap<u64, u64> = (0..k).map(|x| (x, targets[x as usize])).collect();
    let mut h_graph = FiniteGraphInstance::new(0..n, g.edges.iter().map(|&(x, y)| (h[&x], h[&y])));
    for _ in 0..rng.gen_range(0..2 * n) {
        let (x, y) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if x == y {
            continue;
        }
        let mut trial = h_graph.clone();
        trial.edges.extend([(x, y), (y, x)]);
        if is_acyclic(&trial) {
            h_graph = trial;
        }
    }
    (g, h_graph, h)
}

fn edge_reflection_random(_: &RunConfig, rng: &mut ChaCha8Rng) -> Result<Outcome, CheckError> {
    let mut failures = Vec::new();
    for i in 0..REFLECTION_SAMPLES {
        let (g, h_graph, h) = random_triple(rng);
        let reflected = g.vertices.iter().all(|&x| {
            g.vertices
                .iter()
                .all(|&y| !h_graph.contains_edge(h[&x], h[&y]) || g.contains_edge(x, y))
        });
        match check_edge_reflection(&g, &h_graph, &h) {
            Ok(v) if v.holds() && reflected => {}
            other => failures.push(format!("sample {i}: {other:?}, direct {reflected}")),
        }
    }
    Ok(Outcome::from_failures(REFLECTION_SAMPLES as u64, failures))
}

fn decorations(cfg: &RunConfig, _: &mut ChaCha8Rng) -> Result<Outcome, CheckError> {
    let mut failures = Vec::new();
    let mut checked = 0;
    for l in 1..=pairwise_top(cfg) {
        let bases: [(&str, LevelRelation); 3] = [
            ("𝒯", t_level(l)?),
            ("𝔹₀", lift_level(LiftKind::B0, l)?),
            ("B", b_level(l)?),
        ];
        for (name, r) in &bases {
            checked += 1;
            let square = r.decorate(Decoration::Square)?;
            if !square.predicates().reflexive {
                failures.push(format!("{name}_{l}^□ is not reflexive"));
            }
            if r.predicates().antisymmetric {
                for e in [
                    Decoration::Equal,
                    Decoration::Square,
                    Decoration::Left,
                    Decoration::Right,
                ] {
                    if !r.decorate(e)?.predicates().antisymmetric {
                        failures.push(format!("{name}_{l} loses antisymmetry under {e:?}"));
                    }
                }
            }
            if square.symmetrize() != r.symmetrize().decorate(Decoration::Square)? {
                failures.push(format!("s({name}_{l}^□) ≠ s({name}_{l})^□"));
            }
        }
    }
    Ok(Outcome::from_failures(checked, failures))
}

fn d_acyclic(cfg: &RunConfig, _: &mut ChaCha8Rng) -> Result<Outcome, CheckError> {
    let frame = StandardFrame::unbounded();
    let mut failures = Vec::new();
    for l in 1..=closed_top(cfg) {
        if let Some(c) = cycle_witness(&d_level(&frame, l)?.as_graph()) {
            failures.push(format!("D_{l}: cycle {c:?}"));
        }
    }
    Ok(Outcome::from_failures(closed_top(cfg) as u64, failures))
}
