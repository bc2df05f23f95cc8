use levelcert::constructors::oracles::{OracleError, OracleRegistry};
use levelcert::constructors::{reference_oracle, EngineContext, EngineRegistry, PartialEmbedding};
use levelcert::words::{sn, w, Word};
use serde_json::{json, Value};

const BOUND: u64 = 1 << 16;

fn ctx(oracle: &Value) -> EngineContext {
    let handle = OracleRegistry::standard().from_json(oracle, BOUND).unwrap();
    EngineContext::from_oracle(&handle)
}

fn reference(engine: &str) -> EngineContext {
    ctx(&reference_oracle(engine).unwrap())
}

fn construct(engine: &str, ctx: &EngineContext, depth: u32) -> PartialEmbedding {
    EngineRegistry::standard()
        .get(engine)
        .unwrap()
        .construct(ctx, depth)
        .unwrap()
}

fn passes(engine: &str, emb: &PartialEmbedding, ctx: &EngineContext) -> bool {
    EngineRegistry::standard()
        .get(engine)
        .unwrap()
        .verify(emb, ctx)
        .passed()
}

/// Every single-bit corruption must be rejected.
fn assert_mutations_caught(engine: &str, emb: &PartialEmbedding, ctx: &EngineContext) {
    let sites = emb.mutation_sites();
    assert!(!sites.is_empty());
    for m in &sites {
        assert!(
            !passes(engine, &emb.mutated(m), ctx),
            "{engine}: {m:?} went unnoticed"
        );
    }
}

/// Least `d ≥ lo` with `s_d` extending `p`, by walking `d` upward.
fn scan_extension(p: &Word, lo: u64) -> u64 {
    (lo..lo + 100_000)
        .find(|&d| p.is_prefix_of(&sn(d)))
        .expect("dense")
}

fn is_identity(emb: &PartialEmbedding) -> bool {
    emb.psi.iter().all(|(s, img)| s == img)
}

// Oracles under which the schemes must pad: each listed box can be escaped by
// appending zeros to the images built so far.
fn g0_boxes() -> Value {
    json!({
        "kind": "complement-of-boxes",
        "family": "boxes",
        "levels": { "0": [["0", "0001"], ["1", "0001"]], "2": [["00001", "1"]] },
    })
}

fn b0_boxes() -> Value {
    json!({
        "kind": "complement-of-boxes",
        "family": "boxes",
        "levels": { "0": [["01", "1"]], "1": [["1", "01"]], "3": [["001", "0001"]] },
    })
}

#[test]
fn registry_lists_the_four_engines() {
    let names: Vec<_> = EngineRegistry::standard().names().collect();
    assert_eq!(
        names,
        [
            "b0-scheme",
            "g0-scheme",
            "transfer-labels",
            "tree-interleave"
        ]
    );
    for name in names {
        assert!(reference_oracle(name).is_some());
    }
    assert!(EngineRegistry::standard().get("nope").is_err());
}

#[test]
fn oracle_registry_parses_and_rejects() {
    let reg = OracleRegistry::standard();
    let kinds: Vec<_> = reg.names().collect();
    assert_eq!(
        kinds,
        ["avoid-ep-points", "complement-of-boxes", "full-space"]
    );
    let h = reg
        .from_json(&json!({ "kind": "full-space", "bound": 7 }), BOUND)
        .unwrap();
    assert_eq!(h.line_oracle().unwrap().bound(), 7);
    assert_eq!(h.box_oracle().unwrap().bound(), 7);
    let h = reg.from_json(&g0_boxes(), BOUND).unwrap();
    assert!(h.line_oracle().is_err());
    assert!(matches!(
        reg.from_json(&json!({ "kind": "x" }), 1),
        Err(OracleError::UnknownKind(_))
    ));
    assert!(reg.from_json(&json!({ "family": "boxes" }), 1).is_err());
    let bad_family = json!({ "kind": "complement-of-boxes", "family": "nope" });
    assert!(matches!(
        reg.from_json(&bad_family, 1),
        Err(OracleError::Params(_))
    ));
    let bad_point =
        json!({ "kind": "avoid-ep-points", "points": [{ "prefix": "0", "period": "2" }] });
    assert!(reg.from_json(&bad_point, 1).is_err());
}

#[test]
fn reference_schemes_are_the_identity() {
    for engine in ["g0-scheme", "b0-scheme", "tree-interleave"] {
        let c = reference(engine);
        let emb = construct(engine, &c, 6);
        assert!(is_identity(&emb), "{engine}");
        assert!(passes(engine, &emb, &c), "{engine}");
        assert_eq!(emb.k, (0..=6).collect::<Vec<u64>>(), "{engine}");
    }
    assert_eq!(
        construct("g0-scheme", &reference("g0-scheme"), 6).delta,
        [0, 1, 2, 3, 4, 5]
    );
    assert_eq!(
        construct("b0-scheme", &reference("b0-scheme"), 6).delta,
        [0, 1, 2, 3, 4, 5]
    );
    assert_eq!(
        construct("tree-interleave", &reference("tree-interleave"), 6).delta,
        [0; 6]
    );
}

#[test]
fn g0_scheme_pads_and_picks_least_dense_index() {
    let c = ctx(&g0_boxes());
    let emb = construct("g0-scheme", &c, 5);
    assert!(!is_identity(&emb));
    assert!(passes("g0-scheme", &emb, &c));
    for l in 0..5 {
        let lo = emb.delta[..l]
            .iter()
            .map(|d| d + 1)
            .max()
            .unwrap_or(0)
            .max(emb.k[l]);
        let want = scan_extension(&emb.psi[&sn(l as u64)], lo);
        assert_eq!(emb.delta[l], want, "δ({l})");
        assert!(emb.k[l + 1] > emb.delta[l]);
    }
    for (s, img) in &emb.psi {
        assert_eq!(img.len() as u64, emb.k[s.len()], "Ψ({s})");
    }
    assert_mutations_caught("g0-scheme", &emb, &c);
}

#[test]
fn b0_scheme_keeps_the_first_bit() {
    let c = ctx(&b0_boxes());
    let emb = construct("b0-scheme", &c, 5);
    assert!(!is_identity(&emb));
    assert!(passes("b0-scheme", &emb, &c));
    assert_eq!(emb.delta[0], 0);
    for l in 1..5u64 {
        let key = w("0").concat(&sn(l - 1));
        let target = emb.psi[&key].suffix_from(1);
        let lo = emb.delta[l as usize - 1];
        assert_eq!(
            emb.delta[l as usize],
            1 + scan_extension(&target, lo),
            "δ({l})"
        );
    }
    for (s, img) in &emb.psi {
        if !s.is_empty() {
            assert_eq!(img.get(0), s.get(0), "Ψ({s})");
        }
    }
    assert_mutations_caught("b0-scheme", &emb, &c);
}

#[test]
fn tree_interleave_is_zero_interleaving() {
    let c = ctx(&b0_boxes());
    let emb = construct("tree-interleave", &c, 4);
    assert!(passes("tree-interleave", &emb, &c));
    for (s, img) in &emb.psi {
        let mut want = Word::new();
        for i in 0..s.len() {
            want.push(s.get(i));
            want.push_zeros(emb.delta[i] as usize);
        }
        assert_eq!(img, &want, "f({s})");
    }
    // k_m counts the bits laid down before position m
    for m in 0..=4 {
        let k: u64 = emb.delta[..m].iter().map(|d| d + 1).sum();
        assert_eq!(emb.k[m], k);
    }
    assert_mutations_caught("tree-interleave", &emb, &c);
}

#[test]
fn reference_scheme_mutations_are_caught() {
    for engine in ["g0-scheme", "b0-scheme", "tree-interleave"] {
        let c = reference(engine);
        assert_mutations_caught(engine, &construct(engine, &c, 4), &c);
    }
}

#[test]
fn transfer_labels_start_values() {
    let c = reference("transfer-labels");
    let emb = construct("transfer-labels", &c, 3);
    assert!(passes("transfer-labels", &emb, &c));
    assert_eq!(emb.n.as_ref().unwrap().0, 1u32.into());
    assert_eq!(emb.labels[&Word::new()].0, 2u32.into());
    assert_eq!(emb.labels.len(), 15);
    // labels strictly grow along every branch
    for (s, l) in &emb.labels {
        if !s.is_empty() {
            assert!(emb.labels[&s.prefix(s.len() - 1)].0 < l.0, "l({s})");
        }
    }
}

#[test]
fn transfer_labels_depth_six_full_space() {
    let c = reference("transfer-labels");
    let emb = construct("transfer-labels", &c, 6);
    assert!(passes("transfer-labels", &emb, &c));
    assert_eq!(emb.labels.len(), 127);
}

#[test]
fn transfer_labels_avoiding_points() {
    let oracle = json!({
        "kind": "avoid-ep-points",
        "points": [
            { "prefix": "", "period": "0" },
            { "prefix": "0", "period": "1" },
            { "prefix": "1", "period": "01" },
        ],
    });
    let c = ctx(&oracle);
    let plain = construct("transfer-labels", &reference("transfer-labels"), 2);
    let emb = construct("transfer-labels", &c, 2);
    assert!(passes("transfer-labels", &emb, &c));
    assert_ne!(emb.labels, plain.labels);
    assert_mutations_caught("transfer-labels", &emb, &c);
}

#[test]
fn depth_zero_is_vacuous() {
    for engine in EngineRegistry::standard().names() {
        let c = reference(engine);
        let emb = construct(engine, &c, 0);
        assert!(passes(engine, &emb, &c), "{engine}");
        assert!(emb.psi.len() <= 1 && emb.labels.len() <= 1, "{engine}");
    }
}

#[test]
fn missing_oracle_is_an_error() {
    let line_only = ctx(&json!({ "kind": "avoid-ep-points", "points": [] }));
    assert!(EngineRegistry::standard()
        .get("g0-scheme")
        .unwrap()
        .construct(&line_only, 2)
        .is_err());
    let boxes_only = ctx(&g0_boxes());
    assert!(EngineRegistry::standard()
        .get("transfer-labels")
        .unwrap()
        .construct(&boxes_only, 2)
        .is_err());
}

#[test]
fn construction_is_deterministic_and_round_trips() {
    for engine in EngineRegistry::standard().names() {
        let c = reference(engine);
        let a = construct(engine, &c, 3);
        let b = construct(engine, &c, 3);
        assert_eq!(a.to_json(), b.to_json());
        let back: PartialEmbedding = serde_json::from_str(&a.to_json()).unwrap();
        assert_eq!(back, a);
    }
}

#[test]
fn wrong_kind_fails_verification() {
    let c = reference("g0-scheme");
    let mut emb = construct("g0-scheme", &c, 3);
    emb.psi.remove(&w("010"));
    assert!(!passes("g0-scheme", &emb, &c));
    let mut emb = construct("g0-scheme", &c, 3);
    emb.depth = 4;
    assert!(!passes("g0-scheme", &emb, &c));
}
