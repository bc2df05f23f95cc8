use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::{Check, CheckError, FnCheck, Outcome, RunConfig};
use crate::ideals::{
    assemble_section_reduction, fin_member, i3_member, ideal_member, transfer_injection,
    vertical_invariance_check, EpPoint, IdealExpr, LeafIdeal, Membership, TransferError,
};
use crate::words::{fst, pair, phi, phi_inv, snd, PairCode, Word};

const I3_SAMPLES: usize = 1000;
const TRANSFER_SAMPLES: usize = 100;
const TRUNCATION_SAMPLES: usize = 500;
const XOR_SAMPLES: usize = 300;
const INVARIANCE_SAMPLES: usize = 200;
const HIERARCHY_SAMPLES: usize = 300;
const ASSEMBLY_LEN: usize = 64;

pub(super) fn checks() -> Vec<Arc<dyn Check>> {
    vec![
        FnCheck::boxed(
            "ideals.i3-truncation-scan",
            "i3_member agrees with scanning far windows of the columns (x)_n",
            |_| json!({ "samples": I3_SAMPLES, "max_prefix": 8, "max_period": 6, "columns": 51, "window": [1000, 2000] }),
            i3_truncation_scan,
        ),
        FnCheck::boxed(
            "ideals.transfer-injection",
            "the transferred injection is injective, keeps columns and satisfies φ(n, I(p)) = i(φ(n, p))",
            |_| json!({ "samples": TRANSFER_SAMPLES, "max_domain": 200, "max_n": 5 }),
            transfer,
        ),
        FnCheck::boxed(
            "ideals.truncation-properties",
            "sections are monotone and commute with pointwise max, and finite points have finite sections",
            |_| json!({ "samples": TRUNCATION_SAMPLES, "max_n": 8, "length": 64 }),
            truncation_properties,
        ),
        FnCheck::boxed(
            "ideals.section-assembly",
            "the assembled map satisfies ^n(f(α)) = f_n(α) on the truncation",
            |cfg| json!({ "max_n": 4, "length": ASSEMBLY_LEN, "inputs": assembly_inputs(cfg) }),
            section_assembly,
        ),
        FnCheck::boxed(
            "ideals.xor-laws",
            "Δ is pointwise, commutative, associative and an involution on canonical points",
            |_| json!({ "samples": XOR_SAMPLES }),
            xor_laws,
        ),
        FnCheck::boxed(
            "ideals.vertical-invariance",
            "FIN and 𝕀₃ membership is preserved by column-preserving injections",
            |_| json!({ "samples": INVARIANCE_SAMPLES, "max_support": 50 }),
            vertical_invariance,
        ),
        FnCheck::boxed(
            "ideals.hierarchy-scan",
            "exact verdicts for FIN^m and FIN^a agree with scanning the sections ^n(x)",
            |_| json!({ "samples": HIERARCHY_SAMPLES, "sections": 64, "window": [400, 800] }),
            hierarchy_scan,
        ),
    ]
}

fn random_word(rng: &mut ChaCha8Rng, len: usize) -> Word {
    Word::from_bits((0..len).map(|_| rng.gen_bool(0.5)))
}

/// `|prefix| ≤ 8`, `1 ≤ |period| ≤ 6`; one in four is finitely supported.
fn random_ep(rng: &mut ChaCha8Rng) -> EpPoint {
    let len = rng.gen_range(0..=8);
    let prefix = random_word(rng, len);
    let k = rng.gen_range(1..=6);
    let period = if rng.gen_ratio(1, 4) {
        Word::zeros(k)
    } else {
        random_word(rng, k)
    };
    EpPoint::new(prefix, period).expect("nonempty period")
}

/// Whether `bit(p) = 1` for some `p` in the window; past the prefix the bits
/// repeat on a lattice much finer than the window, so this decides whether
/// there are infinitely many ones.
fn hot(window: std::ops::Range<u64>, bit: impl Fn(u64) -> bool) -> bool {
    window.into_iter().any(bit)
}

fn i3_truncation_scan(_: &RunConfig, rng: &mut ChaCha8Rng) -> Result<Outcome, CheckError> {
    let mut failures = Vec::new();
    let mut members = 0;
    for _ in 0..I3_SAMPLES {
        let x = random_ep(rng);
        let mut out = false;
        for n in 0..=50 {
            if hot(1000..2000, |p| x.eval(pair(n, p).expect("small pair").0)) {
                out = true;
                break;
            }
        }
        let want = Membership::from_bool(!out);
        members += !out as u64;
        if i3_member(&x) != want {
            failures.push(format!("{x}: scan says {want:?}"));
        }
    }
    let mut o = Outcome::from_failures(I3_SAMPLES as u64, failures);
    o.details["members"] = members.into();
    Ok(o)
}

/// A random injection with `(i(m))_0 = (m)_0`, half of whose domain is in
/// the range of `φ(n, ·)`.
fn random_admissible(rng: &mut ChaCha8Rng, n: u64) -> BTreeMap<u64, u64> {
    let size = rng.gen_range(1..=200);
    let mut i = BTreeMap::new();
    let mut used = BTreeSet::new();
    while i.len() < size {
        let m = if rng.gen_bool(0.5) {
            phi(n, rng.gen_range(0..400)).expect("small φ").0
        } else {
            rng.gen_range(0..20_000)
        };
        if i.contains_key(&m) {
            continue;
        }
        let image = loop {
            let cand = pair(fst(m), rng.gen_range(0..400)).expect("small pair").0;
            if used.insert(cand) {
                break cand;
            }
        };
        i.insert(m, image);
    }
    i
}

fn transfer(_: &RunConfig, rng: &mut ChaCha8Rng) -> Result<Outcome, CheckError> {
    let mut failures = Vec::new();
    let mut checked = 0;
    for sample in 0..TRANSFER_SAMPLES {
        let n = rng.gen_range(0..=5);
        let i = random_admissible(rng, n);
        let big = transfer_injection(&i, n)?;
        let expected: BTreeSet<u64> = i
            .keys()
            .map(|&m| phi_inv(PairCode(m)))
            .filter(|&(k, _)| k == n)
            .map(|(_, p)| p)
            .collect();
        if big.keys().copied().collect::<BTreeSet<_>>() != expected {
            failures.push(format!("sample {sample}: domain of I"));
        }
        let images: BTreeSet<u64> = big.values().copied().collect();
        if images.len() != big.len() {
            failures.push(format!("sample {sample}: I is not injective"));
        }
        for (&p, &ip) in &big {
            checked += 1;
            if fst(ip) != fst(p) || Some(&phi(n, ip)?.0) != i.get(&phi(n, p)?.0) {
                failures.push(format!("sample {sample}, n = {n}: p = {p}, I(p) = {ip}"));
            }
        }
        // a column violation must be rejected
        let (&m, &im) = i.iter().next().expect("nonempty");
        let mut bad = i.clone();
        bad.insert(m, pair(fst(m) + 1, snd(im))?.0);
        if !matches!(
            transfer_injection(&bad, n),
            Err(TransferError::ColumnViolation { .. })
        ) {
            failures.push(format!("sample {sample}: column violation accepted"));
        }
    }
    Ok(Outcome::from_failures(checked, failures))
}

fn word_le(a: &Word, b: &Word) -> bool {
    (0..a.len()).all(|i| !a.get(i) || b.get(i))
}

fn word_or(a: &Word, b: &Word) -> Word {
    Word::from_bits((0..a.len()).map(|i| a.get(i) || b.get(i)))
}

fn truncation_properties(_: &RunConfig, rng: &mut ChaCha8Rng) -> Result<Outcome, CheckError> {
    const LEN: usize = 64;
    let mut failures = Vec::new();
    for sample in 0..TRUNCATION_SAMPLES {
        let xs: Vec<EpPoint> = (0..rng.gen_range(1..=3)).map(|_| random_ep(rng)).collect();
        let x = &xs[0];
        let y = EpPoint::max(&xs)?;
        if !x.le(&y) {
            failures.push(format!("sample {sample}: x ≰ max"));
        }
        for n in 0..=8 {
            for (name, section) in [
                (
                    "vertical",
                    EpPoint::select_vertical as fn(&EpPoint, u64, usize) -> _,
                ),
                ("phi", EpPoint::select_phi),
            ] {
                let sx = section(x, n, LEN)?;
                let sy = section(&y, n, LEN)?;
                if !word_le(&sx, &sy) {
                    failures.push(format!("sample {sample}: {name} section {n} not monotone"));
                }
                let mut joined = Word::zeros(LEN);
                for z in &xs {
                    joined = word_or(&joined, &section(z, n, LEN)?);
                }
                if joined != sy {
                    failures.push(format!("sample {sample}: {name} section {n} of max"));
                }
                if x.is_finitely_supported() {
                    let position = |p: u64| match name {
                        "vertical" => pair(n, p),
                        _ => phi(n, p),
                    };
                    for p in 0..LEN as u64 {
                        if sx.get(p as usize) && position(p)?.0 >= x.prefix().len() as u64 {
                            failures.push(format!(
                                "sample {sample}: {name} section {n} of a finite point"
                            ));
                        }
                    }
                }
            }
        }
    }
    Ok(Outcome::from_failures(TRUNCATION_SAMPLES as u64, failures))
}

fn assembly_inputs(cfg: &RunConfig) -> u32 {
    4 * cfg.depth.min(10)
}

fn section_assembly(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> Result<Outcome, CheckError> {
    let mut failures = Vec::new();
    let mut checked = 0;
    let sections_needed = (0..ASSEMBLY_LEN as u64)
        .map(|q| phi_inv(PairCode(q)).0)
        .max()
        .unwrap_or(0)
        + 1;
    let masks: Vec<Word> = (0..sections_needed)
        .map(|_| random_word(rng, ASSEMBLY_LEN))
        .collect();
    let shifts: Vec<usize> = (0..sections_needed).map(|_| rng.gen_range(0..8)).collect();
    let sections: Vec<Box<dyn Fn(&Word) -> Word>> = masks
        .iter()
        .zip(&shifts)
        .map(|(mask, &shift)| {
            let mask = mask.clone();
            Box::new(move |x: &Word| {
                Word::from_bits(
                    (0..ASSEMBLY_LEN).map(|i| x.get((i + shift) % ASSEMBLY_LEN) != mask.get(i)),
                )
            }) as Box<dyn Fn(&Word) -> Word>
        })
        .collect();
    for _ in 0..assembly_inputs(cfg) {
        let x = random_word(rng, ASSEMBLY_LEN);
        let out = assemble_section_reduction(&sections, &x, ASSEMBLY_LEN)?;
        for n in 0..=4u64 {
            let fx = sections[n as usize](&x);
            for p in 0..ASSEMBLY_LEN as u64 {
                let q = phi(n, p)?.0 as usize;
                if q < ASSEMBLY_LEN {
                    checked += 1;
                    if out.get(q) != fx.get(p as usize) {
                        failures.push(format!("x = {x}: ^{n}(f(x))({p}) ≠ f_{n}(x)({p})"));
                    }
                }
            }
        }
    }
    Ok(Outcome::from_failures(checked, failures))
}

fn xor_laws(_: &RunConfig, rng: &mut ChaCha8Rng) -> Result<Outcome, CheckError> {
    let mut failures = Vec::new();
    for sample in 0..XOR_SAMPLES {
        let (x, y, z) = (random_ep(rng), random_ep(rng), random_ep(rng));
        let xy = x.xor(&y);
        if (0..200).any(|q| xy.eval(q) != (x.eval(q) != y.eval(q))) {
            failures.push(format!(
                "sample {sample}: {x} Δ {y} = {xy} is not pointwise"
            ));
        }
        if xy != y.xor(&x) || xy.xor(&y) != x || x.xor(&x) != EpPoint::zero() {
            failures.push(format!("sample {sample}: commutativity or involution"));
        }
        if xy.xor(&z) != x.xor(&y.xor(&z)) {
            failures.push(format!("sample {sample}: associativity"));
        }
        // canonical forms: unrolling the period once changes nothing
        let unrolled = EpPoint::new(x.prefix().concat(x.period()), x.period().concat(x.period()))?;
        if unrolled != x {
            failures.push(format!("sample {sample}: {x} is not canonical"));
        }
    }
    Ok(Outcome::from_failures(XOR_SAMPLES as u64, failures))
}

fn vertical_invariance(_: &RunConfig, rng: &mut ChaCha8Rng) -> Result<Outcome, CheckError> {
    let mut failures = Vec::new();
    for sample in 0..INVARIANCE_SAMPLES {
        // a column-preserving injection defined on 0..50
        let mut used = BTreeSet::new();
        let mut i = BTreeMap::new();
        for m in 0..50u64 {
            let image = loop {
                let cand = pair(fst(m), rng.gen_range(0..200))?.0;
                if used.insert(cand) {
                    break cand;
                }
            };
            i.insert(m, image);
        }
        let xs: Vec<EpPoint> = (0..5)
            .map(|_| {
                let len = rng.gen_range(0..=50);
                EpPoint::finite(&random_word(rng, len))
            })
            .collect();
        for ideal in [LeafIdeal::Fin, LeafIdeal::I3] {
            let report = vertical_invariance_check(ideal, &i, &xs)?;
            if !report.passed() {
                failures.push(format!("sample {sample}: {:?}", report.asymmetries));
            }
        }
        for x in &xs {
            if fin_member(x) != Membership::In || i3_member(x) != Membership::In {
                failures.push(format!("sample {sample}: finite {x} not in FIN and 𝕀₃"));
            }
        }
    }
    Ok(Outcome::from_failures(INVARIANCE_SAMPLES as u64, failures))
}

fn hierarchy_scan(_: &RunConfig, rng: &mut ChaCha8Rng) -> Result<Outcome, CheckError> {
    let m_fin = IdealExpr::m(IdealExpr::Fin);
    let a_fin = IdealExpr::a(IdealExpr::Fin);
    let mut failures = Vec::new();
    let mut unknown = 0;
    for _ in 0..HIERARCHY_SAMPLES {
        let x = random_ep(rng);
        let hot_sections: Vec<bool> = (0..64)
            .map(|n| hot(400..800, |p| x.eval(phi(n, p).expect("small φ").0)))
            .collect();
        let want_m = Membership::from_bool(!hot_sections.iter().any(|&h| h));
        let want_a = Membership::from_bool(!hot_sections[32..].iter().any(|&h| h));
        for (e, want) in [(&m_fin, want_m), (&a_fin, want_a)] {
            match ideal_member(e, &x, 64) {
                Membership::Unknown { .. } => unknown += 1,
                got if got != want => {
                    failures.push(format!("{x}: {e:?} gives {got:?}, scan {want:?}"))
                }
                _ => {}
            }
        }
    }
    let mut o = Outcome::from_failures(2 * HIERARCHY_SAMPLES as u64, failures);
    o.details["unknown"] = unknown.into();
    Ok(o)
}
