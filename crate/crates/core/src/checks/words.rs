use std::sync::Arc;

use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::{Check, CheckError, FnCheck, Outcome, RunConfig};
use crate::words::{fst, m_of, pair, phi, phi_inv, psi, psi_inv, sn, snd, unpair, PairCode, Word};

const SN_RANGE: u64 = 100_000;
const PAIR_SIDE: u64 = 1_000;
const CODE_RANGE: u64 = 1_000_000;

pub(super) fn checks() -> Vec<Arc<dyn Check>> {
    vec![
        FnCheck::boxed(
            "words.sn-length",
            "|s_n| = n and ψ(n) is the n-th word in length-then-lexicographic order",
            |_| json!({ "n_below": SN_RANGE }),
            sn_length,
        ),
        FnCheck::boxed(
            "words.sn-density",
            "s_{ψ⁻¹(s)} extends s for every short word s",
            |cfg| json!({ "max_len": density_len(cfg) }),
            sn_density,
        ),
        FnCheck::boxed(
            "words.pair-enumeration",
            "⟨·,·⟩ and its inverse agree with walking the diagonals in order",
            |_| json!({ "codes_below": CODE_RANGE }),
            pair_enumeration,
        ),
        FnCheck::boxed(
            "words.pair-round-trip",
            "unpair∘pair = id on a square and pair∘unpair = id on an initial segment",
            |_| json!({ "side": PAIR_SIDE, "codes_below": CODE_RANGE }),
            pair_round_trip,
        ),
        FnCheck::boxed(
            "words.phi-round-trip",
            "φ⁻¹∘φ = id on a square and φ∘φ⁻¹ = id on an initial segment",
            |_| json!({ "side": PAIR_SIDE, "codes_below": CODE_RANGE }),
            phi_round_trip,
        ),
        FnCheck::boxed(
            "words.m-of-sum",
            "M(l) = (l)_0 + (l)_1",
            |_| json!({ "l_below": CODE_RANGE }),
            m_of_sum,
        ),
        FnCheck::boxed(
            "words.pair-successor",
            "⟨p+1, m⟩ + 1 = ⟨p, m+1⟩",
            |_| json!({ "side": PAIR_SIDE }),
            pair_successor,
        ),
    ]
}

fn density_len(cfg: &RunConfig) -> usize {
    (cfg.depth as usize + 4).min(14)
}

fn sn_length(_: &RunConfig, _: &mut ChaCha8Rng) -> Result<Outcome, CheckError> {
    let mut failures = Vec::new();
    let mut len = 0usize;
    let mut rank = 0u64;
    for n in 0..SN_RANGE {
        // ψ(n) is the rank-th word of length len
        if rank == 1 << len {
            len += 1;
            rank = 0;
        }
        let p = psi(n);
        if p != Word::from_index(rank, len) || p.len() as u64 > n {
            failures.push(format!("ψ({n}) = {p}"));
        }
        if sn(n).len() as u64 != n {
            failures.push(format!("|s_{n}| = {}", sn(n).len()));
        }
        rank += 1;
    }
    Ok(Outcome::from_failures(SN_RANGE, failures))
}

fn sn_density(cfg: &RunConfig, _: &mut ChaCha8Rng) -> Result<Outcome, CheckError> {
    let mut failures = Vec::new();
    let mut checked = 0;
    for l in 0..=density_len(cfg) {
        for s in Word::all_of_length(l) {
            let n = psi_inv(&s)?;
            if !s.is_prefix_of(&sn(n)) {
                failures.push(format!("s_{n} does not extend {s}"));
            }
            checked += 1;
        }
    }
    Ok(Outcome::from_failures(checked, failures))
}

fn pair_enumeration(_: &RunConfig, _: &mut ChaCha8Rng) -> Result<Outcome, CheckError> {
    let mut failures = Vec::new();
    let (mut n, mut p) = (0u64, 0u64);
    for q in 0..CODE_RANGE {
        let code = pair(n, p)?.0;
        if code != q || unpair(PairCode(q)) != (n, p) {
            failures.push(format!("code {q} should be ⟨{n}, {p}⟩"));
        }
        // along a diagonal n falls and p rises
        if n == 0 {
            n = p + 1;
            p = 0;
        } else {
            n -= 1;
            p += 1;
        }
    }
    Ok(Outcome::from_failures(CODE_RANGE, failures))
}

fn pair_round_trip(_: &RunConfig, _: &mut ChaCha8Rng) -> Result<Outcome, CheckError> {
    let mut failures = Vec::new();
    for n in 0..=PAIR_SIDE {
        for p in 0..=PAIR_SIDE {
            if unpair(pair(n, p)?) != (n, p) {
                failures.push(format!("unpair(⟨{n}, {p}⟩)"));
            }
        }
    }
    for q in 0..=CODE_RANGE {
        let (a, b) = unpair(PairCode(q));
        if pair(a, b)?.0 != q || fst(q) != a || snd(q) != b {
            failures.push(format!("pair(unpair({q}))"));
        }
    }
    let checked = (PAIR_SIDE + 1).pow(2) + CODE_RANGE + 1;
    Ok(Outcome::from_failures(checked, failures))
}

fn phi_round_trip(_: &RunConfig, _: &mut ChaCha8Rng) -> Result<Outcome, CheckError> {
    let mut failures = Vec::new();
    for n in 0..=PAIR_SIDE {
        for p in 0..=PAIR_SIDE {
            if phi_inv(phi(n, p)?) != (n, p) {
                failures.push(format!("φ⁻¹(φ({n}, {p}))"));
            }
        }
    }
    for q in 0..=CODE_RANGE {
        let (n, p) = phi_inv(PairCode(q));
        if phi(n, p)?.0 != q {
            failures.push(format!("φ(φ⁻¹({q}))"));
        }
    }
    let checked = (PAIR_SIDE + 1).pow(2) + CODE_RANGE + 1;
    Ok(Outcome::from_failures(checked, failures))
}

fn m_of_sum(_: &RunConfig, _: &mut ChaCha8Rng) -> Result<Outcome, CheckError> {
    let mut failures = Vec::new();
    // l lies on diagonal d while d(d+1)/2 ≤ l < (d+1)(d+2)/2
    let (mut d, mut next) = (0u64, 1u64);
    for l in 0..CODE_RANGE {
        if l == next {
            d += 1;
            next += d + 1;
        }
        let (a, b) = unpair(PairCode(l));
        if m_of(l) != d || a + b != d {
            failures.push(format!(
                "M({l}) = {}, (l)_0 + (l)_1 = {}, diagonal {d}",
                m_of(l),
                a + b
            ));
        }
    }
    Ok(Outcome::from_failures(CODE_RANGE, failures))
}

fn pair_successor(_: &RunConfig, _: &mut ChaCha8Rng) -> Result<Outcome, CheckError> {
    let mut failures = Vec::new();
    for p in 0..PAIR_SIDE {
        for m in 0..PAIR_SIDE {
            if pair(p + 1, m)?.0 + 1 != pair(p, m + 1)?.0 {
                failures.push(format!("⟨{}, {m}⟩ + 1 ≠ ⟨{p}, {}⟩", p + 1, m + 1));
            }
        }
    }
    Ok(Outcome::from_failures(PAIR_SIDE * PAIR_SIDE, failures))
}
