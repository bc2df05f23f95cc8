//! Labels `l : 2^{≤depth} → ω ∖ {0}` naming frame entries so that
//! `(u_{l(wε)}, v_{l(wε)}) = (u_{l(w)} 0 z, v_{l(w)} ε z)`, `(l(w))_0 = (|w|)_0`,
//! the `u`-sides grow along the `ψ` enumeration, and every entry lies in the
//! open set of its level. Then `α = sup u_{l(0^q)}` and `F(β) = sup v_{l(β|q)}`
//! differ above `n` exactly at `{l(β|m) : β(m) = 1}`.
//!
//! Labels outgrow 64 bits after a couple of levels, so entries are handled as
//! [`SparseWord`]s over the standard frame in arbitrary precision.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::{
    level, Engine, EngineContext, EngineError, Label, PartialEmbedding, Tally, VerifyReport,
};
use crate::frames::{
    minimal_extension, t_tree_member, BigFrame, FrameError, StandardFrame, MAX_PSI_BITS,
};
use crate::sparse::SparseWord;
use crate::words::{big, fst, psi, Word};

pub struct TransferLabels;

const NAME: &str = "transfer-labels";

/// `(u_{l(w)}, v_{l(w)})` for every labelled `w`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelEntries {
    pub entries: BTreeMap<Word, (SparseWord, SparseWord)>,
}

impl LabelEntries {
    /// `u_{l(0^q)}`, an initial segment of `α`.
    pub fn alpha_prefix(&self, q: usize) -> Option<&SparseWord> {
        self.entries.get(&Word::zeros(q)).map(|(u, _)| u)
    }

    /// `v_{l(β)}`, an initial segment of `F(β)`.
    pub fn image_prefix(&self, beta: &Word) -> Option<&SparseWord> {
        self.entries.get(beta).map(|(_, v)| v)
    }
}

fn big_fst(l: &BigUint) -> BigUint {
    big::unpair(l).0
}

fn sparse(w: &Word) -> SparseWord {
    SparseWord::from_word(w)
}

fn with_bit(s: &SparseWord, b: bool) -> SparseWord {
    let mut s = s.clone();
    s.push(b);
    s
}

/// `(u', v')`, its branch point and its tail.
fn start_pair(u: &Word, v: &Word) -> Result<(Word, Word, u64, Word), EngineError> {
    let not_in_tree = || EngineError::NotInTree {
        u: u.to_string(),
        v: v.to_string(),
    };
    let (u1, v1) = if u.is_empty() && v.is_empty() {
        ("0".parse().unwrap(), "1".parse().unwrap())
    } else {
        (u.clone(), v.clone())
    };
    if !t_tree_member(&StandardFrame::unbounded(), &u1, &v1) {
        return Err(not_in_tree());
    }
    let q = u1.last_difference(&v1).ok_or_else(not_in_tree)?;
    let tail = u1.suffix_from(q + 1);
    Ok((u1, v1, q as u64, tail))
}

impl TransferLabels {
    /// Re-derive every labelled entry from the frame.
    pub fn entries(emb: &PartialEmbedding) -> Result<LabelEntries, FrameError> {
        let entries = emb
            .labels
            .iter()
            .map(|(w, l)| Ok((w.clone(), BigFrame.entry(&l.0)?)))
            .collect::<Result<_, FrameError>>()?;
        Ok(LabelEntries { entries })
    }
}

impl Engine for TransferLabels {
    fn name(&self) -> &'static str {
        NAME
    }

    fn role(&self) -> &'static str {
        "frame labels l(w) witnessing a transfer triple inside a dense G-delta set"
    }

    fn construct(&self, ctx: &EngineContext, depth: u32) -> Result<PartialEmbedding, EngineError> {
        let line = ctx.line_oracle(NAME)?;
        let (u, v) = &ctx.uv;
        let (u1, v1, q0, tail0) = start_pair(u, v)?;
        let core0 = tail0.prefix(tail0.trimmed_len());
        let l0 = minimal_extension(
            &BigUint::from(q0),
            &core0,
            &BigUint::from(tail0.len()),
            &BigUint::from(u1.len()),
            fst(0),
        )?;
        let mut emb = PartialEmbedding::new(NAME, depth);
        emb.uv = Some((u.clone(), v.clone()));
        emb.n = Some(Label(if u.is_empty() {
            BigUint::one()
        } else {
            l0.clone()
        }));
        let pad = &l0 - BigUint::from(u1.len());
        let (mut ue, mut ve) = (sparse(&u1), sparse(&v1));
        ue.push_zeros(&pad);
        ve.push_zeros(&pad);
        let mut entries: BTreeMap<Word, (SparseWord, SparseWord)> = BTreeMap::new();
        entries.insert(Word::new(), (ue, ve));
        emb.labels.insert(Word::new(), Label(l0));

        let mut prev = Word::new();
        let total = (1u64 << (depth + 1)) - 1;
        for r in 1..total {
            let w = psi(r);
            let s = w.prefix(w.len() - 1);
            let e = w.get(w.len() - 1);
            let ls = emb.labels[&s].0.clone();
            let (us, vs) = entries[&s].clone();
            let q = s.len() as u64 + 1;
            let mut t = SparseWord::new();
            if s != prev {
                t = entries[&prev].0.suffix_from(&(&ls + 1u32));
                t.push(false);
            }
            let x = line.query(&with_bit(&us, false).concat(&t), q)?;
            let mut probe = with_bit(&vs, e).concat(&t);
            probe.append_word(&x);
            let y = line.query(&probe, q)?;
            let mut z = t;
            z.append_word(&x);
            z.append_word(&y);
            let (branch, tail) = if e {
                (ls.clone(), z.clone())
            } else {
                let (a, mut w_tail) = BigFrame.branch(&ls)?;
                w_tail.push(false);
                w_tail.append(&z);
                (a, w_tail)
            };
            let core = tail.core(MAX_PSI_BITS as usize).ok_or_else(|| {
                FrameError::TooLarge(format!("tail core beyond {MAX_PSI_BITS} bits at w = {w}"))
            })?;
            let label = minimal_extension(&branch, &core, tail.len(), &BigUint::zero(), fst(q))?;
            let used = &ls + 1u32 + z.len();
            z.push_zeros(&(&label - used));
            let mut uw = with_bit(&us, false);
            uw.append(&z);
            let mut vw = with_bit(&vs, e);
            vw.append(&z);
            entries.insert(w.clone(), (uw, vw));
            emb.labels.insert(w.clone(), Label(label));
            prev = w;
        }
        Ok(emb)
    }

    fn verify(&self, emb: &PartialEmbedding, ctx: &EngineContext) -> VerifyReport {
        let mut conditions = Vec::new();
        let report = |conditions| VerifyReport {
            engine: NAME.into(),
            depth: emb.depth,
            conditions,
        };
        let d = emb.depth;

        let mut shape = Tally::new("table-shape");
        shape.check(emb.kind == NAME, || format!("kind {:?}", emb.kind));
        let expected: usize = (0..=d).map(|l| 1usize << l).sum();
        shape.check(emb.labels.len() == expected, || {
            format!("{} labels, expected {expected}", emb.labels.len())
        });
        shape.check(
            (0..=d).all(|l| level(l).iter().all(|w| emb.labels.contains_key(w))),
            || "a word of length ≤ depth has no label".into(),
        );
        let start = match &emb.uv {
            Some((u, v)) => start_pair(u, v).map_err(|e| e.to_string()),
            None => Err("no starting pair".into()),
        };
        if let Err(e) = &start {
            shape.fail(e.clone());
        }
        shape.check(emb.n.is_some(), || "no n".into());
        let entries = match TransferLabels::entries(emb) {
            Ok(e) => Some(e),
            Err(e) => {
                shape.fail(format!("a label names no frame entry: {e}"));
                None
            }
        };
        let ok = shape.witness.is_none();
        conditions.push(shape.finish());
        let (Some(entries), Ok((u1, v1, _, _)), true) = (entries, start, ok) else {
            return report(conditions);
        };
        let entries = &entries.entries;
        let label = |w: &Word| &emb.labels[w].0;
        let (u, _) = emb.uv.as_ref().unwrap();
        let n = &emb.n.as_ref().unwrap().0;

        let mut first = Tally::new("start-entry");
        let (ue, ve) = &entries[&Word::new()];
        let (su, sv) = (sparse(&u1), sparse(&v1));
        let from = BigUint::from(u1.len());
        let padded = |x: &SparseWord, p: &SparseWord| {
            p.is_prefix_of(x) && x.suffix_from(&from).ones().is_empty()
        };
        first.check(padded(ue, &su) && padded(ve, &sv), || {
            format!(
                "entry l(∅) = {} is not (u'0^M, v'0^M) for (u', v') = ({u1}, {v1})",
                label(&Word::new())
            )
        });
        let want_n = if u.is_empty() {
            BigUint::one()
        } else {
            label(&Word::new()).clone()
        };
        first.check(*n == want_n, || format!("n = {n}, expected {want_n}"));
        conditions.push(first.finish());

        let mut open = Tally::new("open-sets");
        match ctx.line_oracle(NAME) {
            Ok(line) => {
                for (w, (uw, vw)) in entries.iter().filter(|(w, _)| !w.is_empty()) {
                    let q = w.len() as u64;
                    let inside = line
                        .cylinder_inside(uw, q)
                        .and_then(|a| Ok(a && line.cylinder_inside(vw, q)?));
                    match inside {
                        Ok(ok) => {
                            open.check(ok, || format!("entry l({w}) is not inside O_{q}"));
                        }
                        Err(e) => open.fail(e.to_string()),
                    }
                }
            }
            Err(e) => open.fail(e.to_string()),
        }
        conditions.push(open.finish());

        let mut children = Tally::new("child-entries");
        let mut grow = Tally::new("label-growth");
        for l in 0..d {
            for w in level(l) {
                let (uw, vw) = &entries[&w];
                let cut = label(&w) + 1u32;
                for e in [false, true] {
                    let c = w.with_bit(e);
                    let (uc, vc) = &entries[&c];
                    grow.check(label(&c) > label(&w), || {
                        format!("l({c}) = {} ≤ l({w}) = {}", label(&c), label(&w))
                    });
                    let ok = uc.len() > &cut
                        && with_bit(uw, false).is_prefix_of(uc)
                        && with_bit(vw, e).is_prefix_of(vc)
                        && uc.suffix_from(&cut) == vc.suffix_from(&cut);
                    children.check(ok, || {
                        format!("entry l({c}) is not (u_l({w}) 0 z, v_l({w}) {} z)", e as u8)
                    });
                }
            }
        }
        conditions.push(children.finish());
        conditions.push(grow.finish());

        let mut order = Tally::new("enumeration-order");
        let total = (1u64 << (d + 1)) - 1;
        for r in 0..total.saturating_sub(1) {
            let (a, b) = (psi(r), psi(r + 1));
            let ua = with_bit(&entries[&a].0, false);
            order.check(ua.is_prefix_of(&entries[&b].0), || {
                format!("u_l({a}) 0 is not a prefix of u_l({b})")
            });
        }
        conditions.push(order.finish());

        let mut column = Tally::new("label-columns");
        let mut inj = Tally::new("level-injective");
        for l in 0..=d {
            let mut seen = BTreeSet::new();
            for w in level(l) {
                let lw = label(&w);
                column.check(big_fst(lw) == BigUint::from(fst(l as u64)), || {
                    format!("(l({w}))_0 ≠ ({l})_0")
                });
                inj.check(seen.insert(lw.clone()), || {
                    format!("l({w}) = {lw} repeats on level {l}")
                });
            }
        }
        conditions.push(column.finish());
        conditions.push(inj.finish());

        let mut transfer = Tally::new("transfer-window");
        for beta in level(d) {
            let (ub, vb) = &entries[&beta];
            let diffs: Vec<BigUint> = ub
                .xor_positions(vb)
                .into_iter()
                .filter(|p| p >= n)
                .collect();
            let mut want: Vec<BigUint> = (0..d as usize)
                .filter(|&m| beta.get(m))
                .map(|m| label(&beta.prefix(m)).clone())
                .collect();
            want.sort();
            transfer.check(diffs == want, || {
                format!("β = {beta}: differences above n at {diffs:?}, expected {want:?}")
            });
        }
        conditions.push(transfer.finish());
        report(conditions)
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::constructors::oracles::FullSpaceLine;

    fn full() -> EngineContext {
        EngineContext::with_line(Arc::new(FullSpaceLine { bound: 64 }))
    }

    #[test]
    fn empty_start_uses_the_first_branch() {
        let emb = TransferLabels.build(&full(), 2).unwrap();
        assert_eq!(emb.labels[&Word::new()].0, BigUint::from(2u32));
        assert_eq!(emb.n.as_ref().unwrap().0, BigUint::one());
    }

    #[test]
    fn start_outside_the_tree_is_rejected() {
        let mut ctx = full();
        ctx.uv = ("1".parse().unwrap(), "0".parse().unwrap());
        assert!(matches!(
            TransferLabels.construct(&ctx, 1),
            Err(EngineError::NotInTree { .. })
        ));
    }
}
