//! `Ψ` with `δ(0) = 0` such that the first bit is kept,
//! `(Ψ(0 s_n 0 v), Ψ(1 s_n 1 v)) = (0 s_{δ(n+1)−1} 0 w, 1 s_{δ(n+1)−1} 1 w)`, and
//! every box missing the closure of `𝔹₀` is sent outside a closed relation `F`
//! with `𝔹₀ ⊆ F ⊆ (N_0 × N_1) ∪ (N_1 × N_0)`.

use std::collections::BTreeMap;

use super::{
    level, scheme_shape, Engine, EngineContext, EngineError, PartialEmbedding, Tally, VerifyReport,
};
use crate::levelgraphs::{b_member, closure_b0_meets, lift_member, LiftKind};
use crate::words::{least_sn_extension, sn, Word};

pub struct B0Scheme;

const NAME: &str = "b0-scheme";

impl Engine for B0Scheme {
    fn name(&self) -> &'static str {
        NAME
    }

    fn role(&self) -> &'static str {
        "level maps reducing B0 into a closed relation given by a box oracle"
    }

    fn construct(&self, ctx: &EngineContext, depth: u32) -> Result<PartialEmbedding, EngineError> {
        let oracle = ctx.box_oracle(NAME)?;
        let mut emb = PartialEmbedding::new(NAME, depth);
        emb.psi.insert(Word::new(), Word::new());
        emb.k.push(0);
        emb.delta.push(0);
        for l in 0..depth {
            let kl = emb.k[l as usize];
            let mut tilde: BTreeMap<Word, Word> = BTreeMap::new();
            let dl = if l == 0 {
                for e in [false, true] {
                    tilde.insert(Word::new().with_bit(e), Word::new().with_bit(e));
                }
                0
            } else {
                let lo = 1.max(emb.delta[l as usize - 1] + 1);
                // Ψ(0 s_{l−1}) with its leading 0 removed.
                let key = Word::new().with_bit(false).concat(&sn(l as u64 - 1));
                let target = emb.psi[&key].suffix_from(1);
                let d = least_sn_extension(&target, lo - 1)
                    .ok_or(EngineError::NoDenseIndex { level: l, lo })?;
                let sd = sn(d);
                for u in level(l) {
                    for e in [false, true] {
                        let ext = sd.with_bit(e).suffix_from(kl as usize - 1);
                        tilde.insert(u.with_bit(e), emb.psi[&u].concat(&ext));
                    }
                }
                emb.delta.push(d + 1);
                d + 1
            };
            let mut m = 0;
            for (s, ps) in &tilde {
                for (t, pt) in &tilde {
                    if !closure_b0_meets(s, t) {
                        m = m.max(oracle.query(ps, pt, l as u64 + 1)?);
                    }
                }
            }
            let len = tilde.values().next().map_or(0, |w| w.len() as u64);
            for (s, ps) in tilde {
                emb.psi.insert(s, ps.with_zeros(m as usize));
            }
            debug_assert!(l == 0 || len == dl + 1);
            emb.k.push(len + m);
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
        let mut kind = Tally::new("kind");
        kind.check(emb.kind == NAME, || format!("kind {:?}", emb.kind));
        conditions.push(kind.finish());
        if !scheme_shape(emb, &mut conditions) {
            return report(conditions);
        }
        let d = emb.depth;
        let psi = &emb.psi;

        let mut delta = Tally::new("delta-bounds");
        let want = d.max(1) as usize;
        delta.check(emb.delta.len() == want, || {
            format!("{} values of δ, expected {want}", emb.delta.len())
        });
        delta.check(emb.delta.first() == Some(&0), || "δ(0) ≠ 0".into());
        for l in 1..emb.delta.len().min(want) {
            let (prev, dl) = (emb.delta[l - 1], emb.delta[l]);
            delta.check(dl > prev, || {
                format!("δ({l}) = {dl} ≤ δ({}) = {prev}", l - 1)
            });
            delta.check(l + 1 < emb.k.len() && dl < emb.k[l + 1], || {
                format!("δ({l}) = {dl} is not below k_{}", l + 1)
            });
        }
        let delta_ok = delta.witness.is_none();
        conditions.push(delta.finish());

        let mut first = Tally::new("first-bit-images");
        for rest in 0..d {
            for v in level(rest) {
                let a = &psi[&Word::new().with_bit(false).concat(&v)];
                let b = &psi[&Word::new().with_bit(true).concat(&v)];
                let ok = !a.is_empty()
                    && a.len() == b.len()
                    && !a.get(0)
                    && b.get(0)
                    && a.suffix_from(1) == b.suffix_from(1);
                first.check(ok, || format!("(Ψ(0{v}), Ψ(1{v})) = ({a}, {b})"));
            }
        }
        conditions.push(first.finish());

        let mut edges = Tally::new("edge-images");
        if delta_ok {
            for n in 0..d.saturating_sub(1) {
                let mid = sn(n as u64);
                let head = sn(emb.delta[n as usize + 1] - 1);
                let h = head.len() + 1;
                for rest in 0..d - n - 1 {
                    for v in level(rest) {
                        let s = Word::new()
                            .with_bit(false)
                            .concat(&mid)
                            .with_bit(false)
                            .concat(&v);
                        let t = Word::new()
                            .with_bit(true)
                            .concat(&mid)
                            .with_bit(true)
                            .concat(&v);
                        let (a, b) = (&psi[&s], &psi[&t]);
                        let ok = a.len() == b.len()
                            && a.len() > h
                            && !a.get(0)
                            && b.get(0)
                            && a.slice(1, h) == head
                            && b.slice(1, h) == head
                            && !a.get(h)
                            && b.get(h)
                            && a.suffix_from(h + 1) == b.suffix_from(h + 1);
                        edges.check(ok, || format!("(Ψ({s}), Ψ({t})) = ({a}, {b})"));
                    }
                }
            }
        } else {
            edges.fail("δ is malformed".into());
        }
        conditions.push(edges.finish());

        let mut boxes = Tally::new("box-avoidance");
        match ctx.box_oracle(NAME) {
            Ok(oracle) => {
                for l in 1..=d {
                    let words = level(l);
                    for s in &words {
                        for t in &words {
                            if closure_b0_meets(s, t) {
                                continue;
                            }
                            let (a, b) = (&psi[s], &psi[t]);
                            boxes.check(oracle.box_inside(a, b, l as u64), || {
                                format!("N_Ψ({s}) × N_Ψ({t}) = N_{a} × N_{b} meets F")
                            });
                        }
                    }
                }
            }
            Err(e) => boxes.fail(e.to_string()),
        }
        conditions.push(boxes.finish());

        let mut hom = Tally::new("level-homomorphism");
        let mut refl = Tally::new("edge-reflection");
        let mut lift = Tally::new("lift-homomorphism");
        for l in 1..=d {
            let words = level(l);
            for s in &words {
                for t in &words {
                    let (a, b) = (&psi[s], &psi[t]);
                    if b_member(s, t) {
                        hom.check(b_member(a, b), || {
                            format!("({s}, {t}) ∈ B_{l} but ({a}, {b}) ∉ B")
                        });
                    }
                    if s != t && b_member(a, b) {
                        refl.check(b_member(s, t), || {
                            format!("({a}, {b}) ∈ B but ({s}, {t}) ∉ B_{l}")
                        });
                    }
                    if lift_member(LiftKind::B0, s, t) {
                        lift.check(lift_member(LiftKind::B0, a, b), || {
                            format!("({s}, {t}) ∈ 𝔹₀ level but ({a}, {b}) is not")
                        });
                    }
                }
            }
        }
        conditions.push(hom.finish());
        conditions.push(refl.finish());
        conditions.push(lift.finish());
        report(conditions)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructors::oracles::closure_b0_oracle;

    #[test]
    fn identity_for_the_closure_oracle() {
        let ctx = EngineContext::with_boxes(closure_b0_oracle(1 << 10));
        let emb = B0Scheme.build(&ctx, 5).unwrap();
        assert!(emb.psi.iter().all(|(s, img)| s == img));
        assert_eq!(emb.delta, vec![0, 1, 2, 3, 4]);
        assert_eq!(emb.k, vec![0, 1, 2, 3, 4, 5]);
    }
}
