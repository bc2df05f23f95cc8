//! `Ψ : 2^{<ω} → 2^{<ω}` with `δ` strictly increasing such that
//! `(Ψ(s_n 0 v), Ψ(s_n 1 v)) = (s_{δ(n)} 0 w, s_{δ(n)} 1 w)` and every box of a
//! non-edge at level `l` lies in `O_l`. In the limit this embeds `𝔾₀` into an
//! acyclic `F_σ` digraph `S ⊇ 𝔾₀` while sending non-edges outside `S`.

use std::collections::BTreeMap;

use super::{
    level, scheme_shape, Engine, EngineContext, EngineError, PartialEmbedding, Tally, VerifyReport,
};
use crate::levelgraphs::t_member;
use crate::words::{least_sn_extension, sn, Word};

pub struct G0Scheme;

const NAME: &str = "g0-scheme";

fn edge_either(s: &Word, t: &Word) -> bool {
    t_member(s, t) || t_member(t, s)
}

impl Engine for G0Scheme {
    fn name(&self) -> &'static str {
        NAME
    }

    fn role(&self) -> &'static str {
        "level maps reducing G0 into an acyclic F-sigma digraph given by a box oracle"
    }

    fn construct(&self, ctx: &EngineContext, depth: u32) -> Result<PartialEmbedding, EngineError> {
        let oracle = ctx.box_oracle(NAME)?;
        let mut emb = PartialEmbedding::new(NAME, depth);
        emb.psi.insert(Word::new(), Word::new());
        emb.k.push(0);
        for l in 0..depth {
            let kl = emb.k[l as usize];
            let lo = emb.delta.iter().map(|d| d + 1).max().unwrap_or(0).max(kl);
            let target = &emb.psi[&sn(l as u64)];
            let d =
                least_sn_extension(target, lo).ok_or(EngineError::NoDenseIndex { level: l, lo })?;
            emb.delta.push(d);
            let sd = sn(d);
            let mut tilde: BTreeMap<Word, Word> = BTreeMap::new();
            for u in level(l) {
                for e in [false, true] {
                    let ext = sd.with_bit(e).suffix_from(kl as usize);
                    tilde.insert(u.with_bit(e), emb.psi[&u].concat(&ext));
                }
            }
            let mut m = 0;
            for (s, ps) in &tilde {
                for (t, pt) in &tilde {
                    if s != t && !edge_either(s, t) {
                        m = m.max(oracle.query(ps, pt, l as u64 + 1)?);
                    }
                }
            }
            for (s, ps) in tilde {
                emb.psi.insert(s, ps.with_zeros(m as usize));
            }
            emb.k.push(d + 1 + m);
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
        delta.check(emb.delta.len() == d as usize, || {
            format!("{} values of δ for depth {d}", emb.delta.len())
        });
        for (l, &dl) in emb.delta.iter().enumerate().take(d as usize) {
            let sup = emb.delta[..l].iter().map(|x| x + 1).max().unwrap_or(0);
            delta.check(dl >= sup, || format!("δ({l}) = {dl} < {sup}"));
            delta.check(dl < emb.k[l + 1], || {
                format!("δ({l}) = {dl} ≥ k_{} = {}", l + 1, emb.k[l + 1])
            });
            let img = &psi[&sn(l as u64)];
            delta.check(dl >= img.len() as u64 && img.is_prefix_of(&sn(dl)), || {
                format!("Ψ(s_{l}) = {img} is not a prefix of s_δ({l}) with δ = {dl}")
            });
        }
        let delta_ok = delta.witness.is_none();
        conditions.push(delta.finish());

        let mut edges = Tally::new("edge-images");
        if delta_ok {
            for n in 0..d {
                let sn_ = sn(n as u64);
                let head = sn(emb.delta[n as usize]);
                for rest in 0..d - n {
                    for v in level(rest) {
                        let a = &psi[&sn_.with_bit(false).concat(&v)];
                        let b = &psi[&sn_.with_bit(true).concat(&v)];
                        let h = head.len();
                        let ok = a.len() == b.len()
                            && a.len() > h
                            && a.prefix(h) == head
                            && b.prefix(h) == head
                            && !a.get(h)
                            && b.get(h)
                            && a.suffix_from(h + 1) == b.suffix_from(h + 1);
                        edges.check(ok, || {
                            format!("(Ψ(s_{n}0{v}), Ψ(s_{n}1{v})) = ({a}, {b}) does not branch at s_δ({n})")
                        });
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
                            if s == t || edge_either(s, t) {
                                continue;
                            }
                            let (a, b) = (&psi[s], &psi[t]);
                            boxes.check(oracle.box_inside(a, b, l as u64), || {
                                format!("N_Ψ({s}) × N_Ψ({t}) = N_{a} × N_{b} leaves O_{l}")
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
        for l in 1..=d {
            let words = level(l);
            for s in &words {
                for t in &words {
                    let (a, b) = (&psi[s], &psi[t]);
                    if t_member(s, t) {
                        hom.check(t_member(a, b), || {
                            format!("({s}, {t}) ∈ 𝒯 but ({a}, {b}) ∉ 𝒯")
                        });
                    }
                    if s != t && edge_either(a, b) {
                        refl.check(edge_either(s, t), || {
                            format!("({a}, {b}) ∈ s(𝒯) but ({s}, {t}) ∉ s(𝒯)")
                        });
                    }
                }
            }
        }
        conditions.push(hom.finish());
        conditions.push(refl.finish());
        report(conditions)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructors::oracles::g0_oracle;

    #[test]
    fn identity_for_the_symmetrized_g0_oracle() {
        let ctx = EngineContext::with_boxes(g0_oracle(true, 1 << 10));
        let emb = G0Scheme.build(&ctx, 5).unwrap();
        assert!(emb.psi.iter().all(|(s, img)| s == img));
        assert_eq!(emb.delta, vec![0, 1, 2, 3, 4]);
        assert_eq!(emb.k, vec![0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn depth_zero_is_vacuous() {
        let ctx = EngineContext::with_boxes(g0_oracle(true, 16));
        let emb = G0Scheme.build(&ctx, 0).unwrap();
        assert_eq!(emb.psi.len(), 1);
        assert!(G0Scheme.verify(&emb, &ctx).passed());
    }
}
