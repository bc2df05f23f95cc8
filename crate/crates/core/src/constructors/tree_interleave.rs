//! `f(α) = α(0) 0^{δ(0)} α(1) 0^{δ(1)} …` with `δ` chosen so that the frame
//! pairs `(u_m, v_m)` go to frame pairs, `(k_m)_0 = (m)_0` for
//! `k_m = Σ_{i<m} (1 + δ(i))`, and boxes off the tree land in `O_m`.

use super::{level, Engine, EngineContext, EngineError, PartialEmbedding, Tally, VerifyReport};
use crate::frames::{t_tree_member, FrameError, FrameView};
use crate::words::{fst, Word};

pub struct TreeInterleave;

const NAME: &str = "tree-interleave";

/// `f_{|s|}(s) = s(0) 0^{δ(0)} … s(|s|−1) 0^{δ(|s|−1)}`.
pub fn interleave(s: &Word, delta: &[u64]) -> Word {
    let mut out = Word::new();
    for (i, &d) in delta.iter().enumerate().take(s.len()) {
        out.push(s.get(i));
        out.push_zeros(d as usize);
    }
    out
}

fn frame_entry(frame: &dyn FrameView, len: u64) -> Result<(Word, Word), FrameError> {
    frame.entry(len).ok_or(FrameError::InsufficientDepth {
        required: len,
        have: frame.depth(),
    })
}

impl Engine for TreeInterleave {
    fn name(&self) -> &'static str {
        NAME
    }

    fn role(&self) -> &'static str {
        "zero-interleaving map preserving the frame tree and symmetric differences"
    }

    fn construct(&self, ctx: &EngineContext, depth: u32) -> Result<PartialEmbedding, EngineError> {
        let oracle = ctx.box_oracle(NAME)?;
        let frame = ctx.frame.as_ref();
        let mut emb = PartialEmbedding::new(NAME, depth);
        emb.psi.insert(Word::new(), Word::new());
        emb.k.push(0);
        for m in 0..depth as usize {
            let words = level(m as u32 + 1);
            let phi: Vec<Word> = words
                .iter()
                .map(|s| interleave(&s.prefix(m), &emb.delta).with_bit(s.get(m)))
                .collect();
            let mut big_m = 0;
            for (i, u) in words.iter().enumerate() {
                for (j, v) in words.iter().enumerate() {
                    if !t_tree_member(frame, u, v) {
                        big_m = big_m.max(oracle.query(&phi[i], &phi[j], m as u64 + 1)?);
                    }
                }
            }
            let branch = frame
                .branch(m as u64 + 1)
                .ok_or(FrameError::InsufficientDepth {
                    required: m as u64 + 1,
                    have: frame.depth(),
                })?;
            let q = branch.q as usize;
            let w = branch.tail.to_word();
            let mut spread = Word::new();
            for i in 0..w.len() {
                spread.push_zeros(emb.delta[q + i] as usize);
                spread.push(w.get(i));
            }
            let e =
                frame.find_extension(emb.k[q], &spread, emb.k[m] + 1 + big_m, fst(m as u64 + 1))?;
            emb.delta.push(e - emb.k[m] - 1);
            emb.k.push(e);
            for s in words {
                let img = interleave(&s, &emb.delta);
                emb.psi.insert(s, img);
            }
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
        let d = emb.depth as usize;
        let frame = ctx.frame.as_ref();

        let mut shape = Tally::new("table-shape");
        shape.check(emb.kind == NAME, || format!("kind {:?}", emb.kind));
        shape.check(emb.delta.len() == d && emb.k.len() == d + 1, || {
            format!(
                "{} values of δ and {} of k for depth {d}",
                emb.delta.len(),
                emb.k.len()
            )
        });
        let expected: usize = (0..=d).map(|l| 1usize << l).sum();
        shape.check(emb.psi.len() == expected, || {
            format!("{} entries, expected {expected}", emb.psi.len())
        });
        let shape_ok = shape.witness.is_none()
            && (0..=d as u32).all(|l| level(l).iter().all(|s| emb.psi.contains_key(s)));
        if shape.witness.is_none() && !shape_ok {
            shape.fail("a word of length ≤ depth has no image".into());
        }
        conditions.push(shape.finish());
        if !shape_ok {
            return report(conditions);
        }

        let mut sums = Tally::new("level-lengths");
        for m in 0..=d {
            let sum: u64 = emb.delta[..m].iter().map(|x| x + 1).sum();
            sums.check(emb.k[m] == sum, || format!("k_{m} = {} ≠ {sum}", emb.k[m]));
        }
        conditions.push(sums.finish());

        let mut table = Tally::new("interleave-table");
        for (s, img) in &emb.psi {
            let want = interleave(s, &emb.delta);
            table.check(*img == want, || {
                format!("f({s}) = {img}, interleaving gives {want}")
            });
        }
        conditions.push(table.finish());

        let mut entries = Tally::new("frame-entries");
        for m in 0..=d as u64 {
            let images = frame_entry(frame, m).and_then(|(u, v)| {
                let target = frame_entry(frame, emb.k[m as usize])?;
                Ok(((u, v), target))
            });
            match images {
                Ok(((u, v), (tu, tv))) => {
                    let (fu, fv) = (&emb.psi[&u], &emb.psi[&v]);
                    entries.check(*fu == tu && *fv == tv, || {
                        format!("(f(u_{m}), f(v_{m})) = ({fu}, {fv}) is not the frame entry of length k_{m}")
                    });
                }
                Err(e) => entries.fail(e.to_string()),
            }
        }
        conditions.push(entries.finish());

        let mut index = Tally::new("column-index");
        for m in 0..=d {
            index.check(fst(emb.k[m]) == fst(m as u64), || {
                format!(
                    "(k_{m})_0 = {} ≠ ({m})_0 = {}",
                    fst(emb.k[m]),
                    fst(m as u64)
                )
            });
            if m > 0 {
                index.check(emb.k[m] > emb.k[m - 1], || {
                    format!("i({m}) = k_{m} does not exceed k_{}", m - 1)
                });
            }
        }
        conditions.push(index.finish());

        let mut inj = Tally::new("level-injective");
        let mut hom = Tally::new("tree-homomorphism");
        let mut boxes = Tally::new("box-avoidance");
        let oracle = ctx.box_oracle(NAME);
        if let Err(e) = &oracle {
            boxes.fail(e.to_string());
        }
        for m in 0..=d as u32 {
            let words = level(m);
            let mut seen = std::collections::BTreeMap::new();
            for s in &words {
                let img = &emb.psi[s];
                match seen.insert(img.clone(), s.clone()) {
                    Some(other) => inj.fail(format!("f({other}) = f({s}) = {img}")),
                    None => {
                        inj.check(true, String::new);
                    }
                }
            }
            for u in &words {
                for v in &words {
                    let (a, b) = (&emb.psi[u], &emb.psi[v]);
                    if t_tree_member(frame, u, v) {
                        hom.check(t_tree_member(frame, a, b), || {
                            format!("({u}, {v}) ∈ T but ({a}, {b}) ∉ T")
                        });
                    } else if let Ok(o) = &oracle {
                        boxes.check(o.box_inside(a, b, m as u64), || {
                            format!("N_f({u}) × N_f({v}) = N_{a} × N_{b} leaves O_{m}")
                        });
                    }
                }
            }
        }
        conditions.push(inj.finish());
        conditions.push(hom.finish());
        conditions.push(boxes.finish());

        let mut xor = Tally::new("xor-identity");
        let top = level(d as u32);
        for a in &top {
            for b in &top {
                let lhs = &emb.psi[&a.xor(b)];
                let rhs = emb.psi[a].xor(&emb.psi[b]);
                xor.check(*lhs == rhs, || format!("f({a} Δ {b}) = {lhs} ≠ {rhs}"));
            }
        }
        conditions.push(xor.finish());
        report(conditions)
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::constructors::oracles::frame_tree_oracle;
    use crate::frames::StandardFrame;

    #[test]
    fn identity_for_the_tree_oracle() {
        let frame = Arc::new(StandardFrame::unbounded());
        let mut ctx = EngineContext::with_boxes(frame_tree_oracle(frame.clone(), 1 << 10));
        ctx.frame = frame;
        let emb = TreeInterleave.build(&ctx, 5).unwrap();
        assert!(emb.psi.iter().all(|(s, img)| s == img));
        assert_eq!(emb.delta, vec![0; 5]);
    }

    #[test]
    fn interleaving() {
        let s: Word = "101".parse().unwrap();
        assert_eq!(interleave(&s, &[1, 0, 2]).to_string(), "100100");
        assert_eq!(interleave(&Word::new(), &[]), Word::new());
    }
}
