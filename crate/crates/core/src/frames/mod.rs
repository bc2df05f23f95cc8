//! Frames `(u_l, v_l)`, the standard frame built by pairing arithmetic, and the
//! tree `T` they generate.
//!
//! A frame can be held explicitly ([`Frame`]) or evaluated on demand
//! ([`StandardFrame`], [`BigFrame`]). Code that only reads entries goes through
//! the [`FrameView`] trait.

mod big;

pub use big::{minimal_extension, BigFrame, MAX_PSI_BITS};

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::levelgraphs::{cycle_witness, is_acyclic, is_connected, LevelRelation, MAX_GRAPH_LEVEL};
use crate::words::{fst, pair, psi, psi_inv, unpair, PairCode, Word, WordsError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FrameError {
    #[error("negative padding at length {len}: branch {branch}, |psi| = {psi_len}")]
    NegativePadding { len: u64, branch: u64, psi_len: u64 },
    #[error("frame depth {have} is insufficient: need {required}")]
    InsufficientDepth { required: u64, have: u64 },
    #[error("no entry of length ≤ {searched} extends the requested pair")]
    NotFound { searched: u64 },
    #[error("entry at length {len} is not (u_q 0 w 0^N, v_q 1 w 0^N)")]
    WitnessMismatch { len: u64 },
    #[error("entry at length {0} is malformed")]
    Malformed(u64),
    #[error("value too large: {0}")]
    TooLarge(String),
    #[error(transparent)]
    Words(#[from] WordsError),
}

/// A word of the form `core · 0^(len − |core|)` where `core` has no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tail {
    pub core: Word,
    pub len: u64,
}

impl Tail {
    pub fn from_word(w: &Word) -> Tail {
        Tail {
            core: w.prefix(w.trimmed_len()),
            len: w.len() as u64,
        }
    }

    pub fn to_word(&self) -> Word {
        self.core.with_zeros(self.len as usize - self.core.len())
    }

    /// Whether this tail is `w · 0^N` for some `N`.
    pub fn is_zero_extension_of(&self, w: &Word) -> bool {
        self.len >= w.len() as u64 && self.core == w.prefix(w.trimmed_len())
    }
}

/// How a frame entry of positive length hangs off an earlier one:
/// `(u_len, v_len) = (u_q 0 tail, v_q 1 tail)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Branch {
    pub q: u64,
    pub tail: Tail,
}

/// Read access to a frame.
pub trait FrameView: Send + Sync {
    /// Largest available entry length.
    fn depth(&self) -> u64;

    /// `(u_len, v_len)`, materialized.
    fn entry(&self, len: u64) -> Option<(Word, Word)>;

    /// The branch point and common tail of the entry of length `len ≥ 1`.
    fn branch(&self, len: u64) -> Option<Branch>;

    /// Only the branch point; cheaper for frames that can skip building the tail.
    fn branch_point(&self, len: u64) -> Option<u64> {
        self.branch(len).map(|b| b.q)
    }

    /// Least entry length `E ≥ min_len` with `(E)_0 = p` whose entry is
    /// `(u_q 0 w 0^N, v_q 1 w 0^N)` for some `N`.
    fn find_extension(&self, q: u64, w: &Word, min_len: u64, p: u64) -> Result<u64, FrameError> {
        let lo = min_len.max(q + 1 + w.len() as u64);
        for len in lo..=self.depth() {
            if self.branch_point(len) != Some(q) || fst(len) != p {
                continue;
            }
            if let Some(b) = self.branch(len) {
                if b.tail.is_zero_extension_of(w) {
                    return Ok(len);
                }
            }
        }
        Err(FrameError::NotFound {
            searched: self.depth(),
        })
    }
}

/// Explicit frame entries. Index `l` is expected to hold the length-`l` pair;
/// [`verify_frame`] reports when it does not.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Frame {
    pub entries: Vec<(Word, Word)>,
}

impl Frame {
    pub fn depth(&self) -> u64 {
        self.entries.len().saturating_sub(1) as u64
    }
}

impl FrameView for Frame {
    fn depth(&self) -> u64 {
        Frame::depth(self)
    }

    fn entry(&self, len: u64) -> Option<(Word, Word)> {
        let (u, v) = self.entries.get(len as usize)?;
        (u.len() as u64 == len && v.len() as u64 == len).then(|| (u.clone(), v.clone()))
    }

    fn branch(&self, len: u64) -> Option<Branch> {
        let (u, v) = self.entry(len)?;
        if len == 0 {
            return None;
        }
        let q = u.last_difference(&v)?;
        if u.get(q) || !v.get(q) {
            return None;
        }
        Some(Branch {
            q: q as u64,
            tail: Tail::from_word(&u.suffix_from(q + 1)),
        })
    }
}

/// `(l)_1 = ⟨a, b⟩` gives entry `l + 1` as `(u_a 0 ψ(b) 0^pad, v_a 1 ψ(b) 0^pad)`.
fn standard_branch(len: u64) -> Result<(u64, u64, Word), FrameError> {
    let l = len - 1;
    let (_, c) = unpair(PairCode(l));
    let (a, b) = unpair(PairCode(c));
    let pb = psi(b);
    if a + pb.len() as u64 > l {
        return Err(FrameError::NegativePadding {
            len,
            branch: a,
            psi_len: pb.len() as u64,
        });
    }
    Ok((a, l - a, pb))
}

/// The frame defined by `(u_0, v_0) = (∅, ∅)` and
/// `(u_{l+1}, v_{l+1}) = (u_a 0 ψ(b) 0^{l−a−|ψ(b)|}, v_a 1 ψ(b) 0^{…})`, `⟨a, b⟩ = (l)_1`,
/// evaluated on demand up to a declared depth.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StandardFrame {
    pub depth: u64,
}

impl StandardFrame {
    pub fn new(depth: u64) -> Self {
        StandardFrame { depth }
    }

    pub fn unbounded() -> Self {
        StandardFrame {
            depth: u64::MAX - 1,
        }
    }
}

impl FrameView for StandardFrame {
    fn depth(&self) -> u64 {
        self.depth
    }

    fn entry(&self, len: u64) -> Option<(Word, Word)> {
        if len > self.depth {
            return None;
        }
        if len == 0 {
            return Some((Word::new(), Word::new()));
        }
        let (a, tail_len, pb) = standard_branch(len).ok()?;
        let (mut u, mut v) = self.entry(a)?;
        let tail = pb.with_zeros(tail_len as usize - pb.len());
        u.push(false);
        v.push(true);
        u.append(&tail);
        v.append(&tail);
        Some((u, v))
    }

    fn branch(&self, len: u64) -> Option<Branch> {
        if len == 0 || len > self.depth {
            return None;
        }
        let (a, tail_len, pb) = standard_branch(len).ok()?;
        Some(Branch {
            q: a,
            tail: Tail {
                core: pb.prefix(pb.trimmed_len()),
                len: tail_len,
            },
        })
    }

    fn branch_point(&self, len: u64) -> Option<u64> {
        if len == 0 || len > self.depth {
            return None;
        }
        let (_, c) = unpair(PairCode(len - 1));
        Some(unpair(PairCode(c)).0)
    }

    fn find_extension(&self, q: u64, w: &Word, min_len: u64, p: u64) -> Result<u64, FrameError> {
        let core = w.prefix(w.trimmed_len());
        let found = minimal_extension(
            &BigUint::from(q),
            &core,
            &BigUint::from(w.len()),
            &BigUint::from(min_len),
            p,
        )?;
        let len = found
            .to_u64()
            .ok_or_else(|| FrameError::TooLarge(format!("entry length {found}")))?;
        if len > self.depth {
            return Err(FrameError::InsufficientDepth {
                required: len,
                have: self.depth,
            });
        }
        Ok(len)
    }
}

/// Explicit entries `0..=depth` of the standard frame.
pub fn build_frame(depth: u64) -> Result<Frame, FrameError> {
    let mut entries: Vec<(Word, Word)> = vec![(Word::new(), Word::new())];
    for len in 1..=depth {
        let (a, tail_len, pb) = standard_branch(len)?;
        let (ua, va) = &entries[a as usize];
        let tail = pb.with_zeros(tail_len as usize - pb.len());
        let mut u = ua.with_bit(false);
        let mut v = va.with_bit(true);
        u.append(&tail);
        v.append(&tail);
        entries.push((u, v));
    }
    Ok(Frame { entries })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "condition")]
pub enum FrameViolation {
    /// Condition (1): not exactly one entry of this length.
    #[serde(rename = "1")]
    Uniqueness { len: u64, count: usize },
    /// Condition (1): coordinates of different lengths.
    #[serde(rename = "1-shape")]
    UnequalLengths { index: usize },
    /// Condition (3): not of the form `(u_q 0 w, v_q 1 w)`.
    #[serde(rename = "3")]
    Generation { len: u64, reason: String },
    /// Condition (2), checked by bounded search: no witness found.
    #[serde(rename = "2")]
    DensityUnwitnessed {
        p: u64,
        q: u64,
        w: Word,
        searched: u64,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct FrameReport {
    pub depth: u64,
    pub violations: Vec<FrameViolation>,
}

impl FrameReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks conditions (1) and (3) exactly up to the frame's depth.
pub fn verify_frame(frame: &Frame) -> FrameReport {
    let mut violations = Vec::new();
    let max_len = frame
        .entries
        .iter()
        .map(|(u, _)| u.len())
        .max()
        .unwrap_or(0);
    let mut by_len: Vec<Vec<usize>> = vec![Vec::new(); max_len + 1];
    for (i, (u, v)) in frame.entries.iter().enumerate() {
        if u.len() != v.len() {
            violations.push(FrameViolation::UnequalLengths { index: i });
            continue;
        }
        by_len[u.len()].push(i);
    }
    for (len, idx) in by_len.iter().enumerate() {
        if idx.len() != 1 {
            violations.push(FrameViolation::Uniqueness {
                len: len as u64,
                count: idx.len(),
            });
        }
    }
    let unique = |len: usize| -> Option<&(Word, Word)> {
        match by_len.get(len) {
            Some(v) if v.len() == 1 => Some(&frame.entries[v[0]]),
            _ => None,
        }
    };
    for len in 1..=max_len {
        let Some(idx) = by_len.get(len) else { continue };
        for &i in idx {
            let (u, v) = &frame.entries[i];
            let reason = match u.last_difference(v) {
                None => Some("u and v are equal".to_string()),
                Some(q) if u.get(q) || !v.get(q) => {
                    Some(format!("last difference at {q} is not 0 over 1"))
                }
                Some(q) => match unique(q) {
                    None => Some(format!("no unique entry of length {q}")),
                    Some((uq, vq)) if u.prefix(q) != *uq || v.prefix(q) != *vq => {
                        Some(format!("prefixes of length {q} are not (u_{q}, v_{q})"))
                    }
                    Some(_) => None,
                },
            };
            if let Some(reason) = reason {
                violations.push(FrameViolation::Generation {
                    len: len as u64,
                    reason,
                });
            }
        }
    }
    FrameReport {
        depth: frame.depth(),
        violations,
    }
}

/// Bounded check of condition (2): for `p, q ≤ pq` and `|w| ≤ max_w`, some entry
/// of length at most `frame.depth()` witnesses density.
pub fn verify_density_bounded(frame: &dyn FrameView, pq: u64, max_w: usize) -> Vec<FrameViolation> {
    let mut out = Vec::new();
    for q in 0..=pq.min(frame.depth()) {
        for wl in 0..=max_w {
            for w in Word::all_of_length(wl) {
                for p in 0..=pq {
                    if density_scan(frame, p, q, &w, frame.depth()).is_none() {
                        out.push(FrameViolation::DensityUnwitnessed {
                            p,
                            q,
                            w: w.clone(),
                            searched: frame.depth(),
                        });
                    }
                }
            }
        }
    }
    out
}

/// Closed-form density witness for the standard frame:
/// `l = ⟨p+1, ⟨q, ψ⁻¹(w)⟩⟩`, `N = l − q − |w|`, entry at length `l + 1`.
pub fn density_witness(frame: &dyn FrameView, p: u64, q: u64, w: &Word) -> Result<u64, FrameError> {
    let b = psi_inv(w)?;
    let l = pair(p + 1, pair(q, b)?.0)?.0;
    let len = l
        .checked_add(1)
        .ok_or(WordsError::Overflow("density_witness"))?;
    if len > frame.depth() {
        return Err(FrameError::InsufficientDepth {
            required: len,
            have: frame.depth(),
        });
    }
    let n = l
        .checked_sub(q + w.len() as u64)
        .ok_or(FrameError::WitnessMismatch { len })?;
    match frame.branch(len) {
        Some(br)
            if br.q == q
                && br.tail.is_zero_extension_of(w)
                && br.tail.len == w.len() as u64 + n => {}
        _ => return Err(FrameError::WitnessMismatch { len }),
    }
    if fst(len) != p {
        return Err(FrameError::WitnessMismatch { len });
    }
    Ok(n)
}

/// Least `N` found by scanning entry lengths up to `max_len` such that the entry
/// is `(u_q 0 w 0^N, v_q 1 w 0^N)` and the first coordinate of its length is `p`.
pub fn density_scan(frame: &dyn FrameView, p: u64, q: u64, w: &Word, max_len: u64) -> Option<u64> {
    let start = q + 1 + w.len() as u64;
    for len in start..=max_len.min(frame.depth()) {
        if frame.branch_point(len) != Some(q) || fst(len) != p {
            continue;
        }
        let br = frame.branch(len)?;
        if br.tail.is_zero_extension_of(w) {
            return Some(len - start);
        }
    }
    None
}

/// `T_l`, by forward closure: extend every pair of `T_{k}` by equal bits and
/// add the branch `(u_k 0, v_k 1)`.
pub fn t_tree_level(frame: &dyn FrameView, l: u32) -> Result<LevelRelation, FrameError> {
    if l as u64 > frame.depth() + 1 || l > crate::levelgraphs::MAX_LEVEL {
        return Err(FrameError::InsufficientDepth {
            required: l as u64,
            have: frame.depth(),
        });
    }
    if l == 0 {
        return Ok(LevelRelation::from_codes(0, BTreeSet::from([(0, 0)])));
    }
    let mut pairs: BTreeSet<(u64, u64)> = BTreeSet::new();
    for k in 0..l {
        let mut next = BTreeSet::new();
        if k > 0 {
            for &(u, v) in &pairs {
                for e in 0..2 {
                    next.insert((2 * u + e, 2 * v + e));
                }
            }
        }
        let (uk, vk) = frame
            .entry(k as u64)
            .ok_or(FrameError::Malformed(k as u64))?;
        let uk = uk.to_index()?;
        let vk = vk.to_index()?;
        next.insert((2 * uk, 2 * vk + 1));
        pairs = next;
    }
    Ok(LevelRelation::from_codes(l, pairs))
}

/// Membership in `T`: `(u, v) = (∅, ∅)` or `(u_q 0 w, v_q 1 w)`.
pub fn t_tree_member(frame: &dyn FrameView, u: &Word, v: &Word) -> bool {
    if u.len() != v.len() {
        return false;
    }
    if u.is_empty() {
        return true;
    }
    let Some(q) = u.last_difference(v) else {
        return false;
    };
    if u.get(q) || !v.get(q) {
        return false;
    }
    match frame.entry(q as u64) {
        Some((uq, vq)) => u.prefix(q) == uq && v.prefix(q) == vq,
        None => false,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TreeLevelReport {
    pub level: u32,
    pub tree_acyclic: bool,
    pub tree_connected: bool,
    pub lift_acyclic: bool,
    pub prefix_classes: bool,
}

impl TreeLevelReport {
    pub fn passed(&self) -> bool {
        self.tree_acyclic && self.tree_connected && self.lift_acyclic && self.prefix_classes
    }
}

/// For `1 ≤ l ≤ l_max`: `s(T_l)` acyclic and connected, `s(G_{T_l})` acyclic,
/// and `T_l ⊆ N_0 × N_1`.
pub fn verify_tree_acyclicity(
    frame: &dyn FrameView,
    l_max: u32,
) -> Result<Vec<TreeLevelReport>, FrameError> {
    let mut out = Vec::new();
    for l in 1..=l_max.min(MAX_GRAPH_LEVEL) {
        let tree = t_tree_level(frame, l)?;
        let g = tree.as_graph();
        let top = 1u64 << (l - 1);
        out.push(TreeLevelReport {
            level: l,
            tree_acyclic: cycle_witness(&g).is_none(),
            tree_connected: is_connected(&g),
            lift_acyclic: is_acyclic(&g.g_lift()),
            prefix_classes: tree
                .codes()
                .iter()
                .all(|&(u, v)| u & top == 0 && v & top != 0),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::w;

    #[test]
    fn first_entries() {
        let f = build_frame(5).unwrap();
        let want = [
            ("", ""),
            ("0", "1"),
            ("00", "10"),
            ("000", "110"),
            ("0000", "1000"),
            ("00000", "11000"),
        ];
        for (i, (u, v)) in want.iter().enumerate() {
            assert_eq!(f.entries[i], (w(u), w(v)), "entry {i}");
        }
    }

    #[test]
    fn lazy_frame_matches_explicit() {
        let f = build_frame(300).unwrap();
        let lazy = StandardFrame::new(300);
        for len in 0..=300 {
            assert_eq!(lazy.entry(len), f.entry(len), "len {len}");
            assert_eq!(lazy.branch(len), f.branch(len), "len {len}");
        }
    }

    #[test]
    fn verify_reports_violations() {
        assert!(verify_frame(&build_frame(64).unwrap()).passed());
        let mut bad = build_frame(3).unwrap();
        bad.entries[1] = (w("0"), w("0"));
        let r = verify_frame(&bad);
        assert!(r
            .violations
            .iter()
            .any(|v| matches!(v, FrameViolation::Generation { len: 1, .. })));
        let mut dup = build_frame(3).unwrap();
        dup.entries[3] = (w("01"), w("11"));
        let r = verify_frame(&dup);
        assert!(r
            .violations
            .iter()
            .any(|v| matches!(v, FrameViolation::Uniqueness { len: 2, count: 2 })));
    }

    #[test]
    fn density_examples() {
        let f = StandardFrame::new(10_000);
        assert_eq!(density_witness(&f, 0, 0, &Word::new()), Ok(1));
        assert_eq!(density_witness(&f, 1, 0, &Word::new()), Ok(3));
        let small = build_frame(3).unwrap();
        assert_eq!(
            density_witness(&small, 1, 0, &Word::new()),
            Err(FrameError::InsufficientDepth {
                required: 4,
                have: 3
            })
        );
    }

    #[test]
    fn tree_levels() {
        let f = build_frame(8).unwrap();
        assert_eq!(t_tree_level(&f, 0).unwrap().len(), 1);
        assert_eq!(
            t_tree_level(&f, 1).unwrap().to_string_pairs(),
            vec![["0".to_string(), "1".to_string()]]
        );
        let t2: Vec<_> = t_tree_level(&f, 2).unwrap().to_string_pairs();
        let want: Vec<[String; 2]> = [("00", "10"), ("00", "11"), ("01", "11")]
            .iter()
            .map(|(a, b)| [a.to_string(), b.to_string()])
            .collect();
        assert_eq!(t2, want);
        for l in 0..=8u32 {
            assert_eq!(
                t_tree_level(&f, l).unwrap().len() as u64,
                (1u64 << l).saturating_sub(1).max(1)
            );
        }
    }

    #[test]
    fn find_extension_agrees_with_scan() {
        let lazy = StandardFrame::new(5_000);
        let explicit = build_frame(5_000).unwrap();
        for q in 0..4 {
            for p in 0..3 {
                for tail in ["", "0", "1", "01", "10"] {
                    let t = w(tail);
                    for min_len in [0, 30, 200] {
                        let a = lazy.find_extension(q, &t, min_len, p);
                        let b = explicit.find_extension(q, &t, min_len, p);
                        match (a, b) {
                            (Ok(x), Ok(y)) => {
                                assert_eq!(x, y, "q={q} p={p} tail={tail} min={min_len}")
                            }
                            (
                                Err(FrameError::InsufficientDepth { .. }),
                                Err(FrameError::NotFound { .. }),
                            ) => {}
                            other => panic!("q={q} p={p} tail={tail} min={min_len}: {other:?}"),
                        }
                    }
                }
            }
        }
    }
}
