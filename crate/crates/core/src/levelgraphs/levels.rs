//! Level-`l` shadows of the relations on Cantor space, stored as pairs of word codes.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use super::graph::FiniteGraphInstance;
use crate::words::{sn, Word};

/// Largest level whose words fit in a `u64` code.
pub const MAX_LEVEL: u32 = 63;
/// Largest level whose full vertex set we are willing to materialize.
pub const MAX_GRAPH_LEVEL: u32 = 26;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LevelError {
    #[error("level {0} is not allowed here (must be at least 1)")]
    LevelZero(u32),
    #[error("level {0} exceeds the supported maximum {1}")]
    TooLarge(u32, u32),
    #[error("pair ({0}, {1}) does not have both coordinates of length {2}")]
    WrongLength(Word, Word, u32),
    #[error("unknown relation kind {0:?}")]
    UnknownKind(String),
    #[error("frame too shallow: need depth {needed}, have {have}")]
    FrameTooShallow { needed: u64, have: u64 },
}

/// A finite set of ordered pairs of words of one common length.
///
/// Words are held as their big-endian codes, so iteration order is the
/// lexicographic order of the pairs.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LevelRelation {
    level: u32,
    pairs: BTreeSet<(u64, u64)>,
}

impl LevelRelation {
    pub fn empty(level: u32) -> Result<Self, LevelError> {
        if level > MAX_LEVEL {
            return Err(LevelError::TooLarge(level, MAX_LEVEL));
        }
        Ok(LevelRelation {
            level,
            pairs: BTreeSet::new(),
        })
    }

    pub fn from_words<'a, I>(level: u32, pairs: I) -> Result<Self, LevelError>
    where
        I: IntoIterator<Item = (&'a Word, &'a Word)>,
    {
        let mut r = LevelRelation::empty(level)?;
        for (s, t) in pairs {
            r.insert(s, t)?;
        }
        Ok(r)
    }

    pub(crate) fn from_codes(level: u32, pairs: BTreeSet<(u64, u64)>) -> Self {
        debug_assert!(level <= MAX_LEVEL);
        LevelRelation { level, pairs }
    }

    pub fn insert(&mut self, s: &Word, t: &Word) -> Result<bool, LevelError> {
        let l = self.level as usize;
        if s.len() != l || t.len() != l {
            return Err(LevelError::WrongLength(s.clone(), t.clone(), self.level));
        }
        Ok(self
            .pairs
            .insert((s.to_index().unwrap(), t.to_index().unwrap())))
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn codes(&self) -> &BTreeSet<(u64, u64)> {
        &self.pairs
    }

    pub fn contains(&self, s: &Word, t: &Word) -> bool {
        let l = self.level as usize;
        s.len() == l
            && t.len() == l
            && self
                .pairs
                .contains(&(s.to_index().unwrap(), t.to_index().unwrap()))
    }

    pub fn contains_codes(&self, s: u64, t: u64) -> bool {
        self.pairs.contains(&(s, t))
    }

    pub fn word(&self, code: u64) -> Word {
        Word::from_index(code, self.level as usize)
    }

    pub fn iter_words(&self) -> impl Iterator<Item = (Word, Word)> + '_ {
        self.pairs
            .iter()
            .map(|&(s, t)| (self.word(s), self.word(t)))
    }

    pub fn union(&self, other: &LevelRelation) -> LevelRelation {
        assert_eq!(
            self.level, other.level,
            "union of relations at different levels"
        );
        let mut pairs = self.pairs.clone();
        pairs.extend(other.pairs.iter().copied());
        LevelRelation::from_codes(self.level, pairs)
    }

    pub fn symmetrize(&self) -> LevelRelation {
        let mut pairs = self.pairs.clone();
        pairs.extend(self.pairs.iter().map(|&(s, t)| (t, s)));
        LevelRelation::from_codes(self.level, pairs)
    }

    /// The relation as a graph on all of `2^l`.
    pub fn as_graph(&self) -> FiniteGraphInstance {
        assert!(
            self.level <= MAX_GRAPH_LEVEL,
            "level {} too large to materialize 2^l vertices",
            self.level
        );
        FiniteGraphInstance {
            vertices: (0..1u64 << self.level).collect(),
            edges: self.pairs.clone(),
        }
    }

    /// The bipartite lift `G_A` over all of `2^l`.
    pub fn g_lift(&self) -> FiniteGraphInstance {
        self.as_graph().g_lift()
    }

    /// Sorted `[s, t]` string pairs.
    pub fn to_string_pairs(&self) -> Vec<[String; 2]> {
        self.iter_words()
            .map(|(s, t)| [s.to_string(), t.to_string()])
            .collect()
    }

    pub fn decorate(&self, e: Decoration) -> Result<LevelRelation, LevelError> {
        let mut pairs = self.pairs.clone();
        let l = self.level;
        let all = 0..1u64 << l;
        match e {
            Decoration::Equal => {}
            Decoration::Square => pairs.extend(all.map(|s| (s, s))),
            Decoration::Left | Decoration::Right => {
                if l == 0 {
                    return Err(LevelError::LevelZero(0));
                }
                let want = matches!(e, Decoration::Right) as u64;
                pairs.extend(all.filter(|s| s >> (l - 1) == want).map(|s| (s, s)));
            }
        }
        Ok(LevelRelation::from_codes(l, pairs))
    }

    pub fn predicates(&self) -> RelationFlags {
        let symmetric = self
            .pairs
            .iter()
            .all(|&(s, t)| self.pairs.contains(&(t, s)));
        let antisymmetric = self
            .pairs
            .iter()
            .all(|&(s, t)| s == t || !self.pairs.contains(&(t, s)));
        let irreflexive = self.pairs.iter().all(|&(s, t)| s != t);
        let reflexive = (0..1u64 << self.level).all(|s| self.pairs.contains(&(s, s)));
        RelationFlags {
            symmetric,
            antisymmetric,
            irreflexive,
            reflexive,
            oriented_graph: irreflexive && antisymmetric,
            graph: irreflexive && symmetric,
        }
    }
}

impl Serialize for LevelRelation {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("LevelRelation", 2)?;
        st.serialize_field("level", &self.level)?;
        st.serialize_field("pairs", &self.to_string_pairs())?;
        st.end()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RelationFlags {
    pub symmetric: bool,
    pub antisymmetric: bool,
    pub irreflexive: bool,
    pub reflexive: bool,
    pub oriented_graph: bool,
    pub graph: bool,
}

/// The decorations `R^=`, `R^□`, `R^⊏`, `R^⊐`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decoration {
    /// `R^=`: nothing added.
    Equal,
    /// `R^□`: the whole diagonal.
    Square,
    /// `R^⊏`: the diagonal of `N_0`.
    Left,
    /// `R^⊐`: the diagonal of `N_1`.
    Right,
}

impl FromStr for Decoration {
    type Err = LevelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "=" | "eq" => Ok(Decoration::Equal),
            "□" | "square" | "box" => Ok(Decoration::Square),
            "⊏" | "left" | "sub" => Ok(Decoration::Left),
            "⊐" | "right" | "sup" => Ok(Decoration::Right),
            other => Err(LevelError::UnknownKind(other.to_string())),
        }
    }
}

fn check_level(l: u32) -> Result<(), LevelError> {
    if l > MAX_LEVEL {
        Err(LevelError::TooLarge(l, MAX_LEVEL))
    } else {
        Ok(())
    }
}

fn sn_code(n: u32) -> u64 {
    sn(n as u64).to_index().expect("sn(n) fits for n ≤ 63")
}

/// `𝒯_l = {(s_n 0 w, s_n 1 w) : n + 1 + |w| = l}`.
pub fn t_level(l: u32) -> Result<LevelRelation, LevelError> {
    check_level(l)?;
    let mut pairs = BTreeSet::new();
    for n in 0..l {
        let tail = l - n - 1;
        let head = sn_code(n) << (tail + 1);
        for w in 0..1u64 << tail {
            pairs.insert((head | w, head | (1 << tail) | w));
        }
    }
    Ok(LevelRelation::from_codes(l, pairs))
}

/// Membership in `𝒯` for words of any equal length: the words differ in exactly
/// one position `n`, with `s[n] = 0`, `t[n] = 1`, and a common prefix `s_n`.
pub fn t_member(s: &Word, t: &Word) -> bool {
    if s.len() != t.len() {
        return false;
    }
    let Some(n) = s.first_difference(t) else {
        return false;
    };
    if s.last_difference(t) != Some(n) || s.get(n) || !t.get(n) {
        return false;
    }
    s.prefix(n) == sn(n as u64)
}

/// `B_l` by the recursion `B_1 = {(0,1),(1,0)}`,
/// `B_{l+1} = {(sε, tε)} ∪ {(0 s_{l−1} 0, 1 s_{l−1} 1), (1 s_{l−1} 1, 0 s_{l−1} 0)}`.
pub fn b_level(l: u32) -> Result<LevelRelation, LevelError> {
    if l == 0 {
        return Err(LevelError::LevelZero(0));
    }
    check_level(l)?;
    let mut pairs: BTreeSet<(u64, u64)> = BTreeSet::from([(0, 1), (1, 0)]);
    for k in 1..l {
        let mut next = BTreeSet::new();
        for &(s, t) in &pairs {
            for e in 0..2 {
                next.insert((2 * s + e, 2 * t + e));
            }
        }
        // 0 s_{k-1} 0 and 1 s_{k-1} 1 at length k + 1
        let mid = sn_code(k - 1) << 1;
        let a = mid;
        let b = (1u64 << k) | mid | 1;
        next.insert((a, b));
        next.insert((b, a));
        pairs = next;
    }
    Ok(LevelRelation::from_codes(l, pairs))
}

/// Whether the box `N_s × N_t` meets the closure of `𝔹₀`; equal lengths ≥ 1.
pub fn closure_b0_meets(s: &Word, t: &Word) -> bool {
    if s.len() != t.len() || s.is_empty() {
        return false;
    }
    if s.get(0) || !t.get(0) {
        return false;
    }
    let (a, b) = (s.suffix_from(1), t.suffix_from(1));
    a == b || t_member(&a, &b)
}

/// Membership in the level sets of `s(closure 𝔹₀)`, which `b_level` enumerates.
pub fn b_member(s: &Word, t: &Word) -> bool {
    closure_b0_meets(s, t) || closure_b0_meets(t, s)
}

/// The relations whose level sets are built from `𝒯_{l−1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum LiftKind {
    /// `𝔹₀ = {(0α, 1β)}`.
    B0,
    /// `𝕋₀ = {(εα, (1−ε)β)}`.
    T0,
    /// `𝕌₀ = G_{s(𝔾₀)} ∪ 𝕋₀`.
    U0,
    /// `G_{s(𝔾₀)} = {(0α, 1β) : (α, β) ∈ s(𝔾₀)}`.
    Gsg0,
    /// The graph of `h₀`, which flips the first bit.
    H0,
}

impl LiftKind {
    pub const ALL: [LiftKind; 5] = [
        LiftKind::B0,
        LiftKind::T0,
        LiftKind::U0,
        LiftKind::Gsg0,
        LiftKind::H0,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LiftKind::B0 => "b0",
            LiftKind::T0 => "t0",
            LiftKind::U0 => "u0",
            LiftKind::Gsg0 => "gsg0",
            LiftKind::H0 => "h0",
        }
    }
}

impl fmt::Display for LiftKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LiftKind {
    type Err = LevelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        LiftKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| LevelError::UnknownKind(s.to_string()))
    }
}

/// Level-`l` prefix pairs of the named relation, built from `𝒯_{l−1}`
/// (the diagonal of `𝔾̄₀` is not included).
pub fn lift_level(kind: LiftKind, l: u32) -> Result<LevelRelation, LevelError> {
    if l == 0 {
        return Err(LevelError::LevelZero(0));
    }
    check_level(l)?;
    let top = 1u64 << (l - 1);
    let base = t_level(l - 1)?;
    let mut pairs = BTreeSet::new();
    let lifted = |pairs: &mut BTreeSet<(u64, u64)>, sym: bool| {
        for &(s, t) in base.codes() {
            pairs.insert((s, top | t));
            if sym {
                pairs.insert((t, top | s));
            }
        }
    };
    match kind {
        LiftKind::B0 => lifted(&mut pairs, false),
        LiftKind::Gsg0 => lifted(&mut pairs, true),
        LiftKind::T0 | LiftKind::U0 => {
            for &(s, t) in base.codes() {
                pairs.insert((s, top | t));
                pairs.insert((top | s, t));
            }
            if kind == LiftKind::U0 {
                lifted(&mut pairs, true);
            }
        }
        LiftKind::H0 => {
            for s in 0..1u64 << l {
                pairs.insert((s, s ^ top));
            }
        }
    }
    Ok(LevelRelation::from_codes(l, pairs))
}

/// Membership in the level sets of [`lift_level`] for words of any equal length.
pub fn lift_member(kind: LiftKind, s: &Word, t: &Word) -> bool {
    if s.len() != t.len() || s.is_empty() {
        return false;
    }
    let (a, b) = (s.suffix_from(1), t.suffix_from(1));
    let (s0, t0) = (s.get(0), t.get(0));
    match kind {
        LiftKind::B0 => !s0 && t0 && t_member(&a, &b),
        LiftKind::Gsg0 => !s0 && t0 && (t_member(&a, &b) || t_member(&b, &a)),
        LiftKind::T0 => s0 != t0 && t_member(&a, &b),
        LiftKind::U0 => lift_member(LiftKind::Gsg0, s, t) || lift_member(LiftKind::T0, s, t),
        LiftKind::H0 => s0 != t0 && a == b,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::w;

    fn pairs(r: &LevelRelation) -> Vec<(String, String)> {
        r.iter_words()
            .map(|(s, t)| (s.to_string(), t.to_string()))
            .collect()
    }

    fn ps(v: &[(&str, &str)]) -> Vec<(String, String)> {
        let mut out: Vec<_> = v
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect();
        out.sort();
        out
    }

    #[test]
    fn t_level_small() {
        assert!(t_level(0).unwrap().is_empty());
        assert_eq!(pairs(&t_level(1).unwrap()), ps(&[("0", "1")]));
        assert_eq!(
            pairs(&t_level(2).unwrap()),
            ps(&[("00", "10"), ("01", "11"), ("00", "01")])
        );
        assert_eq!(t_level(3).unwrap().len(), 7);
    }

    #[test]
    fn t_member_matches_t_level() {
        for l in 0..7u32 {
            let r = t_level(l).unwrap();
            for s in Word::all_of_length(l as usize) {
                for t in Word::all_of_length(l as usize) {
                    assert_eq!(t_member(&s, &t), r.contains(&s, &t), "{s} {t}");
                }
            }
        }
    }

    #[test]
    fn b_level_small() {
        assert_eq!(pairs(&b_level(1).unwrap()), ps(&[("0", "1"), ("1", "0")]));
        assert_eq!(
            pairs(&b_level(2).unwrap()),
            ps(&[
                ("00", "10"),
                ("10", "00"),
                ("01", "11"),
                ("11", "01"),
                ("00", "11"),
                ("11", "00")
            ])
        );
        assert_eq!(b_level(3).unwrap().len(), 14);
        assert!(b_level(0).is_err());
    }

    #[test]
    fn b_member_matches_recursion() {
        for l in 1..7u32 {
            let r = b_level(l).unwrap();
            for s in Word::all_of_length(l as usize) {
                for t in Word::all_of_length(l as usize) {
                    assert_eq!(b_member(&s, &t), r.contains(&s, &t), "{s} {t}");
                }
            }
        }
    }

    #[test]
    fn lift_examples() {
        assert_eq!(
            pairs(&lift_level(LiftKind::B0, 2).unwrap()),
            ps(&[("00", "11")])
        );
        assert_eq!(
            pairs(&lift_level(LiftKind::H0, 2).unwrap()),
            ps(&[("00", "10"), ("01", "11"), ("10", "00"), ("11", "01")])
        );
        assert_eq!(
            pairs(&lift_level(LiftKind::T0, 2).unwrap()),
            ps(&[("00", "11"), ("10", "01")])
        );
        assert!(lift_level(LiftKind::T0, 0).is_err());
    }

    #[test]
    fn lift_member_matches_lift_level() {
        for kind in LiftKind::ALL {
            for l in 1..6u32 {
                let r = lift_level(kind, l).unwrap();
                for s in Word::all_of_length(l as usize) {
                    for t in Word::all_of_length(l as usize) {
                        assert_eq!(
                            lift_member(kind, &s, &t),
                            r.contains(&s, &t),
                            "{kind} {s} {t}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn decorations() {
        let empty = LevelRelation::empty(1).unwrap();
        assert_eq!(
            pairs(&empty.decorate(Decoration::Square).unwrap()),
            ps(&[("0", "0"), ("1", "1")])
        );
        let t2 = t_level(2).unwrap();
        let left = t2.decorate(Decoration::Left).unwrap();
        assert_eq!(left.len(), 5);
        assert!(left.contains(&w("00"), &w("00")) && left.contains(&w("01"), &w("01")));
        assert_eq!(t2.decorate(Decoration::Equal).unwrap(), t2);
        assert!(LevelRelation::empty(0)
            .unwrap()
            .decorate(Decoration::Right)
            .is_err());
    }

    #[test]
    fn predicate_flags() {
        let t3 = t_level(3).unwrap();
        let f = t3.predicates();
        assert!(f.antisymmetric && f.irreflexive && !f.symmetric && f.oriented_graph);
        let f = t3.symmetrize().predicates();
        assert!(f.symmetric && f.irreflexive && f.graph);
        assert!(
            !t3.decorate(Decoration::Square)
                .unwrap()
                .predicates()
                .irreflexive
        );
    }

    #[test]
    fn wrong_length_rejected() {
        let mut r = LevelRelation::empty(2).unwrap();
        assert!(r.insert(&w("0"), &w("11")).is_err());
    }
}
