//! Oracle presentations of the open sets the engines must land in.
//!
//! A [`BoxOracle`] presents a decreasing sequence `O_n` of open subsets of
//! `2^ω × 2^ω`; here always `O_n = ¬(C_0 ∪ … ∪ C_n)` for closed pieces `C_j`
//! given by a [`ClosedPieces`] family. A [`OneDimOpenOracle`] does the same
//! for open subsets of `2^ω`. Both answer with the least witness, scanning
//! shorter extensions first and lexicographically within a length.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::Deserialize;
use serde_json::Value;
use thiserror::Error;

use crate::frames::{t_tree_member, FrameView, StandardFrame};
use crate::ideals::EpPoint;
use crate::levelgraphs::closure_b0_meets;
use crate::sparse::SparseWord;
use crate::words::{sn, Word};

pub const DEFAULT_ORACLE_BOUND: u64 = 1 << 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("meagerness witness not found within bound {bound} for ({s}, {t}) at n = {n}")]
    BoundExceeded {
        s: String,
        t: String,
        n: u64,
        bound: u64,
    },
    #[error("no extension of length ≤ {bound} lands in O_{q}")]
    NoExtension { q: u64, bound: u64 },
    #[error("oracle kind {kind:?} cannot serve as a {role}")]
    Unsupported { kind: String, role: &'static str },
    #[error("unknown oracle kind {0:?}")]
    UnknownKind(String),
    #[error("bad oracle parameters: {0}")]
    Params(String),
}

/// Which closed pieces `C_j` make up an `F_σ` relation `S = ⋃ C_j`.
pub trait ClosedPieces: Send + Sync {
    fn name(&self) -> &'static str;

    /// Whether `N_a × N_b` meets `C_j`, for `|a| = |b|`.
    fn meets(&self, j: u64, a: &Word, b: &Word) -> bool;

    /// All pieces coincide, so checking `C_0` decides every index.
    fn constant(&self) -> bool {
        false
    }
}

/// `O_n = ¬(C_0 ∪ … ∪ C_n)` over a [`ClosedPieces`] family.
pub trait BoxOracle: Send + Sync {
    fn name(&self) -> &str;

    fn bound(&self) -> u64;

    /// `N_s × N_t ⊆ O_n`.
    fn box_inside(&self, s: &Word, t: &Word, n: u64) -> bool;

    /// Least `m ≤ bound` with `N_{s0^m} × N_{t0^m} ⊆ O_n`.
    fn query(&self, s: &Word, t: &Word, n: u64) -> Result<u64, OracleError> {
        let (mut a, mut b) = (s.clone(), t.clone());
        for m in 0..=self.bound() {
            if self.box_inside(&a, &b, n) {
                return Ok(m);
            }
            a.push(false);
            b.push(false);
        }
        Err(OracleError::BoundExceeded {
            s: s.to_string(),
            t: t.to_string(),
            n,
            bound: self.bound(),
        })
    }
}

/// A decreasing sequence `O_q` of dense open subsets of `2^ω`.
pub trait OneDimOpenOracle: Send + Sync {
    fn name(&self) -> &str;

    fn bound(&self) -> u64;

    /// Least `x` with `N_{u·x} ⊆ O_q`.
    fn query(&self, u: &SparseWord, q: u64) -> Result<Word, OracleError>;

    /// `N_u ⊆ O_q`.
    fn cylinder_inside(&self, u: &SparseWord, q: u64) -> Result<bool, OracleError> {
        Ok(self.query(u, q)?.is_empty())
    }
}

/// The complement oracle of a piece family.
pub struct ComplementOracle {
    pieces: Arc<dyn ClosedPieces>,
    bound: u64,
}

impl ComplementOracle {
    pub fn new(pieces: Arc<dyn ClosedPieces>, bound: u64) -> Self {
        ComplementOracle { pieces, bound }
    }
}

impl BoxOracle for ComplementOracle {
    fn name(&self) -> &str {
        self.pieces.name()
    }

    fn bound(&self) -> u64 {
        self.bound
    }

    fn box_inside(&self, s: &Word, t: &Word, n: u64) -> bool {
        let top = if self.pieces.constant() { 0 } else { n };
        s.len() == t.len() && (0..=top).all(|j| !self.pieces.meets(j, s, t))
    }
}

/// `C_j = Gr(φ_j)` with `φ_j(s_j 0 γ) = s_j 1 γ`, plus the reverse graph when
/// `symmetric`.
pub struct G0Graphs {
    pub symmetric: bool,
}

fn graph_meets(j: u64, a: &Word, b: &Word) -> bool {
    let len = a.len() as u64;
    let s = sn(j);
    if len <= j {
        return a == b && a.is_prefix_of(&s);
    }
    let j = j as usize;
    a.prefix(j) == s
        && b.prefix(j) == s
        && !a.get(j)
        && b.get(j)
        && a.suffix_from(j + 1) == b.suffix_from(j + 1)
}

impl ClosedPieces for G0Graphs {
    fn name(&self) -> &'static str {
        if self.symmetric {
            "g0-graphs-symmetric"
        } else {
            "g0-graphs"
        }
    }

    fn meets(&self, j: u64, a: &Word, b: &Word) -> bool {
        graph_meets(j, a, b) || (self.symmetric && graph_meets(j, b, a))
    }
}

/// Every piece is the closure of `𝔹₀`.
pub struct ClosureB0;

impl ClosedPieces for ClosureB0 {
    fn name(&self) -> &'static str {
        "closure-of-b0"
    }

    fn constant(&self) -> bool {
        true
    }

    fn meets(&self, _j: u64, a: &Word, b: &Word) -> bool {
        if a.is_empty() {
            return true;
        }
        closure_b0_meets(a, b)
    }
}

/// Every piece is the body `[T]` of the tree a frame generates.
pub struct FrameTree {
    pub frame: Arc<dyn FrameView>,
}

impl ClosedPieces for FrameTree {
    fn name(&self) -> &'static str {
        "frame-tree"
    }

    fn constant(&self) -> bool {
        true
    }

    fn meets(&self, _j: u64, a: &Word, b: &Word) -> bool {
        t_tree_member(self.frame.as_ref(), a, b)
    }
}

/// `C_j` is the union of the listed clopen boxes `N_c × N_d` at index `j`.
pub struct ListedBoxes {
    pub levels: BTreeMap<u64, Vec<(Word, Word)>>,
}

impl ClosedPieces for ListedBoxes {
    fn name(&self) -> &'static str {
        "boxes"
    }

    fn meets(&self, j: u64, a: &Word, b: &Word) -> bool {
        self.levels.get(&j).is_some_and(|boxes| {
            boxes
                .iter()
                .any(|(c, d)| a.compatible(c) && b.compatible(d))
        })
    }
}

/// Every piece is the whole space, so no box is ever inside `O_n`.
pub struct WholeSpace;

impl ClosedPieces for WholeSpace {
    fn name(&self) -> &'static str {
        "full-space"
    }

    fn constant(&self) -> bool {
        true
    }

    fn meets(&self, _j: u64, _a: &Word, _b: &Word) -> bool {
        true
    }
}

/// `O_q = 2^ω`.
pub struct FullSpaceLine {
    pub bound: u64,
}

impl OneDimOpenOracle for FullSpaceLine {
    fn name(&self) -> &str {
        "full-space"
    }

    fn bound(&self) -> u64 {
        self.bound
    }

    fn query(&self, _u: &SparseWord, _q: u64) -> Result<Word, OracleError> {
        Ok(Word::new())
    }
}

/// `O_q = 2^ω ∖ {x_i : i ≤ q}` for a list of eventually periodic points.
pub struct AvoidEpPoints {
    pub points: Vec<EpPoint>,
    pub bound: u64,
}

/// Whether `u` is an initial segment of `x`.
fn sparse_prefix_of(u: &SparseWord, x: &EpPoint) -> bool {
    let len = u.len();
    let s = x.prefix().len() as u64;
    let k = x.period().len() as u64;
    let ones_per_period = x.period().count_ones() as u64;
    if ones_per_period > 0 {
        // Past the prefix, x has at least one 1 in every full period.
        if let Some(periods) = (len.clone() / k).to_u64() {
            if periods > s + u.ones().len() as u64 + 1 {
                return false;
            }
        } else {
            return false;
        }
        let len = len.to_u64().expect("small after the count test");
        let ones: BTreeSet<u64> = u.ones().iter().map(|o| o.to_u64().unwrap()).collect();
        return (0..len).all(|p| x.eval(p) == ones.contains(&p));
    }
    let support = x.support().unwrap_or_default();
    let below: Vec<BigUint> = support
        .into_iter()
        .map(BigUint::from)
        .filter(|p| p < len)
        .collect();
    below == u.ones()
}

impl OneDimOpenOracle for AvoidEpPoints {
    fn name(&self) -> &str {
        "avoid-ep-points"
    }

    fn bound(&self) -> u64 {
        self.bound
    }

    fn query(&self, u: &SparseWord, q: u64) -> Result<Word, OracleError> {
        let live: Vec<&EpPoint> = self
            .points
            .iter()
            .take(q.saturating_add(1).min(self.points.len() as u64) as usize)
            .filter(|x| sparse_prefix_of(u, x))
            .collect();
        if live.is_empty() {
            return Ok(Word::new());
        }
        let base = u.len();
        for len in 1..=self.bound.min(64) as usize {
            let forbidden: BTreeSet<Word> = live
                .iter()
                .map(|x| Word::from_bits((0..len).map(|i| x.eval_at(&(base + BigUint::from(i))))))
                .collect();
            if forbidden.len() < 1 << len.min(63) {
                let free = (0u64..)
                    .map(|i| Word::from_index(i, len))
                    .find(|w| !forbidden.contains(w))
                    .expect("fewer forbidden words than words");
                return Ok(free);
            }
        }
        Err(OracleError::NoExtension {
            q,
            bound: self.bound,
        })
    }
}

/// What an oracle kind produced: a box oracle, a line oracle, or both.
#[derive(Clone)]
pub struct OracleHandle {
    pub kind: String,
    pub boxes: Option<Arc<dyn BoxOracle>>,
    pub line: Option<Arc<dyn OneDimOpenOracle>>,
}

impl std::fmt::Debug for OracleHandle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("OracleHandle")
            .field("kind", &self.kind)
            .field("boxes", &self.boxes.as_ref().map(|b| b.name().to_string()))
            .field("line", &self.line.as_ref().map(|l| l.name().to_string()))
            .finish()
    }
}

impl OracleHandle {
    pub fn box_oracle(&self) -> Result<Arc<dyn BoxOracle>, OracleError> {
        self.boxes.clone().ok_or_else(|| OracleError::Unsupported {
            kind: self.kind.clone(),
            role: "box oracle",
        })
    }

    pub fn line_oracle(&self) -> Result<Arc<dyn OneDimOpenOracle>, OracleError> {
        self.line.clone().ok_or_else(|| OracleError::Unsupported {
            kind: self.kind.clone(),
            role: "one-dimensional oracle",
        })
    }
}

/// A named way of turning JSON parameters into an oracle.
pub trait OracleKind: Send + Sync {
    fn name(&self) -> &'static str;

    fn describe(&self) -> &'static str;

    fn build(&self, params: &Value, bound: u64) -> Result<OracleHandle, OracleError>;
}

fn params<T: for<'de> Deserialize<'de>>(v: &Value) -> Result<T, OracleError> {
    T::deserialize(v).map_err(|e| OracleError::Params(e.to_string()))
}

struct ComplementOfBoxesKind;

#[derive(Deserialize)]
struct ComplementParams {
    family: String,
    #[serde(default)]
    symmetric: bool,
    #[serde(default)]
    levels: BTreeMap<u64, Vec<(Word, Word)>>,
}

impl OracleKind for ComplementOfBoxesKind {
    fn name(&self) -> &'static str {
        "complement-of-boxes"
    }

    fn describe(&self) -> &'static str {
        "O_n is the complement of the closed pieces C_0..C_n of a named family \
         (g0-graphs, closure-of-b0, frame-tree, boxes)"
    }

    fn build(&self, v: &Value, bound: u64) -> Result<OracleHandle, OracleError> {
        let p: ComplementParams = params(v)?;
        let pieces: Arc<dyn ClosedPieces> = match p.family.as_str() {
            "g0-graphs" => Arc::new(G0Graphs {
                symmetric: p.symmetric,
            }),
            "closure-of-b0" => Arc::new(ClosureB0),
            "frame-tree" => Arc::new(FrameTree {
                frame: Arc::new(StandardFrame::unbounded()),
            }),
            "boxes" => Arc::new(ListedBoxes { levels: p.levels }),
            other => return Err(OracleError::Params(format!("unknown family {other:?}"))),
        };
        Ok(OracleHandle {
            kind: self.name().into(),
            boxes: Some(Arc::new(ComplementOracle::new(pieces, bound))),
            line: None,
        })
    }
}

struct FullSpaceKind;

impl OracleKind for FullSpaceKind {
    fn name(&self) -> &'static str {
        "full-space"
    }

    fn describe(&self) -> &'static str {
        "the whole space: every line query succeeds at once, every box query fails"
    }

    fn build(&self, _v: &Value, bound: u64) -> Result<OracleHandle, OracleError> {
        Ok(OracleHandle {
            kind: self.name().into(),
            boxes: Some(Arc::new(ComplementOracle::new(Arc::new(WholeSpace), bound))),
            line: Some(Arc::new(FullSpaceLine { bound })),
        })
    }
}

struct AvoidEpPointsKind;

#[derive(Deserialize)]
struct AvoidParams {
    points: Vec<EpPoint>,
}

impl OracleKind for AvoidEpPointsKind {
    fn name(&self) -> &'static str {
        "avoid-ep-points"
    }

    fn describe(&self) -> &'static str {
        "O_q omits the listed eventually periodic points x_0..x_q"
    }

    fn build(&self, v: &Value, bound: u64) -> Result<OracleHandle, OracleError> {
        let p: AvoidParams = params(v)?;
        Ok(OracleHandle {
            kind: self.name().into(),
            boxes: None,
            line: Some(Arc::new(AvoidEpPoints {
                points: p.points,
                bound,
            })),
        })
    }
}

/// Oracle kinds by name.
pub struct OracleRegistry {
    kinds: BTreeMap<&'static str, Box<dyn OracleKind>>,
}

impl OracleRegistry {
    pub fn empty() -> Self {
        OracleRegistry {
            kinds: BTreeMap::new(),
        }
    }

    pub fn standard() -> Self {
        let mut r = OracleRegistry::empty();
        r.register(Box::new(ComplementOfBoxesKind));
        r.register(Box::new(FullSpaceKind));
        r.register(Box::new(AvoidEpPointsKind));
        r
    }

    pub fn register(&mut self, kind: Box<dyn OracleKind>) {
        self.kinds.insert(kind.name(), kind);
    }

    pub fn get(&self, name: &str) -> Option<&dyn OracleKind> {
        self.kinds.get(name).map(|k| k.as_ref())
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.kinds.keys().copied()
    }

    /// Build from `{"kind": …, "bound": …?, …}`; `bound` overrides `default_bound`.
    pub fn from_json(&self, v: &Value, default_bound: u64) -> Result<OracleHandle, OracleError> {
        let kind = v
            .get("kind")
            .and_then(Value::as_str)
            .ok_or_else(|| OracleError::Params("missing \"kind\"".into()))?;
        let bound = match v.get("bound") {
            None => default_bound,
            Some(b) => b
                .as_u64()
                .ok_or_else(|| OracleError::Params("\"bound\" must be a natural".into()))?,
        };
        self.get(kind)
            .ok_or_else(|| OracleError::UnknownKind(kind.into()))?
            .build(v, bound)
    }
}

pub fn g0_oracle(symmetric: bool, bound: u64) -> Arc<dyn BoxOracle> {
    Arc::new(ComplementOracle::new(
        Arc::new(G0Graphs { symmetric }),
        bound,
    ))
}

pub fn closure_b0_oracle(bound: u64) -> Arc<dyn BoxOracle> {
    Arc::new(ComplementOracle::new(Arc::new(ClosureB0), bound))
}

pub fn frame_tree_oracle(frame: Arc<dyn FrameView>, bound: u64) -> Arc<dyn BoxOracle> {
    Arc::new(ComplementOracle::new(Arc::new(FrameTree { frame }), bound))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::w;
    use serde_json::json;

    #[test]
    fn empty_pieces_answer_zero() {
        let o = ComplementOracle::new(
            Arc::new(ListedBoxes {
                levels: BTreeMap::new(),
            }),
            16,
        );
        assert_eq!(o.query(&w("01"), &w("11"), 5), Ok(0));
    }

    #[test]
    fn full_space_fails_at_bound() {
        let h = OracleRegistry::standard()
            .from_json(&json!({"kind": "full-space", "bound": 100}), 7)
            .unwrap();
        assert!(matches!(
            h.box_oracle().unwrap().query(&w("0"), &w("1"), 0),
            Err(OracleError::BoundExceeded { bound: 100, .. })
        ));
        let line = h.line_oracle().unwrap();
        assert_eq!(line.query(&SparseWord::new(), 3), Ok(Word::new()));
    }

    #[test]
    fn listed_box_is_escaped_by_padding() {
        let levels = BTreeMap::from([(0, vec![(w("00"), w("00"))])]);
        let o = ComplementOracle::new(Arc::new(ListedBoxes { levels }), 16);
        assert_eq!(
            o.query(&w("0"), &w("0"), 0),
            Err(OracleError::BoundExceeded {
                s: "0".into(),
                t: "0".into(),
                n: 0,
                bound: 16
            })
        );
        assert_eq!(o.query(&w("01"), &w("00"), 0), Ok(0));
        assert_eq!(o.query(&w("0"), &w("1"), 0), Ok(0));
    }

    #[test]
    fn g0_graph_pieces() {
        let g = G0Graphs { symmetric: false };
        // s_1 = "0": (0 0 γ, 0 1 γ)
        assert!(g.meets(1, &w("001"), &w("011")));
        assert!(!g.meets(1, &w("011"), &w("001")));
        assert!(G0Graphs { symmetric: true }.meets(1, &w("011"), &w("001")));
        assert!(g.meets(3, &w("0"), &w("0")));
        assert!(!g.meets(3, &w("0"), &w("1")));
    }

    #[test]
    fn avoiding_points() {
        let zero = EpPoint::zero();
        let ones = EpPoint::new(Word::new(), w("1")).unwrap();
        let o = AvoidEpPoints {
            points: vec![zero, ones],
            bound: 64,
        };
        let empty = SparseWord::new();
        assert_eq!(o.query(&empty, 0), Ok(w("1")));
        assert_eq!(o.query(&empty, 1), Ok(w("01")));
        assert_eq!(
            o.query(&SparseWord::from_word(&w("10")), 5),
            Ok(Word::new())
        );
        let far = SparseWord::zeros(BigUint::from(1u32) << 200u32);
        assert_eq!(o.query(&far, 1), Ok(w("1")));
        assert!(!o.cylinder_inside(&far, 0).unwrap());
    }

    #[test]
    fn registry_rejects_unknown() {
        let r = OracleRegistry::standard();
        assert_eq!(
            r.names().collect::<Vec<_>>(),
            ["avoid-ep-points", "complement-of-boxes", "full-space"]
        );
        assert!(matches!(
            r.from_json(&json!({"kind": "nope"}), 1),
            Err(OracleError::UnknownKind(_))
        ));
        assert!(r
            .from_json(&json!({"kind": "avoid-ep-points"}), 1)
            .unwrap_err()
            .to_string()
            .contains("points"));
    }
}
