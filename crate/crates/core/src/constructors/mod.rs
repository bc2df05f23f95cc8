//! Inductive Cantor-scheme engines driven by oracle presentations of target
//! sets, each paired with an independent re-verification of its output.
//!
//! Engines are looked up by name in an [`EngineRegistry`]:
//!
//! | name              | builds                                                      |
//! |-------------------|-------------------------------------------------------------|
//! | `g0-scheme`       | `Ψ` reducing `𝔾₀` into an acyclic `F_σ` digraph             |
//! | `tree-interleave` | `f(α) = α(0)0^{δ(0)}α(1)…` preserving `[T]` and `E_ℐ`       |
//! | `b0-scheme`       | `Ψ` reducing `𝔹₀` into a closed relation                    |
//! | `transfer-labels` | the labels `l(w)` behind a transfer triple `(n, α, F)`       |

mod b0_scheme;
mod g0_scheme;
pub mod oracles;
mod transfer_labels;
mod tree_interleave;

pub use b0_scheme::B0Scheme;
pub use g0_scheme::G0Scheme;
pub use transfer_labels::{LabelEntries, TransferLabels};
pub use tree_interleave::TreeInterleave;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::frames::{FrameError, FrameView, StandardFrame};
use crate::words::{Word, WordsError};
use oracles::{BoxOracle, OneDimOpenOracle, OracleError, OracleHandle};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Words(#[from] WordsError),
    #[error("engine {engine} needs a {what}")]
    MissingContext {
        engine: &'static str,
        what: &'static str,
    },
    #[error("no index δ ≥ {lo} has s_δ extending the level-{level} image")]
    NoDenseIndex { level: u32, lo: u64 },
    #[error("({u}, {v}) is not in the tree generated by the frame")]
    NotInTree { u: String, v: String },
    #[error("unknown engine {0:?}")]
    UnknownEngine(String),
    #[error("construction failed verification: {0}")]
    Verification(Box<VerifyReport>),
}

/// A decimal natural number of any size, serialized as a string.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label(pub BigUint);

impl Serialize for Label {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_str_radix(10))
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map(Label).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A finite-depth table approximating one of the constructed maps.
///
/// `psi` holds `Ψ(s)` (or `f_{|s|}(s)`) for every `|s| ≤ depth`; `labels`
/// holds `l(w)`. Fields an engine does not use stay empty and are omitted
/// from JSON.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartialEmbedding {
    pub kind: String,
    pub depth: u32,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub psi: BTreeMap<Word, Word>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub delta: Vec<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub k: Vec<u64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub labels: BTreeMap<Word, Label>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<Label>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uv: Option<(Word, Word)>,
}

impl PartialEmbedding {
    pub fn new(kind: &str, depth: u32) -> Self {
        PartialEmbedding {
            kind: kind.into(),
            depth,
            psi: BTreeMap::new(),
            delta: Vec::new(),
            k: Vec::new(),
            labels: BTreeMap::new(),
            n: None,
            uv: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("embedding serializes")
    }

    /// Every way to corrupt one bit of one table entry: `(entry, bit)`.
    pub fn mutation_sites(&self) -> Vec<Mutation> {
        let mut out = Vec::new();
        for (s, img) in &self.psi {
            for bit in 0..img.len() {
                out.push(Mutation::Psi(s.clone(), bit));
            }
        }
        for (i, d) in self.delta.iter().enumerate() {
            for bit in 0..(64 - d.leading_zeros()).max(1) {
                out.push(Mutation::Delta(i, bit));
            }
        }
        for (i, k) in self.k.iter().enumerate() {
            for bit in 0..(64 - k.leading_zeros()).max(1) {
                out.push(Mutation::K(i, bit));
            }
        }
        for (w, l) in &self.labels {
            for bit in 0..l.0.bits().max(1) {
                out.push(Mutation::Label(w.clone(), bit));
            }
        }
        out
    }

    /// A copy with one bit flipped.
    pub fn mutated(&self, m: &Mutation) -> PartialEmbedding {
        let mut e = self.clone();
        match m {
            Mutation::Psi(s, bit) => {
                if let Some(img) = e.psi.get_mut(s) {
                    img.flip(*bit);
                }
            }
            Mutation::Delta(i, bit) => {
                if let Some(d) = e.delta.get_mut(*i) {
                    *d ^= 1 << bit;
                }
            }
            Mutation::K(i, bit) => {
                if let Some(k) = e.k.get_mut(*i) {
                    *k ^= 1 << bit;
                }
            }
            Mutation::Label(w, bit) => {
                if let Some(l) = e.labels.get_mut(w) {
                    let flipped = !l.0.bit(*bit);
                    l.0.set_bit(*bit, flipped);
                }
            }
        }
        e
    }
}

/// One single-bit corruption of an embedding table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Mutation {
    Psi(Word, usize),
    Delta(usize, u32),
    K(usize, u32),
    Label(Word, u64),
}

/// Outcome of one condition over every instance it quantifies over.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionResult {
    pub condition: String,
    pub passed: bool,
    pub checked: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub engine: String,
    pub depth: u32,
    pub conditions: Vec<ConditionResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.conditions.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ConditionResult> {
        self.conditions.iter().filter(|c| !c.passed)
    }

    pub fn condition(&self, name: &str) -> Option<&ConditionResult> {
        self.conditions.iter().find(|c| c.condition == name)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.conditions {
            let mark = if c.passed { "pass" } else { "FAIL" };
            write!(f, "{mark} {} ({} checked)", c.condition, c.checked)?;
            if let Some(w) = &c.witness {
                write!(f, ": {w}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Accumulates instances of one condition and keeps the first failure.
pub(crate) struct Tally {
    name: &'static str,
    checked: u64,
    witness: Option<String>,
}

impl Tally {
    pub(crate) fn new(name: &'static str) -> Self {
        Tally {
            name,
            checked: 0,
            witness: None,
        }
    }

    /// Record one instance; `witness` is only evaluated on failure.
    pub(crate) fn check(&mut self, ok: bool, witness: impl FnOnce() -> String) -> bool {
        self.checked += 1;
        if !ok && self.witness.is_none() {
            self.witness = Some(witness());
        }
        ok
    }

    pub(crate) fn fail(&mut self, witness: String) {
        self.check(false, || witness);
    }

    pub(crate) fn finish(self) -> ConditionResult {
        ConditionResult {
            condition: self.name.into(),
            passed: self.witness.is_none(),
            checked: self.checked,
            witness: self.witness,
        }
    }
}

/// Everything an engine may consult.
#[derive(Clone)]
pub struct EngineContext {
    pub boxes: Option<Arc<dyn BoxOracle>>,
    pub line: Option<Arc<dyn OneDimOpenOracle>>,
    pub frame: Arc<dyn FrameView>,
    /// The starting pair for `transfer-labels`.
    pub uv: (Word, Word),
}

impl Default for EngineContext {
    fn default() -> Self {
        EngineContext {
            boxes: None,
            line: None,
            frame: Arc::new(StandardFrame::unbounded()),
            uv: (Word::new(), Word::new()),
        }
    }
}

impl EngineContext {
    pub fn with_boxes(boxes: Arc<dyn BoxOracle>) -> Self {
        EngineContext {
            boxes: Some(boxes),
            ..Default::default()
        }
    }

    pub fn with_line(line: Arc<dyn OneDimOpenOracle>) -> Self {
        EngineContext {
            line: Some(line),
            ..Default::default()
        }
    }

    /// Whichever oracles the handle provides, with the standard frame.
    pub fn from_oracle(handle: &OracleHandle) -> Self {
        EngineContext {
            boxes: handle.boxes.clone(),
            line: handle.line.clone(),
            ..Default::default()
        }
    }

    pub(crate) fn box_oracle(&self, engine: &'static str) -> Result<&dyn BoxOracle, EngineError> {
        self.boxes.as_deref().ok_or(EngineError::MissingContext {
            engine,
            what: "box oracle",
        })
    }

    pub(crate) fn line_oracle(
        &self,
        engine: &'static str,
    ) -> Result<&dyn OneDimOpenOracle, EngineError> {
        self.line.as_deref().ok_or(EngineError::MissingContext {
            engine,
            what: "one-dimensional oracle",
        })
    }
}

/// An inductive construction together with its checker.
pub trait Engine: Send + Sync {
    fn name(&self) -> &'static str;

    /// One line on what the engine builds.
    fn role(&self) -> &'static str;

    /// Run the construction to `depth` without checking it.
    fn construct(&self, ctx: &EngineContext, depth: u32) -> Result<PartialEmbedding, EngineError>;

    /// Re-check every construction condition from the tables alone.
    fn verify(&self, emb: &PartialEmbedding, ctx: &EngineContext) -> VerifyReport;

    /// Construct, then verify; a failing report is returned as an error.
    fn build(&self, ctx: &EngineContext, depth: u32) -> Result<PartialEmbedding, EngineError> {
        let emb = self.construct(ctx, depth)?;
        let report = self.verify(&emb, ctx);
        if report.passed() {
            Ok(emb)
        } else {
            Err(EngineError::Verification(Box::new(report)))
        }
    }
}

/// Engines by name.
#[derive(Clone)]
pub struct EngineRegistry {
    engines: BTreeMap<&'static str, Arc<dyn Engine>>,
}

impl EngineRegistry {
    pub fn empty() -> Self {
        EngineRegistry {
            engines: BTreeMap::new(),
        }
    }

    pub fn standard() -> Self {
        let mut r = EngineRegistry::empty();
        r.register(Arc::new(G0Scheme));
        r.register(Arc::new(TreeInterleave));
        r.register(Arc::new(B0Scheme));
        r.register(Arc::new(TransferLabels));
        r
    }

    pub fn register(&mut self, engine: Arc<dyn Engine>) {
        self.engines.insert(engine.name(), engine);
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn Engine>, EngineError> {
        self.engines
            .get(name)
            .cloned()
            .ok_or_else(|| EngineError::UnknownEngine(name.into()))
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.engines.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Arc<dyn Engine>> {
        self.engines.values()
    }
}

/// The oracle each engine is exercised with when none is given: the target
/// sets whose embeddings are the identity.
pub fn reference_oracle(engine: &str) -> Option<serde_json::Value> {
    let v = match engine {
        "g0-scheme" => {
            serde_json::json!({ "kind": "complement-of-boxes", "family": "g0-graphs", "symmetric": true })
        }
        "b0-scheme" => {
            serde_json::json!({ "kind": "complement-of-boxes", "family": "closure-of-b0" })
        }
        "tree-interleave" => {
            serde_json::json!({ "kind": "complement-of-boxes", "family": "frame-tree" })
        }
        "transfer-labels" => serde_json::json!({ "kind": "full-space" }),
        _ => return None,
    };
    Some(v)
}

/// Verify an embedding with the engine named by its `kind`.
pub fn verify_embedding(
    registry: &EngineRegistry,
    emb: &PartialEmbedding,
    ctx: &EngineContext,
) -> Result<VerifyReport, EngineError> {
    Ok(registry.get(&emb.kind)?.verify(emb, ctx))
}

/// All words of length `l`, in lexicographic order.
pub(crate) fn level(l: u32) -> Vec<Word> {
    Word::all_of_length(l as usize).collect()
}

/// Checks shared by the two `Ψ` schemes: the table covers `2^{≤depth}`,
/// `Ψ(∅) = ∅`, children strictly extend parents, lengths are level-uniform
/// and each level is injective.
pub(crate) fn scheme_shape(emb: &PartialEmbedding, out: &mut Vec<ConditionResult>) -> bool {
    let d = emb.depth;
    let mut shape = Tally::new("table-shape");
    let expected: usize = (0..=d).map(|l| 1usize << l).sum();
    shape.check(emb.psi.len() == expected, || {
        format!("{} entries, expected {expected}", emb.psi.len())
    });
    shape.check(emb.k.len() == d as usize + 1, || {
        format!("{} level lengths, expected {}", emb.k.len(), d + 1)
    });
    let complete = (0..=d).all(|l| level(l).iter().all(|s| emb.psi.contains_key(s)));
    shape.check(complete, || "a word of length ≤ depth has no image".into());
    let ok = shape.witness.is_none();
    out.push(shape.finish());
    if !ok {
        return false;
    }

    let mut root = Tally::new("root-empty");
    root.check(emb.psi[&Word::new()].is_empty(), || {
        format!("Ψ(∅) = {}", emb.psi[&Word::new()])
    });
    out.push(root.finish());

    let mut prefix = Tally::new("strict-prefix");
    let mut uniform = Tally::new("uniform-lengths");
    let mut inj = Tally::new("level-injective");
    for l in 0..=d {
        let mut seen: BTreeMap<&Word, Word> = BTreeMap::new();
        for s in level(l) {
            let img = &emb.psi[&s];
            uniform.check(img.len() as u64 == emb.k[l as usize], || {
                format!("|Ψ({s})| = {} ≠ k_{l} = {}", img.len(), emb.k[l as usize])
            });
            match seen.insert(img, s.clone()) {
                Some(other) => inj.fail(format!("Ψ({other}) = Ψ({s}) = {img}")),
                None => {
                    inj.check(true, String::new);
                }
            }
            if l < d {
                for e in [false, true] {
                    let child = &emb.psi[&s.with_bit(e)];
                    prefix.check(img.is_prefix_of(child) && img.len() < child.len(), || {
                        format!(
                            "Ψ({s}) = {img} is not a proper prefix of Ψ({}) = {child}",
                            s.with_bit(e)
                        )
                    });
                }
            }
        }
    }
    out.push(prefix.finish());
    out.push(uniform.finish());
    out.push(inj.finish());
    true
}
