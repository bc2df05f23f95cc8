//! Binary words whose length does not fit in a machine integer.
//!
//! A [`SparseWord`] stores its length and the sorted positions of its ones as
//! `BigUint`s. Only the label engine needs these; everything else uses [`Word`].

use std::fmt;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::words::Word;

#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct SparseWord {
    #[serde(with = "big_string")]
    len: BigUint,
    #[serde(with = "big_string_vec")]
    ones: Vec<BigUint>,
}

impl SparseWord {
    pub fn new() -> Self {
        SparseWord::default()
    }

    pub fn zeros(len: BigUint) -> Self {
        SparseWord {
            len,
            ones: Vec::new(),
        }
    }

    pub fn from_word(w: &Word) -> Self {
        SparseWord {
            len: BigUint::from(w.len()),
            ones: w.one_positions().map(BigUint::from).collect(),
        }
    }

    /// Build from a length and strictly increasing one-positions below it.
    pub fn from_parts(len: BigUint, ones: Vec<BigUint>) -> Self {
        debug_assert!(ones.windows(2).all(|p| p[0] < p[1]));
        debug_assert!(ones.last().is_none_or(|o| *o < len));
        SparseWord { len, ones }
    }

    pub fn len(&self) -> &BigUint {
        &self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len.is_zero()
    }

    pub fn ones(&self) -> &[BigUint] {
        &self.ones
    }

    pub fn get(&self, i: &BigUint) -> bool {
        assert!(*i < self.len, "bit index out of range");
        self.ones.binary_search(i).is_ok()
    }

    pub fn push(&mut self, b: bool) {
        if b {
            self.ones.push(self.len.clone());
        }
        self.len += 1u32;
    }

    pub fn push_zeros(&mut self, n: &BigUint) {
        self.len += n;
    }

    pub fn append(&mut self, other: &SparseWord) {
        self.ones.extend(other.ones.iter().map(|o| o + &self.len));
        self.len += &other.len;
    }

    pub fn append_word(&mut self, other: &Word) {
        self.ones
            .extend(other.one_positions().map(|o| &self.len + o));
        self.len += other.len();
    }

    pub fn concat(&self, other: &SparseWord) -> SparseWord {
        let mut s = self.clone();
        s.append(other);
        s
    }

    pub fn prefix(&self, n: &BigUint) -> SparseWord {
        assert!(*n <= self.len, "prefix longer than word");
        let cut = self.ones.partition_point(|o| o < n);
        SparseWord {
            len: n.clone(),
            ones: self.ones[..cut].to_vec(),
        }
    }

    pub fn suffix_from(&self, from: &BigUint) -> SparseWord {
        assert!(*from <= self.len, "suffix start past end");
        let cut = self.ones.partition_point(|o| o < from);
        SparseWord {
            len: &self.len - from,
            ones: self.ones[cut..].iter().map(|o| o - from).collect(),
        }
    }

    pub fn is_prefix_of(&self, other: &SparseWord) -> bool {
        self.len <= other.len && other.prefix(&self.len) == *self
    }

    /// Position just past the last one (0 if there is none).
    pub fn trimmed_len(&self) -> BigUint {
        self.ones.last().map_or_else(BigUint::zero, |o| o + 1u32)
    }

    /// The word without its trailing zeros, densely, if it is short enough.
    pub fn core(&self, limit: usize) -> Option<Word> {
        let n = self.trimmed_len().to_usize()?;
        if n > limit {
            return None;
        }
        let mut w = Word::zeros(n);
        for o in &self.ones {
            w.set(o.to_usize().unwrap(), true);
        }
        Some(w)
    }

    /// Dense form, if the length fits under `limit`.
    pub fn to_word(&self, limit: usize) -> Option<Word> {
        let n = self.len.to_usize().filter(|&n| n <= limit)?;
        let mut w = self.core(limit)?;
        w.push_zeros(n - w.len());
        Some(w)
    }

    /// Positions where two equal-length words differ.
    pub fn xor_positions(&self, other: &SparseWord) -> Vec<BigUint> {
        assert_eq!(self.len, other.len, "xor needs equal lengths");
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < self.ones.len() || j < other.ones.len() {
            match (self.ones.get(i), other.ones.get(j)) {
                (Some(a), Some(b)) if a == b => {
                    i += 1;
                    j += 1;
                }
                (Some(a), Some(b)) if a < b => {
                    out.push(a.clone());
                    i += 1;
                }
                (Some(_), Some(b)) => {
                    out.push(b.clone());
                    j += 1;
                }
                (Some(a), None) => {
                    out.push(a.clone());
                    i += 1;
                }
                (None, Some(b)) => {
                    out.push(b.clone());
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        out
    }

    /// Last position where two equal-length words differ.
    pub fn last_difference(&self, other: &SparseWord) -> Option<BigUint> {
        self.xor_positions(other).pop()
    }
}

impl fmt::Debug for SparseWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_word(256) {
            Some(w) => write!(f, "SparseWord(\"{w}\")"),
            None => write!(f, "SparseWord(len={}, ones={:?})", self.len, self.ones),
        }
    }
}

pub(crate) mod big_string {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_str_radix(10))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub(crate) mod big_string_vec {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|x| x.to_str_radix(10)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigUint>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| s.parse().map_err(serde::de::Error::custom))
            .collect()
    }
}
