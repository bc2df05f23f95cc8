//! Finite binary words, the length-lex enumeration `psi`, the dense sequence
//! `sn`, and the Cantor pairing arithmetic.
//!
//! Naturals are `u64` with checked arithmetic. Pairing overflow is an error.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordsError {
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),
    #[error("invalid bit character {0:?} (expected '0' or '1')")]
    BadChar(char),
    #[error("word of length {0} does not fit in a 64-bit index")]
    TooLong(usize),
}

/// A finite binary word, bit-packed.
///
/// Bit `i` lives in `limbs[i / 64]` at bit `i % 64`. Bits past `len` are always
/// zero, so the derived equality and hashing are exact.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Word {
    len: usize,
    limbs: Vec<u64>,
}

#[inline]
fn limbs_for(len: usize) -> usize {
    len.div_ceil(64)
}

impl Word {
    pub fn new() -> Self {
        Word::default()
    }

    pub fn zeros(len: usize) -> Self {
        Word {
            len,
            limbs: vec![0; limbs_for(len)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut w = Word::zeros(len);
        for i in 0..len {
            w.set(i, true);
        }
        w
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut w = Word::new();
        for b in bits {
            w.push(b);
        }
        w
    }

    /// The `len`-bit big-endian binary expansion of `value` (first bit most significant).
    pub fn from_index(value: u64, len: usize) -> Self {
        let mut w = Word::zeros(len);
        for i in 0..len {
            let shift = len - 1 - i;
            if shift < 64 && (value >> shift) & 1 == 1 {
                w.set(i, true);
            }
        }
        w
    }

    /// Inverse of [`Word::from_index`]; fails for words longer than 64 bits.
    pub fn to_index(&self) -> Result<u64, WordsError> {
        if self.len > 64 {
            return Err(WordsError::TooLong(self.len));
        }
        let mut v = 0u64;
        for b in self.iter() {
            v = (v << 1) | b as u64;
        }
        Ok(v)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(
            i < self.len,
            "bit index {i} out of range for length {}",
            self.len
        );
        (self.limbs[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, b: bool) {
        assert!(
            i < self.len,
            "bit index {i} out of range for length {}",
            self.len
        );
        let mask = 1u64 << (i % 64);
        if b {
            self.limbs[i / 64] |= mask;
        } else {
            self.limbs[i / 64] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        let b = self.get(i);
        self.set(i, !b);
    }

    pub fn push(&mut self, b: bool) {
        if self.len % 64 == 0 {
            self.limbs.push(0);
        }
        self.len += 1;
        if b {
            self.set(self.len - 1, true);
        }
    }

    pub fn push_zeros(&mut self, n: usize) {
        self.len += n;
        self.limbs.resize(limbs_for(self.len), 0);
    }

    pub fn append(&mut self, other: &Word) {
        let start = self.len;
        self.push_zeros(other.len);
        for i in other.one_positions() {
            self.set(start + i, true);
        }
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut w = self.clone();
        w.append(other);
        w
    }

    pub fn with_bit(&self, b: bool) -> Word {
        let mut w = self.clone();
        w.push(b);
        w
    }

    pub fn with_zeros(&self, n: usize) -> Word {
        let mut w = self.clone();
        w.push_zeros(n);
        w
    }

    /// The first `n` bits (`s|n`).
    pub fn prefix(&self, n: usize) -> Word {
        assert!(
            n <= self.len,
            "prefix length {n} exceeds word length {}",
            self.len
        );
        let mut limbs = self.limbs[..limbs_for(n)].to_vec();
        if n % 64 != 0 {
            let last = limbs.len() - 1;
            limbs[last] &= (1u64 << (n % 64)) - 1;
        }
        Word { len: n, limbs }
    }

    /// Bits `from..self.len()`.
    pub fn suffix_from(&self, from: usize) -> Word {
        self.slice(from, self.len)
    }

    pub fn slice(&self, from: usize, to: usize) -> Word {
        assert!(
            from <= to && to <= self.len,
            "bad slice {from}..{to} of length {}",
            self.len
        );
        let mut w = Word::zeros(to - from);
        for i in self.one_positions() {
            if i >= from && i < to {
                w.set(i - from, true);
            }
        }
        w
    }

    /// `self ⊑ other`.
    pub fn is_prefix_of(&self, other: &Word) -> bool {
        self.len <= other.len && other.prefix(self.len) == *self
    }

    /// Whether one word is a prefix of the other.
    pub fn compatible(&self, other: &Word) -> bool {
        self.is_prefix_of(other) || other.is_prefix_of(self)
    }

    /// First position below `min(len)` where the words differ.
    pub fn first_difference(&self, other: &Word) -> Option<usize> {
        let n = self.len.min(other.len);
        for (k, (a, b)) in self.limbs.iter().zip(&other.limbs).enumerate() {
            let x = a ^ b;
            if x != 0 {
                let pos = k * 64 + x.trailing_zeros() as usize;
                return (pos < n).then_some(pos);
            }
            if (k + 1) * 64 >= n {
                break;
            }
        }
        None
    }

    /// Last position where two equal-length words differ.
    pub fn last_difference(&self, other: &Word) -> Option<usize> {
        assert_eq!(self.len, other.len, "last_difference needs equal lengths");
        for k in (0..self.limbs.len()).rev() {
            let x = self.limbs[k] ^ other.limbs[k];
            if x != 0 {
                return Some(k * 64 + 63 - x.leading_zeros() as usize);
            }
        }
        None
    }

    /// Pointwise xor of equal-length words.
    pub fn xor(&self, other: &Word) -> Word {
        assert_eq!(self.len, other.len, "xor needs equal lengths");
        Word {
            len: self.len,
            limbs: self
                .limbs
                .iter()
                .zip(&other.limbs)
                .map(|(a, b)| a ^ b)
                .collect(),
        }
    }

    pub fn count_ones(&self) -> usize {
        self.limbs.iter().map(|l| l.count_ones() as usize).sum()
    }

    pub fn is_all_zero(&self) -> bool {
        self.limbs.iter().all(|&l| l == 0)
    }

    /// Length with trailing zeros removed.
    pub fn trimmed_len(&self) -> usize {
        self.last_one().map_or(0, |i| i + 1)
    }

    pub fn last_one(&self) -> Option<usize> {
        for k in (0..self.limbs.len()).rev() {
            if self.limbs[k] != 0 {
                return Some(k * 64 + 63 - self.limbs[k].leading_zeros() as usize);
            }
        }
        None
    }

    pub fn one_positions(&self) -> impl Iterator<Item = usize> + '_ {
        self.limbs.iter().enumerate().flat_map(|(k, &limb)| {
            let mut rest = limb;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let t = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(k * 64 + t)
            })
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// All words of length `len` in lexicographic order.
    pub fn all_of_length(len: usize) -> impl Iterator<Item = Word> {
        assert!(len < 64, "cannot enumerate 2^{len} words");
        (0..1u64 << len).map(move |v| Word::from_index(v, len))
    }
}

impl Ord for Word {
    /// Lexicographic with `0 < 1`; a proper prefix sorts first. Matches the
    /// ordering of the '0'/'1' string forms.
    fn cmp(&self, other: &Self) -> Ordering {
        match self.first_difference(other) {
            Some(i) => {
                if self.get(i) {
                    Ordering::Greater
                } else {
                    Ordering::Less
                }
            }
            None => self.len.cmp(&other.len),
        }
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.iter().map(|b| if b { '1' } else { '0' }).collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word(\"{self}\")")
    }
}

impl FromStr for Word {
    type Err = WordsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut w = Word::new();
        for c in s.chars() {
            match c {
                '0' => w.push(false),
                '1' => w.push(true),
                other => return Err(WordsError::BadChar(other)),
            }
        }
        Ok(w)
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parse a '0'/'1' literal; panics on anything else. Convenience for tests and tables.
pub fn w(s: &str) -> Word {
    s.parse().expect("word literal")
}

/// `ψ(n)`: the n-th word in length-then-lexicographic order.
pub fn psi(n: u64) -> Word {
    let m = n as u128 + 1;
    let len = 127 - m.leading_zeros() as usize;
    let idx = (m - (1u128 << len)) as u64;
    Word::from_index(idx, len)
}

/// `ψ⁻¹(s) = 2^|s| − 1 + value(s)`.
pub fn psi_inv(s: &Word) -> Result<u64, WordsError> {
    if s.len() > 64 {
        return Err(WordsError::Overflow("psi_inv"));
    }
    let base = (1u128 << s.len()) - 1;
    let v = base + s.to_index()? as u128;
    u64::try_from(v).map_err(|_| WordsError::Overflow("psi_inv"))
}

/// `s_n = ψ(n)·0^{n−|ψ(n)|}`, a word of length exactly `n`.
pub fn sn(n: u64) -> Word {
    let n_us = usize::try_from(n).expect("sn length fits in memory");
    let mut s = psi(n);
    let pad = n_us - s.len();
    s.push_zeros(pad);
    s
}

/// Least `δ ≥ lo` with `p ⊑ s_δ`, found without scanning.
///
/// Either `ψ(δ)` is a prefix of `p` followed only by zeros in `p`, or `ψ(δ)`
/// extends `p`. The second case is an interval of indices for each length of
/// `ψ(δ)`, and those intervals increase with the length.
pub fn least_sn_extension(p: &Word, lo: u64) -> Option<u64> {
    let lo = lo.max(p.len() as u64);
    let mut best: Option<u64> = None;
    let mut offer = |d: u64| {
        if best.is_none_or(|b| d < b) {
            best = Some(d);
        }
    };
    for i in p.trimmed_len()..p.len() {
        if let Ok(d) = psi_inv(&p.prefix(i)) {
            if d >= lo {
                offer(d);
            }
        }
    }
    for extra in 0..=64usize.saturating_sub(p.len()) {
        let mut low = p.clone();
        low.push_zeros(extra);
        let mut high = p.clone();
        for _ in 0..extra {
            high.push(true);
        }
        let (Ok(a), Ok(b)) = (psi_inv(&low), psi_inv(&high)) else {
            break;
        };
        if b >= lo {
            offer(a.max(lo));
            break;
        }
    }
    best
}

/// Code of a pair under the Cantor pairing `⟨n, p⟩ = (n+p)(n+p+1)/2 + p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PairCode(pub u64);

impl From<u64> for PairCode {
    fn from(v: u64) -> Self {
        PairCode(v)
    }
}

fn tri(m: u128) -> u128 {
    m * (m + 1) / 2
}

pub fn pair(n: u64, p: u64) -> Result<PairCode, WordsError> {
    let s = n as u128 + p as u128;
    // s(s+1) can exceed u128 when n + p is near 2^65
    s.checked_mul(s + 1)
        .and_then(|t| u64::try_from(t / 2 + p as u128).ok())
        .map(PairCode)
        .ok_or(WordsError::Overflow("pair"))
}

/// `M(l) = max{m : m(m+1)/2 ≤ l}`.
pub fn m_of(l: u64) -> u64 {
    let disc = 8 * l as u128 + 1;
    let mut m = (disc.isqrt() - 1) / 2;
    while tri(m + 1) <= l as u128 {
        m += 1;
    }
    while tri(m) > l as u128 {
        m -= 1;
    }
    m as u64
}

/// `((q)_0, (q)_1)`.
pub fn unpair(q: PairCode) -> (u64, u64) {
    let m = m_of(q.0);
    let p = q.0 - tri(m as u128) as u64;
    (m - p, p)
}

/// `(q)_0`.
pub fn fst(q: u64) -> u64 {
    unpair(PairCode(q)).0
}

/// `(q)_1`.
pub fn snd(q: u64) -> u64 {
    unpair(PairCode(q)).1
}

/// `φ(n, p) = ⟨⟨n, (p)_0⟩, (p)_1⟩`.
pub fn phi(n: u64, p: u64) -> Result<PairCode, WordsError> {
    let (p0, p1) = unpair(PairCode(p));
    pair(pair(n, p0)?.0, p1)
}

/// `q ↦ (((q)_0)_0, ⟨((q)_0)_1, (q)_1⟩)`.
pub fn phi_inv(q: PairCode) -> (u64, u64) {
    let (a, b) = unpair(q);
    let (n, c) = unpair(PairCode(a));
    let p = pair(c, b)
        .expect("inner pair of a decoded code cannot overflow")
        .0;
    (n, p)
}

/// Residue of `⟨n, p⟩` modulo `m`, from `n, p` taken modulo `2m`.
pub fn pair_mod(n: u64, p: u64, m: u64) -> u64 {
    let m2 = 2 * m as u128;
    let s = (n as u128 % m2 + p as u128 % m2) % m2;
    ((tri(s) + p as u128) % m as u128) as u64
}

/// Arbitrary-precision pairing, used where labels outgrow 64 bits.
pub mod big {
    use num_bigint::BigUint;
    use num_traits::{One, Zero};

    use super::Word;

    fn tri(m: &BigUint) -> BigUint {
        (m * (m + 1u32)) >> 1u32
    }

    pub fn pair(n: &BigUint, p: &BigUint) -> BigUint {
        tri(&(n + p)) + p
    }

    pub fn m_of(l: &BigUint) -> BigUint {
        let disc: BigUint = (l << 3u32) + 1u32;
        let mut m: BigUint = (disc.sqrt() - 1u32) >> 1u32;
        while tri(&(&m + 1u32)) <= *l {
            m += 1u32;
        }
        while tri(&m) > *l {
            m -= 1u32;
        }
        m
    }

    pub fn unpair(q: &BigUint) -> (BigUint, BigUint) {
        let m = m_of(q);
        let p = q - tri(&m);
        (&m - &p, p)
    }

    /// `ψ⁻¹(core·0^j)` without materializing the zeros.
    pub fn psi_inv_padded(core: &Word, j: u64) -> BigUint {
        let len = core.len() as u64 + j;
        let mut v = BigUint::zero();
        for b in core.iter() {
            v <<= 1u32;
            if b {
                v += 1u32;
            }
        }
        v <<= j;
        let base: BigUint = (BigUint::one() << len) - 1u32;
        base + v
    }

    /// `ψ(b)` as (length, positions of ones); lengths are small enough for `usize`.
    pub fn psi(b: &BigUint) -> (u64, Vec<u64>) {
        let m: BigUint = b + 1u32;
        let len = m.bits() - 1;
        let idx: BigUint = m - (BigUint::one() << len);
        let ones = (0..len).filter(|&i| idx.bit(len - 1 - i)).collect();
        (len, ones)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_overflow_is_reported() {
        assert!(pair(u64::MAX, 1).is_err());
        assert!(pair(u64::MAX, u64::MAX).is_err());
        assert!(pair(1 << 33, 0).is_err());
        assert_eq!(pair(0, 1).unwrap(), PairCode(2));
    }

    #[test]
    fn least_sn_extension_matches_scan() {
        for len in 0..=6 {
            for p in Word::all_of_length(len) {
                for lo in [0u64, 3, 9, 40] {
                    let scan = (lo..5000).find(|&d| d >= len as u64 && p.is_prefix_of(&sn(d)));
                    assert_eq!(least_sn_extension(&p, lo), scan, "p = {p}, lo = {lo}");
                }
            }
        }
    }

    #[test]
    fn psi_small_values() {
        assert_eq!(psi(0), Word::new());
        assert_eq!(psi(1), w("0"));
        assert_eq!(psi(2), w("1"));
        assert_eq!(psi(3), w("00"));
        assert_eq!(psi(6), w("11"));
        assert_eq!(psi(7), w("000"));
        assert_eq!(psi(u64::MAX).len(), 64);
    }

    #[test]
    fn psi_inv_small_values() {
        assert_eq!(psi_inv(&Word::new()), Ok(0));
        assert_eq!(psi_inv(&w("1")), Ok(2));
        assert_eq!(psi_inv(&w("00")), Ok(3));
        assert_eq!(
            psi_inv(&Word::ones(64)),
            Err(WordsError::Overflow("psi_inv"))
        );
    }

    #[test]
    fn sn_pads_with_zeros() {
        assert_eq!(sn(0), Word::new());
        assert_eq!(sn(3), w("000"));
        assert_eq!(sn(4), w("0100"));
    }

    #[test]
    fn pairing_values() {
        assert_eq!(pair(0, 0), Ok(PairCode(0)));
        assert_eq!(pair(1, 0), Ok(PairCode(1)));
        assert_eq!(pair(0, 1), Ok(PairCode(2)));
        assert_eq!(pair(1, 1), Ok(PairCode(4)));
        assert_eq!(unpair(PairCode(3)), (2, 0));
        assert_eq!(unpair(PairCode(5)), (0, 2));
        assert_eq!(m_of(3), 2);
        assert_eq!(m_of(5), 2);
        assert!(pair(u64::MAX, 0).is_err());
        assert!(pair(1 << 33, 0).is_err());
        assert!(pair(1 << 32, 0).is_ok());
    }

    #[test]
    fn phi_values() {
        assert_eq!(phi(0, 0), Ok(PairCode(0)));
        assert_eq!(phi(1, 0), Ok(PairCode(1)));
        assert_eq!(phi(0, 1), Ok(PairCode(3)));
        assert_eq!(phi_inv(PairCode(3)), (0, 1));
        assert_eq!(phi_inv(PairCode(1)), (1, 0));
    }

    #[test]
    fn unpair_near_the_top_of_the_range() {
        for q in [u64::MAX, u64::MAX - 1, 1 << 63] {
            let (n, p) = unpair(PairCode(q));
            assert_eq!(pair(n, p), Ok(PairCode(q)));
        }
    }

    #[test]
    fn word_order_matches_string_order() {
        let mut ws: Vec<Word> = (0..40).map(psi).collect();
        let mut ss: Vec<String> = ws.iter().map(|x| x.to_string()).collect();
        ws.sort();
        ss.sort();
        let back: Vec<String> = ws.iter().map(|x| x.to_string()).collect();
        assert_eq!(back, ss);
    }

    #[test]
    fn word_bit_ops_across_limbs() {
        let mut a = Word::zeros(130);
        a.set(0, true);
        a.set(64, true);
        a.set(129, true);
        assert_eq!(a.one_positions().collect::<Vec<_>>(), vec![0, 64, 129]);
        assert_eq!(a.prefix(65).count_ones(), 2);
        assert_eq!(
            a.slice(64, 130).one_positions().collect::<Vec<_>>(),
            vec![0, 65]
        );
        let b = Word::zeros(130);
        assert_eq!(a.first_difference(&b), Some(0));
        assert_eq!(a.last_difference(&b), Some(129));
        assert_eq!(a.trimmed_len(), 130);
        assert!(a.prefix(70).is_prefix_of(&a));
        assert!(!b.prefix(70).is_prefix_of(&a));
    }

    #[test]
    fn pair_mod_matches_direct_residue() {
        for m in 1..13u64 {
            for n in 0..60 {
                for p in 0..60 {
                    assert_eq!(pair_mod(n, p, m), pair(n, p).unwrap().0 % m);
                }
            }
        }
    }

    #[test]
    fn big_pairing_agrees_with_u64() {
        use num_bigint::BigUint;
        for q in [0u64, 1, 5, 1000, 123_456_789] {
            let (a, b) = big::unpair(&BigUint::from(q));
            assert_eq!((a, b), {
                let (x, y) = unpair(PairCode(q));
                (BigUint::from(x), BigUint::from(y))
            });
        }
        assert_eq!(
            big::psi_inv_padded(&w("01"), 2),
            BigUint::from(psi_inv(&w("0100")).unwrap())
        );
        assert_eq!(big::psi(&BigUint::from(9u32)), (3, vec![1]));
    }
}
