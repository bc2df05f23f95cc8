//! Eventually periodic points of `2^ω`, stored as `prefix · period^ω`.

use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::IdealError;
use crate::words::{pair, phi, Word, WordsError};

/// `prefix · period · period · …`, kept canonical: the period is primitive and
/// the prefix is as short as possible. Equal points have equal fields.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawEp")]
pub struct EpPoint {
    prefix: Word,
    period: Word,
}

#[derive(Deserialize)]
struct RawEp {
    prefix: Word,
    period: Word,
}

impl TryFrom<RawEp> for EpPoint {
    type Error = IdealError;

    fn try_from(r: RawEp) -> Result<Self, Self::Error> {
        EpPoint::new(r.prefix, r.period)
    }
}

fn primitive_root(period: &Word) -> Word {
    let k = period.len();
    for d in 1..=k {
        if k % d == 0 && (d..k).all(|i| period.get(i) == period.get(i - d)) {
            return period.prefix(d);
        }
    }
    unreachable!("a word is always a power of itself")
}

impl EpPoint {
    pub fn new(prefix: Word, period: Word) -> Result<Self, IdealError> {
        if period.is_empty() {
            return Err(IdealError::EmptyPeriod);
        }
        let mut prefix = prefix;
        let mut period = primitive_root(&period);
        let k = period.len();
        // Absorb the prefix's tail into the period while it matches, rotating.
        while !prefix.is_empty() && prefix.get(prefix.len() - 1) == period.get(k - 1) {
            prefix = prefix.prefix(prefix.len() - 1);
            let mut rotated = Word::new();
            rotated.push(period.get(k - 1));
            rotated.append(&period.prefix(k - 1));
            period = rotated;
        }
        Ok(EpPoint { prefix, period })
    }

    /// The all-zero point.
    pub fn zero() -> Self {
        EpPoint {
            prefix: Word::new(),
            period: Word::zeros(1),
        }
    }

    /// The finitely supported point `w · 0^ω`.
    pub fn finite(w: &Word) -> Self {
        EpPoint::new(w.clone(), Word::zeros(1)).expect("nonempty period")
    }

    /// The finitely supported point with ones exactly at `support`.
    pub fn from_support(support: &[u64]) -> Self {
        let len = support.iter().max().map_or(0, |&m| m as usize + 1);
        let mut w = Word::zeros(len);
        for &m in support {
            w.set(m as usize, true);
        }
        EpPoint::finite(&w)
    }

    pub fn prefix(&self) -> &Word {
        &self.prefix
    }

    pub fn period(&self) -> &Word {
        &self.period
    }

    pub fn eval(&self, q: u64) -> bool {
        let s = self.prefix.len() as u64;
        if q < s {
            self.prefix.get(q as usize)
        } else {
            self.period
                .get(((q - s) % self.period.len() as u64) as usize)
        }
    }

    /// `x(q)` at a position too large for a machine integer.
    pub fn eval_at(&self, q: &BigUint) -> bool {
        match q.to_u64() {
            Some(q) => self.eval(q),
            None => {
                let s = BigUint::from(self.prefix.len());
                let r = (q - s) % BigUint::from(self.period.len());
                self.period
                    .get(r.to_usize().expect("residue below period length"))
            }
        }
    }

    /// The first `len` bits.
    pub fn truncate(&self, len: usize) -> Word {
        Word::from_bits((0..len as u64).map(|q| self.eval(q)))
    }

    pub fn is_finitely_supported(&self) -> bool {
        self.period.is_all_zero()
    }

    /// The positions of the ones, when there are finitely many.
    pub fn support(&self) -> Option<Vec<u64>> {
        self.is_finitely_supported()
            .then(|| self.prefix.one_positions().map(|i| i as u64).collect())
    }

    fn combine(&self, other: &EpPoint, f: impl Fn(bool, bool) -> bool) -> EpPoint {
        let s = self.prefix.len().max(other.prefix.len());
        let k = self.period.len().lcm(&other.period.len());
        let bits = |range: std::ops::Range<usize>| {
            Word::from_bits(range.map(|q| f(self.eval(q as u64), other.eval(q as u64))))
        };
        EpPoint::new(bits(0..s), bits(s..s + k)).expect("nonempty period")
    }

    /// Pointwise symmetric difference.
    pub fn xor(&self, other: &EpPoint) -> EpPoint {
        self.combine(other, |a, b| a != b)
    }

    /// Pointwise maximum of a nonempty list.
    pub fn max(xs: &[EpPoint]) -> Result<EpPoint, IdealError> {
        let (first, rest) = xs.split_first().ok_or(IdealError::EmptyList)?;
        Ok(rest
            .iter()
            .fold(first.clone(), |acc, x| acc.combine(x, |a, b| a | b)))
    }

    /// Pointwise `self ≤ other`.
    pub fn le(&self, other: &EpPoint) -> bool {
        let s = self.prefix.len().max(other.prefix.len());
        let k = self.period.len().lcm(&other.period.len());
        (0..(s + k) as u64).all(|q| !self.eval(q) || other.eval(q))
    }

    /// The first `length` bits of the column `(x)_n(p) = x(⟨n, p⟩)`.
    pub fn select_vertical(&self, n: u64, length: usize) -> Result<Word, WordsError> {
        let mut out = Word::zeros(length);
        for p in 0..length {
            out.set(p, self.eval(pair(n, p as u64)?.0));
        }
        Ok(out)
    }

    /// The first `length` bits of the section `^n(x)(p) = x(φ(n, p))`.
    pub fn select_phi(&self, n: u64, length: usize) -> Result<Word, WordsError> {
        let mut out = Word::zeros(length);
        for p in 0..length {
            out.set(p, self.eval(phi(n, p as u64)?.0));
        }
        Ok(out)
    }
}

impl fmt::Debug for EpPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "EpPoint({}({})^ω)", self.prefix, self.period)
    }
}

impl fmt::Display for EpPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.prefix, self.period)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::w;

    fn ep(p: &str, k: &str) -> EpPoint {
        EpPoint::new(w(p), w(k)).unwrap()
    }

    #[test]
    fn canonical_forms() {
        assert_eq!(ep("", "1010"), ep("", "10"));
        assert_eq!(ep("0101", "01"), ep("", "01"));
        let x = ep("11", "01");
        assert_eq!(
            (x.prefix().to_string(), x.period().to_string()),
            ("1".into(), "10".into())
        );
        assert_eq!(ep("0110", "0"), ep("011", "0"));
        assert!(EpPoint::new(w("1"), Word::new()).is_err());
    }

    #[test]
    fn evaluation() {
        assert!(ep("1", "0").eval(0));
        assert!(ep("", "10").eval(4));
        assert!(ep("01", "1").eval(1));
        assert!(!ep("01", "1").eval(0));
    }

    #[test]
    fn xor_max_le() {
        let x = ep("011", "10");
        assert_eq!(x.xor(&x), EpPoint::zero());
        assert_eq!(ep("", "10").xor(&ep("", "1")), ep("", "01"));
        assert_eq!(ep("1", "0").xor(&ep("", "0")), ep("1", "0"));
        assert_eq!(EpPoint::max(&[x.clone(), EpPoint::zero()]).unwrap(), x);
        assert_eq!(
            EpPoint::max(&[ep("", "10"), ep("", "01")]).unwrap(),
            ep("", "1")
        );
        assert!(EpPoint::zero().le(&x));
        assert!(!x.le(&EpPoint::zero()));
        assert!(EpPoint::max(&[]).is_err());
    }

    #[test]
    fn sections() {
        assert_eq!(
            EpPoint::zero().select_vertical(3, 5).unwrap(),
            Word::zeros(5)
        );
        assert_eq!(ep("", "1").select_vertical(0, 4).unwrap(), w("1111"));
        // ⟨0, p⟩ = 0, 2, 5, 9 for p < 4.
        assert_eq!(ep("", "10").select_vertical(0, 4).unwrap(), w("1100"));
        assert_eq!(ep("", "1").select_phi(1, 3).unwrap(), w("111"));
        // φ(0, p) = 0, 3, 2 for p < 3.
        assert_eq!(ep("", "10").select_phi(0, 3).unwrap(), w("101"));
    }

    #[test]
    fn serde_canonicalizes() {
        let x: EpPoint = serde_json::from_str(r#"{"prefix":"0101","period":"0101"}"#).unwrap();
        assert_eq!(x, ep("", "01"));
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, r#"{"prefix":"","period":"01"}"#);
        assert!(serde_json::from_str::<EpPoint>(r#"{"prefix":"1","period":""}"#).is_err());
    }
}
