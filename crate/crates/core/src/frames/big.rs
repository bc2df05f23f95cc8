//! The standard frame at lengths beyond 64 bits, and the inversion that finds
//! its least entry extending a given pair.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use super::FrameError;
use crate::sparse::SparseWord;
use crate::words::big::{pair, psi, psi_inv_padded, unpair};
use crate::words::Word;

/// Cap on `|ψ(b)|`; beyond this the entry itself would be astronomically long.
pub const MAX_PSI_BITS: u64 = 1 << 20;

/// The standard frame with arbitrary-precision lengths. Entries are computed
/// recursively on request and never cached.
#[derive(Debug, Clone, Copy, Default)]
pub struct BigFrame;

/// `(a, b)` with `⟨a, b⟩ = (len − 1)_1`.
fn split(len: &BigUint) -> (BigUint, BigUint) {
    let l = len - 1u32;
    let (_, c) = unpair(&l);
    unpair(&c)
}

impl BigFrame {
    /// Branch point, common tail and `b` of the entry of length `len ≥ 1`.
    pub fn branch(&self, len: &BigUint) -> Result<(BigUint, SparseWord), FrameError> {
        assert!(!len.is_zero(), "the empty entry has no branch");
        let (a, b) = split(len);
        if b.bits() > MAX_PSI_BITS {
            return Err(FrameError::TooLarge(format!(
                "psi index with {} bits",
                b.bits()
            )));
        }
        let (psi_len, ones) = psi(&b);
        let tail_len: BigUint = len - 1u32 - &a;
        if tail_len < BigUint::from(psi_len) {
            return Err(FrameError::NegativePadding {
                len: len.to_u64().unwrap_or(u64::MAX),
                branch: a.to_u64().unwrap_or(u64::MAX),
                psi_len,
            });
        }
        let tail = SparseWord::from_parts(tail_len, ones.into_iter().map(BigUint::from).collect());
        Ok((a, tail))
    }

    /// `(u_len, v_len)`.
    pub fn entry(&self, len: &BigUint) -> Result<(SparseWord, SparseWord), FrameError> {
        if len.is_zero() {
            return Ok((SparseWord::new(), SparseWord::new()));
        }
        let (a, tail) = self.branch(len)?;
        let (mut u, mut v) = self.entry(&a)?;
        u.push(false);
        v.push(true);
        u.append(&tail);
        v.append(&tail);
        Ok((u, v))
    }
}

/// Least entry length `E ≥ min_len` of the standard frame with `(E)_0 = p` and
/// entry `(u_q 0 W 0^N, v_q 1 W 0^N)`, where `W = core · 0^(tail_len − |core|)`
/// and `core` has no trailing zeros.
///
/// Such an entry has `(E − 1)_1 = ⟨q, b⟩` with `ψ(b) = core · 0^j`. For fixed
/// `c = ⟨q, b⟩`, the lengths with `(E)_0 = p` are `⟨p+1, c⟩ + 1`, plus
/// `⟨0, c⟩ + 1` when `c + 1 = p`. Both grow with `j`, so the scan over `j` stops
/// once the main candidate is long enough and `c` has reached `p − 1`; before
/// that a later `j` can still give a shorter secondary candidate.
pub fn minimal_extension(
    q: &BigUint,
    core: &Word,
    tail_len: &BigUint,
    min_len: &BigUint,
    p: u64,
) -> Result<BigUint, FrameError> {
    debug_assert!(core.is_empty() || core.get(core.len() - 1));
    let floor = min_len.max(&(q + 1u32 + tail_len)).clone();
    let mut best: Option<BigUint> = None;
    for j in 0u64.. {
        if core.len() as u64 + j > MAX_PSI_BITS {
            return Err(FrameError::TooLarge(format!(
                "tail core of {} bits needs ψ-index beyond {MAX_PSI_BITS} bits",
                core.len()
            )));
        }
        let b = psi_inv_padded(core, j);
        let c = pair(q, &b);
        let fits = |len: &BigUint| -> bool {
            *len >= floor && len - 1u32 - q >= BigUint::from(core.len() as u64 + j)
        };
        if p >= 1 && c == BigUint::from(p - 1) {
            let len = pair(&BigUint::zero(), &c) + BigUint::one();
            if fits(&len) && best.as_ref().is_none_or(|x| len < *x) {
                best = Some(len);
            }
        }
        let len = pair(&BigUint::from(p + 1), &c) + BigUint::one();
        if fits(&len) && best.as_ref().is_none_or(|x| len < *x) {
            best = Some(len);
        }
        if best.is_some() && c + 1u32 >= BigUint::from(p) {
            return Ok(best.expect("checked"));
        }
    }
    unreachable!("the scan over j always terminates")
}
