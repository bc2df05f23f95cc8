//! Column-preserving injections, their transfer through a section, and the
//! assembly of a map from its sections.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use super::{fin_member, i3_member, EpPoint, Membership};
use crate::words::{fst, pair, phi, phi_inv, snd, PairCode, Word, WordsError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TransferError {
    #[error("i is not injective: i({0}) = i({1})")]
    NotInjective(u64, u64),
    #[error("i({m}) = {image} leaves column {col}", col = fst(*m))]
    ColumnViolation { m: u64, image: u64 },
    #[error("point {index} is not finitely supported")]
    NotFinitelySupported { index: usize },
    #[error("position {position} of point {index} is outside the domain of i")]
    SupportNotCovered { index: usize, position: u64 },
    #[error(transparent)]
    Words(#[from] WordsError),
}

fn check_admissible(i: &BTreeMap<u64, u64>) -> Result<(), TransferError> {
    let mut seen = BTreeMap::new();
    for (&m, &im) in i {
        if fst(im) != fst(m) {
            return Err(TransferError::ColumnViolation { m, image: im });
        }
        if let Some(&other) = seen.get(&im) {
            return Err(TransferError::NotInjective(other, m));
        }
        seen.insert(im, m);
    }
    Ok(())
}

/// `I(p) = ⟨(p)_0, (i(φ(n, p)))_1⟩` wherever `φ(n, p)` is in the domain of `i`.
///
/// `i` must be injective and keep every `m` in its column `(m)_0`. Then `I` is
/// injective, keeps columns, and `φ(n, I(p)) = i(φ(n, p))`.
pub fn transfer_injection(
    i: &BTreeMap<u64, u64>,
    n: u64,
) -> Result<BTreeMap<u64, u64>, TransferError> {
    check_admissible(i)?;
    let mut out = BTreeMap::new();
    for (&m, &im) in i {
        let (k, p) = phi_inv(PairCode(m));
        if k == n {
            out.insert(p, pair(fst(p), snd(im))?.0);
        }
    }
    Ok(out)
}

/// The first `out_length` bits of `f(α)` where `f(α)(q) = f_k(α)(r)` for
/// `(k, r) = φ⁻¹(q)`, so that `^k(f(α)) = f_k(α)`.
pub fn assemble_section_reduction<F>(
    sections: &[F],
    x: &Word,
    out_length: usize,
) -> Result<Word, AssemblyError>
where
    F: Fn(&Word) -> Word,
{
    let mut cache: BTreeMap<u64, Word> = BTreeMap::new();
    let mut out = Word::zeros(out_length);
    for q in 0..out_length as u64 {
        let (k, r) = phi_inv(PairCode(q));
        let f = sections
            .get(k as usize)
            .ok_or(AssemblyError::MissingSection(k))?;
        let img = cache.entry(k).or_insert_with(|| f(x));
        if r as usize >= img.len() {
            return Err(AssemblyError::SectionTooShort {
                section: k,
                needed: r + 1,
                have: img.len() as u64,
            });
        }
        out.set(q as usize, img.get(r as usize));
    }
    Ok(out)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AssemblyError {
    #[error("no section f_{0} supplied")]
    MissingSection(u64),
    #[error("section f_{section} gave {have} bits, position {needed} demanded")]
    SectionTooShort {
        section: u64,
        needed: u64,
        have: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LeafIdeal {
    Fin,
    I3,
}

impl LeafIdeal {
    pub fn member(self, x: &EpPoint) -> Membership {
        match self {
            LeafIdeal::Fin => fin_member(x),
            LeafIdeal::I3 => i3_member(x),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InvarianceReport {
    pub ideal: LeafIdeal,
    pub checked: usize,
    /// `(index, verdict on x, verdict on the image)` where they differ.
    pub asymmetries: Vec<(usize, Membership, Membership)>,
}

impl InvarianceReport {
    pub fn passed(&self) -> bool {
        self.asymmetries.is_empty()
    }
}

/// Compare membership of each finitely supported `x` with that of `i[supp x]`.
pub fn vertical_invariance_check(
    ideal: LeafIdeal,
    i: &BTreeMap<u64, u64>,
    xs: &[EpPoint],
) -> Result<InvarianceReport, TransferError> {
    check_admissible(i)?;
    let mut asymmetries = Vec::new();
    for (index, x) in xs.iter().enumerate() {
        let support = x
            .support()
            .ok_or(TransferError::NotFinitelySupported { index })?;
        let image: BTreeSet<u64> = support
            .iter()
            .map(|&position| {
                i.get(&position)
                    .copied()
                    .ok_or(TransferError::SupportNotCovered { index, position })
            })
            .collect::<Result<_, _>>()?;
        let y = EpPoint::from_support(&image.into_iter().collect::<Vec<_>>());
        let (a, b) = (ideal.member(x), ideal.member(&y));
        if a != b {
            asymmetries.push((index, a, b));
        }
    }
    Ok(InvarianceReport {
        ideal,
        checked: xs.len(),
        asymmetries,
    })
}

/// `φ(n, I(p)) = i(φ(n, p))` on the whole domain of `I`.
pub fn transfer_identity_holds(i: &BTreeMap<u64, u64>, big_i: &BTreeMap<u64, u64>, n: u64) -> bool {
    big_i.iter().all(|(&p, &ip)| {
        let (Ok(lhs), Ok(m)) = (phi(n, ip), phi(n, p)) else {
            return false;
        };
        i.get(&m.0) == Some(&lhs.0)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::w;

    #[test]
    fn identity_transfers_to_identity() {
        let i: BTreeMap<u64, u64> = (0..200).map(|m| (m, m)).collect();
        let big = transfer_injection(&i, 0).unwrap();
        assert!(!big.is_empty());
        assert!(big.iter().all(|(p, ip)| p == ip));
        assert!(transfer_identity_holds(&i, &big, 0));
    }

    #[test]
    fn swap_within_column_zero() {
        // 0 = ⟨0,0⟩ and 5 = ⟨0,2⟩ share column 0.
        let mut i: BTreeMap<u64, u64> = (0..30).map(|m| (m, m)).collect();
        i.insert(0, 5);
        i.insert(5, 0);
        let big = transfer_injection(&i, 0).unwrap();
        assert!(transfer_identity_holds(&i, &big, 0));
        assert_ne!(
            big,
            (0..30)
                .filter_map(|m| big.get(&m).map(|_| (m, m)))
                .collect()
        );
    }

    #[test]
    fn column_violation_is_reported() {
        let i: BTreeMap<u64, u64> = [(0, 1)].into();
        assert_eq!(
            transfer_injection(&i, 0),
            Err(TransferError::ColumnViolation { m: 0, image: 1 })
        );
        let j: BTreeMap<u64, u64> = [(0, 0), (5, 0)].into();
        assert!(matches!(
            transfer_injection(&j, 0),
            Err(TransferError::NotInjective(..))
        ));
    }

    #[test]
    fn assembly_examples() {
        let zero = |x: &Word| Word::zeros(x.len() * 4);
        let ident = |x: &Word| x.clone();
        let sections: Vec<Box<dyn Fn(&Word) -> Word>> = (0..64)
            .map(|k| {
                if k == 0 {
                    Box::new(ident) as Box<dyn Fn(&Word) -> Word>
                } else {
                    Box::new(zero)
                }
            })
            .collect();
        let x = w("10110011101001011100101011110001");
        let zeros_only: Vec<_> = (0..64).map(|_| zero).collect();
        assert_eq!(
            assemble_section_reduction(&zeros_only, &x, 21).unwrap(),
            Word::zeros(21)
        );
        let out = assemble_section_reduction(&sections, &x, 21).unwrap();
        for q in 0..21u64 {
            let (k, r) = phi_inv(PairCode(q));
            let expect = k == 0 && x.get(r as usize);
            assert_eq!(out.get(q as usize), expect, "q = {q}");
        }
        assert!(matches!(
            assemble_section_reduction(&sections[..1], &x, 21),
            Err(AssemblyError::MissingSection(_))
        ));
    }

    #[test]
    fn invariance_on_finite_points() {
        let i: BTreeMap<u64, u64> = (0..40).map(|m| (m, m)).collect();
        let xs = [EpPoint::zero(), EpPoint::from_support(&[1, 7, 30])];
        for ideal in [LeafIdeal::Fin, LeafIdeal::I3] {
            assert!(vertical_invariance_check(ideal, &i, &xs).unwrap().passed());
        }
        assert!(matches!(
            vertical_invariance_check(LeafIdeal::Fin, &i, &[EpPoint::from_support(&[41])]),
            Err(TransferError::SupportNotCovered { position: 41, .. })
        ));
    }
}
