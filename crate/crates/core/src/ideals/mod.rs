//! Ideals on `ω` seen as subsets of `2^ω`: eventually periodic points, exact
//! membership in FIN and `𝕀₃`, the `m`/`a` hierarchy combinators, the
//! column-preserving injection transfer, and section assembly.

mod ep;
mod expr;
mod transfer;

pub use ep::EpPoint;
pub use expr::{ideal_member, named_ideal, Children, Family, IdealExpr, DEFAULT_WORK_BUDGET};
pub use transfer::{
    assemble_section_reduction, transfer_identity_holds, transfer_injection,
    vertical_invariance_check, AssemblyError, InvarianceReport, LeafIdeal, TransferError,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::words::pair_mod;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IdealError {
    #[error("an eventually periodic point needs a nonempty period")]
    EmptyPeriod,
    #[error("pointwise maximum of an empty list")]
    EmptyList,
    #[error("unknown ideal name {0:?}")]
    UnknownName(String),
    #[error("malformed ideal expression: {0}")]
    Malformed(String),
}

/// Three-valued membership verdict. `In` and `Out` are exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum Membership {
    In,
    Out,
    Unknown { bound: u64 },
}

impl Membership {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Membership::In
        } else {
            Membership::Out
        }
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, Membership::Unknown { .. })
    }
}

/// `x ∈ FIN`: the canonical period is all zeros.
pub fn fin_member(x: &EpPoint) -> Membership {
    Membership::from_bool(x.is_finitely_supported())
}

/// `x ∈ 𝕀₃`: every column `(x)_n` is eventually zero.
///
/// With period length `K`, the residue of `⟨n, p⟩` mod `K` depends only on
/// `n` and `p` mod `2K`. Each residue class of `p` is infinite, so column `n`
/// has infinitely many ones iff some `p < 2K` lands on a one of the period.
pub fn i3_member(x: &EpPoint) -> Membership {
    let table = ColumnTable::new(x);
    Membership::from_bool((0..table.m2).all(|r| !table.hot(r)))
}

/// For `x`, which first coordinates `c` (mod `2K`) carry infinitely many ones
/// in the column `{⟨c', y⟩ : c' ≡ c}`.
pub(crate) struct ColumnTable {
    k: u64,
    m2: u64,
    hot: Vec<bool>,
}

impl ColumnTable {
    pub(crate) fn new(x: &EpPoint) -> Self {
        let k = x.period().len() as u64;
        let m2 = 2 * k;
        let shift = x.prefix().len() as u64 % k;
        let bit = |q: u64| x.period().get(((q + k - shift) % k) as usize);
        let hot = (0..m2)
            .map(|c| (0..m2).any(|y| bit(pair_mod(c, y, k))))
            .collect();
        ColumnTable { k, m2, hot }
    }

    pub(crate) fn hot(&self, c: u64) -> bool {
        self.hot[(c % self.m2) as usize]
    }

    pub(crate) fn k(&self) -> u64 {
        self.k
    }
}
