//! Finite relations on `2^l`: the level sets of `𝔾₀`, `𝔹₀`, `𝕋₀`, `𝕌₀`,
//! `G_{s(𝔾₀)}`, `h₀`, the decorations, and the graph checkers run on them.

mod graph;
mod levels;
mod reflection;

pub use graph::{
    components, cycle_witness, injective_path, is_acyclic, is_connected, undirected_edge_count,
    FiniteGraphInstance, PathError,
};
pub use levels::{
    b_level, b_member, closure_b0_meets, lift_level, lift_member, t_level, t_member, Decoration,
    LevelError, LevelRelation, LiftKind, RelationFlags, MAX_GRAPH_LEVEL, MAX_LEVEL,
};
pub use reflection::{
    check_edge_reflection, check_lift_acyclicity, LiftDirection, PreconditionError, Verdict,
};

use std::collections::BTreeSet;

use crate::frames::{t_tree_level, FrameView};

/// `D_l`: pairs `(s, t)`, `s ≠ t`, such that `(0s, 1t)` or `(0t, 1s)` lies in `T_{l+1}`.
pub fn d_level(frame: &dyn FrameView, l: u32) -> Result<LevelRelation, LevelError> {
    if frame.depth() < l as u64 + 1 {
        return Err(LevelError::FrameTooShallow {
            needed: l as u64 + 1,
            have: frame.depth(),
        });
    }
    let tree = t_tree_level(frame, l + 1).map_err(|_| LevelError::FrameTooShallow {
        needed: l as u64 + 1,
        have: frame.depth(),
    })?;
    let mask = (1u64 << l) - 1;
    let top = 1u64 << l;
    let mut pairs = BTreeSet::new();
    for &(u, v) in tree.codes() {
        if u & top != 0 || v & top == 0 {
            continue;
        }
        let (s, t) = (u & mask, v & mask);
        if s != t {
            pairs.insert((s, t));
            pairs.insert((t, s));
        }
    }
    Ok(LevelRelation::from_codes(l, pairs))
}
