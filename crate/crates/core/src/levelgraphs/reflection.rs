//! Instance checkers for edge reflection of injective homomorphisms and for
//! acyclicity transfer through the bipartite lift.
//!
//! Each checker validates the hypotheses first and reports a violated
//! hypothesis as an error. Given the hypotheses, the conclusion should always
//! hold, so [`Verdict::Violated`] points at a bug in whatever produced the instance.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use super::graph::{cycle_witness, is_connected, FiniteGraphInstance};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Holds,
    /// Vertices exhibiting the failure of the conclusion.
    Violated(Vec<u64>),
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PreconditionError {
    #[error("{0} is not symmetric: ({1}, {2}) present without its reverse")]
    NotSymmetric(&'static str, u64, u64),
    #[error("{0} is not irreflexive at {1}")]
    NotIrreflexive(&'static str, u64),
    #[error("{0} has a cycle {1:?}")]
    Cyclic(&'static str, Vec<u64>),
    #[error("G is not connected")]
    Disconnected,
    #[error("h is undefined at {0}")]
    Undefined(u64),
    #[error("h maps {0} to {1}, which is not a vertex of H")]
    OutsideTarget(u64, u64),
    #[error("h is not injective: {0} and {1} both map to {2}")]
    NotInjective(u64, u64, u64),
    #[error("h is not a homomorphism: ({0}, {1}) ∈ G but its image is not in H")]
    NotHomomorphism(u64, u64),
    #[error("A is neither irreflexive nor antisymmetric")]
    NeitherIrreflexiveNorAntisymmetric,
    #[error("the parts X0 and X1 share {0}")]
    PartsOverlap(u64),
    #[error("pair ({0}, {1}) is not in X0 × X1")]
    NotBipartite(u64, u64),
}

fn require_graph(name: &'static str, g: &FiniteGraphInstance) -> Result<(), PreconditionError> {
    for &(x, y) in &g.edges {
        if x == y {
            return Err(PreconditionError::NotIrreflexive(name, x));
        }
        if !g.edges.contains(&(y, x)) {
            return Err(PreconditionError::NotSymmetric(name, x, y));
        }
    }
    if let Some(c) = cycle_witness(g) {
        return Err(PreconditionError::Cyclic(name, c));
    }
    Ok(())
}

/// An injective homomorphism `h` from a connected acyclic graph `G` into an
/// acyclic graph `H` reflects edges onto its range.
pub fn check_edge_reflection(
    g: &FiniteGraphInstance,
    h_graph: &FiniteGraphInstance,
    h: &BTreeMap<u64, u64>,
) -> Result<Verdict, PreconditionError> {
    require_graph("G", g)?;
    require_graph("H", h_graph)?;
    if !is_connected(g) {
        return Err(PreconditionError::Disconnected);
    }
    let mut inverse: BTreeMap<u64, u64> = BTreeMap::new();
    for &x in &g.vertices {
        let &y = h.get(&x).ok_or(PreconditionError::Undefined(x))?;
        if !h_graph.vertices.contains(&y) {
            return Err(PreconditionError::OutsideTarget(x, y));
        }
        if let Some(&other) = inverse.get(&y) {
            return Err(PreconditionError::NotInjective(other, x, y));
        }
        inverse.insert(y, x);
    }
    for &(x, y) in &g.edges {
        if !h_graph.edges.contains(&(h[&x], h[&y])) {
            return Err(PreconditionError::NotHomomorphism(x, y));
        }
    }
    for &(a, b) in &h_graph.edges {
        if let (Some(&x), Some(&y)) = (inverse.get(&a), inverse.get(&b)) {
            if !g.edges.contains(&(x, y)) {
                return Ok(Verdict::Violated(vec![x, y]));
            }
        }
    }
    Ok(Verdict::Holds)
}

/// Which half of the bipartite-lift lemma to check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LiftDirection {
    /// `A` irreflexive or antisymmetric with `s(A)` acyclic ⇒ `s(G_A)` acyclic.
    A,
    /// `A ⊆ X0 × X1` with `X0 ∩ X1 = ∅` and `s(G_A)` acyclic ⇒ `s(A)` acyclic.
    B {
        x0: BTreeSet<u64>,
        x1: BTreeSet<u64>,
    },
}

pub fn check_lift_acyclicity(
    a: &FiniteGraphInstance,
    direction: &LiftDirection,
) -> Result<Verdict, PreconditionError> {
    let lift = a.g_lift();
    match direction {
        LiftDirection::A => {
            let irreflexive = a.edges.iter().all(|(x, y)| x != y);
            let antisymmetric = a
                .edges
                .iter()
                .all(|&(x, y)| x == y || !a.edges.contains(&(y, x)));
            if !irreflexive && !antisymmetric {
                return Err(PreconditionError::NeitherIrreflexiveNorAntisymmetric);
            }
            if let Some(c) = cycle_witness(a) {
                return Err(PreconditionError::Cyclic("A", c));
            }
            Ok(cycle_witness(&lift).map_or(Verdict::Holds, Verdict::Violated))
        }
        LiftDirection::B { x0, x1 } => {
            if let Some(&v) = x0.intersection(x1).next() {
                return Err(PreconditionError::PartsOverlap(v));
            }
            if let Some(&(x, y)) = a
                .edges
                .iter()
                .find(|(x, y)| !x0.contains(x) || !x1.contains(y))
            {
                return Err(PreconditionError::NotBipartite(x, y));
            }
            if let Some(c) = cycle_witness(&lift) {
                return Err(PreconditionError::Cyclic("G_A", c));
            }
            Ok(cycle_witness(a).map_or(Verdict::Holds, Verdict::Violated))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levelgraphs::t_level;

    #[test]
    fn identity_on_tree_holds() {
        let g = t_level(3).unwrap().symmetrize().as_graph();
        let h: BTreeMap<u64, u64> = g.vertices.iter().map(|&v| (v, v)).collect();
        assert_eq!(check_edge_reflection(&g, &g, &h), Ok(Verdict::Holds));
    }

    #[test]
    fn non_injective_map_is_a_precondition_error() {
        let g = FiniteGraphInstance::new([], [(0, 1), (1, 0)]);
        let h = BTreeMap::from([(0, 5), (1, 5)]);
        let target = FiniteGraphInstance::new([5], []);
        assert!(matches!(
            check_edge_reflection(&g, &target, &h),
            Err(PreconditionError::NotInjective(0, 1, 5))
        ));
    }

    #[test]
    fn empty_relation_passes_both_directions() {
        let a = FiniteGraphInstance::new([0, 1], []);
        assert_eq!(
            check_lift_acyclicity(&a, &LiftDirection::A),
            Ok(Verdict::Holds)
        );
        let dir = LiftDirection::B {
            x0: BTreeSet::from([0]),
            x1: BTreeSet::from([1]),
        };
        assert_eq!(check_lift_acyclicity(&a, &dir), Ok(Verdict::Holds));
    }
}
