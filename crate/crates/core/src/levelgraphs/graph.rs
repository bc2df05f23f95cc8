//! Finite graphs over opaque `u64` labels: acyclicity, connectivity and unique paths.
//!
//! Everything is decided on the symmetrization. Self-loops and a pair of
//! opposite edges never form a cycle: a cycle needs an injective path of at
//! least three vertices whose ends are adjacent.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteGraphInstance {
    pub vertices: BTreeSet<u64>,
    pub edges: BTreeSet<(u64, u64)>,
}

impl FiniteGraphInstance {
    pub fn new(
        vertices: impl IntoIterator<Item = u64>,
        edges: impl IntoIterator<Item = (u64, u64)>,
    ) -> Self {
        let mut g = FiniteGraphInstance {
            vertices: vertices.into_iter().collect(),
            edges: BTreeSet::new(),
        };
        for (x, y) in edges {
            g.vertices.insert(x);
            g.vertices.insert(y);
            g.edges.insert((x, y));
        }
        g
    }

    pub fn contains_edge(&self, x: u64, y: u64) -> bool {
        self.edges.contains(&(x, y))
    }

    pub fn symmetrize(&self) -> Self {
        let mut edges = self.edges.clone();
        edges.extend(self.edges.iter().map(|&(x, y)| (y, x)));
        FiniteGraphInstance {
            vertices: self.vertices.clone(),
            edges,
        }
    }

    /// `G_A`: vertex `(ε, z)` is encoded as `2z + ε`; edges `(0,z) → (1,z')` for `(z,z') ∈ A`.
    pub fn g_lift(&self) -> Self {
        let vertices = self.vertices.iter().flat_map(|&z| [2 * z, 2 * z + 1]);
        let edges = self.edges.iter().map(|&(z, zp)| (2 * z, 2 * zp + 1));
        FiniteGraphInstance::new(vertices, edges)
    }

    /// Distinct undirected non-loop edges as `(min, max)`.
    fn undirected_edges(&self) -> BTreeSet<(u64, u64)> {
        self.edges
            .iter()
            .filter(|(x, y)| x != y)
            .map(|&(x, y)| (x.min(y), x.max(y)))
            .collect()
    }

    fn adjacency(&self) -> HashMap<u64, Vec<u64>> {
        let mut adj: HashMap<u64, Vec<u64>> = HashMap::new();
        for (x, y) in self.undirected_edges() {
            adj.entry(x).or_default().push(y);
            adj.entry(y).or_default().push(x);
        }
        adj
    }
}

struct Dsu {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when both are already in the same set.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

fn index_vertices(g: &FiniteGraphInstance) -> HashMap<u64, usize> {
    let mut idx: HashMap<u64, usize> = g
        .vertices
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, i))
        .collect();
    for &(x, y) in &g.edges {
        for v in [x, y] {
            let next = idx.len();
            idx.entry(v).or_insert(next);
        }
    }
    idx
}

fn bfs_path(adj: &HashMap<u64, Vec<u64>>, from: u64, to: u64) -> Option<Vec<u64>> {
    let mut prev: HashMap<u64, u64> = HashMap::new();
    let mut queue = VecDeque::from([from]);
    prev.insert(from, from);
    while let Some(x) = queue.pop_front() {
        if x == to {
            let mut path = vec![to];
            let mut cur = to;
            while cur != from {
                cur = prev[&cur];
                path.push(cur);
            }
            path.reverse();
            return Some(path);
        }
        for &y in adj.get(&x).map(Vec::as_slice).unwrap_or(&[]) {
            if let std::collections::hash_map::Entry::Vacant(e) = prev.entry(y) {
                e.insert(x);
                queue.push_back(y);
            }
        }
    }
    None
}

/// An injective path `x_0 … x_n`, `n ≥ 2`, with `x_n` adjacent to `x_0`, if the
/// symmetrization has one.
pub fn cycle_witness(g: &FiniteGraphInstance) -> Option<Vec<u64>> {
    let idx = index_vertices(g);
    let mut dsu = Dsu::new(idx.len());
    let mut forest: HashMap<u64, Vec<u64>> = HashMap::new();
    for (x, y) in g.undirected_edges() {
        if dsu.union(idx[&x], idx[&y]) {
            forest.entry(x).or_default().push(y);
            forest.entry(y).or_default().push(x);
        } else {
            return bfs_path(&forest, x, y);
        }
    }
    None
}

pub fn is_acyclic(g: &FiniteGraphInstance) -> bool {
    cycle_witness(g).is_none()
}

pub fn is_connected(g: &FiniteGraphInstance) -> bool {
    let idx = index_vertices(g);
    if idx.len() <= 1 {
        return true;
    }
    let mut dsu = Dsu::new(idx.len());
    let mut components = idx.len();
    for (x, y) in g.undirected_edges() {
        if dsu.union(idx[&x], idx[&y]) {
            components -= 1;
        }
    }
    components == 1
}

/// Number of distinct undirected non-loop edges.
pub fn undirected_edge_count(g: &FiniteGraphInstance) -> usize {
    g.undirected_edges().len()
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PathError {
    #[error("graph has a cycle: {0:?}")]
    Cyclic(Vec<u64>),
    #[error("graph is not connected")]
    Disconnected,
    #[error("vertex {0} is not in the graph")]
    Unreachable(u64),
}

/// The unique injective path from `s` to `t` in a connected acyclic graph.
pub fn injective_path(g: &FiniteGraphInstance, s: u64, t: u64) -> Result<Vec<u64>, PathError> {
    for v in [s, t] {
        if !g.vertices.contains(&v) {
            return Err(PathError::Unreachable(v));
        }
    }
    if let Some(c) = cycle_witness(g) {
        return Err(PathError::Cyclic(c));
    }
    if !is_connected(g) {
        return Err(PathError::Disconnected);
    }
    bfs_path(&g.adjacency(), s, t).ok_or(PathError::Unreachable(t))
}

/// Connected components as sorted vertex lists, ordered by smallest member.
pub fn components(g: &FiniteGraphInstance) -> Vec<Vec<u64>> {
    let idx = index_vertices(g);
    let mut dsu = Dsu::new(idx.len());
    for (x, y) in g.undirected_edges() {
        dsu.union(idx[&x], idx[&y]);
    }
    let mut groups: BTreeMap<usize, Vec<u64>> = BTreeMap::new();
    let mut labels: Vec<(u64, usize)> = idx.into_iter().collect();
    labels.sort();
    for (v, i) in labels {
        groups.entry(dsu.find(i)).or_default().push(v);
    }
    let mut out: Vec<Vec<u64>> = groups.into_values().collect();
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edgeless_and_single_vertex() {
        let g = FiniteGraphInstance::new([7], []);
        assert!(is_acyclic(&g));
        assert!(is_connected(&g));
        assert_eq!(injective_path(&g, 7, 7), Ok(vec![7]));
    }

    #[test]
    fn loops_and_opposite_edges_are_not_cycles() {
        let g = FiniteGraphInstance::new([0, 1], [(0, 0), (0, 1), (1, 0), (0, 1)]);
        assert!(is_acyclic(&g));
    }

    #[test]
    fn triangle_witness_is_injective_and_closes() {
        let g = FiniteGraphInstance::new([], [(0, 1), (1, 2), (2, 0)]);
        let c = cycle_witness(&g).unwrap();
        assert!(c.len() >= 3);
        let s = g.symmetrize();
        for pair in c.windows(2) {
            assert!(s.contains_edge(pair[0], pair[1]));
        }
        assert!(s.contains_edge(*c.last().unwrap(), c[0]));
        let set: BTreeSet<_> = c.iter().collect();
        assert_eq!(set.len(), c.len());
    }

    #[test]
    fn two_disjoint_edges_disconnected() {
        let g = FiniteGraphInstance::new([], [(0, 1), (2, 3)]);
        assert!(!is_connected(&g));
        assert_eq!(injective_path(&g, 0, 3), Err(PathError::Disconnected));
        assert_eq!(injective_path(&g, 0, 9), Err(PathError::Unreachable(9)));
        assert_eq!(components(&g), vec![vec![0, 1], vec![2, 3]]);
    }

    #[test]
    fn lift_of_single_pair() {
        let g = FiniteGraphInstance::new([], [(3, 5)]).g_lift();
        assert_eq!(g.edges, BTreeSet::from([(6, 11)]));
        assert_eq!(g.vertices, BTreeSet::from([6, 7, 10, 11]));
    }
}
