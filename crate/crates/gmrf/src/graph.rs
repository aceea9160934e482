//! Symmetric sparsity patterns (neighbourhood graphs) and Markov-order
//! expansion.
//!
//! A [`SparsityPattern`] is an undirected graph over `p` vertices in which
//! every vertex is its own neighbour. It describes the admissible support of
//! a precision matrix: vertex `j`'s neighbour set is the set of rows that may
//! be non-zero in column `j`.

use std::collections::VecDeque;

use crate::error::{Error, Result};

/// Symmetric boolean adjacency structure over `p` vertices, diagonal always
/// present.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparsityPattern {
    p: usize,
    /// Sorted, duplicate-free neighbour list per vertex, always containing
    /// the vertex itself.
    neighbors: Vec<Vec<usize>>,
}

impl SparsityPattern {
    /// Diagonal-only pattern (every vertex isolated).
    pub fn identity(p: usize) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidArgument(
                "pattern needs at least one vertex".into(),
            ));
        }
        Ok(Self {
            p,
            neighbors: (0..p).map(|v| vec![v]).collect(),
        })
    }

    /// Builds a pattern from undirected edges. Self-loops are added for every
    /// vertex whether or not they are listed.
    pub fn from_edges(p: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut pattern = Self::identity(p)?;
        for &(i, j) in edges {
            if i >= p || j >= p {
                return Err(Error::InvalidArgument(format!(
                    "edge ({i},{j}) outside [0,{p})"
                )));
            }
            pattern.neighbors[i].push(j);
            pattern.neighbors[j].push(i);
        }
        for list in &mut pattern.neighbors {
            list.sort_unstable();
            list.dedup();
        }
        Ok(pattern)
    }

    /// Number of vertices.
    pub fn dim(&self) -> usize {
        self.p
    }

    /// Sorted neighbour list of `v`, including `v` itself.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    /// Whether `(i,j)` is in the pattern. The diagonal is always present.
    pub fn contains(&self, i: usize, j: usize) -> bool {
        i < self.p && j < self.p && self.neighbors[i].binary_search(&j).is_ok()
    }

    /// Total stored entries: both triangles plus the diagonal.
    pub fn nnz(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum()
    }

    /// True when every entry of `self` is also in `other`.
    pub fn is_subset_of(&self, other: &SparsityPattern) -> bool {
        self.p == other.p
            && self
                .neighbors
                .iter()
                .enumerate()
                .all(|(v, list)| list.iter().all(|&u| other.contains(v, u)))
    }
}

/// Column support of the precision estimate at one vertex: the vertex's
/// neighbours (within some pattern) plus the vertex itself, sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborSet {
    vertex: usize,
    members: Vec<usize>,
}

impl NeighborSet {
    pub fn vertex(&self) -> usize {
        self.vertex
    }

    /// Sorted, duplicate-free member list; always contains [`Self::vertex`].
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Position of the vertex within its own member list.
    pub fn local_index(&self) -> usize {
        self.members
            .binary_search(&self.vertex)
            .expect("vertex is always a member of its own neighbour set")
    }
}

/// Band pattern: `(i,j)` present iff `|i - j| <= bandwidth`.
///
/// Bandwidth 0 is the identity pattern; bandwidth `p - 1` or larger is fully
/// dense.
pub fn band_pattern(p: usize, bandwidth: usize) -> Result<SparsityPattern> {
    if p == 0 {
        return Err(Error::InvalidArgument(
            "band pattern needs at least one vertex".into(),
        ));
    }
    let neighbors = (0..p)
        .map(|v| (v.saturating_sub(bandwidth)..=(v + bandwidth).min(p - 1)).collect())
        .collect();
    Ok(SparsityPattern { p, neighbors })
}

/// Support of the boolean `markov_order`-th power of the adjacency matrix
/// with diagonal: vertex pairs at graph distance at most `markov_order`.
///
/// Order 0 is the identity pattern (independence); order 1 returns `g`
/// unchanged.
pub fn expand_order(g: &SparsityPattern, markov_order: usize) -> SparsityPattern {
    let p = g.dim();
    if markov_order == 0 {
        return SparsityPattern::identity(p).expect("p >= 1 by construction");
    }
    if markov_order == 1 {
        return g.clone();
    }
    // Breadth-first search from each vertex, capped at depth `markov_order`.
    let mut neighbors = Vec::with_capacity(p);
    let mut depth = vec![usize::MAX; p];
    let mut queue = VecDeque::new();
    for start in 0..p {
        depth.fill(usize::MAX);
        depth[start] = 0;
        queue.clear();
        queue.push_back(start);
        let mut reached = Vec::new();
        while let Some(v) = queue.pop_front() {
            reached.push(v);
            if depth[v] == markov_order {
                continue;
            }
            for &u in g.neighbors(v) {
                if depth[u] == usize::MAX {
                    depth[u] = depth[v] + 1;
                    queue.push_back(u);
                }
            }
        }
        reached.sort_unstable();
        neighbors.push(reached);
    }
    SparsityPattern { p, neighbors }
}

/// Sorted support of column `j` of `g`, including `j` itself.
pub fn neighbor_set(g: &SparsityPattern, j: usize) -> Result<NeighborSet> {
    if j >= g.dim() {
        return Err(Error::InvalidArgument(format!(
            "vertex {j} outside [0,{})",
            g.dim()
        )));
    }
    Ok(NeighborSet {
        vertex: j,
        members: g.neighbors(j).to_vec(),
    })
}
