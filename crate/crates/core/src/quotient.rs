//! The factor graph of a join decomposition, its rooted spanning tree, and
//! the cross edges chosen along tree edges.
//!
//! Factors are re-indexed so that the root comes first and a factor never
//! precedes one that is closer to the root. Everything downstream (walk
//! alignment, words, hyperplane schedules) uses the re-indexed order.

use std::collections::VecDeque;

use thiserror::Error;

use crate::graph::{DefiningGraph, JoinDecomposition};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuotientError {
    #[error("graph is not decomposable (k = {k})")]
    NotDecomposable { k: usize },
    #[error("graph is reducible: the factor graph is disconnected (factor {unreached} unreachable from the root)")]
    Reducible { unreached: usize },
    #[error("tree edge ({parent}, {child}) has no cross edge with label >= 3")]
    MissingCrossEdge { parent: usize, child: usize },
}

/// Factors as nodes; two factors are adjacent iff some cross edge has label `>= 3`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientGraph {
    adj: Vec<Vec<bool>>,
}

impl QuotientGraph {
    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.adj[i][j]
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let k = self.adj.len();
        (0..k)
            .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
            .filter(|&(i, j)| self.adj[i][j])
            .collect()
    }

    pub fn is_connected(&self) -> bool {
        bfs_depths(self).iter().all(Option::is_some)
    }
}

pub fn build_quotient(dec: &JoinDecomposition, g: &DefiningGraph) -> Result<QuotientGraph, QuotientError> {
    let k = dec.k();
    if k < 2 {
        return Err(QuotientError::NotDecomposable { k });
    }
    let factors = dec.factors();
    let mut adj = vec![vec![false; k]; k];
    for i in 0..k {
        for j in i + 1..k {
            let linked = factors[i]
                .iter()
                .any(|&u| factors[j].iter().any(|&w| g.label(u, w).is_some_and(|m| m >= 3)));
            adj[i][j] = linked;
            adj[j][i] = linked;
        }
    }
    Ok(QuotientGraph { adj })
}

fn bfs_depths(q: &QuotientGraph) -> Vec<Option<usize>> {
    let k = q.node_count();
    let mut depth = vec![None; k];
    if k == 0 {
        return depth;
    }
    depth[0] = Some(0);
    let mut queue = VecDeque::from([0]);
    while let Some(i) = queue.pop_front() {
        for j in 0..k {
            if q.adj[i][j] && depth[j].is_none() {
                depth[j] = Some(depth[i].unwrap() + 1);
                queue.push_back(j);
            }
        }
    }
    depth
}

/// Breadth-first spanning tree of the factor graph rooted at factor 0.
///
/// Node `p` of the tree is original factor `original[p]`. Indices are sorted
/// by `(depth, original index)`, so `parent[p] < p` for every non-root node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedTree {
    parent: Vec<Option<usize>>,
    depth: Vec<usize>,
    original: Vec<usize>,
}

impl RootedTree {
    /// Builds a tree directly from a parent array in already re-indexed order.
    pub fn from_parents(parent: Vec<Option<usize>>) -> Self {
        let mut depth = vec![0; parent.len()];
        for p in 0..parent.len() {
            if let Some(q) = parent[p] {
                depth[p] = depth[q] + 1;
            }
        }
        let original = (0..parent.len()).collect();
        Self { parent, depth, original }
    }

    pub fn k(&self) -> usize {
        self.parent.len()
    }

    pub fn parent(&self, p: usize) -> Option<usize> {
        self.parent[p]
    }

    pub fn parents(&self) -> &[Option<usize>] {
        &self.parent
    }

    pub fn depth(&self, p: usize) -> usize {
        self.depth[p]
    }

    /// Original factor index of re-indexed node `p`.
    pub fn original(&self, p: usize) -> usize {
        self.original[p]
    }

    pub fn children(&self, p: usize) -> Vec<usize> {
        (0..self.k()).filter(|&c| self.parent[c] == Some(p)).collect()
    }

    /// Tree edges `(parent, child)` ordered by child.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.k())
            .filter_map(|c| self.parent[c].map(|p| (p, c)))
            .collect()
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.parent[i] == Some(j) || self.parent[j] == Some(i)
    }

    /// Factors of `dec` permuted into tree order.
    pub fn reindex(&self, dec: &JoinDecomposition) -> Vec<Vec<usize>> {
        self.original.iter().map(|&o| dec.factors()[o].clone()).collect()
    }
}

pub fn spanning_tree(q: &QuotientGraph) -> Result<RootedTree, QuotientError> {
    let k = q.node_count();
    let depth = bfs_depths(q);
    if let Some(unreached) = depth.iter().position(Option::is_none) {
        return Err(QuotientError::Reducible { unreached });
    }
    let depth: Vec<usize> = depth.into_iter().map(Option::unwrap).collect();

    // BFS again to record parents, neighbors in index order.
    let mut parent_orig = vec![None; k];
    let mut seen = vec![false; k];
    seen[0] = true;
    let mut queue = VecDeque::from([0]);
    while let Some(i) = queue.pop_front() {
        for j in 0..k {
            if q.adj[i][j] && !seen[j] {
                seen[j] = true;
                parent_orig[j] = Some(i);
                queue.push_back(j);
            }
        }
    }

    let mut original: Vec<usize> = (0..k).collect();
    original.sort_by_key(|&o| (depth[o], o));
    let mut new_index = vec![0; k];
    for (p, &o) in original.iter().enumerate() {
        new_index[o] = p;
    }
    let parent = original
        .iter()
        .map(|&o| parent_orig[o].map(|po| new_index[po]))
        .collect();
    let depth = original.iter().map(|&o| depth[o]).collect();
    Ok(RootedTree { parent, depth, original })
}

/// The chosen edge `(s, t)` between a tree edge's parent and child factors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossEdge {
    pub parent: usize,
    pub child: usize,
    /// Endpoint in the parent factor.
    pub s: usize,
    /// Endpoint in the child factor.
    pub t: usize,
    pub label: u32,
    pub tau: Vec<usize>,
}

/// Alternating word `s t s ...` of length `m` for odd `m`, `m + 1` for even.
pub fn alternating_tau(s: usize, t: usize, m: u32) -> Vec<usize> {
    let len = if m % 2 == 1 { m } else { m + 1 } as usize;
    (0..len).map(|p| if p % 2 == 0 { s } else { t }).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossEdgeSelection {
    edges: Vec<CrossEdge>,
}

impl CrossEdgeSelection {
    pub fn from_edges(edges: Vec<CrossEdge>) -> Self {
        Self { edges }
    }

    pub fn edges(&self) -> &[CrossEdge] {
        &self.edges
    }

    /// Edge for the unordered tree edge `{i, j}`; orientation is normalized
    /// so that `parent < child`.
    pub fn between(&self, i: usize, j: usize) -> Option<&CrossEdge> {
        let (lo, hi) = if i < j { (i, j) } else { (j, i) };
        self.edges.iter().find(|e| e.parent == lo && e.child == hi)
    }
}

/// Picks, per tree edge, the lexicographically least `(label, s, t)` among
/// cross pairs with label `>= 3`. `factors` must be in tree order.
pub fn select_cross_edges(
    t: &RootedTree,
    factors: &[Vec<usize>],
    g: &DefiningGraph,
) -> Result<CrossEdgeSelection, QuotientError> {
    let mut edges = Vec::new();
    for (parent, child) in t.edges() {
        let best = factors[parent]
            .iter()
            .flat_map(|&s| factors[child].iter().map(move |&t| (s, t)))
            .filter_map(|(s, t)| g.label(s, t).filter(|&m| m >= 3).map(|m| (m, s, t)))
            .min()
            .ok_or(QuotientError::MissingCrossEdge { parent, child })?;
        let (label, s, t) = best;
        edges.push(CrossEdge {
            parent,
            child,
            s,
            t,
            label,
            tau: alternating_tau(s, t, label),
        });
    }
    Ok(CrossEdgeSelection { edges })
}

/// Depth-first closed tour of the tree from the root, children in index order.
///
/// Returns `k` nodes when `k = 1`, otherwise `2(k - 1) + 1` nodes starting and
/// ending at the root.
pub fn tree_closed_path(t: &RootedTree) -> Vec<usize> {
    fn visit(t: &RootedTree, p: usize, out: &mut Vec<usize>) {
        out.push(p);
        for c in t.children(p) {
            visit(t, c, out);
            out.push(p);
        }
    }
    let mut out = Vec::with_capacity(2 * t.k());
    visit(t, 0, &mut out);
    out
}
