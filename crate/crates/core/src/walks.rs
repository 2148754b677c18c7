//! Covering closed walks on factor complements and their alignment into a
//! common schedule.
//!
//! Walk solvers and common-length policies are interchangeable strategies,
//! registered by name (see [`walk_solver`] and [`length_policy`]).

use std::collections::VecDeque;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{DefiningGraph, SimpleGraph};
use crate::quotient::{CrossEdgeSelection, RootedTree};

/// Default vertex threshold above which `auto` falls back to the greedy walk.
pub const DEFAULT_EXACT_LIMIT: usize = 15;
/// The exact solver refuses graphs larger than this (state space `n * 2^n`).
pub const EXACT_HARD_CAP: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WalkError {
    #[error("factor complement is disconnected; factor complements must be connected")]
    Disconnected,
    #[error("covering walk needs at least 2 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("exact search supports at most {cap} vertices, got {actual}")]
    TooLargeForExact { cap: usize, actual: usize },
    #[error("common walk length overflows")]
    LengthOverflow,
    #[error("walk for factor {factor} has length {len}, which does not divide n = {n}")]
    NotDivisible { factor: usize, len: usize, n: usize },
    #[error("vertex {vertex} needed for alignment does not occur in row {row}")]
    MissingVertex { row: usize, vertex: usize },
    #[error("expected {expected} walks, got {actual}")]
    WalkCount { expected: usize, actual: usize },
}

/// A closed walk `v_1, ..., v_{n_i}, v_{n_i + 1} = v_1` visiting every vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoveringWalk {
    pub factor: usize,
    /// Global vertex ids; first equals last.
    pub vertices: Vec<usize>,
    /// Whether the length is certified minimal.
    pub exact: bool,
}

impl CoveringWalk {
    /// Number of steps `n_i`.
    pub fn len(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub trait WalkSolver: Send + Sync {
    fn name(&self) -> &'static str;
    fn solve(&self, h: &SimpleGraph) -> Result<CoveringWalk, WalkError>;
}

/// Breadth-first search over `(vertex, visited set)` states.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExactSolver;

/// Repeatedly walks to the nearest unvisited vertex, then back to the start.
#[derive(Debug, Clone, Copy, Default)]
pub struct GreedySolver;

/// Exact up to `exact_limit` vertices, greedy beyond.
#[derive(Debug, Clone, Copy)]
pub struct AutoSolver {
    pub exact_limit: usize,
}

impl Default for AutoSolver {
    fn default() -> Self {
        Self {
            exact_limit: DEFAULT_EXACT_LIMIT,
        }
    }
}

pub const WALK_SOLVERS: &[&str] = &["auto", "exact", "greedy"];

pub fn walk_solver(name: &str, exact_limit: usize) -> Option<Box<dyn WalkSolver>> {
    match name {
        "auto" => Some(Box::new(AutoSolver { exact_limit })),
        "exact" => Some(Box::new(ExactSolver)),
        "greedy" => Some(Box::new(GreedySolver)),
        _ => None,
    }
}

fn check_input(h: &SimpleGraph) -> Result<(), WalkError> {
    if h.vertex_count() < 2 {
        return Err(WalkError::TooFewVertices(h.vertex_count()));
    }
    if !h.is_connected() {
        return Err(WalkError::Disconnected);
    }
    Ok(())
}

impl WalkSolver for ExactSolver {
    fn name(&self) -> &'static str {
        "exact"
    }

    fn solve(&self, h: &SimpleGraph) -> Result<CoveringWalk, WalkError> {
        check_input(h)?;
        let n = h.vertex_count();
        if n > EXACT_HARD_CAP {
            return Err(WalkError::TooLargeForExact {
                cap: EXACT_HARD_CAP,
                actual: n,
            });
        }
        let full: usize = (1 << n) - 1;
        let state = |v: usize, mask: usize| mask * n + v;
        let mut parent: Vec<u32> = vec![u32::MAX; (full + 1) * n];
        let start = state(0, 1);
        let goal = state(0, full);
        parent[start] = start as u32;
        let mut queue = VecDeque::from([start]);
        // The goal is (0, full) reached after at least one step; the start state
        // has the same vertex but only one bit set, so they never coincide.
        while let Some(cur) = queue.pop_front() {
            if cur == goal {
                break;
            }
            let (v, mask) = (cur % n, cur / n);
            for w in h.neighbors_local(v) {
                let next = state(w, mask | (1 << w));
                if parent[next] == u32::MAX {
                    parent[next] = cur as u32;
                    queue.push_back(next);
                }
            }
        }
        let mut path = vec![goal];
        let mut cur = goal;
        while cur != start {
            cur = parent[cur] as usize;
            path.push(cur);
        }
        path.reverse();
        let vertices = path.iter().map(|&s| h.vertices()[s % n]).collect();
        Ok(CoveringWalk {
            factor: 0,
            vertices,
            exact: true,
        })
    }
}

fn shortest_path_local(h: &SimpleGraph, from: usize, to: usize) -> Vec<usize> {
    let n = h.vertex_count();
    let mut prev = vec![usize::MAX; n];
    prev[from] = from;
    let mut queue = VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        if v == to {
            break;
        }
        for w in h.neighbors_local(v) {
            if prev[w] == usize::MAX {
                prev[w] = v;
                queue.push_back(w);
            }
        }
    }
    let mut path = vec![to];
    let mut cur = to;
    while cur != from {
        cur = prev[cur];
        path.push(cur);
    }
    path.reverse();
    path
}

impl WalkSolver for GreedySolver {
    fn name(&self) -> &'static str {
        "greedy"
    }

    fn solve(&self, h: &SimpleGraph) -> Result<CoveringWalk, WalkError> {
        check_input(h)?;
        let n = h.vertex_count();
        let mut visited = vec![false; n];
        visited[0] = true;
        let mut walk = vec![0];
        let mut cur = 0;
        while visited.iter().any(|v| !v) {
            // BFS layers give the nearest unvisited vertex; ties by index.
            let mut dist = vec![usize::MAX; n];
            dist[cur] = 0;
            let mut queue = VecDeque::from([cur]);
            while let Some(v) = queue.pop_front() {
                for w in h.neighbors_local(v) {
                    if dist[w] == usize::MAX {
                        dist[w] = dist[v] + 1;
                        queue.push_back(w);
                    }
                }
            }
            let target = (0..n)
                .filter(|&v| !visited[v])
                .min_by_key(|&v| (dist[v], v))
                .expect("some vertex is unvisited");
            for &v in &shortest_path_local(h, cur, target)[1..] {
                visited[v] = true;
                walk.push(v);
            }
            cur = target;
        }
        walk.extend_from_slice(&shortest_path_local(h, cur, 0)[1..]);
        Ok(CoveringWalk {
            factor: 0,
            vertices: walk.into_iter().map(|v| h.vertices()[v]).collect(),
            exact: false,
        })
    }
}

impl WalkSolver for AutoSolver {
    fn name(&self) -> &'static str {
        "auto"
    }

    fn solve(&self, h: &SimpleGraph) -> Result<CoveringWalk, WalkError> {
        if h.vertex_count() <= self.exact_limit.min(EXACT_HARD_CAP) {
            ExactSolver.solve(h)
        } else {
            GreedySolver.solve(h)
        }
    }
}

/// Minimum covering closed walk, exact up to `exact_limit` vertices.
pub fn min_covering_closed_walk(h: &SimpleGraph, exact_limit: usize) -> Result<CoveringWalk, WalkError> {
    AutoSolver { exact_limit }.solve(h)
}

/// How the common schedule length `n` is derived from the walk lengths.
pub trait LengthPolicy: Send + Sync {
    fn name(&self) -> &'static str;
    fn common_length(&self, lengths: &[usize]) -> Result<usize, WalkError>;
}

/// `n = n_1 * ... * n_k`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ProductLength;

/// `n = lcm(n_1, ..., n_k)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct LcmLength;

pub const LENGTH_POLICIES: &[&str] = &["product", "lcm"];

pub fn length_policy(name: &str) -> Option<Box<dyn LengthPolicy>> {
    match name {
        "product" => Some(Box::new(ProductLength)),
        "lcm" => Some(Box::new(LcmLength)),
        _ => None,
    }
}

impl LengthPolicy for ProductLength {
    fn name(&self) -> &'static str {
        "product"
    }

    fn common_length(&self, lengths: &[usize]) -> Result<usize, WalkError> {
        lengths
            .iter()
            .try_fold(1usize, |acc, &x| acc.checked_mul(x))
            .ok_or(WalkError::LengthOverflow)
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl LengthPolicy for LcmLength {
    fn name(&self) -> &'static str {
        "lcm"
    }

    fn common_length(&self, lengths: &[usize]) -> Result<usize, WalkError> {
        lengths.iter().try_fold(1usize, |acc, &x| {
            (acc / gcd(acc, x)).checked_mul(x).ok_or(WalkError::LengthOverflow)
        })
    }
}

/// Alignment index `l(i, j)` for the tree edge `parent - child`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Alignment {
    pub parent: usize,
    pub child: usize,
    /// 1-based position in `1..=n`.
    pub l: usize,
}

/// Rows `v_{i,1}, ..., v_{i,n+1}` of aligned covering walks, one per factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkSchedule {
    pub n: usize,
    pub rows: Vec<Vec<usize>>,
    pub alignment: Vec<Alignment>,
}

impl WalkSchedule {
    pub fn k(&self) -> usize {
        self.rows.len()
    }

    /// `v_{i,l}` with 1-based `l` in `1..=n+1`.
    pub fn vertex(&self, i: usize, l: usize) -> usize {
        self.rows[i][l - 1]
    }

    /// `l(i, j)`, symmetric in its arguments.
    pub fn l_between(&self, i: usize, j: usize) -> Option<usize> {
        let (lo, hi) = if i < j { (i, j) } else { (j, i) };
        self.alignment
            .iter()
            .find(|a| a.parent == lo && a.child == hi)
            .map(|a| a.l)
    }

    /// `U_l = {v_{1,l}, ..., v_{k,l}}` in factor order.
    pub fn clique_at(&self, l: usize) -> Vec<usize> {
        (0..self.k()).map(|i| self.vertex(i, l)).collect()
    }
}

fn repeated_cycle(walk: &CoveringWalk, n: usize) -> Vec<usize> {
    let cycle = &walk.vertices[..walk.len()];
    cycle.iter().copied().cycle().take(n).collect()
}

/// Aligns the walks (one per factor, in tree order) into a common schedule.
///
/// Row 0 is walk 0 repeated `n / n_0` times. Each child row is the repeated
/// walk rotated so that it holds `t` at `l = min { l : v_{parent,l} = s }`.
pub fn build_schedule(
    walks: &[CoveringWalk],
    tree: &RootedTree,
    sel: &CrossEdgeSelection,
    policy: &dyn LengthPolicy,
) -> Result<WalkSchedule, WalkError> {
    let k = tree.k();
    if walks.len() != k {
        return Err(WalkError::WalkCount {
            expected: k,
            actual: walks.len(),
        });
    }
    let lengths: Vec<usize> = walks.iter().map(CoveringWalk::len).collect();
    let n = policy.common_length(&lengths)?;
    for (factor, &len) in lengths.iter().enumerate() {
        if len == 0 || n % len != 0 {
            return Err(WalkError::NotDivisible { factor, len, n });
        }
    }

    let mut cycles: Vec<Vec<usize>> = walks.iter().map(|w| repeated_cycle(w, n)).collect();
    let mut alignment = Vec::new();
    for child in 1..k {
        let parent = tree.parent(child).expect("non-root node has a parent");
        let edge = sel
            .between(parent, child)
            .expect("every tree edge has a selected cross edge");
        let pos_s = cycles[parent]
            .iter()
            .position(|&v| v == edge.s)
            .ok_or(WalkError::MissingVertex {
                row: parent,
                vertex: edge.s,
            })?;
        let pos_t = cycles[child]
            .iter()
            .position(|&v| v == edge.t)
            .ok_or(WalkError::MissingVertex {
                row: child,
                vertex: edge.t,
            })?;
        // rotated[q] = base[(q - pos_s + pos_t) mod n], so rotated[pos_s] = t
        let base = std::mem::take(&mut cycles[child]);
        cycles[child] = (0..n).map(|q| base[(q + n - pos_s + pos_t) % n]).collect();
        alignment.push(Alignment {
            parent,
            child,
            l: pos_s + 1,
        });
    }

    let rows = cycles
        .into_iter()
        .map(|mut c| {
            c.push(c[0]);
            c
        })
        .collect();
    Ok(WalkSchedule { n, rows, alignment })
}

/// Result of [`validate_schedule`]: success, or the first violation found.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScheduleReport {
    pub valid: bool,
    pub first_violation: Option<String>,
}

impl ScheduleReport {
    fn fail(msg: String) -> Self {
        Self {
            valid: false,
            first_violation: Some(msg),
        }
    }
}

/// Checks rows against the factors (in tree order) and alignment against `sel`.
pub fn validate_schedule(
    ws: &WalkSchedule,
    g: &DefiningGraph,
    factors: &[Vec<usize>],
    sel: &CrossEdgeSelection,
) -> ScheduleReport {
    let n = ws.n;
    if n == 0 {
        return ScheduleReport::fail("schedule length n is 0".into());
    }
    if ws.rows.len() != factors.len() {
        return ScheduleReport::fail(format!("{} rows for {} factors", ws.rows.len(), factors.len()));
    }
    for (i, (row, factor)) in ws.rows.iter().zip(factors).enumerate() {
        if row.len() != n + 1 {
            return ScheduleReport::fail(format!("row {i} has {} entries, expected {}", row.len(), n + 1));
        }
        if row[0] != row[n] {
            return ScheduleReport::fail(format!("row {i} is not closed"));
        }
        if let Some(l) = row.iter().position(|v| !factor.contains(v)) {
            return ScheduleReport::fail(format!(
                "row {i} position {} holds `{}`, outside its factor",
                l + 1,
                g.name(row[l])
            ));
        }
        for l in 0..n {
            let (u, v) = (row[l], row[l + 1]);
            if u == v || g.is_edge(u, v) {
                return ScheduleReport::fail(format!(
                    "row {i} step {}: `{}`-`{}` is not a non-edge",
                    l + 1,
                    g.name(u),
                    g.name(v)
                ));
            }
        }
        if let Some(&missing) = factor.iter().find(|v| !row.contains(v)) {
            return ScheduleReport::fail(format!("row {i} never visits `{}`", g.name(missing)));
        }
    }
    for edge in sel.edges() {
        let Some(l) = ws.l_between(edge.parent, edge.child) else {
            return ScheduleReport::fail(format!(
                "no alignment index for tree edge ({}, {})",
                edge.parent, edge.child
            ));
        };
        if !(1..=n).contains(&l) {
            return ScheduleReport::fail(format!("alignment index {l} outside 1..={n}"));
        }
        if ws.vertex(edge.parent, l) != edge.s || ws.vertex(edge.child, l) != edge.t {
            return ScheduleReport::fail(format!(
                "alignment ({}, {}) at l = {l} does not hit `{}`-`{}`",
                edge.parent,
                edge.child,
                g.name(edge.s),
                g.name(edge.t)
            ));
        }
    }
    ScheduleReport {
        valid: true,
        first_violation: None,
    }
}
