//! Labeled defining graphs and the classification predicates built on them.
//!
//! A [`DefiningGraph`] is a finite simple graph whose edges carry integer
//! labels `>= 2`. A pair of vertices without an edge carries the label `∞`,
//! so only finite labels are stored. Vertex order is the order in which the
//! vertices were declared; every tie-break in the crate uses it.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

/// Default vertex cap for clique enumeration.
pub const DEFAULT_CLIQUE_VERTEX_CAP: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("line {line}: duplicate vertex `{name}`")]
    DuplicateVertex { line: usize, name: String },
    #[error("line {line}: unknown vertex `{name}`")]
    UnknownVertex { line: usize, name: String },
    #[error("line {line}: label {label} is smaller than 2")]
    LabelTooSmall { line: usize, label: u64 },
    #[error("line {line}: duplicate edge `{u}`-`{v}`")]
    DuplicateEdge { line: usize, u: String, v: String },
    #[error("line {line}: self-loop on `{name}`")]
    SelfLoop { line: usize, name: String },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("graph declares no vertices")]
    NoVertices,
    #[error("clique enumeration is capped at {cap} vertices, graph has {actual}")]
    CliqueCapExceeded { cap: usize, actual: usize },
}

/// A finite simple graph with edge labels in `{2, 3, ...}`; non-edges are `∞`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DefiningGraph {
    names: Vec<String>,
    index: HashMap<String, usize>,
    // dense symmetric matrix; `None` is the label ∞
    labels: Vec<Vec<Option<u32>>>,
}

impl DefiningGraph {
    /// Builds a graph from vertex names and `(u, v, label)` triples given by index.
    ///
    /// Line numbers in the returned errors are `0`; [`parse_graph`] fills in
    /// real ones.
    pub fn new<S: Into<String>>(
        names: impl IntoIterator<Item = S>,
        edges: impl IntoIterator<Item = (usize, usize, u32)>,
    ) -> Result<Self, GraphError> {
        let mut g = Self::empty();
        for name in names {
            g.add_vertex(name.into(), 0)?;
        }
        if g.names.is_empty() {
            return Err(GraphError::NoVertices);
        }
        for (u, v, m) in edges {
            g.add_edge(u, v, m as u64, 0)?;
        }
        Ok(g)
    }

    /// Convenience constructor from vertex names and named edges.
    pub fn from_named(vertices: &[&str], edges: &[(&str, &str, u32)]) -> Result<Self, GraphError> {
        let mut g = Self::empty();
        for v in vertices {
            g.add_vertex((*v).to_string(), 0)?;
        }
        if g.names.is_empty() {
            return Err(GraphError::NoVertices);
        }
        for (u, v, m) in edges {
            let ui = g.lookup(u, 0)?;
            let vi = g.lookup(v, 0)?;
            g.add_edge(ui, vi, *m as u64, 0)?;
        }
        Ok(g)
    }

    fn empty() -> Self {
        Self {
            names: Vec::new(),
            index: HashMap::new(),
            labels: Vec::new(),
        }
    }

    fn add_vertex(&mut self, name: String, line: usize) -> Result<(), GraphError> {
        if self.index.contains_key(&name) {
            return Err(GraphError::DuplicateVertex { line, name });
        }
        let id = self.names.len();
        self.index.insert(name.clone(), id);
        self.names.push(name);
        for row in &mut self.labels {
            row.push(None);
        }
        self.labels.push(vec![None; id + 1]);
        Ok(())
    }

    fn lookup(&self, name: &str, line: usize) -> Result<usize, GraphError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| GraphError::UnknownVertex {
                line,
                name: name.to_string(),
            })
    }

    fn add_edge(&mut self, u: usize, v: usize, label: u64, line: usize) -> Result<(), GraphError> {
        let n = self.names.len();
        for x in [u, v] {
            if x >= n {
                return Err(GraphError::UnknownVertex {
                    line,
                    name: format!("#{x}"),
                });
            }
        }
        if u == v {
            return Err(GraphError::SelfLoop {
                line,
                name: self.names[u].clone(),
            });
        }
        if label < 2 {
            return Err(GraphError::LabelTooSmall { line, label });
        }
        if self.labels[u][v].is_some() {
            return Err(GraphError::DuplicateEdge {
                line,
                u: self.names[u].clone(),
                v: self.names[v].clone(),
            });
        }
        let label = u32::try_from(label).map_err(|_| GraphError::Malformed {
            line,
            message: format!("label {label} does not fit in 32 bits"),
        })?;
        self.labels[u][v] = Some(label);
        self.labels[v][u] = Some(label);
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn vertex_id(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// Edge label, `None` meaning `∞` (no edge). The diagonal is `None`.
    pub fn label(&self, u: usize, v: usize) -> Option<u32> {
        self.labels[u][v]
    }

    pub fn is_edge(&self, u: usize, v: usize) -> bool {
        self.labels[u][v].is_some()
    }

    /// Edges as `(u, v, label)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize, u32)> {
        let n = self.vertex_count();
        let mut out = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if let Some(m) = self.labels[u][v] {
                    out.push((u, v, m));
                }
            }
        }
        out
    }

    /// Induced subgraph on `vertices` (kept in the given order).
    pub fn induced(&self, vertices: &[usize]) -> DefiningGraph {
        let mut g = Self::empty();
        for &v in vertices {
            g.add_vertex(self.names[v].clone(), 0)
                .expect("vertex names are unique in the parent graph");
        }
        for (a, &u) in vertices.iter().enumerate() {
            for (b, &v) in vertices.iter().enumerate().skip(a + 1) {
                if let Some(m) = self.labels[u][v] {
                    g.labels[a][b] = Some(m);
                    g.labels[b][a] = Some(m);
                }
            }
        }
        g
    }

    /// Renders the graph in the line-oriented text format.
    pub fn to_text(&self) -> String {
        let mut out = format!("vertices: {}\n", self.names.join(" "));
        for (u, v, m) in self.edges() {
            out.push_str(&format!("edge: {} {} {}\n", self.names[u], self.names[v], m));
        }
        out
    }
}

/// Parses the line-oriented graph format.
///
/// ```text
/// # comment
/// vertices: a b c d
/// edge: a c 3
/// ```
///
/// Several `vertices:` lines are allowed; they append in order.
pub fn parse_graph(text: &str) -> Result<DefiningGraph, GraphError> {
    let mut g = DefiningGraph::empty();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let (key, rest) = content.split_once(':').ok_or_else(|| GraphError::Malformed {
            line,
            message: format!("expected `vertices:` or `edge:`, found `{content}`"),
        })?;
        match key.trim() {
            "vertices" => {
                for name in rest.split_whitespace() {
                    g.add_vertex(name.to_string(), line)?;
                }
            }
            "edge" => {
                let fields: Vec<&str> = rest.split_whitespace().collect();
                if fields.len() != 3 {
                    return Err(GraphError::Malformed {
                        line,
                        message: format!("edge needs `u v label`, found {} fields", fields.len()),
                    });
                }
                let label: u64 = fields[2].parse().map_err(|_| GraphError::Malformed {
                    line,
                    message: format!("label `{}` is not a non-negative integer", fields[2]),
                })?;
                if fields[0] == fields[1] {
                    return Err(GraphError::SelfLoop {
                        line,
                        name: fields[0].to_string(),
                    });
                }
                let u = g.lookup(fields[0], line)?;
                let v = g.lookup(fields[1], line)?;
                g.add_edge(u, v, label, line)?;
            }
            other => {
                return Err(GraphError::Malformed {
                    line,
                    message: format!("unknown directive `{other}`"),
                })
            }
        }
    }
    if g.names.is_empty() {
        return Err(GraphError::NoVertices);
    }
    Ok(g)
}

/// An unlabeled simple graph on a subset of a defining graph's vertices.
///
/// `vertices` holds global vertex ids; adjacency is indexed locally.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleGraph {
    vertices: Vec<usize>,
    adj: Vec<Vec<bool>>,
}

impl SimpleGraph {
    pub fn new(vertices: Vec<usize>, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let n = vertices.len();
        let local: HashMap<usize, usize> = vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut adj = vec![vec![false; n]; n];
        for (u, v) in edges {
            let (a, b) = (local[&u], local[&v]);
            assert_ne!(a, b, "simple graphs have no loops");
            adj[a][b] = true;
            adj[b][a] = true;
        }
        Self { vertices, adj }
    }

    fn from_predicate(vertices: Vec<usize>, mut pred: impl FnMut(usize, usize) -> bool) -> Self {
        let n = vertices.len();
        let mut adj = vec![vec![false; n]; n];
        for a in 0..n {
            for b in a + 1..n {
                if pred(vertices[a], vertices[b]) {
                    adj[a][b] = true;
                    adj[b][a] = true;
                }
            }
        }
        Self { vertices, adj }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// Global vertex ids, in order.
    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn adjacent_local(&self, a: usize, b: usize) -> bool {
        self.adj[a][b]
    }

    pub fn neighbors_local(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[a].iter().enumerate().filter(|(_, &e)| e).map(|(b, _)| b)
    }

    /// Edges as global-id pairs `(u, v)` with local index of `u` below that of `v`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.vertices.len();
        let mut out = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if self.adj[a][b] {
                    out.push((self.vertices[a], self.vertices[b]));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.edges().len()
    }

    /// Connected components as lists of global ids, each sorted by local
    /// order, ordered by their first vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.vertices.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut stack = vec![start];
            let mut comp = vec![start];
            while let Some(a) = stack.pop() {
                for b in self.neighbors_local(a) {
                    if !seen[b] {
                        seen[b] = true;
                        comp.push(b);
                        stack.push(b);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp.into_iter().map(|a| self.vertices[a]).collect());
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }
}

/// The complement graph: edges are the non-adjacent pairs of `g`.
pub fn complement_graph(g: &DefiningGraph) -> SimpleGraph {
    SimpleGraph::from_predicate((0..g.vertex_count()).collect(), |u, v| !g.is_edge(u, v))
}

/// Complement of the subgraph induced on `vertices`.
pub fn induced_complement(g: &DefiningGraph, vertices: &[usize]) -> SimpleGraph {
    SimpleGraph::from_predicate(vertices.to_vec(), |u, v| !g.is_edge(u, v))
}

/// The graph of pairs labeled `>= 3` or `∞`.
pub fn t_graph(g: &DefiningGraph) -> SimpleGraph {
    SimpleGraph::from_predicate((0..g.vertex_count()).collect(), |u, v| {
        g.label(u, v).is_none_or(|m| m >= 3)
    })
}

/// Unique decomposition of a graph as a join of indecomposable factors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JoinDecomposition {
    factors: Vec<Vec<usize>>,
}

impl JoinDecomposition {
    /// Wraps factors already known to be complement components.
    pub fn from_factors(factors: Vec<Vec<usize>>) -> Self {
        Self { factors }
    }

    pub fn factors(&self) -> &[Vec<usize>] {
        &self.factors
    }

    pub fn k(&self) -> usize {
        self.factors.len()
    }

    pub fn is_decomposable(&self) -> bool {
        self.factors.len() >= 2
    }

    /// Index of the factor containing `v`.
    pub fn factor_of(&self, v: usize) -> Option<usize> {
        self.factors.iter().position(|f| f.contains(&v))
    }

    pub fn factor_subgraphs(&self, g: &DefiningGraph) -> Vec<DefiningGraph> {
        self.factors.iter().map(|f| g.induced(f)).collect()
    }
}

/// Factors are the components of the complement graph, ordered by their
/// smallest vertex.
pub fn join_decompose(g: &DefiningGraph) -> JoinDecomposition {
    JoinDecomposition {
        factors: complement_graph(g).components(),
    }
}

/// A cone is a decomposable graph with a singleton factor.
pub fn is_cone(g: &DefiningGraph) -> bool {
    let dec = join_decompose(g);
    dec.is_decomposable() && dec.factors.iter().any(|f| f.len() == 1)
}

/// Irreducible iff the graph of labels `>= 3` and `∞` is connected.
pub fn is_irreducible(g: &DefiningGraph) -> bool {
    t_graph(g).is_connected()
}

/// All cliques including the empty set, ordered by size then lexicographically.
pub fn enumerate_cliques(g: &DefiningGraph) -> Result<Vec<Vec<usize>>, GraphError> {
    enumerate_cliques_capped(g, DEFAULT_CLIQUE_VERTEX_CAP)
}

pub fn enumerate_cliques_capped(g: &DefiningGraph, cap: usize) -> Result<Vec<Vec<usize>>, GraphError> {
    let n = g.vertex_count();
    if n > cap {
        return Err(GraphError::CliqueCapExceeded { cap, actual: n });
    }
    let mut out = Vec::new();
    let mut current = Vec::new();
    let candidates: Vec<usize> = (0..n).collect();
    extend_cliques(g, &mut current, &candidates, &mut out);
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(out)
}

// Every clique is emitted once: each extension only adds vertices larger
// than the last one and adjacent to all current members.
fn extend_cliques(g: &DefiningGraph, current: &mut Vec<usize>, candidates: &[usize], out: &mut Vec<Vec<usize>>) {
    out.push(current.clone());
    for (pos, &v) in candidates.iter().enumerate() {
        let next: Vec<usize> = candidates[pos + 1..]
            .iter()
            .copied()
            .filter(|&w| g.is_edge(v, w))
            .collect();
        current.push(v);
        extend_cliques(g, current, &next, out);
        current.pop();
    }
}

/// Whether `set` spans a clique (the empty set and singletons do).
pub fn is_clique(g: &DefiningGraph, set: &[usize]) -> bool {
    set.iter()
        .enumerate()
        .all(|(a, &u)| set[a + 1..].iter().all(|&v| u != v && g.is_edge(u, v)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstructionStatus {
    Eligible,
    /// Indecomposable graphs: an element is already known from prior work.
    Deferred,
    Ineligible,
}

impl fmt::Display for ConstructionStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ConstructionStatus::Eligible => "eligible",
            ConstructionStatus::Deferred => "deferred",
            ConstructionStatus::Ineligible => "ineligible",
        };
        f.write_str(s)
    }
}

/// Outcome of checking a graph against the construction's hypotheses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HypothesisReport {
    pub vertex_count: usize,
    pub factor_count: usize,
    pub factors: Vec<Vec<String>>,
    pub has_three_vertices: bool,
    pub not_cone: bool,
    pub irreducible: bool,
    pub decomposable: bool,
    pub construction_eligible: bool,
    pub status: ConstructionStatus,
    pub notes: Vec<String>,
}

pub fn check_hypotheses(g: &DefiningGraph) -> HypothesisReport {
    let dec = join_decompose(g);
    let has_three_vertices = g.vertex_count() >= 3;
    let decomposable = dec.is_decomposable();
    let not_cone = !(decomposable && dec.factors.iter().any(|f| f.len() == 1));
    let irreducible = is_irreducible(g);
    let construction_eligible = has_three_vertices && not_cone && irreducible && decomposable;

    let mut notes = Vec::new();
    if !has_three_vertices {
        notes.push("fewer than three vertices".to_string());
    }
    if !not_cone {
        notes.push("graph is a cone".to_string());
    }
    if !irreducible {
        notes.push("reducible: graph of labels >= 3 and non-edges is disconnected".to_string());
    }
    let status = if construction_eligible {
        ConstructionStatus::Eligible
    } else if has_three_vertices && irreducible && !decomposable {
        notes.push("indecomposable: construction deferred to prior work".to_string());
        ConstructionStatus::Deferred
    } else {
        ConstructionStatus::Ineligible
    };

    HypothesisReport {
        vertex_count: g.vertex_count(),
        factor_count: dec.k(),
        factors: dec
            .factors
            .iter()
            .map(|f| f.iter().map(|&v| g.name(v).to_string()).collect())
            .collect(),
        has_three_vertices,
        not_cone,
        irreducible,
        decomposable,
        construction_eligible,
        status,
        notes,
    }
}

/// Edge list keyed by name pairs; used when comparing graphs across documents.
pub fn named_edge_map(g: &DefiningGraph) -> BTreeMap<(String, String), u32> {
    g.edges()
        .into_iter()
        .map(|(u, v, m)| ((g.name(u).to_string(), g.name(v).to_string()), m))
        .collect()
}
