//! Independent oracles and generators shared by the integration tests and
//! the acceptance harness. Nothing here calls into the algorithms it checks.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap, HashSet};
use std::f64::consts::PI;

use artin_wpd::graph::DefiningGraph;
use rand::seq::SliceRandom;
use rand::Rng;

/// Reachability by Warshall's transitive closure; returns components as
/// sorted vertex sets.
pub fn closure_components(n: usize, adj: &dyn Fn(usize, usize) -> bool) -> BTreeSet<Vec<usize>> {
    let mut reach = vec![vec![false; n]; n];
    for (u, row) in reach.iter_mut().enumerate() {
        for (v, cell) in row.iter_mut().enumerate() {
            *cell = u == v || adj(u, v);
        }
    }
    for w in 0..n {
        for u in 0..n {
            if reach[u][w] {
                for v in 0..n {
                    if reach[w][v] {
                        reach[u][v] = true;
                    }
                }
            }
        }
    }
    (0..n)
        .map(|u| (0..n).filter(|&v| reach[u][v]).collect())
        .collect()
}

/// All-pairs distances by Floyd-Warshall; `usize::MAX` when unreachable.
pub fn distances(n: usize, adj: &[Vec<bool>]) -> Vec<Vec<usize>> {
    let inf = usize::MAX / 4;
    let mut d = vec![vec![inf; n]; n];
    for u in 0..n {
        d[u][u] = 0;
        for v in 0..n {
            if adj[u][v] {
                d[u][v] = 1;
            }
        }
    }
    for w in 0..n {
        for u in 0..n {
            for v in 0..n {
                if d[u][w] + d[w][v] < d[u][v] {
                    d[u][v] = d[u][w] + d[w][v];
                }
            }
        }
    }
    d
}

/// Shortest closed walk through every vertex, as the cheapest tour of the
/// shortest-path metric, by branch and bound over vertex orders.
pub fn brute_force_min_walk(adj: &[Vec<bool>]) -> usize {
    let n = adj.len();
    let d = distances(n, adj);
    fn go(d: &[Vec<usize>], cur: usize, left: &mut Vec<usize>, cost: usize, best: &mut usize) {
        if cost >= *best {
            return;
        }
        if left.is_empty() {
            *best = (*best).min(cost + d[cur][0]);
            return;
        }
        for i in 0..left.len() {
            let v = left.swap_remove(i);
            go(d, v, left, cost + d[cur][v], best);
            left.push(v);
            let last = left.len() - 1;
            left.swap(i, last);
        }
    }
    let mut best = usize::MAX;
    go(&d, 0, &mut (1..n).collect(), 0, &mut best);
    best
}

/// Checks that `walk` is a closed walk in `adj` through every vertex.
pub fn is_covering_closed_walk(adj: &[Vec<bool>], walk: &[usize]) -> bool {
    walk.len() >= 2
        && walk.first() == walk.last()
        && walk.windows(2).all(|s| adj[s[0]][s[1]])
        && (0..adj.len()).all(|v| walk.contains(&v))
}

/// Colour refinement followed by individualization; the lexicographically
/// least adjacency string over all leaves is a canonical form.
pub fn canonical_form(adj: &[Vec<bool>]) -> Vec<bool> {
    let n = adj.len();
    fn refine(adj: &[Vec<bool>], mut colors: Vec<usize>) -> Vec<usize> {
        loop {
            let sigs: Vec<(usize, Vec<usize>)> = (0..adj.len())
                .map(|v| {
                    let mut nb: Vec<usize> = (0..adj.len()).filter(|&w| adj[v][w]).map(|w| colors[w]).collect();
                    nb.sort_unstable();
                    (colors[v], nb)
                })
                .collect();
            let mut distinct = sigs.clone();
            distinct.sort();
            distinct.dedup();
            let next: Vec<usize> = sigs.iter().map(|s| distinct.binary_search(s).unwrap()).collect();
            let classes = |c: &[usize]| c.iter().collect::<HashSet<_>>().len();
            if classes(&next) == classes(&colors) {
                return next;
            }
            colors = next;
        }
    }
    fn search(adj: &[Vec<bool>], colors: Vec<usize>, best: &mut Option<Vec<bool>>) {
        let colors = refine(adj, colors);
        let n = adj.len();
        let mut counts = vec![0; n];
        for &c in &colors {
            counts[c] += 1;
        }
        match (0..n).find(|&c| counts[c] > 1) {
            None => {
                let mut order = vec![0; n];
                for v in 0..n {
                    order[colors[v]] = v;
                }
                let s: Vec<bool> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).map(|(i, j)| adj[order[i]][order[j]]).collect();
                if best.as_ref().is_none_or(|b| s < *b) {
                    *best = Some(s);
                }
            }
            Some(cell) => {
                for v in (0..n).filter(|&v| colors[v] == cell) {
                    // doubling keeps the order of cells; v goes just before its cell
                    let next: Vec<usize> = (0..n).map(|w| 2 * colors[w] + usize::from(w != v || colors[w] != cell)).collect();
                    search(adj, next, best);
                }
            }
        }
    }
    let mut best = None;
    search(adj, vec![0; n], &mut best);
    best.unwrap()
}

/// One representative of every isomorphism class of graphs on `n` vertices.
pub fn graphs_up_to_iso(max_n: usize) -> Vec<Vec<Vec<Vec<bool>>>> {
    let mut by_size: Vec<Vec<Vec<Vec<bool>>>> = vec![vec![vec![]], vec![vec![vec![false]]]];
    for n in 2..=max_n {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for g in &by_size[n - 1] {
            for mask in 0..(1usize << (n - 1)) {
                let mut adj = vec![vec![false; n]; n];
                for u in 0..n - 1 {
                    for v in 0..n - 1 {
                        adj[u][v] = g[u][v];
                    }
                    let b = mask >> u & 1 == 1;
                    adj[u][n - 1] = b;
                    adj[n - 1][u] = b;
                }
                if seen.insert(canonical_form(&adj)) {
                    out.push(adj);
                }
            }
        }
        by_size.push(out);
    }
    by_size
}

pub fn is_connected(adj: &[Vec<bool>]) -> bool {
    let n = adj.len();
    closure_components(n, &|u, v| adj[u][v]).len() <= 1
}

/// Real matrix; entries are compared after rounding, which is safe for the
/// short words used in tests.
#[derive(Clone, Debug)]
pub struct Mat(pub Vec<Vec<f64>>);

impl Mat {
    pub fn identity(n: usize) -> Self {
        Mat((0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect())
    }

    pub fn mul(&self, o: &Mat) -> Mat {
        let n = self.0.len();
        Mat((0..n).map(|i| (0..n).map(|j| (0..n).map(|k| self.0[i][k] * o.0[k][j]).sum()).collect()).collect())
    }

    pub fn key(&self) -> Vec<i64> {
        self.0.iter().flatten().map(|x| (x * 1e6).round() as i64).collect()
    }
}

/// Faithful geometric representation: `σ_s(x) = x - 2 B(e_s, x) e_s` with
/// `B(e_s, e_t) = -cos(π / m_st)` and `-1` for `m = ∞`.
pub struct TitsRep {
    pub gens: Vec<Mat>,
}

impl TitsRep {
    pub fn new(rank: usize, m: &dyn Fn(usize, usize) -> Option<u32>) -> Self {
        let b = |s: usize, t: usize| -> f64 {
            if s == t {
                1.0
            } else {
                match m(s, t) {
                    Some(k) => -(PI / k as f64).cos(),
                    None => -1.0,
                }
            }
        };
        let gens = (0..rank)
            .map(|s| {
                let mut a = Mat::identity(rank);
                for x in 0..rank {
                    a.0[s][x] -= 2.0 * b(s, x);
                }
                a
            })
            .collect();
        TitsRep { gens }
    }

    pub fn from_graph(g: &DefiningGraph) -> Self {
        Self::new(g.vertex_count(), &|s, t| g.label(s, t))
    }

    pub fn eval(&self, word: &[usize]) -> Mat {
        word.iter().fold(Mat::identity(self.gens.len()), |acc, &s| acc.mul(&self.gens[s]))
    }

    /// Elements of length at most `radius` in the subgroup generated by
    /// `within`, keyed by matrix, each with one shortest word.
    pub fn ball(&self, radius: usize, within: &[usize]) -> HashMap<Vec<i64>, Vec<usize>> {
        let id = Mat::identity(self.gens.len());
        let mut seen = HashMap::from([(id.key(), Vec::new())]);
        let mut layer = vec![(id, Vec::new())];
        for _ in 0..radius {
            let mut next = Vec::new();
            for (x, w) in &layer {
                for &s in within {
                    let y = x.mul(&self.gens[s]);
                    let k = y.key();
                    if let std::collections::hash_map::Entry::Vacant(e) = seen.entry(k) {
                        let mut w2: Vec<usize> = w.clone();
                        w2.push(s);
                        e.insert(w2.clone());
                        next.push((y, w2));
                    }
                }
            }
            layer = next;
        }
        seen
    }
}

/// Shadow counts `(vertices, edges, squares)` by enumerating cosets `x W_U`
/// with `|x| <= radius` through the geometric representation.
pub fn shadow_counts_oracle(g: &DefiningGraph, radius: usize) -> (usize, usize, usize) {
    let n = g.vertex_count();
    let rep = TitsRep::from_graph(g);
    let all: Vec<usize> = (0..n).collect();
    let mut ball: Vec<Vec<usize>> = rep.ball(radius, &all).into_values().collect();
    ball.sort();
    let cliques: Vec<Vec<usize>> = (0..1usize << n)
        .map(|mask| (0..n).filter(|b| mask >> b & 1 == 1).collect::<Vec<_>>())
        .filter(|c: &Vec<usize>| c.iter().all(|&u| c.iter().all(|&v| u == v || g.is_edge(u, v))))
        .collect();
    let mut coset_count = Vec::new();
    for u in &cliques {
        let sub: HashSet<Vec<i64>> = rep.ball(2 * radius, u).into_keys().collect();
        // x W_U = y W_U iff x^{-1} y lies in W_U
        let mut reps: Vec<&Vec<usize>> = Vec::new();
        for y in &ball {
            let fresh = reps.iter().all(|x| {
                let inv_x: Vec<usize> = x.iter().rev().copied().collect();
                let mut w = inv_x;
                w.extend(y.iter());
                !sub.contains(&rep.eval(&w).key())
            });
            if fresh {
                reps.push(y);
            }
        }
        coset_count.push(reps.len());
    }
    let mut vertices = 0;
    let mut edges = 0;
    let mut squares = 0;
    for (ci, u) in cliques.iter().enumerate() {
        let extend: Vec<usize> = (0..n)
            .filter(|&s| !u.contains(&s) && u.iter().all(|&x| g.is_edge(x, s)))
            .collect();
        let pairs = extend
            .iter()
            .enumerate()
            .flat_map(|(i, &a)| extend[i + 1..].iter().map(move |&b| (a, b)))
            .filter(|&(a, b)| g.is_edge(a, b))
            .count();
        vertices += coset_count[ci];
        edges += coset_count[ci] * extend.len();
        squares += coset_count[ci] * pairs;
    }
    (vertices, edges, squares)
}

/// Labels `(u, v, m)` for a random graph whose join factors and tree of
/// label `>= 3` cross edges are controlled: `k` factors of size `>= 2`, each
/// with a connected complement, total at most `max_vertices`.
pub fn random_eligible_graph(rng: &mut impl Rng, max_vertices: usize) -> DefiningGraph {
    let k = rng.gen_range(2..=4usize.min(max_vertices / 2));
    let mut sizes = vec![2; k];
    let mut total = 2 * k;
    while total < max_vertices && rng.gen_bool(0.6) {
        let i = rng.gen_range(0..k);
        sizes[i] += 1;
        total += 1;
    }
    let mut perm: Vec<usize> = (0..total).collect();
    perm.shuffle(rng);
    let mut factors = Vec::new();
    let mut next = 0;
    for &s in &sizes {
        factors.push(perm[next..next + s].to_vec());
        next += s;
    }
    let mut labels: HashMap<(usize, usize), u32> = HashMap::new();
    let key = |u: usize, v: usize| if u < v { (u, v) } else { (v, u) };
    for f in &factors {
        // random connected complement: spanning tree plus extra non-edges
        let s = f.len();
        let mut non_edge = vec![vec![false; s]; s];
        for i in 1..s {
            let j = rng.gen_range(0..i);
            non_edge[i][j] = true;
            non_edge[j][i] = true;
        }
        for i in 0..s {
            for j in i + 1..s {
                if !non_edge[i][j] && rng.gen_bool(0.3) {
                    non_edge[i][j] = true;
                    non_edge[j][i] = true;
                }
                if !non_edge[i][j] {
                    labels.insert(key(f[i], f[j]), *[2, 3, 4].choose(rng).unwrap());
                }
            }
        }
    }
    for a in 0..k {
        for b in a + 1..k {
            for &u in &factors[a] {
                for &v in &factors[b] {
                    let m = if rng.gen_bool(0.15) { *[3, 4, 5].choose(rng).unwrap() } else { 2 };
                    labels.insert(key(u, v), m);
                }
            }
        }
    }
    for b in 1..k {
        let a = rng.gen_range(0..b);
        let u = *factors[a].choose(rng).unwrap();
        let v = *factors[b].choose(rng).unwrap();
        labels.insert(key(u, v), *[3, 4, 5, 6].choose(rng).unwrap());
    }
    let names: Vec<String> = (0..total).map(|i| format!("x{i}")).collect();
    let mut edges: Vec<(usize, usize, u32)> = labels.into_iter().map(|((u, v), m)| (u, v, m)).collect();
    edges.sort_unstable();
    DefiningGraph::new(names, edges).unwrap()
}

/// A join of `2..=4` random parts with cross labels in `{2, 3}`; reducible
/// outcomes are common.
pub fn random_decomposable_graph(rng: &mut impl Rng, max_vertices: usize) -> DefiningGraph {
    let k = rng.gen_range(2..=4usize.min(max_vertices));
    let total = rng.gen_range(k..=max_vertices);
    let part: Vec<usize> = (0..total).map(|v| if v < k { v } else { rng.gen_range(0..k) }).collect();
    let p3 = rng.gen_range(0.0..0.4);
    let mut edges = Vec::new();
    for u in 0..total {
        for v in u + 1..total {
            if part[u] != part[v] {
                edges.push((u, v, if rng.gen_bool(p3) { 3 } else { 2 }));
            } else if rng.gen_bool(0.4) {
                edges.push((u, v, *[2, 3].choose(rng).unwrap()));
            }
        }
    }
    let names: Vec<String> = (0..total).map(|i| format!("x{i}")).collect();
    DefiningGraph::new(names, edges).unwrap()
}

/// Leaf paths of a JSON value in the verifier's `a.b[3].c` notation.
pub fn leaf_paths(v: &serde_json::Value, prefix: &str, out: &mut Vec<String>) {
    match v {
        serde_json::Value::Object(m) => {
            for (k, x) in m {
                let p = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                leaf_paths(x, &p, out);
            }
        }
        serde_json::Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                leaf_paths(x, &format!("{prefix}[{i}]"), out);
            }
        }
        _ => out.push(prefix.to_string()),
    }
}

fn split_path(path: &str) -> Vec<String> {
    let mut parts = Vec::new();
    for seg in path.split('.') {
        let mut rest = seg;
        if let Some(i) = rest.find('[') {
            parts.push(rest[..i].to_string());
            rest = &rest[i..];
            while let Some(j) = rest.find(']') {
                parts.push(rest[..=j].to_string());
                rest = &rest[j + 1..];
            }
        } else {
            parts.push(rest.to_string());
        }
    }
    parts
}

pub fn leaf_mut<'a>(v: &'a mut serde_json::Value, path: &str) -> &'a mut serde_json::Value {
    split_path(path).iter().fold(v, |cur, p| {
        if let Some(idx) = p.strip_prefix('[') {
            &mut cur[idx.trim_end_matches(']').parse::<usize>().unwrap()]
        } else {
            &mut cur[p.as_str()]
        }
    })
}

/// Some failure mentions the mutated path or a prefix of it with at least
/// two components.
pub fn is_localized(failures: &[String], path: &str) -> bool {
    let parts = split_path(path);
    let min = parts.len().min(2);
    (min..=parts.len()).rev().any(|len| {
        let mut p = String::new();
        for part in &parts[..len] {
            if !p.is_empty() && !part.starts_with('[') {
                p.push('.');
            }
            p.push_str(part);
        }
        failures.iter().any(|f| f.contains(&p))
    })
}
