//! Edge-list parsing and the immutable preprocessed graph.
//!
//! The input is a plain-text edge list (two whitespace-separated node IDs per
//! line, `#` comments ignored). Preprocessing collapses multi-edges, drops
//! self-loops, relabels nodes with dense consecutive IDs and precomputes the
//! per-node triangle counts and clustering coefficients the optimizer needs.

use std::io::BufRead;

use crate::error::Error;

/// Edge pairs in original (input) node IDs, in file order, before any cleanup.
pub type RawEdgeList = Vec<(u64, u64)>;

/// Immutable simple undirected graph with dense node IDs `0..n`.
///
/// Adjacency is CSR-style: `neighbors` holds each node's neighbor list
/// (sorted ascending) back to back, `offsets[i]..offsets[i+1]` is node `i`'s
/// slice. Safe to share across threads; nothing here mutates after build.
pub struct Graph {
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
    triangle_count: Vec<usize>,
    local_cc: Vec<f64>,
    global_cc: f64,
    /// Dense ID -> original input ID, ascending (dense IDs are assigned in
    /// ascending original-ID order, so this is sorted).
    original_ids: Vec<u64>,
}

/// Parse an edge list from a reader. Lines starting with `#` and blank lines
/// are skipped; data lines must contain exactly two nonnegative integers.
pub fn parse_edge_list<R: BufRead>(reader: R) -> Result<RawEdgeList, Error> {
    let mut edges = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let (a, b) = match (tokens.next(), tokens.next(), tokens.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: format!("expected two node IDs, got {:?}", trimmed),
                })
            }
        };
        let u = a.parse::<u64>().map_err(|_| Error::Parse {
            line: idx + 1,
            message: format!("invalid node ID {:?}", a),
        })?;
        let v = b.parse::<u64>().map_err(|_| Error::Parse {
            line: idx + 1,
            message: format!("invalid node ID {:?}", b),
        })?;
        edges.push((u, v));
    }
    if edges.is_empty() {
        return Err(Error::EmptyGraph);
    }
    Ok(edges)
}

/// Build the preprocessed graph from raw edges: drop self-loops, collapse
/// duplicate edges (both orientations), relabel densely, precompute triangle
/// counts and clustering coefficients.
pub fn build_graph(raw: &[(u64, u64)]) -> Result<Graph, Error> {
    let mut ids: Vec<u64> = Vec::with_capacity(raw.len() * 2);
    for &(u, v) in raw {
        if u == v {
            continue;
        }
        ids.push(u);
        ids.push(v);
    }
    if ids.is_empty() {
        return Err(Error::EmptyGraph);
    }
    ids.sort_unstable();
    ids.dedup();
    let original_ids = ids;
    let n = original_ids.len();

    let dense = |orig: u64| original_ids.binary_search(&orig).expect("id collected above");

    let mut edges: Vec<(usize, usize)> = raw
        .iter()
        .filter(|&&(u, v)| u != v)
        .map(|&(u, v)| {
            let (a, b) = (dense(u), dense(v));
            if a < b {
                (a, b)
            } else {
                (b, a)
            }
        })
        .collect();
    edges.sort_unstable();
    edges.dedup();

    let mut degree = vec![0usize; n];
    for &(u, v) in &edges {
        degree[u] += 1;
        degree[v] += 1;
    }
    let mut offsets = Vec::with_capacity(n + 1);
    let mut acc = 0usize;
    offsets.push(0);
    for &d in &degree {
        acc += d;
        offsets.push(acc);
    }
    let mut neighbors = vec![0usize; acc];
    let mut fill = offsets.clone();
    for &(u, v) in &edges {
        neighbors[fill[u]] = v;
        fill[u] += 1;
        neighbors[fill[v]] = u;
        fill[v] += 1;
    }
    for i in 0..n {
        neighbors[offsets[i]..offsets[i + 1]].sort_unstable();
    }

    let mut graph = Graph {
        offsets,
        neighbors,
        triangle_count: Vec::new(),
        local_cc: Vec::new(),
        global_cc: 0.0,
        original_ids,
    };
    graph.compute_triangles();
    Ok(graph)
}

/// Parse and build in one step.
pub fn read_graph<R: BufRead>(reader: R) -> Result<Graph, Error> {
    let raw = parse_edge_list(reader)?;
    build_graph(&raw)
}

fn sorted_intersection_count(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut count) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

impl Graph {
    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Undirected edge count after preprocessing.
    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    /// Sorted neighbor slice of a dense node ID.
    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.neighbors[self.offsets[node]..self.offsets[node + 1]]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.offsets[node + 1] - self.offsets[node]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Number of triangles containing `node` (k_i).
    pub fn triangle_count(&self, node: usize) -> usize {
        self.triangle_count[node]
    }

    /// Local clustering coefficient of one node; range error on bad IDs.
    pub fn local_cc(&self, node: usize) -> Result<f64, Error> {
        self.local_cc
            .get(node)
            .copied()
            .ok_or(Error::NodeRange(node))
    }

    /// All local clustering coefficients, indexed by dense node ID.
    pub fn local_ccs(&self) -> &[f64] {
        &self.local_cc
    }

    /// Mean of the local clustering coefficients over all nodes.
    pub fn global_cc(&self) -> f64 {
        self.global_cc
    }

    pub fn original_id(&self, node: usize) -> u64 {
        self.original_ids[node]
    }

    pub fn dense_id(&self, original: u64) -> Option<usize> {
        self.original_ids.binary_search(&original).ok()
    }

    /// Node processing order: decreasing local CC, ties by decreasing degree,
    /// remaining ties by ascending dense ID. Deterministic.
    pub fn processing_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.node_count()).collect();
        order.sort_unstable_by(|&a, &b| {
            self.local_cc[b]
                .total_cmp(&self.local_cc[a])
                .then_with(|| self.degree(b).cmp(&self.degree(a)))
                .then_with(|| a.cmp(&b))
        });
        order
    }

    /// Count unordered neighbor pairs {y, z} of `x` with both endpoints in the
    /// given set and the closing edge (y, z) present.
    pub fn triangles_with_set<F: Fn(usize) -> bool>(&self, x: usize, in_set: F) -> usize {
        let nbrs: Vec<usize> = self
            .neighbors(x)
            .iter()
            .copied()
            .filter(|&y| in_set(y))
            .collect();
        let mut count = 0;
        for (i, &y) in nbrs.iter().enumerate() {
            for &z in &nbrs[i + 1..] {
                if self.has_edge(y, z) {
                    count += 1;
                }
            }
        }
        count
    }

    /// Number of neighbors of `x` (restricted by `in_set`) that close at least
    /// one triangle with `x`.
    pub fn triangle_partners<F: Fn(usize) -> bool>(&self, x: usize, in_set: F) -> usize {
        self.neighbors(x)
            .iter()
            .filter(|&&y| {
                in_set(y) && sorted_intersection_count(self.neighbors(x), self.neighbors(y)) > 0
            })
            .count()
    }

    fn compute_triangles(&mut self) {
        let n = self.node_count();
        let mut triangle_count = vec![0usize; n];
        for (i, count) in triangle_count.iter_mut().enumerate() {
            let adj_i = self.neighbors(i);
            let mut twice: usize = 0;
            for &j in adj_i {
                twice += sorted_intersection_count(adj_i, self.neighbors(j));
            }
            *count = twice / 2;
        }
        let mut local_cc = vec![0.0f64; n];
        for i in 0..n {
            let d = self.degree(i);
            if d > 1 {
                let pairs = (d * (d - 1) / 2) as f64;
                local_cc[i] = triangle_count[i] as f64 / pairs;
            }
        }
        self.global_cc = local_cc.iter().sum::<f64>() / n as f64;
        self.triangle_count = triangle_count;
        self.local_cc = local_cc;
    }
}
