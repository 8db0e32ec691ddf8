//! Simple undirected graphs and dense vertex sets.
//!
//! Vertices are `0..n` internally; parsers and printers translate to the
//! 1-based external ids used by the file formats. Adjacency lists are kept
//! sorted so that every iteration order in the solver is deterministic.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("empty graph")]
    Empty,
    #[error("self-loop at vertex {0}")]
    SelfLoop(u32),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(u32, u32),
    #[error("vertex id {0} out of range (n = {1})")]
    OutOfRange(u32, usize),
    #[error("vertex {0} is not in the given set")]
    NotInSet(u32),
    #[error("labels must be {expected} distinct values, got {got}")]
    BadLabels { expected: usize, got: usize },
}

/// Fixed-capacity bit set over vertex ids `0..n`.
///
/// Invariants: `len` always equals the number of set bits, and no bit at or
/// above the capacity is ever set. Iteration is in ascending id order.
#[derive(Clone, PartialEq, Eq)]
pub struct VertexSet {
    blocks: Vec<u64>,
    cap: usize,
    len: usize,
}

impl VertexSet {
    pub fn new(cap: usize) -> Self {
        VertexSet {
            blocks: vec![0; cap.div_ceil(64)],
            cap,
            len: 0,
        }
    }

    pub fn from_ids<I: IntoIterator<Item = u32>>(cap: usize, ids: I) -> Self {
        let mut s = VertexSet::new(cap);
        for v in ids {
            s.insert(v);
        }
        s
    }

    /// Set with all of `0..cap` present.
    pub fn full(cap: usize) -> Self {
        let mut s = VertexSet::new(cap);
        for v in 0..cap as u32 {
            s.insert(v);
        }
        s
    }

    pub fn capacity(&self) -> usize {
        self.cap
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn contains(&self, v: u32) -> bool {
        let v = v as usize;
        v < self.cap && self.blocks[v / 64] >> (v % 64) & 1 == 1
    }

    /// Inserts `v`, returning true if it was absent. Panics if `v` is out of
    /// capacity; ids are validated at graph construction.
    pub fn insert(&mut self, v: u32) -> bool {
        let i = v as usize;
        assert!(i < self.cap, "vertex {v} out of capacity {}", self.cap);
        let mask = 1u64 << (i % 64);
        let fresh = self.blocks[i / 64] & mask == 0;
        if fresh {
            self.blocks[i / 64] |= mask;
            self.len += 1;
        }
        fresh
    }

    pub fn remove(&mut self, v: u32) -> bool {
        if !self.contains(v) {
            return false;
        }
        let i = v as usize;
        self.blocks[i / 64] &= !(1u64 << (i % 64));
        self.len -= 1;
        true
    }

    pub fn clear(&mut self) {
        self.blocks.fill(0);
        self.len = 0;
    }

    pub fn union_with(&mut self, other: &VertexSet) {
        debug_assert_eq!(self.cap, other.cap);
        let mut len = 0;
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            *a |= b;
            len += a.count_ones() as usize;
        }
        self.len = len;
    }

    /// Number of members of `self` that are absent from `other`.
    pub fn count_difference(&self, other: &VertexSet) -> usize {
        debug_assert_eq!(self.cap, other.cap);
        self.blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| (a & !b).count_ones() as usize)
            .sum()
    }

    /// Smallest id in `0..cap` that is not a member.
    pub fn first_absent(&self) -> Option<u32> {
        for (i, &b) in self.blocks.iter().enumerate() {
            if b != u64::MAX {
                let v = i * 64 + (!b).trailing_zeros() as usize;
                if v < self.cap {
                    return Some(v as u32);
                }
            }
        }
        None
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.blocks.iter().enumerate().flat_map(|(i, &b)| {
            let mut bits = b;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let t = bits.trailing_zeros();
                bits &= bits - 1;
                Some((i * 64) as u32 + t)
            })
        })
    }

    pub fn to_vec(&self) -> Vec<u32> {
        self.iter().collect()
    }
}

impl std::fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Simple undirected graph with sorted adjacency lists.
///
/// Invariants: no self-loops, no duplicate edges, neighbor lists sorted
/// ascending, `m` equals the number of undirected edges.
#[derive(Clone, PartialEq)]
pub struct Graph {
    adj: Vec<Vec<u32>>,
    m: usize,
    labels: Option<Vec<u64>>,
}

impl Graph {
    /// Builds a graph from an edge list. Rejects n = 0, self-loops,
    /// duplicate edges (in either orientation) and out-of-range endpoints.
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Result<Graph, GraphError> {
        if n == 0 {
            return Err(GraphError::Empty);
        }
        let mut adj = vec![Vec::new(); n];
        let mut seen = std::collections::HashSet::with_capacity(edges.len());
        for &(u, v) in edges {
            if u as usize >= n {
                return Err(GraphError::OutOfRange(u, n));
            }
            if v as usize >= n {
                return Err(GraphError::OutOfRange(v, n));
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            let key = (u.min(v), u.max(v));
            if !seen.insert(key) {
                return Err(GraphError::DuplicateEdge(key.0, key.1));
            }
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(Graph {
            adj,
            m: edges.len(),
            labels: None,
        })
    }

    /// Attaches external labels; `labels[v]` is printed wherever vertex `v`
    /// appears in output. Without labels the external id is `v + 1`.
    pub fn with_labels(mut self, labels: Vec<u64>) -> Result<Graph, GraphError> {
        let mut distinct: Vec<u64> = labels.clone();
        distinct.sort_unstable();
        distinct.dedup();
        if labels.len() != self.n() || distinct.len() != labels.len() {
            return Err(GraphError::BadLabels {
                expected: self.n(),
                got: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn degree(&self, v: u32) -> usize {
        self.adj[v as usize].len()
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adj[v as usize]
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.adj[u as usize].binary_search(&v).is_ok()
    }

    pub fn vertices(&self) -> impl Iterator<Item = u32> {
        0..self.n() as u32
    }

    /// External (1-based) id of `v`.
    pub fn label(&self, v: u32) -> u64 {
        match &self.labels {
            Some(l) => l[v as usize],
            None => v as u64 + 1,
        }
    }

    /// Sorted undirected edge list, each edge once with `u < v`.
    pub fn edges(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::with_capacity(self.m);
        for u in self.vertices() {
            for &v in self.neighbors(u) {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// `(delta, Delta)`: minimum and maximum degree. Requires n >= 1, which
    /// construction already guarantees.
    pub fn degree_extremes(&self) -> (usize, usize) {
        let mut lo = usize::MAX;
        let mut hi = 0;
        for v in self.vertices() {
            let d = self.degree(v);
            lo = lo.min(d);
            hi = hi.max(d);
        }
        (lo, hi)
    }

    /// Connected components, each sorted ascending, ordered by smallest
    /// member.
    pub fn components(&self) -> Vec<Vec<u32>> {
        let n = self.n();
        let mut seen = VertexSet::new(n);
        let mut out = Vec::new();
        let mut queue = std::collections::VecDeque::new();
        for start in self.vertices() {
            if seen.contains(start) {
                continue;
            }
            let mut comp = vec![start];
            seen.insert(start);
            queue.push_back(start);
            while let Some(u) = queue.pop_front() {
                for &w in self.neighbors(u) {
                    if seen.insert(w) {
                        comp.push(w);
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() == 1
    }

    // ---- small deterministic families, mostly for tests and benchmarks ----

    /// Path 0-1-..-(n-1).
    pub fn path(n: usize) -> Graph {
        let edges: Vec<_> = (1..n as u32).map(|v| (v - 1, v)).collect();
        Graph::from_edges(n, &edges).expect("path is simple")
    }

    /// Cycle on n >= 3 vertices.
    pub fn cycle(n: usize) -> Graph {
        assert!(n >= 3, "cycle needs at least 3 vertices");
        let mut edges: Vec<_> = (1..n as u32).map(|v| (v - 1, v)).collect();
        edges.push((n as u32 - 1, 0));
        Graph::from_edges(n, &edges).expect("cycle is simple")
    }

    /// Star: vertex 0 adjacent to all others.
    pub fn star(n: usize) -> Graph {
        let edges: Vec<_> = (1..n as u32).map(|v| (0, v)).collect();
        Graph::from_edges(n, &edges).expect("star is simple")
    }

    pub fn complete(n: usize) -> Graph {
        let mut edges = Vec::new();
        for u in 0..n as u32 {
            for v in u + 1..n as u32 {
                edges.push((u, v));
            }
        }
        Graph::from_edges(n, &edges).expect("complete graph is simple")
    }

    /// Complete bipartite graph with sides `0..a` and `a..a+b`.
    pub fn complete_bipartite(a: usize, b: usize) -> Graph {
        let mut edges = Vec::new();
        for u in 0..a as u32 {
            for v in 0..b as u32 {
                edges.push((u, a as u32 + v));
            }
        }
        Graph::from_edges(a + b, &edges).expect("bipartite graph is simple")
    }
}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Graph(n={}, m={})", self.n(), self.m())
    }
}

/// `S ∪ N(S)`: every vertex that is in `s` or has a neighbor in `s`.
pub fn covered_set(g: &Graph, s: &VertexSet) -> VertexSet {
    let mut covered = VertexSet::new(g.n());
    for v in s.iter() {
        covered.insert(v);
        for &u in g.neighbors(v) {
            covered.insert(u);
        }
    }
    covered
}

/// True iff every vertex outside `s` has a neighbor in `s`.
pub fn is_dominating(g: &Graph, s: &VertexSet) -> bool {
    g.vertices()
        .all(|v| s.contains(v) || g.neighbors(v).iter().any(|&u| s.contains(u)))
}

/// Private neighbors of `v` with respect to `s`: vertices outside `s` whose
/// only neighbor inside `s` is `v`. Errors if `v` is not in `s`.
pub fn private_neighbors(g: &Graph, s: &VertexSet, v: u32) -> Result<VertexSet, GraphError> {
    semi_private_neighbors(g, s, v)
}

/// Semi-private neighbors of `v` with respect to a survivor set: vertices
/// outside `survivors` whose only surviving neighbor is `v`. At the start of
/// a reduction (survivors = S) this coincides with `private_neighbors`.
pub fn semi_private_neighbors(
    g: &Graph,
    survivors: &VertexSet,
    v: u32,
) -> Result<VertexSet, GraphError> {
    if !survivors.contains(v) {
        return Err(GraphError::NotInSet(v));
    }
    let mut out = VertexSet::new(g.n());
    for &u in g.neighbors(v) {
        if survivors.contains(u) {
            continue;
        }
        let sole = g
            .neighbors(u)
            .iter()
            .all(|&w| w == v || !survivors.contains(w));
        if sole {
            out.insert(u);
        }
    }
    Ok(out)
}
