//! Stage 1: greedy dominating set construction with cluster bookkeeping.
//!
//! The greedy loop repeatedly adds the vertex with the largest active
//! degree, the number of its neighbors not yet covered by the set built so
//! far. Each insertion is mirrored into a [`ClusterForest`]: a partition of
//! the chosen vertices into rooted trees, one per connected component of the
//! subgraph induced by the set. The forest drives the cluster-guided
//! reduction procedures in [`crate::purify`].

use crate::graph::{covered_set, Graph, VertexSet};
use serde::Serialize;
use std::cmp::Reverse;
use std::collections::BinaryHeap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum Stage1Error {
    #[error("vertex {0} is already in the forest")]
    AlreadyPresent(u32),
    #[error("vertex {0} out of range (n = {1})")]
    OutOfRange(u32, usize),
    #[error("neighbor list for vertex {v} disagrees with the graph: {msg}")]
    BadNeighbors { v: u32, msg: String },
}

/// Dominating set that remembers insertion order.
///
/// Invariants: `order` holds no duplicates and `members` is exactly its set
/// of elements.
#[derive(Debug, Clone)]
pub struct OrderedDominatingSet {
    order: Vec<u32>,
    members: VertexSet,
}

impl OrderedDominatingSet {
    pub fn new(cap: usize) -> Self {
        OrderedDominatingSet {
            order: Vec::new(),
            members: VertexSet::new(cap),
        }
    }

    pub fn push(&mut self, v: u32) -> Result<(), Stage1Error> {
        if !self.members.insert(v) {
            return Err(Stage1Error::AlreadyPresent(v));
        }
        self.order.push(v);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn contains(&self, v: u32) -> bool {
        self.members.contains(v)
    }

    /// Insertion sequence.
    pub fn order(&self) -> &[u32] {
        &self.order
    }

    pub fn members(&self) -> &VertexSet {
        &self.members
    }
}

/// Which structural case an insertion took.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClusterCase {
    /// No forest neighbors: the vertex starts a new singleton cluster.
    NewRoot,
    /// Exactly one forest neighbor: the vertex joins that cluster as a child.
    Child,
    /// Two or more forest neighbors: a new cluster is rooted at the vertex
    /// and all forest neighbors are re-parented under it.
    Merge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InsertReport {
    pub case: ClusterCase,
    pub forest_neighbors: usize,
    /// Former parent edges removed while re-parenting, which is what keeps
    /// the merge acyclic.
    pub edges_deleted: usize,
}

/// Forest over the chosen vertices, one rooted tree per cluster.
///
/// Invariants: parent links are graph edges between set members, every
/// member is reachable from exactly one root, `roots` lists cluster roots in
/// creation order, and all members of a tree share a cluster id.
#[derive(Debug, Clone)]
pub struct ClusterForest {
    n: usize,
    members: VertexSet,
    parent: Vec<Option<u32>>,
    children: Vec<Vec<u32>>,
    cluster_ids: Vec<usize>,
    roots: Vec<u32>,
    next_cluster_id: usize,
}

const NO_CLUSTER: usize = usize::MAX;

impl ClusterForest {
    pub fn new(n: usize) -> Self {
        ClusterForest {
            n,
            members: VertexSet::new(n),
            parent: vec![None; n],
            children: vec![Vec::new(); n],
            cluster_ids: vec![NO_CLUSTER; n],
            roots: Vec::new(),
            next_cluster_id: 0,
        }
    }

    /// Inserts `v`, wiring it to its forest neighbors in `g`.
    pub fn insert(&mut self, g: &Graph, v: u32) -> Result<InsertReport, Stage1Error> {
        if v as usize >= self.n {
            return Err(Stage1Error::OutOfRange(v, self.n));
        }
        let nbrs: Vec<u32> = g
            .neighbors(v)
            .iter()
            .copied()
            .filter(|&u| self.members.contains(u))
            .collect();
        self.insert_wired(v, &nbrs)
    }

    /// Like [`insert`](Self::insert) but with the forest neighbors supplied
    /// by the caller; they must match what the graph says.
    pub fn insert_with(
        &mut self,
        g: &Graph,
        v: u32,
        nbrs: &[u32],
    ) -> Result<InsertReport, Stage1Error> {
        if v as usize >= self.n {
            return Err(Stage1Error::OutOfRange(v, self.n));
        }
        let expected: Vec<u32> = g
            .neighbors(v)
            .iter()
            .copied()
            .filter(|&u| self.members.contains(u))
            .collect();
        let mut given = nbrs.to_vec();
        given.sort_unstable();
        given.dedup();
        if given != expected {
            return Err(Stage1Error::BadNeighbors {
                v,
                msg: format!("expected {expected:?}, got {given:?}"),
            });
        }
        self.insert_wired(v, &expected)
    }

    fn insert_wired(&mut self, v: u32, nbrs: &[u32]) -> Result<InsertReport, Stage1Error> {
        if !self.members.insert(v) {
            return Err(Stage1Error::AlreadyPresent(v));
        }
        let vi = v as usize;
        let mut deleted = 0;
        let case = match nbrs {
            [] => {
                self.roots.push(v);
                self.cluster_ids[vi] = self.next_cluster_id;
                self.next_cluster_id += 1;
                ClusterCase::NewRoot
            }
            [x] => {
                self.parent[vi] = Some(*x);
                self.children[*x as usize].push(v);
                self.cluster_ids[vi] = self.cluster_ids[*x as usize];
                ClusterCase::Child
            }
            _ => {
                // Re-parent every forest neighbor under v. Their subtrees
                // move with them; absorbed roots stop being clusters, split
                // clusters keep their remainder under the old root.
                for &x in nbrs {
                    match self.parent[x as usize] {
                        Some(p) => {
                            self.children[p as usize].retain(|&c| c != x);
                            deleted += 1;
                        }
                        None => self.roots.retain(|&r| r != x),
                    }
                    self.parent[x as usize] = Some(v);
                    self.children[vi].push(x);
                }
                self.roots.push(v);
                let id = self.next_cluster_id;
                self.next_cluster_id += 1;
                // Tag the whole new tree, leaving split remainders on their
                // old id.
                let mut stack = vec![v];
                while let Some(u) = stack.pop() {
                    self.cluster_ids[u as usize] = id;
                    stack.extend_from_slice(&self.children[u as usize]);
                }
                ClusterCase::Merge
            }
        };
        Ok(InsertReport {
            case,
            forest_neighbors: nbrs.len(),
            edges_deleted: deleted,
        })
    }

    pub fn contains(&self, v: u32) -> bool {
        self.members.contains(v)
    }

    pub fn members(&self) -> &VertexSet {
        &self.members
    }

    pub fn parent(&self, v: u32) -> Option<u32> {
        self.parent[v as usize]
    }

    pub fn children(&self, v: u32) -> &[u32] {
        &self.children[v as usize]
    }

    /// Cluster roots in creation order.
    pub fn roots(&self) -> &[u32] {
        &self.roots
    }

    pub fn cluster_id(&self, v: u32) -> Option<usize> {
        match self.cluster_ids[v as usize] {
            NO_CLUSTER => None,
            id => Some(id),
        }
    }

    /// All vertices of the cluster rooted at `root`, ascending.
    pub fn cluster_members(&self, root: u32) -> Vec<u32> {
        let mut out = Vec::new();
        let mut stack = vec![root];
        while let Some(u) = stack.pop() {
            out.push(u);
            stack.extend_from_slice(&self.children[u as usize]);
        }
        out.sort_unstable();
        out
    }

    /// Vertices of the cluster rooted at `root` grouped by depth, the root
    /// alone at index 0, each level ascending.
    pub fn levels(&self, root: u32) -> Vec<Vec<u32>> {
        let mut out: Vec<Vec<u32>> = Vec::new();
        let mut frontier = vec![root];
        while !frontier.is_empty() {
            frontier.sort_unstable();
            let mut next = Vec::new();
            for &u in &frontier {
                next.extend_from_slice(&self.children[u as usize]);
            }
            out.push(frontier);
            frontier = next;
        }
        out
    }

    /// Structural self-check used by tests: parent edges are graph edges
    /// between members, trees are acyclic, roots and cluster ids consistent.
    pub fn validate(&self, g: &Graph) -> Result<(), String> {
        let mut seen_roots = VertexSet::new(self.n);
        for &r in &self.roots {
            if !self.members.contains(r) {
                return Err(format!("root {r} is not a member"));
            }
            if self.parent[r as usize].is_some() {
                return Err(format!("root {r} has a parent"));
            }
            if !seen_roots.insert(r) {
                return Err(format!("root {r} listed twice"));
            }
        }
        let mut reached = VertexSet::new(self.n);
        for &r in &self.roots {
            let id = self.cluster_ids[r as usize];
            let mut stack = vec![r];
            while let Some(u) = stack.pop() {
                if !reached.insert(u) {
                    return Err(format!("vertex {u} reached twice; cycle or shared subtree"));
                }
                if self.cluster_ids[u as usize] != id {
                    return Err(format!("vertex {u} has a foreign cluster id"));
                }
                for &c in &self.children[u as usize] {
                    if self.parent[c as usize] != Some(u) {
                        return Err(format!("child link {u}->{c} without parent link"));
                    }
                    if !g.has_edge(u, c) {
                        return Err(format!("tree edge {u}-{c} is not a graph edge"));
                    }
                    if !self.members.contains(c) {
                        return Err(format!("child {c} is not a member"));
                    }
                    stack.push(c);
                }
            }
        }
        if reached != self.members {
            return Err("some members are not reachable from any root".into());
        }
        for v in 0..self.n as u32 {
            if !self.members.contains(v) {
                if self.parent[v as usize].is_some() || !self.children[v as usize].is_empty() {
                    return Err(format!("non-member {v} has links"));
                }
            } else if let Some(p) = self.parent[v as usize] {
                if !self.children[p as usize].contains(&v) {
                    return Err(format!("parent link {v}->{p} without child link"));
                }
            }
        }
        Ok(())
    }
}

/// One greedy iteration as recorded for tracing; ids are external.
#[derive(Debug, Clone, Serialize)]
pub struct TraceRecord {
    pub vertex: u64,
    pub active_degree: usize,
    pub forest_neighbors: usize,
    pub case: ClusterCase,
    pub edges_deleted: usize,
}

/// Per-iteration log of a greedy run; one record per chosen vertex.
#[derive(Debug, Clone, Default)]
pub struct GreedyTrace {
    pub records: Vec<TraceRecord>,
}

impl GreedyTrace {
    /// One JSON object per line.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("trace records serialize"));
            out.push('\n');
        }
        out
    }
}

/// Number of neighbors of `v` not covered by `s`, where covered means in
/// `s` or adjacent to it.
pub fn active_degree(g: &Graph, s: &VertexSet, v: u32) -> usize {
    let covered = covered_set(g, s);
    g.neighbors(v)
        .iter()
        .filter(|&&u| !covered.contains(u))
        .count()
}

/// Greedy construction: repeatedly choose the vertex with maximum active
/// degree (ties to the lowest id) until the set dominates, mirroring each
/// choice into the cluster forest.
///
/// When every remaining uncovered vertex is isolated, all active degrees are
/// zero; the loop then picks uncovered vertices directly (each covers
/// itself), never wasting picks on covered ones.
pub fn greedy_dominating_set(g: &Graph) -> (OrderedDominatingSet, ClusterForest, GreedyTrace) {
    let n = g.n();
    let mut set = OrderedDominatingSet::new(n);
    let mut forest = ClusterForest::new(n);
    let mut trace = GreedyTrace::default();

    let mut covered = VertexSet::new(n);
    let mut active: Vec<usize> = g.vertices().map(|v| g.degree(v)).collect();
    // Lazy max-heap of (active degree, lowest id first). Entries go stale
    // when a degree changes or a vertex is taken; they are skipped on pop.
    let mut heap: BinaryHeap<(usize, Reverse<u32>)> = g
        .vertices()
        .map(|v| (active[v as usize], Reverse(v)))
        .collect();
    let mut cursor: u32 = 0;

    while covered.len() < n {
        let chosen = loop {
            let &(d, Reverse(v)) = heap.peek().expect("candidates remain while uncovered");
            if set.contains(v) || active[v as usize] != d {
                heap.pop();
                continue;
            }
            if d == 0 {
                // Only isolated vertices are still uncovered; take the
                // lowest one.
                while covered.contains(cursor) {
                    cursor += 1;
                }
                break cursor;
            }
            heap.pop();
            break v;
        };

        let chosen_degree = active[chosen as usize];
        set.push(chosen).expect("greedy never re-picks");
        // Newly covered: chosen and its neighborhood. Every neighbor of a
        // newly covered vertex loses one from its active degree.
        let mut newly = Vec::new();
        if covered.insert(chosen) {
            newly.push(chosen);
        }
        for &u in g.neighbors(chosen) {
            if covered.insert(u) {
                newly.push(u);
            }
        }
        for &u in &newly {
            for &w in g.neighbors(u) {
                if !set.contains(w) {
                    active[w as usize] -= 1;
                    heap.push((active[w as usize], Reverse(w)));
                }
            }
        }

        let report = forest.insert(g, chosen).expect("chosen vertex is fresh");
        trace.records.push(TraceRecord {
            vertex: g.label(chosen),
            active_degree: chosen_degree,
            forest_neighbors: report.forest_neighbors,
            case: report.case,
            edges_deleted: report.edges_deleted,
        });
    }

    debug_assert!(crate::graph::is_dominating(g, set.members()));
    (set, forest, trace)
}
