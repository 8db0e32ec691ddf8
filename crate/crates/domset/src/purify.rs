//! Stage 2: purification procedures PP0 through PP4.
//!
//! Each procedure takes the dominating set S built in Stage 1 and removes
//! (purifies) vertices while trying to keep the set dominating. PP1, PP2 and
//! PP3 work on the cluster forest and maintain a partition of S into firm
//! vertices F (kept for sure), pending vertices P and undecided vertices U,
//! next to the ordered list of already purified vertices. PP0 is the
//! leaf-to-root path baseline, PP4 is a forest-free reverse-order sweep.
//!
//! A vertex x outside the surviving set is a semi-private neighbor of the
//! survivor v when v is the only survivor adjacent to x; such an x is the
//! reason v cannot be dropped. Every procedure ends with a repair pass that
//! re-adds recently purified vertices until the result dominates again, so
//! the output is dominating even where the purification rules alone would
//! lose coverage.

use crate::graph::{covered_set, is_dominating, Graph, VertexSet};
use crate::stage1::{ClusterForest, OrderedDominatingSet};
use serde::Serialize;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PurifyError {
    #[error("weight {0} outside [0, 1]")]
    BadWeight(f64),
    #[error("cluster forest does not match the dominating set")]
    ForestMismatch,
    #[error("vertex {0} has been purified")]
    NotSurvivor(u32),
    #[error("unknown procedure `{0}`")]
    UnknownProcedure(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProcedureId {
    Pp0,
    Pp1,
    Pp2,
    Pp3,
    Pp4,
}

impl ProcedureId {
    pub const ALL: [ProcedureId; 5] = [
        ProcedureId::Pp0,
        ProcedureId::Pp1,
        ProcedureId::Pp2,
        ProcedureId::Pp3,
        ProcedureId::Pp4,
    ];

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for ProcedureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PP{}", *self as usize)
    }
}

impl FromStr for ProcedureId {
    type Err = PurifyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "pp0" => Ok(ProcedureId::Pp0),
            "pp1" => Ok(ProcedureId::Pp1),
            "pp2" => Ok(ProcedureId::Pp2),
            "pp3" => Ok(ProcedureId::Pp3),
            "pp4" => Ok(ProcedureId::Pp4),
            other => Err(PurifyError::UnknownProcedure(other.to_string())),
        }
    }
}

/// One step in a purification run; vertex ids are external.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum PurifyEvent {
    Firm { vertex: u64 },
    Purify { vertex: u64 },
    Repair { vertex: u64 },
}

/// Working state of PP0 through PP3.
///
/// Invariants: firm, pending and undecided are pairwise disjoint and
/// together with the purified list partition S; survivors is their union
/// minus nothing (purified vertices are no survivors).
#[derive(Debug, Clone)]
pub struct PurifyState {
    firm: VertexSet,
    pending: VertexSet,
    undecided: VertexSet,
    purified: Vec<u32>,
    survivors: VertexSet,
    alpha: f64,
    beta: f64,
    h: usize,
    events: Vec<PurifyEvent>,
    // surv_nbr_cnt[u] = |N(u) ∩ survivors| for every vertex u; lets the
    // semi-private test run in O(deg).
    surv_nbr_cnt: Vec<u32>,
    // firm_closed_cnt[u] = |N[u] ∩ F|; zero entries are counted so the
    // "does F dominate" question is O(1).
    firm_closed_cnt: Vec<u32>,
    firm_uncovered: usize,
}

impl PurifyState {
    pub fn new(
        g: &Graph,
        s: &OrderedDominatingSet,
        alpha: f64,
        beta: f64,
    ) -> Result<PurifyState, PurifyError> {
        for w in [alpha, beta] {
            if !(0.0..=1.0).contains(&w) {
                return Err(PurifyError::BadWeight(w));
            }
        }
        let n = g.n();
        let mut surv_nbr_cnt = vec![0u32; n];
        for v in s.members().iter() {
            for &u in g.neighbors(v) {
                surv_nbr_cnt[u as usize] += 1;
            }
        }
        Ok(PurifyState {
            firm: VertexSet::new(n),
            pending: VertexSet::new(n),
            undecided: s.members().clone(),
            purified: Vec::new(),
            survivors: s.members().clone(),
            alpha,
            beta,
            h: 0,
            events: Vec::new(),
            surv_nbr_cnt,
            firm_closed_cnt: vec![0u32; n],
            firm_uncovered: n,
        })
    }

    pub fn firm(&self) -> &VertexSet {
        &self.firm
    }

    pub fn pending(&self) -> &VertexSet {
        &self.pending
    }

    pub fn undecided(&self) -> &VertexSet {
        &self.undecided
    }

    pub fn survivors(&self) -> &VertexSet {
        &self.survivors
    }

    pub fn purified(&self) -> &[u32] {
        &self.purified
    }

    pub fn events(&self) -> &[PurifyEvent] {
        &self.events
    }

    pub fn iteration(&self) -> usize {
        self.h
    }

    pub fn is_survivor(&self, v: u32) -> bool {
        self.survivors.contains(v)
    }

    pub fn is_firm(&self, v: u32) -> bool {
        self.firm.contains(v)
    }

    pub fn is_undecided(&self, v: u32) -> bool {
        self.undecided.contains(v)
    }

    /// Moves a surviving vertex into F.
    pub fn set_firm(&mut self, g: &Graph, v: u32) {
        assert!(self.is_survivor(v) && !self.is_firm(v));
        self.undecided.remove(v);
        self.pending.remove(v);
        self.firm.insert(v);
        let vi = v as usize;
        if self.firm_closed_cnt[vi] == 0 {
            self.firm_uncovered -= 1;
        }
        self.firm_closed_cnt[vi] += 1;
        for &u in g.neighbors(v) {
            if self.firm_closed_cnt[u as usize] == 0 {
                self.firm_uncovered -= 1;
            }
            self.firm_closed_cnt[u as usize] += 1;
        }
        self.h += 1;
        self.events.push(PurifyEvent::Firm { vertex: g.label(v) });
    }

    /// Marks an undecided vertex pending; no effect on firm or pending ones.
    pub fn pend(&mut self, v: u32) {
        if self.undecided.remove(v) {
            self.pending.insert(v);
        }
    }

    /// Removes a surviving non-firm vertex from the set.
    pub fn purify(&mut self, g: &Graph, v: u32) {
        assert!(self.is_survivor(v) && !self.is_firm(v));
        self.undecided.remove(v);
        self.pending.remove(v);
        self.survivors.remove(v);
        self.purified.push(v);
        for &u in g.neighbors(v) {
            self.surv_nbr_cnt[u as usize] -= 1;
        }
        self.h += 1;
        self.events.push(PurifyEvent::Purify { vertex: g.label(v) });
    }

    /// True when every vertex of the graph lies in N[F].
    pub fn is_firm_dominating(&self) -> bool {
        self.firm_uncovered == 0
    }

    /// True when some non-survivor has `v` as its only surviving neighbor.
    pub fn has_semi_private(&self, g: &Graph, v: u32) -> bool {
        g.neighbors(v)
            .iter()
            .any(|&u| !self.survivors.contains(u) && self.surv_nbr_cnt[u as usize] == 1)
    }

    fn pb(&self, g: &Graph, v: u32) -> f64 {
        let mut ocs = 0usize;
        let mut ics = 0usize;
        for &u in g.neighbors(v) {
            if self.survivors.contains(u) {
                if !self.firm.contains(u) {
                    ics += 1;
                }
            } else if self.firm_closed_cnt[u as usize] == 0 {
                ocs += 1;
            }
        }
        self.alpha * ocs as f64 + self.beta * ics as f64
    }

    /// Exhaustive consistency check used by tests.
    pub fn validate_partition(&self, g: &Graph, s: &OrderedDominatingSet) -> Result<(), String> {
        let mut union = self.firm.clone();
        if self.firm.iter().any(|v| self.pending.contains(v) || self.undecided.contains(v))
            || self.pending.iter().any(|v| self.undecided.contains(v))
        {
            return Err("firm/pending/undecided overlap".into());
        }
        union.union_with(&self.pending);
        union.union_with(&self.undecided);
        if union != self.survivors {
            return Err("survivors is not the union of firm, pending, undecided".into());
        }
        for &v in &self.purified {
            if self.survivors.contains(v) {
                return Err(format!("purified vertex {v} still survives"));
            }
            union.insert(v);
        }
        if &union != s.members() {
            return Err("partition does not cover S exactly".into());
        }
        for u in g.vertices() {
            let expect = g
                .neighbors(u)
                .iter()
                .filter(|&&w| self.survivors.contains(w))
                .count();
            if self.surv_nbr_cnt[u as usize] as usize != expect {
                return Err(format!("stale survivor count at {u}"));
            }
        }
        let uncovered = g
            .vertices()
            .filter(|&u| self.firm_closed_cnt[u as usize] == 0)
            .count();
        if uncovered != self.firm_uncovered {
            return Err("stale firm coverage counter".into());
        }
        Ok(())
    }
}

/// Neighbors of `v` outside the surviving set that are not adjacent to any
/// firm vertex; the coverage `v` alone is responsible for.
pub fn compute_ocs(g: &Graph, state: &PurifyState, v: u32) -> Result<VertexSet, PurifyError> {
    if !state.is_survivor(v) {
        return Err(PurifyError::NotSurvivor(v));
    }
    let mut out = VertexSet::new(g.n());
    for &u in g.neighbors(v) {
        if !state.survivors.contains(u) && state.firm_closed_cnt[u as usize] == 0 {
            out.insert(u);
        }
    }
    Ok(out)
}

/// Surviving, non-firm neighbors of `v`.
pub fn compute_ics(g: &Graph, state: &PurifyState, v: u32) -> Result<VertexSet, PurifyError> {
    if !state.is_survivor(v) {
        return Err(PurifyError::NotSurvivor(v));
    }
    let mut out = VertexSet::new(g.n());
    for &u in g.neighbors(v) {
        if state.survivors.contains(u) && !state.firm.contains(u) {
            out.insert(u);
        }
    }
    Ok(out)
}

/// Weighted score alpha*|OCS| + beta*|ICS| steering PP2 and PP3.
pub fn purification_balance(g: &Graph, state: &PurifyState, v: u32) -> Result<f64, PurifyError> {
    if !state.is_survivor(v) {
        return Err(PurifyError::NotSurvivor(v));
    }
    Ok(state.pb(g, v))
}

/// Outcome of one purification run.
#[derive(Debug, Clone)]
pub struct PurifyResult {
    pub procedure: ProcedureId,
    pub s_star: VertexSet,
    /// Vertices of S \ S*, in the order they were dropped.
    pub purified: Vec<u32>,
    pub repair_additions: usize,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub events: Vec<PurifyEvent>,
}

impl PurifyResult {
    /// Single-line JSON record of the run.
    pub fn json_log(&self, g: &Graph) -> String {
        let mut s_star: Vec<u64> = self.s_star.iter().map(|v| g.label(v)).collect();
        s_star.sort_unstable();
        serde_json::json!({
            "procedure": self.procedure.to_string(),
            "alpha": self.alpha,
            "beta": self.beta,
            "events": self.events,
            "repair_additions": self.repair_additions,
            "s_star": s_star,
        })
        .to_string()
    }
}

fn check_consistent(
    s: &OrderedDominatingSet,
    t: &ClusterForest,
) -> Result<(), PurifyError> {
    if t.members() != s.members() {
        return Err(PurifyError::ForestMismatch);
    }
    Ok(())
}

/// Marks every survivor owning a semi-private neighbor firm; this is the
/// F^0 step shared by PP1, PP2 and PP3.
fn firm_initial(g: &Graph, st: &mut PurifyState) {
    let start: Vec<u32> = st.survivors.to_vec();
    for v in start {
        if st.has_semi_private(g, v) {
            st.set_firm(g, v);
        }
    }
}

/// Purifies every surviving non-firm vertex, in S insertion order.
fn drop_non_firm(g: &Graph, s: &OrderedDominatingSet, st: &mut PurifyState) {
    for &v in s.order() {
        if st.is_survivor(v) && !st.is_firm(v) {
            st.purify(g, v);
        }
    }
}

/// Runs the repair pass and packs the final result. The caller guarantees
/// that survivors plus purified dominate (true whenever the input S did);
/// the assertion documents that guarantee.
fn finish(
    g: &Graph,
    procedure: ProcedureId,
    st: PurifyState,
    alpha: Option<f64>,
    beta: Option<f64>,
) -> PurifyResult {
    let (s_star, readded) = repair_domination(g, &st.survivors, &st.purified);
    let mut events = st.events;
    let mut readded_set = VertexSet::new(g.n());
    for &v in &readded {
        readded_set.insert(v);
        events.push(PurifyEvent::Repair { vertex: g.label(v) });
    }
    let purified: Vec<u32> = st
        .purified
        .into_iter()
        .filter(|&v| !readded_set.contains(v))
        .collect();
    assert!(
        is_dominating(g, &s_star),
        "purification lost coverage that repair could not restore; the input set cannot have been dominating"
    );
    PurifyResult {
        procedure,
        s_star,
        purified,
        repair_additions: readded.len(),
        alpha,
        beta,
        events,
    }
}

/// Re-adds purified vertices, most recently removed first, until `base`
/// dominates again. Returns the repaired set and the re-added vertices in
/// re-addition order. A vertex is only taken when it covers something still
/// uncovered, so the pass is a no-op on an already dominating base.
pub fn repair_domination(g: &Graph, base: &VertexSet, purified: &[u32]) -> (VertexSet, Vec<u32>) {
    let mut set = base.clone();
    let mut covered = covered_set(g, base);
    let mut added = Vec::new();
    for &v in purified.iter().rev() {
        if covered.len() == g.n() {
            break;
        }
        if !covered.contains(v) || g.neighbors(v).iter().any(|&u| !covered.contains(u)) {
            set.insert(v);
            added.push(v);
            covered.insert(v);
            for &u in g.neighbors(v) {
                covered.insert(u);
            }
        }
    }
    (set, added)
}

/// Baseline: walk each cluster bottom-up along leaf-to-root paths and strip
/// the two middle vertices of every quadruple (the middle one of a trio)
/// unless they own a semi-private neighbor.
pub fn purify_pp0(
    g: &Graph,
    s: &OrderedDominatingSet,
    t: &ClusterForest,
) -> Result<PurifyResult, PurifyError> {
    check_consistent(s, t)?;
    let mut st = PurifyState::new(g, s, 1.0, 1.0)?;
    let mut visited = VertexSet::new(g.n());
    for &root in t.roots() {
        let leaves: Vec<u32> = t
            .cluster_members(root)
            .into_iter()
            .filter(|&v| t.children(v).is_empty())
            .collect();
        for &leaf in &leaves {
            // Climb until the root or a vertex some earlier path claimed.
            let mut path = Vec::new();
            let mut cur = Some(leaf);
            while let Some(v) = cur {
                if !visited.insert(v) {
                    break;
                }
                path.push(v);
                cur = t.parent(v);
            }
            let test = |st: &mut PurifyState, v: u32| {
                if st.is_survivor(v) && !st.has_semi_private(g, v) {
                    st.purify(g, v);
                }
            };
            let mut pos = 0;
            while pos + 4 <= path.len() {
                test(&mut st, path[pos + 1]);
                test(&mut st, path[pos + 2]);
                pos += 3;
            }
            if path.len() - pos == 3 {
                test(&mut st, path[pos + 1]);
            }
        }
    }
    Ok(finish(g, ProcedureId::Pp0, st, None, None))
}

fn pp1_clusters(g: &Graph, t: &ClusterForest, st: &mut PurifyState) {
    for &root in t.roots() {
        let levels = t.levels(root);
        for level in levels.iter().rev() {
            for &x in level {
                if t.children(x).is_empty() {
                    continue;
                }
                // x is always still surviving here: purification can only
                // hit x once its parent is processed, which happens later.
                let mut kids: Vec<u32> = t.children(x).to_vec();
                kids.sort_unstable();
                if st.is_firm(x) {
                    for &c in &kids {
                        if st.is_survivor(c) && !st.is_firm(c) && !st.has_semi_private(g, c) {
                            st.purify(g, c);
                        }
                    }
                } else if !kids.iter().any(|&c| st.is_firm(c)) {
                    st.set_firm(g, x);
                    for &c in &kids {
                        if !st.is_survivor(c) {
                            continue;
                        }
                        if st.has_semi_private(g, c) {
                            st.set_firm(g, c);
                        } else {
                            st.purify(g, c);
                        }
                    }
                } else {
                    if let Some(p) = t.parent(x) {
                        if !st.is_firm(p) {
                            st.set_firm(g, p);
                        }
                    }
                    if st.has_semi_private(g, x) {
                        st.set_firm(g, x);
                    } else {
                        st.purify(g, x);
                    }
                }
            }
        }
    }
}

/// Structural procedure: after firming vertices with private neighbors,
/// traverse each cluster bottom-up and decide firm/purify per non-leaf and
/// its children. Survivors that no rule touched stay in the set.
pub fn purify_pp1(
    g: &Graph,
    s: &OrderedDominatingSet,
    t: &ClusterForest,
) -> Result<PurifyResult, PurifyError> {
    check_consistent(s, t)?;
    let mut st = PurifyState::new(g, s, 1.0, 1.0)?;
    firm_initial(g, &mut st);
    if st.is_firm_dominating() {
        drop_non_firm(g, s, &mut st);
    } else {
        pp1_clusters(g, t, &mut st);
    }
    Ok(finish(g, ProcedureId::Pp1, st, None, None))
}

fn pp2_clusters(g: &Graph, t: &ClusterForest, st: &mut PurifyState) {
    for &root in t.roots() {
        let cluster = t.cluster_members(root);
        while cluster.iter().any(|&v| st.is_undecided(v)) {
            // Highest balance among the cluster's non-firm vertices wins;
            // the ascending scan with a strict compare settles ties on the
            // lowest id. Pending vertices stay eligible for promotion.
            let mut best: Option<(f64, u32)> = None;
            for &v in &cluster {
                if st.is_firm(v) {
                    continue;
                }
                let pb = st.pb(g, v);
                if best.is_none_or(|(b, _)| pb > b) {
                    best = Some((pb, v));
                }
            }
            let (_, v) = best.expect("an undecided vertex exists, so a non-firm one does");
            st.set_firm(g, v);
            for &u in g.neighbors(v) {
                st.pend(u);
            }
        }
        if st.is_firm_dominating() {
            break;
        }
    }
}

/// Balance-maximizing procedure: grow F cluster by cluster, each step
/// firming the best-scoring non-firm vertex and pending its neighbors;
/// everything that never became firm is dropped.
pub fn purify_pp2(
    g: &Graph,
    s: &OrderedDominatingSet,
    t: &ClusterForest,
    alpha: f64,
    beta: f64,
) -> Result<PurifyResult, PurifyError> {
    check_consistent(s, t)?;
    let mut st = PurifyState::new(g, s, alpha, beta)?;
    firm_initial(g, &mut st);
    if !st.is_firm_dominating() {
        pp2_clusters(g, t, &mut st);
    }
    drop_non_firm(g, s, &mut st);
    Ok(finish(g, ProcedureId::Pp2, st, Some(alpha), Some(beta)))
}

fn pp3_clusters(g: &Graph, t: &ClusterForest, st: &mut PurifyState) {
    for &root in t.roots() {
        let cluster = t.cluster_members(root);
        loop {
            let mut best: Option<(f64, u32)> = None;
            for &v in &cluster {
                if !st.is_undecided(v) {
                    continue;
                }
                let pb = st.pb(g, v);
                if best.is_none_or(|(b, _)| pb < b) {
                    best = Some((pb, v));
                }
            }
            let Some((_, v)) = best else { break };
            st.purify(g, v);
            // Losing v can leave some outsider with a single surviving
            // neighbor; such owners are locked in now.
            let pool: Vec<u32> = st.undecided.to_vec();
            for u in pool {
                if st.has_semi_private(g, u) {
                    st.set_firm(g, u);
                }
            }
        }
        if st.is_firm_dominating() {
            break;
        }
    }
}

/// Balance-minimizing procedure: repeatedly purify the worst-scoring
/// undecided vertex and firm whoever now guards a semi-private neighbor.
pub fn purify_pp3(
    g: &Graph,
    s: &OrderedDominatingSet,
    t: &ClusterForest,
    alpha: f64,
    beta: f64,
) -> Result<PurifyResult, PurifyError> {
    check_consistent(s, t)?;
    let mut st = PurifyState::new(g, s, alpha, beta)?;
    firm_initial(g, &mut st);
    if !st.is_firm_dominating() {
        pp3_clusters(g, t, &mut st);
    }
    drop_non_firm(g, s, &mut st);
    Ok(finish(g, ProcedureId::Pp3, st, Some(alpha), Some(beta)))
}

/// Removes every member of `set` (visited in reverse `order`) whose closed
/// neighborhood stays covered without it. Returns the survivors and the
/// removed vertices in removal order. The result is 1-minimal relative to
/// the scan: no kept vertex can become removable afterwards, because
/// removals only ever shrink coverage.
pub fn minimalize(g: &Graph, order: &[u32], set: &VertexSet) -> (VertexSet, Vec<u32>) {
    let mut keep = set.clone();
    let mut cnt = vec![0u32; g.n()];
    for v in keep.iter() {
        cnt[v as usize] += 1;
        for &u in g.neighbors(v) {
            cnt[u as usize] += 1;
        }
    }
    let mut removed = Vec::new();
    for &v in order.iter().rev() {
        if !keep.contains(v) {
            continue;
        }
        let redundant = cnt[v as usize] >= 2
            && g.neighbors(v)
                .iter()
                .all(|&u| keep.contains(u) || cnt[u as usize] >= 2);
        if redundant {
            keep.remove(v);
            cnt[v as usize] -= 1;
            for &u in g.neighbors(v) {
                cnt[u as usize] -= 1;
            }
            removed.push(v);
        }
    }
    (keep, removed)
}

/// Order-aware sweep: drop each vertex, newest first, whose closed
/// neighborhood is already covered by the rest. Needs no forest and yields
/// a minimal dominating set.
pub fn purify_pp4(g: &Graph, s: &OrderedDominatingSet) -> PurifyResult {
    let (s_star, removed) = minimalize(g, s.order(), s.members());
    let events = removed
        .iter()
        .map(|&v| PurifyEvent::Purify { vertex: g.label(v) })
        .collect();
    debug_assert!(is_dominating(g, &s_star));
    PurifyResult {
        procedure: ProcedureId::Pp4,
        s_star,
        purified: removed,
        repair_additions: 0,
        alpha: None,
        beta: None,
        events,
    }
}

/// Dispatch by procedure id; alpha and beta only reach PP2 and PP3.
pub fn run_procedure(
    g: &Graph,
    s: &OrderedDominatingSet,
    t: &ClusterForest,
    procedure: ProcedureId,
    alpha: f64,
    beta: f64,
) -> Result<PurifyResult, PurifyError> {
    match procedure {
        ProcedureId::Pp0 => purify_pp0(g, s, t),
        ProcedureId::Pp1 => purify_pp1(g, s, t),
        ProcedureId::Pp2 => purify_pp2(g, s, t, alpha, beta),
        ProcedureId::Pp3 => purify_pp3(g, s, t, alpha, beta),
        ProcedureId::Pp4 => Ok(purify_pp4(g, s)),
    }
}

/// Optional extra sweep over a finished result, in S insertion order.
pub fn tighten(g: &Graph, s: &OrderedDominatingSet, result: &mut PurifyResult) {
    let (s_star, removed) = minimalize(g, s.order(), &result.s_star);
    for &v in &removed {
        result.events.push(PurifyEvent::Purify { vertex: g.label(v) });
        result.purified.push(v);
    }
    result.s_star = s_star;
}
