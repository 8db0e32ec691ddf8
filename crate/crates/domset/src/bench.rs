//! Batch experiment harness: run the full pipeline over many instances and
//! emit per-instance reports plus aggregate statistics.
//!
//! The CSV column set is fixed; timing columns are left empty unless
//! timings are explicitly requested, so that identical inputs produce
//! byte-identical artifacts.

use crate::bounds::{bounds_report, exact_gamma, ExactBudget};
use crate::graph::{is_dominating, Graph};
use crate::purify::{run_procedure, tighten, ProcedureId, PurifyError};
use crate::random::{gen_random_graph, EdgeModel, GenError};
use crate::stage1::greedy_dominating_set;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("no instances produced a report")]
    NoInstances,
    #[error("instance {id}: {msg}")]
    Internal { id: String, msg: String },
    #[error("bad generator spec `{spec}`: {msg}")]
    BadGenSpec { spec: String, msg: String },
    #[error("generator failed: {0}")]
    Gen(#[from] GenError),
    #[error(transparent)]
    Purify(#[from] PurifyError),
}

/// What to run per instance.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub procedures: Vec<ProcedureId>,
    pub alpha: f64,
    pub beta: f64,
    /// Exact search is attempted only for n up to this.
    pub exact_max_n: usize,
    pub exact_budget: ExactBudget,
    /// Extra minimalization sweep over each procedure's result.
    pub tighten: bool,
    /// Off by default: wall times vary run to run and would break
    /// byte-for-byte reproducibility of the artifacts.
    pub timings: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            procedures: ProcedureId::ALL.to_vec(),
            alpha: 1.0,
            beta: 1.0,
            exact_max_n: 25,
            exact_budget: ExactBudget::default(),
            tighten: false,
            timings: false,
        }
    }
}

/// One instance's results. Procedure-indexed arrays run PP0..PP4; entries
/// are absent when the procedure did not run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub instance: String,
    pub n: usize,
    pub m: usize,
    pub s_size: usize,
    pub pp_sizes: [Option<usize>; 5],
    /// Reduction of PP1..PP4 relative to PP0's result.
    pub pct_vs_pp0: [Option<f64>; 4],
    /// Reduction of PP0..PP4 relative to the greedy |S|.
    pub pct_vs_s: [Option<f64>; 5],
    pub gamma: Option<usize>,
    pub lower: usize,
    pub upper_u: usize,
    pub connected: bool,
    pub alpha: f64,
    pub beta: f64,
    pub seed: Option<u64>,
    pub t_stage1_ms: Option<f64>,
    pub pp_times_ms: [Option<f64>; 5],
}

impl RunReport {
    /// Smallest dominating set any executed procedure produced; the greedy
    /// set when none ran.
    pub fn best_size(&self) -> usize {
        self.pp_sizes
            .iter()
            .flatten()
            .copied()
            .min()
            .unwrap_or(self.s_size)
    }

    fn best_of_reductions(&self) -> Option<f64> {
        self.pct_vs_pp0.iter().flatten().copied().reduce(f64::max)
    }
}

fn ms(from: Instant) -> f64 {
    from.elapsed().as_secs_f64() * 1e3
}

/// Runs Stage 1 once, then every requested procedure, and packs sizes,
/// percentages, bounds and (for small graphs) the exact optimum.
pub fn run_instance(g: &Graph, id: &str, config: &RunConfig) -> Result<RunReport, BenchError> {
    let t0 = Instant::now();
    let (s, t, _) = greedy_dominating_set(g);
    let t_stage1 = ms(t0);

    let mut pp_sizes = [None; 5];
    let mut pp_times = [None; 5];
    for p in ProcedureId::ALL {
        if !config.procedures.contains(&p) {
            continue;
        }
        let t1 = Instant::now();
        let mut result = run_procedure(g, &s, &t, p, config.alpha, config.beta)?;
        if config.tighten {
            tighten(g, &s, &mut result);
        }
        let elapsed = ms(t1);
        if !is_dominating(g, &result.s_star) {
            return Err(BenchError::Internal {
                id: id.to_string(),
                msg: format!("{p} returned a non-dominating set"),
            });
        }
        pp_sizes[p.index()] = Some(result.s_star.len());
        pp_times[p.index()] = Some(elapsed);
    }

    let pct = |base: usize, size: usize| 100.0 * (base as f64 - size as f64) / base as f64;
    let mut pct_vs_pp0 = [None; 4];
    if let Some(base) = pp_sizes[0] {
        for i in 1..5 {
            pct_vs_pp0[i - 1] = pp_sizes[i].map(|sz| pct(base, sz));
        }
    }
    let mut pct_vs_s = [None; 5];
    for i in 0..5 {
        pct_vs_s[i] = pp_sizes[i].map(|sz| pct(s.len(), sz));
    }

    let bounds = bounds_report(g);
    let gamma = if g.n() <= config.exact_max_n {
        let exact = exact_gamma(g, config.exact_budget);
        (!exact.timed_out).then_some(exact.gamma)
    } else {
        None
    };

    Ok(RunReport {
        instance: id.to_string(),
        n: g.n(),
        m: g.m(),
        s_size: s.len(),
        pp_sizes,
        pct_vs_pp0,
        pct_vs_s,
        gamma,
        lower: bounds.lower,
        upper_u: bounds.upper_u,
        connected: bounds.connected,
        alpha: config.alpha,
        beta: config.beta,
        seed: None,
        t_stage1_ms: config.timings.then_some(t_stage1),
        pp_times_ms: if config.timings { pp_times } else { [None; 5] },
    })
}

pub fn csv_header() -> &'static str {
    "instance,n,m,S,PP0,PP1,PP2,PP3,PP4,pct0_1,pct0_2,pct0_3,pct0_4,gamma,lower,U,t_stage1_ms,t_pp1_ms,t_pp2_ms,t_pp3_ms,t_pp4_ms"
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn opt_usize(v: Option<usize>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn opt_pct(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.2}")).unwrap_or_default()
}

fn opt_time(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.3}")).unwrap_or_default()
}

pub fn csv_row(r: &RunReport) -> String {
    let mut cols = vec![
        csv_field(&r.instance),
        r.n.to_string(),
        r.m.to_string(),
        r.s_size.to_string(),
    ];
    cols.extend(r.pp_sizes.iter().map(|&v| opt_usize(v)));
    cols.extend(r.pct_vs_pp0.iter().map(|&v| opt_pct(v)));
    cols.push(opt_usize(r.gamma));
    cols.push(r.lower.to_string());
    cols.push(r.upper_u.to_string());
    cols.push(opt_time(r.t_stage1_ms));
    cols.extend(r.pp_times_ms[1..].iter().map(|&v| opt_time(v)));
    cols.join(",")
}

pub fn to_csv(reports: &[RunReport]) -> String {
    let mut out = String::from(csv_header());
    out.push('\n');
    for r in reports {
        out.push_str(&csv_row(r));
        out.push('\n');
    }
    out
}

/// One JSON object per report, then the aggregate as the final line.
pub fn to_json_lines(reports: &[RunReport], aggregate: &AggregateStats) -> String {
    let mut out = String::new();
    for r in reports {
        out.push_str(&serde_json::to_string(r).expect("reports serialize"));
        out.push('\n');
    }
    out.push_str(&serde_json::to_string(aggregate).expect("aggregate serializes"));
    out.push('\n');
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateStats {
    pub instance_count: usize,
    /// Mean over instances of the best PP1..PP4 reduction against PP0.
    pub mean_best_improvement_vs_pp0: Option<f64>,
    /// Per-procedure means of the same reductions, PP1..PP4 order.
    pub mean_pct_vs_pp0: [Option<f64>; 4],
    /// Fraction of gamma-known instances where some procedure hit gamma.
    pub optimal_hit_rate: Option<f64>,
    pub gamma_known: usize,
    pub nonoptimal_count: usize,
    /// Mean of best - gamma over the non-optimal gamma-known instances;
    /// zero when that set is empty.
    pub mean_abs_error_nonoptimal: f64,
    /// Mean best/U over connected instances (U >= 1).
    pub mean_ratio_to_upper: Option<f64>,
}

fn mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    }
}

pub fn summarize(reports: &[RunReport]) -> AggregateStats {
    let best_improvements: Vec<f64> =
        reports.iter().filter_map(|r| r.best_of_reductions()).collect();
    let mut mean_pct_vs_pp0 = [None; 4];
    for (i, slot) in mean_pct_vs_pp0.iter_mut().enumerate() {
        let vals: Vec<f64> = reports.iter().filter_map(|r| r.pct_vs_pp0[i]).collect();
        *slot = mean(&vals);
    }

    let mut gamma_known = 0usize;
    let mut hits = 0usize;
    let mut errors = Vec::new();
    for r in reports {
        if let Some(gm) = r.gamma {
            gamma_known += 1;
            let best = r.best_size();
            if best == gm {
                hits += 1;
            } else {
                errors.push((best - gm) as f64);
            }
        }
    }

    let ratios: Vec<f64> = reports
        .iter()
        .filter(|r| r.connected && r.upper_u >= 1)
        .map(|r| r.best_size() as f64 / r.upper_u as f64)
        .collect();

    AggregateStats {
        instance_count: reports.len(),
        mean_best_improvement_vs_pp0: mean(&best_improvements),
        mean_pct_vs_pp0,
        optimal_hit_rate: (gamma_known > 0).then(|| hits as f64 / gamma_known as f64),
        gamma_known,
        nonoptimal_count: errors.len(),
        mean_abs_error_nonoptimal: mean(&errors).unwrap_or(0.0),
        mean_ratio_to_upper: mean(&ratios),
    }
}

/// Parsed `--gen` argument, e.g. `gnm:1000:1200:seed7` or `gnp:100:0.05:seed3`.
#[derive(Debug, Clone, PartialEq)]
pub struct GenSpec {
    pub n: usize,
    pub model: EdgeModel,
    pub seed: u64,
}

impl FromStr for GenSpec {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |msg: &str| BenchError::BadGenSpec {
            spec: s.to_string(),
            msg: msg.to_string(),
        };
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 4 {
            return Err(bad("expected kind:n:param:seed"));
        }
        let n: usize = parts[1].parse().map_err(|_| bad("n is not a number"))?;
        let model = match parts[0] {
            "gnm" => EdgeModel::Gnm(parts[2].parse().map_err(|_| bad("m is not a number"))?),
            "gnp" => EdgeModel::Gnp(parts[2].parse().map_err(|_| bad("p is not a number"))?),
            _ => return Err(bad("kind must be gnm or gnp")),
        };
        let seed: u64 = parts[3]
            .strip_prefix("seed")
            .unwrap_or(parts[3])
            .parse()
            .map_err(|_| bad("seed is not a number"))?;
        Ok(GenSpec { n, model, seed })
    }
}

impl GenSpec {
    fn instance_id(&self, i: usize) -> String {
        match self.model {
            EdgeModel::Gnm(m) => format!("gnm-n{}-m{}-s{}-{:04}", self.n, m, self.seed, i),
            EdgeModel::Gnp(p) => format!("gnp-n{}-p{}-s{}-{:04}", self.n, p, self.seed, i),
        }
    }
}

/// Where batch instances come from. File lists are sorted so globs expand
/// to a stable order; generated instances use seed, seed+1, ...
#[derive(Debug, Clone)]
pub enum InstanceSource {
    Files(Vec<PathBuf>),
    Generated { spec: GenSpec, count: usize },
}

#[derive(Debug)]
pub struct BatchOutcome {
    pub reports: Vec<RunReport>,
    pub aggregate: AggregateStats,
    /// Instances that could not be read or parsed: (name, reason).
    pub skipped: Vec<(String, String)>,
}

enum Job {
    Ready(String, Graph),
    Generate(String, GenSpec, u64),
}

/// Runs the whole batch, in parallel across instances, preserving source
/// order in the output. Unparsable files are skipped and reported; an
/// internal invariant failure aborts the batch; zero survivors is an error.
pub fn run_batch(
    source: &InstanceSource,
    config: &RunConfig,
    workers: Option<usize>,
) -> Result<BatchOutcome, BenchError> {
    let mut jobs = Vec::new();
    let mut skipped = Vec::new();
    match source {
        InstanceSource::Files(paths) => {
            let mut paths = paths.clone();
            paths.sort();
            for path in paths {
                let name = path.display().to_string();
                let text = match std::fs::read_to_string(&path) {
                    Ok(t) => t,
                    Err(e) => {
                        log::warn!("skipping {name}: {e}");
                        skipped.push((name, e.to_string()));
                        continue;
                    }
                };
                match crate::io::parse_graph(&text, crate::io::GraphFormat::Auto) {
                    Ok(g) => jobs.push(Job::Ready(name, g)),
                    Err(e) => {
                        log::warn!("skipping {name}: {e}");
                        skipped.push((name, e.to_string()));
                    }
                }
            }
        }
        InstanceSource::Generated { spec, count } => {
            for i in 0..*count {
                jobs.push(Job::Generate(
                    spec.instance_id(i),
                    spec.clone(),
                    spec.seed + i as u64,
                ));
            }
        }
    }

    let run_job = |job: &Job| -> Result<RunReport, BenchError> {
        match job {
            Job::Ready(id, g) => run_instance(g, id, config),
            Job::Generate(id, spec, seed) => {
                let g = gen_random_graph(spec.n, spec.model, *seed, true)?;
                let mut report = run_instance(&g, id, config)?;
                report.seed = Some(*seed);
                Ok(report)
            }
        }
    };

    use rayon::prelude::*;
    let results: Vec<Result<RunReport, BenchError>> = match workers {
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .expect("worker pool");
            pool.install(|| jobs.par_iter().map(run_job).collect())
        }
        None => jobs.par_iter().map(run_job).collect(),
    };

    let mut reports = Vec::with_capacity(results.len());
    for r in results {
        reports.push(r?);
    }
    if reports.is_empty() {
        return Err(BenchError::NoInstances);
    }
    let aggregate = summarize(&reports);
    Ok(BatchOutcome {
        reports,
        aggregate,
        skipped,
    })
}
