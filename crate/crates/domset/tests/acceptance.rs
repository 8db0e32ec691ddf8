//! Acceptance suite: one test per shipping criterion, each printing a
//! single PASS/FAIL line (visible with `--nocapture`).

use domset::bench::{run_batch, to_csv, to_json_lines, GenSpec, InstanceSource, RunConfig};
use domset::bounds::{bounds_report, exact_gamma, ratio_cap, ExactBudget};
use domset::graph::{is_dominating, Graph};
use domset::purify::{run_procedure, ProcedureId};
use domset::random::{gen_random_graph, EdgeModel};
use domset::stage1::greedy_dominating_set;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

fn verdict(name: &str, pass: bool, detail: &str) {
    println!("[{}] {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "{name}: {detail}");
}

/// Greedy once, then the given procedures; returns |S| and the sizes in
/// order.
fn pipeline_sizes(g: &Graph, procs: &[ProcedureId]) -> (usize, Vec<usize>) {
    let (s, forest, _) = greedy_dominating_set(g);
    let sizes = procs
        .iter()
        .map(|&p| {
            let r = run_procedure(g, &s, &forest, p, 1.0, 1.0).unwrap();
            assert!(is_dominating(g, &r.s_star), "{p} lost domination");
            r.s_star.len()
        })
        .collect();
    (s.len(), sizes)
}

#[test]
fn all_procedures_preserve_domination_across_densities() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xD0_517A);
    let mut failures = 0usize;
    for i in 0..1000u64 {
        let n = rng.gen_range(4..=200);
        let model = match i % 5 {
            0 => EdgeModel::Gnm(n - 1),
            1 => EdgeModel::Gnm(n + n / 20),
            2 => EdgeModel::Gnp(0.1),
            3 => EdgeModel::Gnp(0.3),
            _ => EdgeModel::Gnp(0.5),
        };
        let g = gen_random_graph(n, model, 1000 + i, true).unwrap();
        let (s, forest, _) = greedy_dominating_set(&g);
        for p in ProcedureId::ALL {
            let r = run_procedure(&g, &s, &forest, p, 1.0, 1.0).unwrap();
            if !is_dominating(&g, &r.s_star) {
                failures += 1;
            }
        }
    }
    let secs = started.elapsed().as_secs_f64();
    verdict(
        "domination safety",
        failures == 0 && secs < 60.0,
        &format!("1000 graphs x 5 procedures, {failures} non-dominating results, {secs:.1}s"),
    );
}

/// 5000 seeded connected graphs on at most 8 vertices.
fn small_random_corpus() -> Vec<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED);
    (0..5000u64)
        .map(|i| {
            let n = rng.gen_range(2..=8);
            let p = [0.3, 0.5, 0.7][(i % 3) as usize];
            gen_random_graph(n, EdgeModel::Gnp(p), 40_000 + i, true).unwrap()
        })
        .collect()
}

/// Paths, cycles, stars, cliques and complete bipartite graphs up to n=16.
fn structured_corpus() -> Vec<Graph> {
    let mut v = Vec::new();
    for n in 2..=16 {
        v.push(Graph::path(n));
        v.push(Graph::complete(n));
    }
    for n in 3..=16 {
        v.push(Graph::cycle(n));
        v.push(Graph::star(n));
    }
    for a in 1..=8usize {
        for b in a..=(16 - a) {
            v.push(Graph::complete_bipartite(a, b));
        }
    }
    v
}

#[test]
fn exact_sits_between_bounds_and_heuristics_meet_the_ratio_cap() {
    let mut corpus = small_random_corpus();
    corpus.extend(structured_corpus());
    let total = corpus.len();
    let mut violations = Vec::new();
    for (i, g) in corpus.iter().enumerate() {
        let b = bounds_report(g);
        let exact = exact_gamma(g, ExactBudget::default());
        if exact.timed_out {
            violations.push(format!("#{i}: exact search timed out"));
            continue;
        }
        let gamma = exact.gamma;
        if !(b.lower <= gamma && gamma <= b.upper_u) {
            violations.push(format!(
                "#{i}: gamma {gamma} outside [{}, {}] (n={})",
                b.lower,
                b.upper_u,
                g.n()
            ));
        }
        let (_, sizes) = pipeline_sizes(
            g,
            &[
                ProcedureId::Pp1,
                ProcedureId::Pp2,
                ProcedureId::Pp3,
                ProcedureId::Pp4,
            ],
        );
        let best = *sizes.iter().min().unwrap();
        let cap = ratio_cap(b.big_delta);
        if best as f64 / gamma as f64 > cap {
            violations.push(format!(
                "#{i}: best {best} / gamma {gamma} exceeds cap {cap:.3} (n={})",
                g.n()
            ));
        }
    }
    verdict(
        "oracle envelope",
        violations.is_empty(),
        &format!(
            "{total} connected graphs, {} violations{}",
            violations.len(),
            violations
                .first()
                .map(|v| format!("; first: {v}"))
                .unwrap_or_default()
        ),
    );
}

#[test]
fn reverse_sweep_output_is_one_minimal_and_at_most_half_the_graph() {
    let mut corpus = small_random_corpus();
    corpus.extend(structured_corpus());
    let total = corpus.len();
    let mut violations = Vec::new();
    for (i, g) in corpus.iter().enumerate() {
        let (s, forest, _) = greedy_dominating_set(g);
        let r = run_procedure(g, &s, &forest, ProcedureId::Pp4, 1.0, 1.0).unwrap();
        for v in r.s_star.iter() {
            let mut smaller = r.s_star.clone();
            smaller.remove(v);
            if is_dominating(g, &smaller) {
                violations.push(format!("#{i}: vertex {v} is removable (n={})", g.n()));
            }
        }
        let gamma = exact_gamma(g, ExactBudget::default()).gamma;
        if gamma > 2 && 2 * r.s_star.len() > g.n() {
            violations.push(format!(
                "#{i}: size {} above n/2 with n={} gamma={gamma}",
                r.s_star.len(),
                g.n()
            ));
        }
    }
    verdict(
        "one-minimality",
        violations.is_empty(),
        &format!(
            "{total} graphs, {} violations{}",
            violations.len(),
            violations
                .first()
                .map(|v| format!("; first: {v}"))
                .unwrap_or_default()
        ),
    );
}

#[test]
fn paths_and_cycles_hit_the_closed_form() {
    let mut cases = 0usize;
    let mut hits = 0usize;
    let mut over_by_two = 0usize;
    for n in 3..=15usize {
        for g in [Graph::path(n), Graph::cycle(n)] {
            let gamma = n.div_ceil(3);
            assert_eq!(
                exact_gamma(&g, ExactBudget::default()).gamma,
                gamma,
                "closed form disagrees with exact search at n={n}"
            );
            let (_, sizes) = pipeline_sizes(&g, &ProcedureId::ALL);
            let best = *sizes.iter().min().unwrap();
            cases += 1;
            if best == gamma {
                hits += 1;
            }
            if best > gamma + 1 {
                over_by_two += 1;
            }
        }
    }
    let rate = hits as f64 / cases as f64;
    verdict(
        "closed forms",
        rate >= 0.8 && over_by_two == 0,
        &format!("{hits}/{cases} optimal ({:.0}%), {over_by_two} worse than gamma+1", rate * 100.0),
    );
}

#[test]
fn purification_improves_on_sparse_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7AB1E);
    let mut sum_pp0 = 0usize;
    let mut sum_best = 0usize;
    let mut sum_reduction_pct = 0.0f64;
    let count = 200;
    for i in 0..count as u64 {
        let n = rng.gen_range(50..=400);
        let g = gen_random_graph(n, EdgeModel::Gnm(n + n / 20), 90_000 + i, true).unwrap();
        let (s_size, sizes) = pipeline_sizes(&g, &ProcedureId::ALL);
        let best = *sizes[1..].iter().min().unwrap();
        sum_pp0 += sizes[0];
        sum_best += best;
        sum_reduction_pct += 100.0 * (s_size as f64 - best as f64) / s_size as f64;
    }
    let mean_pp0 = sum_pp0 as f64 / count as f64;
    let mean_best = sum_best as f64 / count as f64;
    let mean_reduction = sum_reduction_pct / count as f64;
    verdict(
        "improvement direction",
        mean_best <= mean_pp0 && mean_reduction > 0.0,
        &format!(
            "{count} sparse graphs, mean best {mean_best:.2} vs mean PP0 {mean_pp0:.2}, \
             mean reduction vs greedy {mean_reduction:.2}%"
        ),
    );
}

#[test]
fn large_sparse_instance_completes_quickly() {
    let g = gen_random_graph(15_000, EdgeModel::Gnm(15_500), 0x5CA1E, true).unwrap();
    let started = Instant::now();
    let (s, forest, _) = greedy_dominating_set(&g);
    for p in [
        ProcedureId::Pp1,
        ProcedureId::Pp2,
        ProcedureId::Pp3,
        ProcedureId::Pp4,
    ] {
        let r = run_procedure(&g, &s, &forest, p, 1.0, 1.0).unwrap();
        assert!(is_dominating(&g, &r.s_star));
    }
    let big_secs = started.elapsed().as_secs_f64();

    // Stage-1 growth per doubling of n, sparse regime, best of five runs.
    let stage1_time = |n: usize, seed: u64| {
        let g = gen_random_graph(n, EdgeModel::Gnm(n + n / 20), seed, true).unwrap();
        (0..5)
            .map(|_| {
                let t = Instant::now();
                std::hint::black_box(greedy_dominating_set(&g));
                t.elapsed().as_secs_f64()
            })
            .fold(f64::INFINITY, f64::min)
    };
    let t2 = stage1_time(2000, 71);
    let t4 = stage1_time(4000, 72);
    let t8 = stage1_time(8000, 73);
    let r1 = t4 / t2.max(1e-9);
    let r2 = t8 / t4.max(1e-9);
    verdict(
        "scale and time",
        big_secs < 10.0 && r1 <= 10.0 && r2 <= 10.0,
        &format!(
            "n=15000 pipeline {big_secs:.2}s; stage-1 doubling ratios {r1:.1}x and {r2:.1}x"
        ),
    );
}

#[test]
fn artifacts_are_byte_identical_across_runs() {
    let spec: GenSpec = "gnm:20:26:seed31".parse().unwrap();
    let source = InstanceSource::Generated { spec, count: 12 };
    let config = RunConfig::default();
    let a = run_batch(&source, &config, Some(4)).unwrap();
    let b = run_batch(&source, &config, Some(1)).unwrap();
    let c = run_batch(&source, &config, None).unwrap();
    let csv: Vec<String> = [&a, &b, &c].iter().map(|o| to_csv(&o.reports)).collect();
    let json: Vec<String> = [&a, &b, &c]
        .iter()
        .map(|o| to_json_lines(&o.reports, &o.aggregate))
        .collect();
    let pass = csv[0] == csv[1] && csv[1] == csv[2] && json[0] == json[1] && json[1] == json[2];
    verdict(
        "determinism",
        pass,
        &format!(
            "12 instances, 3 runs (4 workers, 1 worker, default pool), \
             csv {} bytes, jsonl {} bytes",
            csv[0].len(),
            json[0].len()
        ),
    );
}
