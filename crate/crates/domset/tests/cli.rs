//! Black-box tests of the `domset` binary: stdout contracts, exit codes,
//! artifact files.

use std::path::Path;
use std::process::{Command, Output};

fn domset(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_domset"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn domset_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_domset"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

const P5: &str = "1 2\n2 3\n3 4\n4 5\n";
const C6: &str = "1 2\n2 3\n3 4\n4 5\n5 6\n1 6\n";

#[test]
fn solve_prints_the_reduced_set() {
    let dir = tempfile::tempdir().unwrap();
    let p5 = write(dir.path(), "p5.txt", P5);
    let out = domset(&["solve", "--format", "edgelist", &p5, "--proc", "pp4"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "S=3 S*=2: 2 4\n");
}

#[test]
fn solve_on_a_clique_keeps_one_vertex() {
    let dir = tempfile::tempdir().unwrap();
    let mut edges = String::new();
    for u in 1..=5 {
        for v in u + 1..=5 {
            edges.push_str(&format!("{u} {v}\n"));
        }
    }
    let k5 = write(dir.path(), "k5.txt", &edges);
    let out = domset(&["solve", "--proc", "pp2", "--alpha", "1", "--beta", "1", &k5]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "S=1 S*=1: 1\n");
}

#[test]
fn solve_with_all_procedures_prefixes_each_line() {
    let dir = tempfile::tempdir().unwrap();
    let p5 = write(dir.path(), "p5.txt", P5);
    let out = domset(&["solve", &p5]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5);
    for (i, line) in lines.iter().enumerate() {
        assert_eq!(*line, format!("PP{i} S=3 S*=2: 2 4"));
    }
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let p5 = write(dir.path(), "p5.txt", P5);
    assert_eq!(code(&domset(&["solve", &p5, "--alpha", "2"])), 1);
    assert_eq!(code(&domset(&["solve", &p5, "--proc", "pp9"])), 1);
    assert_eq!(code(&domset(&["solve", &p5, "--bogus"])), 1);
    assert_eq!(code(&domset(&["solve"])), 1);
    assert_eq!(code(&domset(&["bench", "--gen", "tree:4:5:seed1"])), 1);
}

#[test]
fn input_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&domset(&["solve", "/nonexistent/graph.txt"])), 2);
    let bad = write(dir.path(), "bad.txt", "1 2\nnot an edge\n");
    assert_eq!(code(&domset(&["solve", &bad])), 2);
    let empty = dir.path().join("empty-*.txt").display().to_string();
    assert_eq!(code(&domset(&["bench", "--glob", &empty])), 2);
}

#[test]
fn help_and_version_exit_zero() {
    let help = domset(&["--help"]);
    assert_eq!(code(&help), 0);
    assert!(stdout(&help).contains("solve"));
    let version = domset(&["--version"]);
    assert_eq!(code(&version), 0);
    assert!(stdout(&version).contains("(tiebreak=lowest-id, repair=on)"));
}

#[test]
fn bounds_prints_the_profile_line() {
    let dir = tempfile::tempdir().unwrap();
    let c6 = write(dir.path(), "c6.txt", C6);
    let out = domset(&["bounds", &c6]);
    assert_eq!(code(&out), 0);
    assert_eq!(
        stdout(&out),
        "n=6 m=6 delta=2 Delta=2 lower=2 U=3 ratio_cap=1.5\n"
    );

    let k4 = write(dir.path(), "k4.txt", "1 2\n1 3\n1 4\n2 3\n2 4\n3 4\n");
    assert_eq!(
        stdout(&domset(&["bounds", &k4])),
        "n=4 m=6 delta=3 Delta=3 lower=1 U=1 ratio_cap=2.0\n"
    );

    let star = write(
        dir.path(),
        "star.txt",
        "1 2\n1 3\n1 4\n1 5\n1 6\n1 7\n1 8\n",
    );
    let line = stdout(&domset(&["bounds", &star]));
    assert!(line.contains("lower=1 U=1"), "{line}");
}

#[test]
fn bounds_json_parses_back_into_the_report_type() {
    let dir = tempfile::tempdir().unwrap();
    let c6 = write(dir.path(), "c6.txt", C6);
    let json = dir.path().join("bounds.json");
    let out = domset(&["bounds", &c6, "--json", &json.display().to_string()]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(&json).unwrap();
    let report: domset::bounds::BoundsReport = serde_json::from_str(&text).unwrap();
    assert_eq!((report.n, report.lower, report.upper_u), (6, 2, 3));
    assert!(report.connected);
}

#[test]
fn solve_writes_trace_and_json_logs() {
    let dir = tempfile::tempdir().unwrap();
    let p5 = write(dir.path(), "p5.txt", P5);
    let trace = dir.path().join("trace.jsonl");
    let logs = dir.path().join("logs.jsonl");
    let out = domset(&[
        "solve",
        &p5,
        "--proc",
        "pp4",
        "--trace-out",
        &trace.display().to_string(),
        "--json",
        &logs.display().to_string(),
    ]);
    assert_eq!(code(&out), 0);

    let trace = std::fs::read_to_string(&trace).unwrap();
    let records: Vec<serde_json::Value> = trace
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(records.len(), 3);
    assert_eq!(records[0]["vertex"], 2);
    assert_eq!(records[0]["case"], "new_root");

    let logs = std::fs::read_to_string(&logs).unwrap();
    let log: serde_json::Value = serde_json::from_str(logs.trim()).unwrap();
    assert_eq!(log["procedure"], "PP4");
    assert_eq!(log["s_star"], serde_json::json!([2, 4]));
}

#[test]
fn bench_artifacts_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["one", "two"] {
        let out = domset_in(
            dir.path(),
            &[
                "bench",
                "--gen",
                "gnm:30:45:seed4",
                "--count",
                "4",
                "--out",
                &format!("{name}.csv"),
                "--json",
                &format!("{name}.jsonl"),
            ],
        );
        assert_eq!(code(&out), 0);
        assert!(stdout(&out).starts_with("instances=4 "));
    }
    let csv_a = std::fs::read(dir.path().join("one.csv")).unwrap();
    let csv_b = std::fs::read(dir.path().join("two.csv")).unwrap();
    assert_eq!(csv_a, csv_b);
    let json_a = std::fs::read(dir.path().join("one.jsonl")).unwrap();
    let json_b = std::fs::read(dir.path().join("two.jsonl")).unwrap();
    assert_eq!(json_a, json_b);
}

#[test]
fn bench_jsonl_round_trips_into_record_types() {
    let dir = tempfile::tempdir().unwrap();
    let out = domset_in(
        dir.path(),
        &[
            "bench", "--gen", "gnm:12:16:seed9", "--count", "3", "--out", "r.csv", "--json",
            "r.jsonl",
        ],
    );
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(dir.path().join("r.jsonl")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    for line in &lines[..3] {
        let report: domset::bench::RunReport = serde_json::from_str(line).unwrap();
        assert_eq!(report.n, 12);
        assert!(report.gamma.is_some(), "exact should run at n=12");
    }
    let stats: domset::bench::AggregateStats = serde_json::from_str(lines[3]).unwrap();
    assert_eq!(stats.instance_count, 3);

    let csv = std::fs::read_to_string(dir.path().join("r.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some(domset::bench::csv_header()));
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn bench_without_out_streams_csv_to_stdout() {
    let out = domset(&["bench", "--gen", "gnm:10:12:seed1", "--count", "2"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.starts_with(domset::bench::csv_header()));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn bench_over_files_matches_bench_over_glob() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "g1.txt", P5);
    write(dir.path(), "g2.txt", C6);
    let pattern = dir.path().join("g*.txt").display().to_string();
    let by_glob = domset(&["bench", "--glob", &pattern]);
    assert_eq!(code(&by_glob), 0);
    let g1 = dir.path().join("g1.txt").display().to_string();
    let g2 = dir.path().join("g2.txt").display().to_string();
    let by_files = domset(&["bench", &g2, &g1]);
    assert_eq!(code(&by_files), 0);
    // File lists are sorted, so both orders yield the same artifact.
    assert_eq!(stdout(&by_glob), stdout(&by_files));
}

#[test]
fn worker_count_env_is_validated() {
    let dir = tempfile::tempdir().unwrap();
    let run = |workers: &str| {
        Command::new(env!("CARGO_BIN_EXE_domset"))
            .current_dir(dir.path())
            .env("DOMSET_WORKERS", workers)
            .args(["bench", "--gen", "gnm:10:12:seed1", "--count", "2"])
            .output()
            .expect("binary runs")
    };
    let ok = run("2");
    assert_eq!(code(&ok), 0);
    let serial = run("1");
    assert_eq!(stdout(&ok), stdout(&serial));
    assert_eq!(code(&run("many")), 1);
}

#[test]
fn conflicting_instance_sources_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let p5 = write(dir.path(), "p5.txt", P5);
    let out = domset(&["bench", &p5, "--gen", "gnm:10:12:seed1"]);
    assert_eq!(code(&out), 1);
    let none = domset(&["bench"]);
    assert_eq!(code(&none), 1);
}
