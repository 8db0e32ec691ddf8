//! Reading and writing graphs in edge-list and DIMACS format.
//!
//! Edge-list: one `u v` pair per line, whitespace separated, 1-based ids,
//! `#` starts a comment line. An optional `n m` header is recognized when
//! the first non-comment line holds two integers, exactly `m` edge lines
//! follow and every edge id fits in `1..=n`; otherwise all lines are edges
//! and n is the largest id seen.
//!
//! DIMACS: `c` comment lines, one `p edge <n> <m>` problem line, then
//! `e <u> <v>` lines with 1-based ids.

use crate::graph::Graph;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("empty graph")]
    Empty,
    #[error("self-loop at line {0}")]
    SelfLoop(usize),
    #[error("duplicate edge at line {0}")]
    DuplicateEdge(usize),
    #[error("malformed line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("vertex id {id} out of range 1..={n} at line {line}")]
    OutOfRange { id: u64, n: usize, line: usize },
    #[error("missing DIMACS problem line")]
    MissingProblem,
    #[error("edge count mismatch: problem line declares {declared}, found {found}")]
    EdgeCountMismatch { declared: usize, found: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    Auto,
    EdgeList,
    Dimacs,
}

/// Guesses the format from the first meaningful line: DIMACS lines start
/// with a `c`, `p` or `e` marker, edge lists with a number or `#`.
pub fn detect_format(text: &str) -> GraphFormat {
    for line in text.lines() {
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        return match t.split_ascii_whitespace().next() {
            Some("c") | Some("p") | Some("e") => GraphFormat::Dimacs,
            _ => GraphFormat::EdgeList,
        };
    }
    GraphFormat::EdgeList
}

pub fn parse_graph(text: &str, format: GraphFormat) -> Result<Graph, ParseError> {
    match format {
        GraphFormat::Auto => match detect_format(text) {
            GraphFormat::Dimacs => parse_dimacs(text),
            _ => parse_edge_list(text),
        },
        GraphFormat::EdgeList => parse_edge_list(text),
        GraphFormat::Dimacs => parse_dimacs(text),
    }
}

fn parse_pair(line: &str, lineno: usize) -> Result<(u64, u64), ParseError> {
    let mut it = line.split_ascii_whitespace();
    let a = it.next();
    let b = it.next();
    let extra = it.next();
    match (a, b, extra) {
        (Some(a), Some(b), None) => {
            let a: u64 = a.parse().map_err(|_| ParseError::Malformed {
                line: lineno,
                msg: format!("expected integer, got {a:?}"),
            })?;
            let b: u64 = b.parse().map_err(|_| ParseError::Malformed {
                line: lineno,
                msg: format!("expected integer, got {b:?}"),
            })?;
            Ok((a, b))
        }
        _ => Err(ParseError::Malformed {
            line: lineno,
            msg: "expected exactly two fields".into(),
        }),
    }
}

/// Collects edges with 1-based ids checked against `n`, reporting errors by
/// line number. Shared by both formats.
struct EdgeCollector {
    n: usize,
    edges: Vec<(u32, u32)>,
    seen: std::collections::HashSet<(u32, u32)>,
}

impl EdgeCollector {
    fn new(n: usize) -> Self {
        EdgeCollector {
            n,
            edges: Vec::new(),
            seen: std::collections::HashSet::new(),
        }
    }

    fn push(&mut self, u: u64, v: u64, line: usize) -> Result<(), ParseError> {
        for id in [u, v] {
            if id == 0 || id > self.n as u64 {
                return Err(ParseError::OutOfRange {
                    id,
                    n: self.n,
                    line,
                });
            }
        }
        if u == v {
            return Err(ParseError::SelfLoop(line));
        }
        let (u, v) = (u as u32 - 1, v as u32 - 1);
        if !self.seen.insert((u.min(v), u.max(v))) {
            return Err(ParseError::DuplicateEdge(line));
        }
        self.edges.push((u, v));
        Ok(())
    }

    fn finish(self) -> Result<Graph, ParseError> {
        if self.n == 0 {
            return Err(ParseError::Empty);
        }
        Graph::from_edges(self.n, &self.edges).map_err(|e| ParseError::Malformed {
            line: 0,
            msg: e.to_string(),
        })
    }
}

fn parse_edge_list(text: &str) -> Result<Graph, ParseError> {
    // (line number, a, b) for every non-comment line.
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let (a, b) = parse_pair(t, i + 1)?;
        rows.push((i + 1, a, b));
    }
    if rows.is_empty() {
        return Err(ParseError::Empty);
    }
    // Header detection: "n m" followed by exactly m edge lines whose ids
    // all fit in 1..=n.
    let (_, first_a, first_b) = rows[0];
    let header = rows.len() - 1 == first_b as usize
        && first_a <= u32::MAX as u64
        && rows[1..]
            .iter()
            .all(|&(_, u, v)| (1..=first_a).contains(&u) && (1..=first_a).contains(&v));
    if header {
        let n = first_a as usize;
        let mut col = EdgeCollector::new(n);
        for &(line, u, v) in &rows[1..] {
            col.push(u, v, line)?;
        }
        col.finish()
    } else {
        let n = rows.iter().map(|&(_, a, b)| a.max(b)).max().unwrap_or(0);
        if n > u32::MAX as u64 {
            let &(line, a, b) = rows.iter().find(|&&(_, a, b)| a.max(b) == n).unwrap();
            return Err(ParseError::OutOfRange {
                id: a.max(b),
                n: u32::MAX as usize,
                line,
            });
        }
        let mut col = EdgeCollector::new(n as usize);
        for &(line, u, v) in &rows {
            col.push(u, v, line)?;
        }
        col.finish()
    }
}

fn parse_dimacs(text: &str) -> Result<Graph, ParseError> {
    let mut col: Option<EdgeCollector> = None;
    let mut declared_m = 0usize;
    let mut found_m = 0usize;
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        let mut it = t.split_ascii_whitespace();
        match it.next().unwrap() {
            "c" => continue,
            "p" => {
                if col.is_some() {
                    return Err(ParseError::Malformed {
                        line: lineno,
                        msg: "second problem line".into(),
                    });
                }
                let kind = it.next().unwrap_or("");
                if kind != "edge" {
                    return Err(ParseError::Malformed {
                        line: lineno,
                        msg: format!("expected 'p edge', got 'p {kind}'"),
                    });
                }
                let rest = it.collect::<Vec<_>>().join(" ");
                let (n, m) = parse_pair(&rest, lineno)?;
                declared_m = m as usize;
                col = Some(EdgeCollector::new(n as usize));
            }
            "e" => {
                let col = col.as_mut().ok_or(ParseError::MissingProblem)?;
                let rest = it.collect::<Vec<_>>().join(" ");
                let (u, v) = parse_pair(&rest, lineno)?;
                col.push(u, v, lineno)?;
                found_m += 1;
            }
            other => {
                return Err(ParseError::Malformed {
                    line: lineno,
                    msg: format!("unknown line type {other:?}"),
                })
            }
        }
    }
    let col = col.ok_or(ParseError::MissingProblem)?;
    if found_m != declared_m {
        return Err(ParseError::EdgeCountMismatch {
            declared: declared_m,
            found: found_m,
        });
    }
    col.finish()
}

/// Edge list with header, 1-based ids, edges sorted with u < v.
pub fn write_edge_list(g: &Graph) -> String {
    let mut out = format!("{} {}\n", g.n(), g.m());
    for (u, v) in g.edges() {
        out.push_str(&format!("{} {}\n", u + 1, v + 1));
    }
    out
}

pub fn write_dimacs(g: &Graph) -> String {
    let mut out = format!("p edge {} {}\n", g.n(), g.m());
    for (u, v) in g.edges() {
        out.push_str(&format!("e {} {}\n", u + 1, v + 1));
    }
    out
}
