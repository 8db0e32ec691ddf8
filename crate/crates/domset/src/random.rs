//! Seeded random graph generation.
//!
//! Uses a counter-based stream cipher RNG so that a given (model, seed) pair
//! produces the same graph on every platform and run.

use crate::graph::{Graph, GraphError};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GenError {
    #[error("empty graph (n = 0)")]
    Empty,
    #[error("edge count {m} exceeds maximum {max} for n = {n}")]
    TooManyEdges { m: usize, max: usize, n: usize },
    #[error("edge probability {0} outside [0, 1]")]
    BadProbability(f64),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EdgeModel {
    /// Uniform graph with exactly this many edges.
    Gnm(usize),
    /// Each pair independently an edge with this probability.
    Gnp(f64),
}

/// Generates a random simple graph on `n` vertices. With `connect` set,
/// bridge edges are added between components afterwards (they count towards
/// the final edge count), so the result is connected.
pub fn gen_random_graph(
    n: usize,
    model: EdgeModel,
    seed: u64,
    connect: bool,
) -> Result<Graph, GenError> {
    if n == 0 {
        return Err(GenError::Empty);
    }
    let max = n * (n - 1) / 2;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(u32, u32)> = Vec::new();
    match model {
        EdgeModel::Gnm(m) => {
            if m > max {
                return Err(GenError::TooManyEdges { m, max, n });
            }
            let mut seen = std::collections::HashSet::with_capacity(m * 2);
            while edges.len() < m {
                let u = rng.gen_range(0..n as u32);
                let v = rng.gen_range(0..n as u32);
                if u == v {
                    continue;
                }
                if seen.insert((u.min(v), u.max(v))) {
                    edges.push((u.min(v), u.max(v)));
                }
            }
        }
        EdgeModel::Gnp(p) => {
            if !(0.0..=1.0).contains(&p) {
                return Err(GenError::BadProbability(p));
            }
            for u in 0..n as u32 {
                for v in u + 1..n as u32 {
                    if rng.gen_bool(p) {
                        edges.push((u, v));
                    }
                }
            }
        }
    }
    if connect {
        let interim = Graph::from_edges(n, &edges)?;
        let comps = interim.components();
        // Chain the components together by their smallest vertices. The
        // bridges are deterministic and cannot duplicate existing edges.
        for pair in comps.windows(2) {
            edges.push((pair[0][0], pair[1][0]));
        }
    }
    Ok(Graph::from_edges(n, &edges)?)
}
