//! Seeded instance generators for sampling and cross-validation.

use itertools::Itertools;
use rand::seq::IteratorRandom;
use rand::Rng;

use crate::graph::MultiGraph;
use crate::reduction::{MseInstance, VcInstance};

/// A simple graph on `2..=max_n` vertices with `1..=max_m` edges (bounded by
/// the number of pairs) and a budget in `0..=n`.
pub fn random_vc<R: Rng>(rng: &mut R, max_n: u32, max_m: u32) -> VcInstance {
    let n = rng.random_range(2..=max_n.max(2));
    let pairs: Vec<(u32, u32)> = (1..=n).tuple_combinations().collect();
    let m = rng.random_range(1..=max_m.max(1).min(pairs.len() as u32));
    let mut edges = pairs.into_iter().choose_multiple(rng, m as usize);
    edges.sort_unstable();
    let k = rng.random_range(0..=n);
    VcInstance::new(n, edges, k).expect("sampled pairs are distinct and in range")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultigraphShape {
    pub max_vertices: u32,
    pub max_edges: u32,
    pub max_p: u64,
    pub max_k: u64,
    /// Chance that the whole graph is directed.
    pub directed: f64,
}

impl Default for MultigraphShape {
    fn default() -> Self {
        Self {
            max_vertices: 8,
            max_edges: 12,
            max_p: 4,
            max_k: 2,
            directed: 0.3,
        }
    }
}

/// A loopless multigraph with `s = v0` and `t` the last vertex. Parallel
/// edges are drawn on purpose about one time in five.
pub fn random_multigraph<R: Rng>(rng: &mut R, shape: &MultigraphShape) -> MseInstance {
    let n = rng.random_range(2..=shape.max_vertices.max(2));
    let e = rng.random_range(1..=shape.max_edges.max(1));
    let directed = rng.random_bool(shape.directed);
    let mut g = MultiGraph::new();
    let vs: Vec<_> = (0..n).map(|_| g.add_vertex(None)).collect();
    let mut last = None;
    for _ in 0..e {
        let (a, b) = match last {
            Some(pair) if rng.random_bool(0.2) => pair,
            _ => {
                let a = rng.random_range(0..n);
                let mut b = rng.random_range(0..n - 1);
                if b >= a {
                    b += 1;
                }
                (vs[a as usize], vs[b as usize])
            }
        };
        if directed {
            g.add_arc(a, b).expect("distinct endpoints");
        } else {
            g.add_edge(a, b).expect("distinct endpoints");
        }
        last = Some((a, b));
    }
    let p = rng.random_range(1..=shape.max_p.max(1));
    let k = rng.random_range(0..=shape.max_k);
    MseInstance::new(g, vs[0], vs[n as usize - 1], p, k).expect("terminals exist")
}
