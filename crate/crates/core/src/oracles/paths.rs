//! Decision by direct enumeration: list every simple `s`-`t` path, then
//! search multisets of `p` of them with branch and bound on the number of
//! edges used twice or more.

use super::{shared_edge_report, MseVerdict, OracleError, Route, RouteSet};
use crate::graph::{EdgeId, MultiGraph, VertexId};
use crate::reduction::MseInstance;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PathsConfig {
    pub max_paths: usize,
    pub max_p: u64,
}

impl Default for PathsConfig {
    fn default() -> Self {
        Self {
            max_paths: 100_000,
            max_p: 5,
        }
    }
}

/// Every simple `s`-`t` path as an edge sequence, shortest first, ties in
/// discovery order. Arcs are followed only forwards.
pub fn enumerate_simple_paths(g: &MultiGraph, s: VertexId, t: VertexId, limit: usize) -> Result<Vec<Vec<EdgeId>>, OracleError> {
    let mut out = Vec::new();
    let mut visited = vec![false; g.vertex_bound()];
    let mut path = Vec::new();
    visited[s.index()] = true;
    dfs(g, s, t, &mut visited, &mut path, &mut out, limit)?;
    out.sort_by_key(Vec::len);
    Ok(out)
}

fn dfs(
    g: &MultiGraph,
    v: VertexId,
    t: VertexId,
    visited: &mut [bool],
    path: &mut Vec<EdgeId>,
    out: &mut Vec<Vec<EdgeId>>,
    limit: usize,
) -> Result<(), OracleError> {
    if v == t {
        if out.len() == limit {
            return Err(OracleError::CapExceeded {
                what: "simple path count",
                limit: limit as u64,
                actual: limit as u64 + 1,
            });
        }
        out.push(path.clone());
        return Ok(());
    }
    for (e, edge) in g.incident(v) {
        let w = edge.other(v);
        if !edge.allows(v) || visited[w.index()] {
            continue;
        }
        visited[w.index()] = true;
        path.push(e);
        dfs(g, w, t, visited, path, out, limit)?;
        path.pop();
        visited[w.index()] = false;
    }
    Ok(())
}

/// Multiset search state. Paths are chosen with non-decreasing index.
struct Search<'a> {
    paths: &'a [Vec<usize>],
    p: usize,
    usage: Vec<u32>,
    shared: usize,
    chosen: Vec<usize>,
    /// Largest shared count still of interest.
    bound: usize,
    best: Option<(usize, Vec<usize>)>,
    /// Stop at the first multiset within `bound`.
    first_only: bool,
}

impl Search<'_> {
    fn push(&mut self, i: usize) {
        for &e in &self.paths[i] {
            self.usage[e] += 1;
            if self.usage[e] == 2 {
                self.shared += 1;
            }
        }
        self.chosen.push(i);
    }

    fn pop(&mut self) {
        let i = self.chosen.pop().expect("non-empty");
        for &e in &self.paths[i] {
            if self.usage[e] == 2 {
                self.shared -= 1;
            }
            self.usage[e] -= 1;
        }
    }

    /// Returns true to stop the search.
    fn run(&mut self, from: usize) -> bool {
        if self.chosen.len() == self.p {
            self.best = Some((self.shared, self.chosen.clone()));
            if self.first_only || self.shared == 0 {
                return true;
            }
            self.bound = self.shared - 1;
            return false;
        }
        for i in from..self.paths.len() {
            self.push(i);
            let stop = self.shared <= self.bound && self.run(i);
            self.pop();
            if stop {
                return true;
            }
        }
        false
    }
}

/// Candidate paths as edge lists, and for each edge the paths through it.
type Prepared = (Vec<Vec<EdgeId>>, Vec<Vec<usize>>);

fn prepare(inst: &MseInstance, cfg: &PathsConfig) -> Result<Prepared, OracleError> {
    if inst.p > cfg.max_p {
        return Err(OracleError::CapExceeded {
            what: "route count p",
            limit: cfg.max_p,
            actual: inst.p,
        });
    }
    let paths = enumerate_simple_paths(&inst.graph, inst.s, inst.t, cfg.max_paths)?;
    let dense = paths.iter().map(|p| p.iter().map(|e| e.index()).collect()).collect();
    Ok((paths, dense))
}

fn search(inst: &MseInstance, dense: &[Vec<usize>], bound: usize, first_only: bool) -> Option<(usize, Vec<usize>)> {
    let mut s = Search {
        paths: dense,
        p: inst.p as usize,
        usage: vec![0; inst.graph.edge_bound()],
        shared: 0,
        chosen: Vec::with_capacity(inst.p as usize),
        bound,
        best: None,
        first_only,
    };
    s.run(0);
    s.best
}

pub fn solve_mse_exact_paths(inst: &MseInstance, cfg: &PathsConfig) -> Result<MseVerdict, OracleError> {
    let (paths, dense) = prepare(inst, cfg)?;
    let bound = usize::try_from(inst.k).unwrap_or(usize::MAX);
    let Some((_, chosen)) = search(inst, &dense, bound, true) else {
        return Ok(MseVerdict::No);
    };
    let routes = chosen
        .into_iter()
        .map(|i| Route::from_edges(&inst.graph, inst.s, paths[i].clone()))
        .collect::<Result<Vec<_>, _>>()?;
    let routes = RouteSet { routes };
    Ok(MseVerdict::Yes {
        shared: shared_edge_report(&routes).shared,
        routes,
    })
}

/// The least number of shared edges over all sets of `p` routes, or `None`
/// when there is no `s`-`t` path.
pub fn min_shared_paths(inst: &MseInstance, cfg: &PathsConfig) -> Result<Option<u64>, OracleError> {
    let (_, dense) = prepare(inst, cfg)?;
    Ok(search(inst, &dense, usize::MAX, false).map(|(count, _)| count as u64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadgets::{make_bundle, make_grid};
    use crate::oracles::verify_routes;

    #[test]
    fn grid_path_counts() {
        // Monotone and detour paths of the 2 x 3 grid corner to corner.
        let h = make_grid(2, 3).unwrap();
        let paths = enumerate_simple_paths(&h.graph, h.terminals.0, h.terminals.1, 1_000).unwrap();
        assert_eq!(paths.len(), 4);
        assert_eq!(paths[0].len(), 3);
        let h = make_grid(3, 3).unwrap();
        assert_eq!(enumerate_simple_paths(&h.graph, h.terminals.0, h.terminals.1, 1_000).unwrap().len(), 12);
    }

    #[test]
    fn bundle_agrees_with_hand_count() {
        let h = make_bundle(3, 2).unwrap();
        let inst = MseInstance::new(h.graph, h.terminals.0, h.terminals.1, 4, 1).unwrap();
        let cfg = PathsConfig::default();
        assert_eq!(solve_mse_exact_paths(&inst, &cfg).unwrap(), MseVerdict::No);
        let yes = inst.with_budget(2);
        let MseVerdict::Yes { routes, .. } = solve_mse_exact_paths(&yes, &cfg).unwrap() else {
            panic!("expected yes")
        };
        assert!(verify_routes(&yes, &routes).is_accept());
        assert_eq!(min_shared_paths(&inst, &cfg).unwrap(), Some(2));
    }

    #[test]
    fn limits_are_reported() {
        let h = make_grid(3, 3).unwrap();
        assert!(matches!(
            enumerate_simple_paths(&h.graph, h.terminals.0, h.terminals.1, 5),
            Err(OracleError::CapExceeded { .. })
        ));
        let inst = MseInstance::new(h.graph, h.terminals.0, h.terminals.1, 6, 0).unwrap();
        assert!(matches!(solve_mse_exact_paths(&inst, &PathsConfig::default()), Err(OracleError::CapExceeded { .. })));
    }
}
