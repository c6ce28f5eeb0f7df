//! Decision by shared-set enumeration. For a fixed set `S` of edges allowed
//! to be shared, `p` routes exist iff the network with capacity `p` on `S`
//! and `1` elsewhere carries an `s`-`t` flow of value `p`; a decomposition of
//! that flow, with cycles cancelled, gives the routes.

use std::collections::{HashMap, VecDeque};

use itertools::Itertools;
use rayon::prelude::*;

use super::{shared_edge_report, MseVerdict, OracleError, Route, RouteSet};
use crate::graph::EdgeId;
use crate::reduction::MseInstance;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FlowConfig {
    pub max_edges: usize,
    /// Largest shared-set size the search will enumerate.
    pub max_k: u64,
    /// Worker threads; `0` uses the rayon default.
    pub jobs: usize,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self {
            max_edges: 200,
            max_k: 4,
            jobs: 0,
        }
    }
}

/// Residual network. Edge `i` owns arcs `2i` (a -> b) and `2i + 1` (b -> a).
#[derive(Clone)]
struct Network {
    s: usize,
    t: usize,
    edges: Vec<EdgeId>,
    ends: Vec<(usize, usize)>,
    directed: Vec<bool>,
    /// Outgoing arcs per vertex index.
    out: Vec<Vec<usize>>,
    cap: Vec<u64>,
    flow: Vec<i64>,
}

impl Network {
    fn build(inst: &MseInstance) -> Self {
        let g = &inst.graph;
        let mut out = vec![Vec::new(); g.vertex_bound()];
        let mut edges = Vec::with_capacity(g.edge_count());
        let mut ends = Vec::with_capacity(g.edge_count());
        let mut directed = Vec::with_capacity(g.edge_count());
        for (i, (e, edge)) in g.edges().enumerate() {
            out[edge.a.index()].push(2 * i);
            out[edge.b.index()].push(2 * i + 1);
            edges.push(e);
            ends.push((edge.a.index(), edge.b.index()));
            directed.push(edge.directed);
        }
        let n = edges.len();
        Self {
            s: inst.s.index(),
            t: inst.t.index(),
            edges,
            ends,
            directed,
            out,
            cap: vec![0; 2 * n],
            flow: vec![0; n],
        }
    }

    fn head(&self, arc: usize) -> usize {
        let (a, b) = self.ends[arc / 2];
        if arc.is_multiple_of(2) {
            b
        } else {
            a
        }
    }

    /// Capacity `wide` on the edges at the given indices, `1` elsewhere.
    fn reset(&mut self, shared: &[usize], wide: u64) {
        for i in 0..self.edges.len() {
            self.set_cap(i, 1);
        }
        for &i in shared {
            self.set_cap(i, wide);
        }
        self.flow.iter_mut().for_each(|f| *f = 0);
    }

    fn set_cap(&mut self, i: usize, c: u64) {
        self.cap[2 * i] = c;
        self.cap[2 * i + 1] = if self.directed[i] { 0 } else { c };
    }

    /// Edmonds-Karp, stopping once `target` units flow.
    fn max_flow(&mut self, target: u64) -> u64 {
        let mut total = 0;
        let mut pred = vec![usize::MAX; self.out.len()];
        let mut queue = VecDeque::new();
        while total < target {
            pred.iter_mut().for_each(|p| *p = usize::MAX);
            queue.clear();
            queue.push_back(self.s);
            let mut reached = false;
            'bfs: while let Some(v) = queue.pop_front() {
                for &arc in &self.out[v] {
                    let w = self.head(arc);
                    if self.cap[arc] > 0 && w != self.s && pred[w] == usize::MAX {
                        pred[w] = arc;
                        if w == self.t {
                            reached = true;
                            break 'bfs;
                        }
                        queue.push_back(w);
                    }
                }
            }
            if !reached {
                break;
            }
            let mut x = target - total;
            let mut w = self.t;
            while w != self.s {
                let arc = pred[w];
                x = x.min(self.cap[arc]);
                w = self.head(arc ^ 1);
            }
            let mut w = self.t;
            while w != self.s {
                let arc = pred[w];
                self.cap[arc] -= x;
                self.cap[arc ^ 1] += x;
                self.flow[arc / 2] += if arc % 2 == 0 { x as i64 } else { -(x as i64) };
                w = self.head(arc ^ 1);
            }
            total += x;
        }
        total
    }

    /// Splits the current flow into `count` simple paths, dropping cycles.
    fn decompose(&self, count: u64) -> Vec<Vec<usize>> {
        let mut units: HashMap<usize, Vec<usize>> = HashMap::new();
        for (i, &f) in self.flow.iter().enumerate() {
            let arc = if f >= 0 { 2 * i } else { 2 * i + 1 };
            for _ in 0..f.unsigned_abs() {
                units.entry(self.head(arc ^ 1)).or_default().push(arc);
            }
        }
        let mut paths = Vec::with_capacity(count as usize);
        for _ in 0..count {
            let mut stack: Vec<usize> = Vec::new();
            let mut on_path: HashMap<usize, usize> = HashMap::from([(self.s, 0)]);
            let mut v = self.s;
            while v != self.t {
                let arc = units.get_mut(&v).and_then(Vec::pop).expect("flow is conserved");
                let w = self.head(arc);
                if let Some(&depth) = on_path.get(&w) {
                    for dropped in stack.drain(depth..) {
                        on_path.remove(&self.head(dropped));
                    }
                } else {
                    stack.push(arc);
                    on_path.insert(w, stack.len());
                }
                v = w;
            }
            paths.push(stack.into_iter().map(|arc| arc / 2).collect());
        }
        paths
    }

    /// Routes if `p` units fit with the given edges widened.
    fn try_set(&mut self, shared: &[usize], p: u64) -> Option<Vec<Vec<usize>>> {
        self.reset(shared, p);
        (self.max_flow(p) == p).then(|| self.decompose(p))
    }
}

fn pool(jobs: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new().num_threads(jobs).build().expect("thread pool")
}

/// Lexicographically first shared set of exactly `size` edge indices that
/// admits `p` routes.
fn search_size(inst: &MseInstance, base: &Network, size: usize) -> Option<Vec<Vec<usize>>> {
    let e = base.edges.len();
    let p = inst.p;
    if size == 0 {
        return base.clone().try_set(&[], p);
    }
    (0..e).into_par_iter().map_init(
        || base.clone(),
        |net, first| {
            (first + 1..e).combinations(size - 1).find_map(|rest| {
                let mut set = Vec::with_capacity(size);
                set.push(first);
                set.extend(rest);
                net.try_set(&set, p)
            })
        },
    )
    .find_map_first(|x| x)
}

fn to_routes(inst: &MseInstance, net: &Network, paths: Vec<Vec<usize>>) -> Result<RouteSet, OracleError> {
    let routes = paths
        .into_iter()
        .map(|p| Route::from_edges(&inst.graph, inst.s, p.into_iter().map(|i| net.edges[i]).collect()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RouteSet { routes })
}

fn check_edges(inst: &MseInstance, cfg: &FlowConfig) -> Result<(), OracleError> {
    let e = inst.graph.edge_count();
    if e > cfg.max_edges {
        return Err(OracleError::CapExceeded {
            what: "edge count",
            limit: cfg.max_edges as u64,
            actual: e as u64,
        });
    }
    Ok(())
}

/// Searches shared sets by size `0..=k`. If sharing every edge still admits
/// no `p` routes the answer is `No` whatever `k` is; otherwise `k` (capped
/// by the edge count) must not exceed `cfg.max_k`.
pub fn solve_mse_exact_flow(inst: &MseInstance, cfg: &FlowConfig) -> Result<MseVerdict, OracleError> {
    check_edges(inst, cfg)?;
    let base = Network::build(inst);
    let e = base.edges.len();
    let all: Vec<usize> = (0..e).collect();
    if base.clone().try_set(&all, inst.p).is_none() {
        return Ok(MseVerdict::No);
    }
    let limit = inst.k.min(e as u64);
    if limit > cfg.max_k {
        return Err(OracleError::CapExceeded {
            what: "budget k",
            limit: cfg.max_k,
            actual: limit,
        });
    }
    let found = pool(cfg.jobs).install(|| (0..=limit as usize).find_map(|size| search_size(inst, &base, size)));
    match found {
        None => Ok(MseVerdict::No),
        Some(paths) => {
            let routes = to_routes(inst, &base, paths)?;
            Ok(MseVerdict::Yes {
                shared: shared_edge_report(&routes).shared,
                routes,
            })
        }
    }
}

/// The least number of shared edges over all sets of `p` routes, or `None`
/// when no `p` routes exist. Errors if the optimum exceeds `cfg.max_k`.
pub fn min_shared_flow(inst: &MseInstance, cfg: &FlowConfig) -> Result<Option<u64>, OracleError> {
    check_edges(inst, cfg)?;
    let base = Network::build(inst);
    let e = base.edges.len();
    let all: Vec<usize> = (0..e).collect();
    if base.clone().try_set(&all, inst.p).is_none() {
        return Ok(None);
    }
    let limit = cfg.max_k.min(e as u64) as usize;
    let found = pool(cfg.jobs).install(|| (0..=limit).find(|&size| search_size(inst, &base, size).is_some()));
    match found {
        Some(size) => Ok(Some(size as u64)),
        None => Err(OracleError::CapExceeded {
            what: "minimum shared edges",
            limit: cfg.max_k,
            actual: cfg.max_k + 1,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadgets::make_bundle;
    use crate::graph::MultiGraph;
    use crate::oracles::verify_routes;

    fn bundle(l: u32, m: u32, p: u64, k: u64) -> MseInstance {
        let h = make_bundle(l, m).unwrap();
        MseInstance::new(h.graph, h.terminals.0, h.terminals.1, p, k).unwrap()
    }

    #[test]
    fn bundle_needs_one_shared_chain() {
        let cfg = FlowConfig::default();
        // Four routes through three chains of length two: some chain carries
        // two routes, and both of its edges are shared.
        assert_eq!(solve_mse_exact_flow(&bundle(3, 2, 4, 1), &cfg).unwrap(), MseVerdict::No);
        let MseVerdict::Yes { shared, routes } = solve_mse_exact_flow(&bundle(3, 2, 4, 2), &cfg).unwrap() else {
            panic!("expected yes")
        };
        assert_eq!(shared.len(), 2);
        assert!(verify_routes(&bundle(3, 2, 4, 2), &routes).is_accept());
        assert_eq!(min_shared_flow(&bundle(3, 2, 4, 0), &cfg).unwrap(), Some(2));
    }

    #[test]
    fn single_edge_and_parallel_pair() {
        let cfg = FlowConfig::default();
        let mut g = MultiGraph::new();
        let s = g.add_vertex(None);
        let t = g.add_vertex(None);
        g.add_edge(s, t).unwrap();
        let one = MseInstance::new(g.clone(), s, t, 2, 0).unwrap();
        assert!(!solve_mse_exact_flow(&one, &cfg).unwrap().is_yes());
        assert!(solve_mse_exact_flow(&one.with_budget(1), &cfg).unwrap().is_yes());
        g.add_edge(s, t).unwrap();
        let two = MseInstance::new(g, s, t, 2, 0).unwrap();
        assert!(solve_mse_exact_flow(&two, &cfg).unwrap().is_yes());
    }

    #[test]
    fn unreachable_target_is_no_for_any_budget() {
        let mut g = MultiGraph::new();
        let s = g.add_vertex(None);
        let t = g.add_vertex(None);
        let x = g.add_vertex(None);
        g.add_arc(s, x).unwrap();
        g.add_arc(t, x).unwrap();
        let inst = MseInstance::new(g, s, t, 1, 1_000).unwrap();
        assert_eq!(solve_mse_exact_flow(&inst, &FlowConfig::default()).unwrap(), MseVerdict::No);
        assert_eq!(min_shared_flow(&inst, &FlowConfig::default()).unwrap(), None);
    }

    #[test]
    fn caps_are_enforced() {
        let cfg = FlowConfig { max_edges: 3, ..FlowConfig::default() };
        assert!(matches!(solve_mse_exact_flow(&bundle(2, 2, 2, 0), &cfg), Err(OracleError::CapExceeded { .. })));
        let cfg = FlowConfig { max_k: 1, ..FlowConfig::default() };
        assert!(matches!(solve_mse_exact_flow(&bundle(2, 2, 3, 3), &cfg), Err(OracleError::CapExceeded { .. })));
    }
}
