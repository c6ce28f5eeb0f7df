use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::OracleError;
use crate::graph::{EdgeId, MultiGraph, VertexId};
use crate::reduction::MseInstance;

/// A walk given both as its vertex sequence and its edge sequence, so that
/// parallel edges are unambiguous. `vertices.len() == edges.len() + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Route {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
}

impl Route {
    /// Follows `edges` from `start`. Fails if an edge does not leave the
    /// current vertex.
    pub fn from_edges(g: &MultiGraph, start: VertexId, edges: Vec<EdgeId>) -> Result<Self, OracleError> {
        let mut vertices = Vec::with_capacity(edges.len() + 1);
        vertices.push(start);
        let mut cur = start;
        for (i, &e) in edges.iter().enumerate() {
            let edge = g
                .try_edge(e)
                .ok_or_else(|| OracleError::Routes(format!("step {i}: unknown edge {e}")))?;
            if !edge.touches(cur) {
                return Err(OracleError::Routes(format!("step {i}: {e} does not touch {cur}")));
            }
            cur = edge.other(cur);
            vertices.push(cur);
        }
        Ok(Self { vertices, edges })
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// An ordered collection of routes.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RouteSet {
    pub routes: Vec<Route>,
}

/// Wire form. `edges` may be omitted when no step crosses parallel edges.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct RouteSetJson {
    routes: Vec<Vec<VertexId>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    edges: Option<Vec<Vec<EdgeId>>>,
}

impl RouteSet {
    pub fn len(&self) -> usize {
        self.routes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.routes.is_empty()
    }

    pub fn to_json(&self) -> Vec<u8> {
        let j = RouteSetJson {
            routes: self.routes.iter().map(|r| r.vertices.clone()).collect(),
            edges: Some(self.routes.iter().map(|r| r.edges.clone()).collect()),
        };
        serde_json::to_vec(&j).expect("routes serialise")
    }

    /// Parses the wire form. Without an `edges` list every step is resolved
    /// against `g`; a step between vertices joined by several usable edges is
    /// an error. Structural problems are left to [`verify_routes`].
    pub fn from_json(bytes: &[u8], g: &MultiGraph) -> Result<Self, OracleError> {
        let j: RouteSetJson = serde_json::from_slice(bytes).map_err(|e| OracleError::Routes(e.to_string()))?;
        let routes = match j.edges {
            Some(edges) => {
                if edges.len() != j.routes.len() {
                    return Err(OracleError::Routes(format!(
                        "{} vertex sequences but {} edge sequences",
                        j.routes.len(),
                        edges.len()
                    )));
                }
                j.routes
                    .into_iter()
                    .zip(edges)
                    .map(|(vertices, edges)| Route { vertices, edges })
                    .collect()
            }
            None => j
                .routes
                .into_iter()
                .enumerate()
                .map(|(r, vertices)| {
                    let edges = vertices
                        .windows(2)
                        .enumerate()
                        .map(|(step, w)| {
                            let candidates: Vec<EdgeId> = if g.has_vertex(w[0]) && g.has_vertex(w[1]) {
                                g.edges_between(w[0], w[1])
                                    .into_iter()
                                    .filter(|e| g.edge(*e).allows(w[0]))
                                    .collect()
                            } else {
                                Vec::new()
                            };
                            match candidates.as_slice() {
                                [e] => Ok(*e),
                                [] => Err(OracleError::Routes(format!("route {r} step {step}: no edge {} -> {}", w[0], w[1]))),
                                _ => Err(OracleError::Routes(format!(
                                    "route {r} step {step}: {} parallel edges {} -> {}; list edge ids",
                                    candidates.len(),
                                    w[0],
                                    w[1]
                                ))),
                            }
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    Ok(Route { vertices, edges })
                })
                .collect::<Result<Vec<_>, OracleError>>()?,
        };
        Ok(Self { routes })
    }
}

/// Edge usage of a route set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SharedEdgeReport {
    /// Edges used by at least two routes, ascending.
    pub shared: Vec<EdgeId>,
    pub count: usize,
    /// Number of routes using each edge, for every used edge.
    pub per_route_usage: BTreeMap<EdgeId, u32>,
}

/// Counts how many routes use each edge. A route counts once per edge.
pub fn shared_edge_report(routes: &RouteSet) -> SharedEdgeReport {
    let mut usage: BTreeMap<EdgeId, u32> = BTreeMap::new();
    for r in &routes.routes {
        let distinct: HashSet<EdgeId> = r.edges.iter().copied().collect();
        for e in distinct {
            *usage.entry(e).or_insert(0) += 1;
        }
    }
    let shared: Vec<EdgeId> = usage.iter().filter(|(_, &u)| u >= 2).map(|(e, _)| *e).collect();
    SharedEdgeReport {
        count: shared.len(),
        shared,
        per_route_usage: usage,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum Rejection {
    WrongRouteCount { expected: u64, found: usize },
    Malformed { route: usize, step: usize, detail: String },
    NotSimple { route: usize, vertex: VertexId },
    WrongEndpoints { route: usize },
    OverBudget { count: usize, budget: u64, excess: u64 },
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rejection::WrongRouteCount { expected, found } => write!(f, "wrong route count: expected {expected}, found {found}"),
            Rejection::Malformed { route, step, detail } => write!(f, "route {route} step {step}: {detail}"),
            Rejection::NotSimple { route, vertex } => write!(f, "route {route} visits {vertex} twice"),
            Rejection::WrongEndpoints { route } => write!(f, "route {route} does not run from s to t"),
            Rejection::OverBudget { count, budget, excess } => {
                write!(f, "{count} shared edges exceed the budget {budget} by {excess}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RouteVerdict {
    Accept(SharedEdgeReport),
    /// `report` is present whenever every route is well formed.
    Reject { reason: Rejection, report: Option<SharedEdgeReport> },
}

impl RouteVerdict {
    pub fn is_accept(&self) -> bool {
        matches!(self, RouteVerdict::Accept(_))
    }

    pub fn report(&self) -> Option<&SharedEdgeReport> {
        match self {
            RouteVerdict::Accept(r) => Some(r),
            RouteVerdict::Reject { report, .. } => report.as_ref(),
        }
    }
}

fn check_route(inst: &MseInstance, index: usize, r: &Route) -> Result<(), Rejection> {
    let g = &inst.graph;
    let malformed = |step: usize, detail: String| Rejection::Malformed { route: index, step, detail };
    if r.vertices.len() != r.edges.len() + 1 {
        return Err(malformed(0, format!("{} vertices for {} edges", r.vertices.len(), r.edges.len())));
    }
    for (step, (&e, w)) in r.edges.iter().zip(r.vertices.windows(2)).enumerate() {
        let Some(edge) = g.try_edge(e) else {
            return Err(malformed(step, format!("unknown edge {e}")));
        };
        if !(edge.touches(w[0]) && edge.other(w[0]) == w[1]) {
            return Err(malformed(step, format!("{e} does not join {} and {}", w[0], w[1])));
        }
        if !edge.allows(w[0]) {
            return Err(malformed(step, format!("arc {e} traversed against its direction")));
        }
    }
    if r.vertices.first() != Some(&inst.s) || r.vertices.last() != Some(&inst.t) {
        return Err(Rejection::WrongEndpoints { route: index });
    }
    let mut seen = HashSet::with_capacity(r.vertices.len());
    for &v in &r.vertices {
        if !seen.insert(v) {
            return Err(Rejection::NotSimple { route: index, vertex: v });
        }
    }
    Ok(())
}

/// Accepts iff there are exactly `p` routes, each a simple `s`-`t` path
/// respecting arc directions, sharing at most `k` edges.
pub fn verify_routes(inst: &MseInstance, routes: &RouteSet) -> RouteVerdict {
    for (i, r) in routes.routes.iter().enumerate() {
        if let Err(reason) = check_route(inst, i, r) {
            return RouteVerdict::Reject { reason, report: None };
        }
    }
    let report = shared_edge_report(routes);
    if routes.len() as u64 != inst.p {
        return RouteVerdict::Reject {
            reason: Rejection::WrongRouteCount {
                expected: inst.p,
                found: routes.len(),
            },
            report: Some(report),
        };
    }
    if report.count as u64 > inst.k {
        return RouteVerdict::Reject {
            reason: Rejection::OverBudget {
                count: report.count,
                budget: inst.k,
                excess: report.count as u64 - inst.k,
            },
            report: Some(report),
        };
    }
    RouteVerdict::Accept(report)
}
