//! Multigraph with an embedded rotation system.
//!
//! Vertices and edges live in slot vectors indexed by their ids. Removing an
//! element leaves a tombstone, so ids handed out once stay valid (and
//! unique) for the lifetime of the graph and across every transformation
//! that mutates it in place.
//!
//! Each vertex carries a rotation: the counter-clockwise cyclic order of its
//! incident edges. A parallel edge shows up through its own [`EdgeId`].

mod chains;
mod degree;
mod io;
mod planarity;
mod subdivide;

use std::fmt;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;
use thiserror::Error;

pub use chains::{maximal_proper_chains, min_proper_chain_length, ChainDecomposition, ProperChain};
pub use degree::{degree_profile, DegreeProfile};
pub use io::{export, import_json, ExportFormat, GraphJson};
pub use planarity::{count_faces, trace_faces, verify_planar_embedding, Dart, PlanarVerdict};
pub use subdivide::subdivide_all_edges;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(pub u32);

impl VertexId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl EdgeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Terminal {
    S,
    T,
}

/// Role of a vertex that is internal to a gadget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InternalRole {
    /// Endpoint of a standalone gadget before it is spliced into a host.
    Port,
    ChainInterior,
    /// The vertex where a feather's shaft meets its bundle.
    Hub,
    Rail,
    /// Midpoint created by subdivision; `ordinal` names the parent edge.
    Subdivision,
    CrossingHead,
    CrossingTail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Label {
    GridVertex { row: u32, col: u32 },
    Terminal { which: Terminal },
    GadgetInternal { role: InternalRole, ordinal: u32 },
    TreeNode { depth: u32, index: u32 },
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::GridVertex { row, col } => write!(f, "({row},{col})"),
            Label::Terminal { which: Terminal::S } => f.write_str("s"),
            Label::Terminal { which: Terminal::T } => f.write_str("t"),
            Label::GadgetInternal { role, ordinal } => write!(f, "{role:?}#{ordinal}"),
            Label::TreeNode { depth, index } => write!(f, "tree[{depth}:{index}]"),
        }
    }
}

/// An edge between two distinct vertices. When `directed` is set the edge is
/// the arc `a -> b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub a: VertexId,
    pub b: VertexId,
    pub directed: bool,
}

impl Edge {
    #[inline]
    pub fn other(&self, v: VertexId) -> VertexId {
        if self.a == v {
            self.b
        } else {
            self.a
        }
    }

    #[inline]
    pub fn touches(&self, v: VertexId) -> bool {
        self.a == v || self.b == v
    }

    /// Whether the edge may be traversed from `from` to the other endpoint.
    #[inline]
    pub fn allows(&self, from: VertexId) -> bool {
        !self.directed || self.a == from
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("unknown edge {0}")]
    UnknownEdge(EdgeId),
    #[error("loop at {0} (loops are not allowed)")]
    Loop(VertexId),
    #[error("vertex {0} still has {1} incident edges")]
    VertexInUse(VertexId, usize),
    #[error("malformed rotation at {vertex}: {detail}")]
    MalformedRotation { vertex: VertexId, detail: String },
    #[error("graph is disconnected ({components} components); Euler check needs a connected graph")]
    Disconnected { components: usize },
    #[error("graph has no vertices")]
    Empty,
    #[error("unsupported export format `{0}`")]
    UnsupportedFormat(String),
    #[error("json: {0}")]
    Json(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct VertexSlot {
    label: Option<Label>,
    rotation: SmallVec<[EdgeId; 4]>,
}

/// Result of [`MultiGraph::splice_fragment`].
#[derive(Debug, Clone)]
pub struct Spliced {
    /// Fragment vertex index -> host vertex.
    pub vertex_map: Vec<VertexId>,
    /// Fragment edge index -> host edge.
    pub edge_map: Vec<EdgeId>,
    /// Host darts contributed at each identified endpoint, in the fragment's
    /// stored rotation order. The host rotation at those vertices is left
    /// untouched; the caller places these blocks.
    pub blocks: [Vec<EdgeId>; 2],
}

#[derive(Debug, Clone, Default)]
pub struct MultiGraph {
    vertices: Vec<Option<VertexSlot>>,
    edges: Vec<Option<Edge>>,
    live_vertices: usize,
    live_edges: usize,
}

impl MultiGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(vertices: usize, edges: usize) -> Self {
        Self {
            vertices: Vec::with_capacity(vertices),
            edges: Vec::with_capacity(edges),
            ..Self::default()
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.live_vertices
    }

    pub fn edge_count(&self) -> usize {
        self.live_edges
    }

    /// One past the largest vertex id ever allocated.
    pub fn vertex_bound(&self) -> usize {
        self.vertices.len()
    }

    /// One past the largest edge id ever allocated.
    pub fn edge_bound(&self) -> usize {
        self.edges.len()
    }

    pub fn has_vertex(&self, v: VertexId) -> bool {
        matches!(self.vertices.get(v.index()), Some(Some(_)))
    }

    pub fn has_edge(&self, e: EdgeId) -> bool {
        matches!(self.edges.get(e.index()), Some(Some(_)))
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices
            .iter()
            .enumerate()
            .filter(|(_, s)| s.is_some())
            .map(|(i, _)| VertexId(i as u32))
    }

    pub fn edges(&self) -> impl Iterator<Item = (EdgeId, &Edge)> + '_ {
        self.edges
            .iter()
            .enumerate()
            .filter_map(|(i, e)| e.as_ref().map(|e| (EdgeId(i as u32), e)))
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        self.edges[e.index()]
            .as_ref()
            .unwrap_or_else(|| panic!("edge {e} does not exist"))
    }

    pub fn try_edge(&self, e: EdgeId) -> Option<&Edge> {
        self.edges.get(e.index()).and_then(|e| e.as_ref())
    }

    fn slot(&self, v: VertexId) -> &VertexSlot {
        self.vertices[v.index()]
            .as_ref()
            .unwrap_or_else(|| panic!("vertex {v} does not exist"))
    }

    fn slot_mut(&mut self, v: VertexId) -> &mut VertexSlot {
        self.vertices[v.index()]
            .as_mut()
            .unwrap_or_else(|| panic!("vertex {v} does not exist"))
    }

    pub fn label(&self, v: VertexId) -> Option<Label> {
        self.slot(v).label
    }

    pub fn set_label(&mut self, v: VertexId, label: Option<Label>) {
        self.slot_mut(v).label = label;
    }

    /// Counter-clockwise cyclic order of the edges at `v`.
    pub fn rotation(&self, v: VertexId) -> &[EdgeId] {
        &self.slot(v).rotation
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.slot(v).rotation.len()
    }

    pub fn incident(&self, v: VertexId) -> impl Iterator<Item = (EdgeId, &Edge)> + '_ {
        self.slot(v).rotation.iter().map(move |&e| (e, self.edge(e)))
    }

    pub fn add_vertex(&mut self, label: Option<Label>) -> VertexId {
        let id = VertexId(self.vertices.len() as u32);
        self.vertices.push(Some(VertexSlot {
            label,
            rotation: SmallVec::new(),
        }));
        self.live_vertices += 1;
        id
    }

    /// Adds an undirected edge and appends it to both endpoint rotations.
    pub fn add_edge(&mut self, a: VertexId, b: VertexId) -> Result<EdgeId, GraphError> {
        self.add_edge_with(a, b, false)
    }

    /// Adds the arc `a -> b` and appends it to both endpoint rotations.
    pub fn add_arc(&mut self, a: VertexId, b: VertexId) -> Result<EdgeId, GraphError> {
        self.add_edge_with(a, b, true)
    }

    fn add_edge_with(&mut self, a: VertexId, b: VertexId, directed: bool) -> Result<EdgeId, GraphError> {
        let e = self.push_detached(a, b, directed)?;
        self.slot_mut(a).rotation.push(e);
        self.slot_mut(b).rotation.push(e);
        Ok(e)
    }

    /// Adds an edge without touching any rotation. The caller owns placing it.
    pub(crate) fn push_detached(&mut self, a: VertexId, b: VertexId, directed: bool) -> Result<EdgeId, GraphError> {
        if a == b {
            return Err(GraphError::Loop(a));
        }
        for v in [a, b] {
            if !self.has_vertex(v) {
                return Err(GraphError::UnknownVertex(v));
            }
        }
        let id = EdgeId(self.edges.len() as u32);
        self.edges.push(Some(Edge { a, b, directed }));
        self.live_edges += 1;
        Ok(id)
    }

    /// Removes an edge and drops it from both rotations.
    pub fn remove_edge(&mut self, e: EdgeId) -> Result<Edge, GraphError> {
        let edge = self.edges.get_mut(e.index()).and_then(Option::take).ok_or(GraphError::UnknownEdge(e))?;
        self.live_edges -= 1;
        for v in [edge.a, edge.b] {
            if let Some(Some(slot)) = self.vertices.get_mut(v.index()) {
                slot.rotation.retain(|x| *x != e);
            }
        }
        Ok(edge)
    }

    /// Removes an isolated vertex.
    pub fn remove_vertex(&mut self, v: VertexId) -> Result<(), GraphError> {
        let deg = match self.vertices.get(v.index()) {
            Some(Some(slot)) => slot.rotation.len(),
            _ => return Err(GraphError::UnknownVertex(v)),
        };
        if deg != 0 {
            return Err(GraphError::VertexInUse(v, deg));
        }
        self.vertices[v.index()] = None;
        self.live_vertices -= 1;
        Ok(())
    }

    pub fn set_directed(&mut self, e: EdgeId, directed: bool) {
        if let Some(Some(edge)) = self.edges.get_mut(e.index()) {
            edge.directed = directed;
        }
    }

    pub fn is_directed(&self) -> bool {
        self.edges().any(|(_, e)| e.directed)
    }

    /// Replaces the rotation at `v`. Consistency is checked by
    /// [`MultiGraph::validate_rotation`], not here.
    pub fn set_rotation(&mut self, v: VertexId, rotation: impl IntoIterator<Item = EdgeId>) {
        self.slot_mut(v).rotation = rotation.into_iter().collect();
    }

    /// Replaces the cyclically contiguous block `old` in the rotation at `v`
    /// by `new`, keeping the rest of the cyclic order. Edges in `old` need
    /// not exist any more.
    pub fn replace_block(&mut self, v: VertexId, old: &[EdgeId], new: &[EdgeId]) -> Result<(), GraphError> {
        let rot = &self.slot(v).rotation;
        let deg = rot.len();
        let malformed = |detail: String| GraphError::MalformedRotation { vertex: v, detail };
        if old.is_empty() {
            return Err(malformed("empty block".into()));
        }
        let in_block: Vec<bool> = rot.iter().map(|e| old.contains(e)).collect();
        let hits = in_block.iter().filter(|x| **x).count();
        if hits != old.len() {
            return Err(malformed(format!("block of {} edges matched {hits} rotation entries", old.len())));
        }
        // The block starts where an in-block entry follows an out-of-block one.
        let start = if hits == deg {
            0
        } else {
            (0..deg)
                .find(|&i| in_block[i] && !in_block[(i + deg - 1) % deg])
                .expect("partial block has a start")
        };
        if (0..hits).any(|o| !in_block[(start + o) % deg]) {
            return Err(malformed("block is not contiguous".into()));
        }
        let mut next: SmallVec<[EdgeId; 4]> = SmallVec::with_capacity(deg - hits + new.len());
        next.extend_from_slice(new);
        next.extend((hits..deg).map(|o| rot[(start + o) % deg]));
        self.slot_mut(v).rotation = next;
        Ok(())
    }

    /// Moves the endpoint `from` of edge `e` to `to`. The edge is removed from
    /// the rotation at `from` and appended to the rotation at `to`.
    pub fn reattach(&mut self, e: EdgeId, from: VertexId, to: VertexId) -> Result<(), GraphError> {
        if !self.has_vertex(to) {
            return Err(GraphError::UnknownVertex(to));
        }
        let edge = self.edges.get_mut(e.index()).and_then(|x| x.as_mut()).ok_or(GraphError::UnknownEdge(e))?;
        if edge.a == from {
            edge.a = to;
        } else if edge.b == from {
            edge.b = to;
        } else {
            return Err(GraphError::MalformedRotation {
                vertex: from,
                detail: format!("{e} is not incident"),
            });
        }
        if edge.a == edge.b {
            return Err(GraphError::Loop(to));
        }
        self.slot_mut(from).rotation.retain(|x| *x != e);
        self.slot_mut(to).rotation.push(e);
        Ok(())
    }

    /// Copies `fragment` into this graph, identifying two fragment vertices
    /// with existing host vertices. Internal rotations are copied verbatim;
    /// the rotations at the two host vertices are not modified. When
    /// `reversed` is set every copied edge has its endpoints swapped.
    pub fn splice_fragment(
        &mut self,
        fragment: &MultiGraph,
        ends: [(VertexId, VertexId); 2],
        reversed: bool,
    ) -> Result<Spliced, GraphError> {
        for (_, host) in ends {
            if !self.has_vertex(host) {
                return Err(GraphError::UnknownVertex(host));
            }
        }
        let mut vertex_map = vec![VertexId(u32::MAX); fragment.vertex_bound()];
        for (frag, host) in ends {
            vertex_map[frag.index()] = host;
        }
        for v in fragment.vertices() {
            if ends.iter().all(|(frag, _)| *frag != v) {
                vertex_map[v.index()] = self.add_vertex(fragment.label(v));
            }
        }
        let mut edge_map = vec![EdgeId(u32::MAX); fragment.edge_bound()];
        for (e, edge) in fragment.edges() {
            let (a, b) = (vertex_map[edge.a.index()], vertex_map[edge.b.index()]);
            let (a, b) = if reversed { (b, a) } else { (a, b) };
            edge_map[e.index()] = self.push_detached(a, b, edge.directed)?;
        }
        for v in fragment.vertices() {
            if ends.iter().all(|(frag, _)| *frag != v) {
                let rot: SmallVec<[EdgeId; 4]> = fragment.rotation(v).iter().map(|e| edge_map[e.index()]).collect();
                self.slot_mut(vertex_map[v.index()]).rotation = rot;
            }
        }
        let blocks = ends.map(|(frag, _)| fragment.rotation(frag).iter().map(|e| edge_map[e.index()]).collect());
        Ok(Spliced {
            vertex_map,
            edge_map,
            blocks,
        })
    }

    /// Checks that every rotation lists exactly the incident edges, each once.
    pub fn validate_rotation(&self) -> Result<(), GraphError> {
        let mut seen = vec![0u8; self.edges.len()];
        for v in self.vertices() {
            for &e in self.rotation(v) {
                let edge = self.try_edge(e).ok_or_else(|| GraphError::MalformedRotation {
                    vertex: v,
                    detail: format!("{e} does not exist"),
                })?;
                if !edge.touches(v) {
                    return Err(GraphError::MalformedRotation {
                        vertex: v,
                        detail: format!("{e} is not incident"),
                    });
                }
                let bit = if edge.a == v { 1 } else { 2 };
                if seen[e.index()] & bit != 0 {
                    return Err(GraphError::MalformedRotation {
                        vertex: v,
                        detail: format!("{e} listed twice"),
                    });
                }
                seen[e.index()] |= bit;
            }
        }
        for (e, edge) in self.edges() {
            if seen[e.index()] != 3 {
                let missing = if seen[e.index()] & 1 == 0 { edge.a } else { edge.b };
                return Err(GraphError::MalformedRotation {
                    vertex: missing,
                    detail: format!("{e} missing from rotation"),
                });
            }
        }
        Ok(())
    }

    /// Number of connected components of the underlying undirected graph,
    /// computed from the edge list alone.
    pub fn component_count(&self) -> usize {
        let mut parent: Vec<u32> = (0..self.vertices.len() as u32).collect();
        fn find(parent: &mut [u32], mut x: u32) -> u32 {
            while parent[x as usize] != x {
                parent[x as usize] = parent[parent[x as usize] as usize];
                x = parent[x as usize];
            }
            x
        }
        let mut components = self.live_vertices;
        for (_, e) in self.edges() {
            let (ra, rb) = (find(&mut parent, e.a.0), find(&mut parent, e.b.0));
            if ra != rb {
                parent[ra as usize] = rb;
                components -= 1;
            }
        }
        components
    }

    /// Edge ids joining `u` and `v`, in id order.
    pub fn edges_between(&self, u: VertexId, v: VertexId) -> Vec<EdgeId> {
        let mut out: Vec<EdgeId> = self
            .incident(u)
            .filter(|(_, edge)| edge.other(u) == v)
            .map(|(e, _)| e)
            .collect();
        out.sort();
        out
    }
}

/// Structural equality on (vertices, labels, edges, rotation).
impl PartialEq for MultiGraph {
    fn eq(&self, other: &Self) -> bool {
        let norm = |g: &MultiGraph| {
            let vb = g.vertices.iter().rposition(Option::is_some).map_or(0, |i| i + 1);
            let eb = g.edges.iter().rposition(Option::is_some).map_or(0, |i| i + 1);
            (vb, eb)
        };
        let (va, ea) = norm(self);
        let (vb, eb) = norm(other);
        if va != vb || ea != eb {
            return false;
        }
        let vertices_eq = self.vertices[..va].iter().zip(&other.vertices[..vb]).all(|(x, y)| match (x, y) {
            (None, None) => true,
            (Some(x), Some(y)) => x.label == y.label && x.rotation == y.rotation,
            _ => false,
        });
        vertices_eq && self.edges[..ea] == other.edges[..eb]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> (MultiGraph, [VertexId; 3], [EdgeId; 3]) {
        let mut g = MultiGraph::new();
        let v = [g.add_vertex(None), g.add_vertex(None), g.add_vertex(None)];
        let e = [
            g.add_edge(v[0], v[1]).unwrap(),
            g.add_edge(v[1], v[2]).unwrap(),
            g.add_edge(v[2], v[0]).unwrap(),
        ];
        (g, v, e)
    }

    #[test]
    fn loops_are_rejected() {
        let mut g = MultiGraph::new();
        let v = g.add_vertex(None);
        assert_eq!(g.add_edge(v, v), Err(GraphError::Loop(v)));
    }

    #[test]
    fn parallel_edges_get_distinct_ids() {
        let mut g = MultiGraph::new();
        let a = g.add_vertex(None);
        let b = g.add_vertex(None);
        let e1 = g.add_edge(a, b).unwrap();
        let e2 = g.add_edge(a, b).unwrap();
        assert_ne!(e1, e2);
        assert_eq!(g.edges_between(a, b), vec![e1, e2]);
        assert_eq!(g.degree(a), 2);
        g.validate_rotation().unwrap();
    }

    #[test]
    fn remove_edge_keeps_ids_stable() {
        let (mut g, v, e) = triangle();
        g.remove_edge(e[1]).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert!(!g.has_edge(e[1]));
        assert_eq!(g.edge(e[2]).a, v[2]);
        assert_eq!(g.rotation(v[1]), &[e[0]]);
        let e3 = g.add_edge(v[1], v[2]).unwrap();
        assert_eq!(e3, EdgeId(3));
    }

    #[test]
    fn remove_vertex_requires_isolation() {
        let (mut g, v, _) = triangle();
        assert_eq!(g.remove_vertex(v[0]), Err(GraphError::VertexInUse(v[0], 2)));
    }

    #[test]
    fn replace_block_wraps_around() {
        let mut g = MultiGraph::new();
        let c = g.add_vertex(None);
        let leaves: Vec<_> = (0..4).map(|_| g.add_vertex(None)).collect();
        let e: Vec<_> = leaves.iter().map(|&l| g.add_edge(c, l).unwrap()).collect();
        // rotation [e0 e1 e2 e3]; block {e3, e0} is contiguous cyclically
        let x = g.add_vertex(None);
        let new = g.push_detached(c, x, false).unwrap();
        g.replace_block(c, &[e[3], e[0]], &[new]).unwrap();
        assert_eq!(g.rotation(c), &[new, e[1], e[2]]);
    }

    #[test]
    fn replace_block_rejects_gaps() {
        let mut g = MultiGraph::new();
        let c = g.add_vertex(None);
        let e: Vec<_> = (0..4)
            .map(|_| {
                let l = g.add_vertex(None);
                g.add_edge(c, l).unwrap()
            })
            .collect();
        assert!(g.replace_block(c, &[e[0], e[2]], &[]).is_err());
    }

    #[test]
    fn validate_rotation_catches_missing_and_foreign_edges() {
        let (mut g, v, e) = triangle();
        g.validate_rotation().unwrap();
        g.set_rotation(v[0], [e[0]]);
        assert!(g.validate_rotation().is_err());
        g.set_rotation(v[0], [e[0], e[2], e[1]]);
        assert!(g.validate_rotation().is_err());
    }

    #[test]
    fn reattach_moves_endpoint() {
        let (mut g, v, e) = triangle();
        let w = g.add_vertex(None);
        g.reattach(e[0], v[0], w).unwrap();
        assert_eq!(g.edge(e[0]).a, w);
        assert_eq!(g.rotation(v[0]), &[e[2]]);
        assert_eq!(g.rotation(w), &[e[0]]);
        g.validate_rotation().unwrap();
    }
}
