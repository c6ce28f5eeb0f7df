use super::{EdgeId, InternalRole, Label, MultiGraph};

impl MultiGraph {
    /// Subdivides every edge once. Edge `e = (a, b)` keeps its id as `(a, x)`
    /// and a fresh edge `(x, b)` takes its place in the rotation at `b`.
    /// Directions carry over to both halves. Returns `(parent, new half)`
    /// pairs in parent id order.
    pub fn subdivide_in_place(&mut self) -> Vec<(EdgeId, EdgeId)> {
        let parents: Vec<EdgeId> = self.edges().map(|(e, _)| e).collect();
        let mut pairs = Vec::with_capacity(parents.len());
        self.vertices.reserve(parents.len());
        self.edges.reserve(parents.len());
        for e in parents {
            let edge = *self.edge(e);
            let mid = self.add_vertex(Some(Label::GadgetInternal {
                role: InternalRole::Subdivision,
                ordinal: e.0,
            }));
            let half = self
                .push_detached(mid, edge.b, edge.directed)
                .expect("endpoints exist and differ");
            self.edges[e.index()].as_mut().expect("live edge").b = mid;
            for slot in self.slot_mut(edge.b).rotation.iter_mut() {
                if *slot == e {
                    *slot = half;
                }
            }
            self.slot_mut(mid).rotation.extend([e, half]);
            pairs.push((e, half));
        }
        pairs
    }
}

/// Replaces every edge by a 2-chain through a fresh degree-2 vertex,
/// preserving the embedding.
pub fn subdivide_all_edges(g: &MultiGraph) -> MultiGraph {
    let mut out = g.clone();
    out.subdivide_in_place();
    out
}
