//! Face tracing on a rotation system and the Euler-formula certificate.

use serde::{Deserialize, Serialize};

use super::{EdgeId, GraphError, MultiGraph, VertexId};

/// One side of an edge: `edge` traversed away from `tail`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dart {
    pub edge: EdgeId,
    pub tail: VertexId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum PlanarVerdict {
    Certified {
        vertices: usize,
        edges: usize,
        faces: usize,
    },
    EulerViolation {
        vertices: usize,
        edges: usize,
        faces: usize,
        /// Orientable genus of the traced embedding, (2 - V + E - F) / 2.
        genus: usize,
    },
}

impl PlanarVerdict {
    pub fn is_certified(&self) -> bool {
        matches!(self, PlanarVerdict::Certified { .. })
    }

    pub fn faces(&self) -> usize {
        match *self {
            PlanarVerdict::Certified { faces, .. } | PlanarVerdict::EulerViolation { faces, .. } => faces,
        }
    }
}

/// Per-edge position of the edge inside the rotation at its `a` and `b` end.
struct RotationIndex {
    at_a: Vec<u32>,
    at_b: Vec<u32>,
}

impl RotationIndex {
    fn build(g: &MultiGraph) -> Result<Self, GraphError> {
        g.validate_rotation()?;
        let mut at_a = vec![u32::MAX; g.edge_bound()];
        let mut at_b = vec![u32::MAX; g.edge_bound()];
        for v in g.vertices() {
            for (i, &e) in g.rotation(v).iter().enumerate() {
                if g.edge(e).a == v {
                    at_a[e.index()] = i as u32;
                } else {
                    at_b[e.index()] = i as u32;
                }
            }
        }
        Ok(Self { at_a, at_b })
    }

    /// Dart index: 2e for a->b, 2e+1 for b->a.
    #[inline]
    fn next(&self, g: &MultiGraph, dart: usize) -> usize {
        let e = EdgeId((dart / 2) as u32);
        let edge = g.edge(e);
        let (head, pos) = if dart.is_multiple_of(2) {
            (edge.b, self.at_b[e.index()])
        } else {
            (edge.a, self.at_a[e.index()])
        };
        let rot = g.rotation(head);
        let succ = rot[(pos as usize + 1) % rot.len()];
        if g.edge(succ).a == head {
            2 * succ.index()
        } else {
            2 * succ.index() + 1
        }
    }
}

fn dart_of(g: &MultiGraph, d: usize) -> Dart {
    let edge = EdgeId((d / 2) as u32);
    let e = g.edge(edge);
    Dart {
        edge,
        tail: if d.is_multiple_of(2) { e.a } else { e.b },
    }
}

fn faces_in_order(g: &MultiGraph, order: impl Iterator<Item = usize>, mut visit: impl FnMut(usize, usize)) -> Result<usize, GraphError> {
    let index = RotationIndex::build(g)?;
    let mut used = vec![false; 2 * g.edge_bound()];
    let mut faces = 0;
    for start in order {
        if used[start] || !g.has_edge(EdgeId((start / 2) as u32)) {
            continue;
        }
        let mut d = start;
        loop {
            if used[d] {
                // Only reachable with an inconsistent index; validate_rotation rules it out.
                return Err(GraphError::MalformedRotation {
                    vertex: dart_of(g, d).tail,
                    detail: "face walk re-entered a consumed dart".into(),
                });
            }
            used[d] = true;
            visit(faces, d);
            d = index.next(g, d);
            if d == start {
                break;
            }
        }
        faces += 1;
    }
    Ok(faces)
}

/// Counts faces of the embedding given by the rotation system. Every dart is
/// consumed by exactly one face walk.
pub fn count_faces(g: &MultiGraph) -> Result<usize, GraphError> {
    faces_in_order(g, 0..2 * g.edge_bound(), |_, _| {})
}

/// Same as [`count_faces`] but starts face walks in the given dart order.
#[cfg(test)]
pub(crate) fn count_faces_from(g: &MultiGraph, order: impl Iterator<Item = usize>) -> Result<usize, GraphError> {
    faces_in_order(g, order, |_, _| {})
}

/// Lists every face as its cyclic dart sequence.
pub fn trace_faces(g: &MultiGraph) -> Result<Vec<Vec<Dart>>, GraphError> {
    let mut faces: Vec<Vec<Dart>> = Vec::new();
    faces_in_order(g, 0..2 * g.edge_bound(), |f, d| {
        if faces.len() == f {
            faces.push(Vec::new());
        }
        faces[f].push(dart_of(g, d));
    })?;
    Ok(faces)
}

/// Certifies planarity of the embedding by face tracing plus V - E + F = 2.
///
/// Directions are ignored; the check runs on the underlying undirected
/// multigraph.
pub fn verify_planar_embedding(g: &MultiGraph) -> Result<PlanarVerdict, GraphError> {
    let vertices = g.vertex_count();
    if vertices == 0 {
        return Err(GraphError::Empty);
    }
    g.validate_rotation()?;
    let components = g.component_count();
    if components != 1 {
        return Err(GraphError::Disconnected { components });
    }
    let edges = g.edge_count();
    let faces = if edges == 0 { 1 } else { count_faces(g)? };
    let euler = vertices as i64 - edges as i64 + faces as i64;
    Ok(if euler == 2 {
        PlanarVerdict::Certified { vertices, edges, faces }
    } else {
        PlanarVerdict::EulerViolation {
            vertices,
            edges,
            faces,
            genus: ((2 - euler) / 2) as usize,
        }
    })
}
