//! JSON and DOT serialisation.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use super::{Edge, EdgeId, GraphError, Label, MultiGraph, VertexId, VertexSlot};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Dot,
    Json,
}

impl FromStr for ExportFormat {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "dot" => Ok(ExportFormat::Dot),
            "json" => Ok(ExportFormat::Json),
            other => Err(GraphError::UnsupportedFormat(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexJson {
    pub id: VertexId,
    pub label: Option<Label>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeJson {
    pub id: EdgeId,
    pub a: VertexId,
    pub b: VertexId,
    pub directed: bool,
}

/// Wire form of a [`MultiGraph`]. Field and map key order are fixed so that
/// identical graphs serialise to identical bytes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphJson {
    pub vertices: Vec<VertexJson>,
    pub edges: Vec<EdgeJson>,
    pub rotation: BTreeMap<u32, Vec<EdgeId>>,
}

impl From<&MultiGraph> for GraphJson {
    fn from(g: &MultiGraph) -> Self {
        GraphJson {
            vertices: g.vertices().map(|id| VertexJson { id, label: g.label(id) }).collect(),
            edges: g
                .edges()
                .map(|(id, e)| EdgeJson {
                    id,
                    a: e.a,
                    b: e.b,
                    directed: e.directed,
                })
                .collect(),
            rotation: g.vertices().map(|v| (v.0, g.rotation(v).to_vec())).collect(),
        }
    }
}

impl TryFrom<GraphJson> for MultiGraph {
    type Error = GraphError;

    fn try_from(j: GraphJson) -> Result<Self, Self::Error> {
        let vbound = j.vertices.iter().map(|v| v.id.index() + 1).max().unwrap_or(0);
        let ebound = j.edges.iter().map(|e| e.id.index() + 1).max().unwrap_or(0);
        let mut g = MultiGraph {
            vertices: vec![None; vbound],
            edges: vec![None; ebound],
            live_vertices: 0,
            live_edges: 0,
        };
        for v in j.vertices {
            if g.vertices[v.id.index()].is_some() {
                return Err(GraphError::Json(format!("duplicate vertex id {}", v.id)));
            }
            g.vertices[v.id.index()] = Some(VertexSlot {
                label: v.label,
                rotation: SmallVec::new(),
            });
            g.live_vertices += 1;
        }
        for e in j.edges {
            for end in [e.a, e.b] {
                if !g.has_vertex(end) {
                    return Err(GraphError::UnknownVertex(end));
                }
            }
            if e.a == e.b {
                return Err(GraphError::Loop(e.a));
            }
            if g.edges[e.id.index()].is_some() {
                return Err(GraphError::Json(format!("duplicate edge id {}", e.id)));
            }
            g.edges[e.id.index()] = Some(Edge {
                a: e.a,
                b: e.b,
                directed: e.directed,
            });
            g.live_edges += 1;
        }
        for (v, rot) in j.rotation {
            let v = VertexId(v);
            if !g.has_vertex(v) {
                return Err(GraphError::UnknownVertex(v));
            }
            g.set_rotation(v, rot);
        }
        g.validate_rotation()?;
        Ok(g)
    }
}

pub fn import_json(bytes: &[u8]) -> Result<MultiGraph, GraphError> {
    let j: GraphJson = serde_json::from_slice(bytes).map_err(|e| GraphError::Json(e.to_string()))?;
    MultiGraph::try_from(j)
}

fn dot(g: &MultiGraph) -> String {
    let directed = g.is_directed();
    let mut out = String::new();
    let (kw, arrow) = if directed { ("digraph", "->") } else { ("graph", "--") };
    let _ = writeln!(out, "{kw} G {{");
    for v in g.vertices() {
        let text = g.label(v).map_or_else(|| v.to_string(), |l| l.to_string());
        let _ = write!(out, "  {} [label=\"{}\"", v.0, text);
        if let Some(Label::GridVertex { row, col }) = g.label(v) {
            let _ = write!(out, ", row={row}, col={col}");
        }
        out.push_str("];\n");
    }
    for (e, edge) in g.edges() {
        let _ = write!(out, "  {} {arrow} {} [id=\"{}\"", edge.a.0, edge.b.0, e);
        if directed && !edge.directed {
            out.push_str(", dir=none");
        }
        out.push_str("];\n");
    }
    out.push_str("}\n");
    out
}

pub fn export(g: &MultiGraph, format: ExportFormat) -> Vec<u8> {
    match format {
        ExportFormat::Dot => dot(g).into_bytes(),
        ExportFormat::Json => serde_json::to_vec(&GraphJson::from(g)).expect("graph json serialises"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_chain_json() {
        let mut g = MultiGraph::new();
        let a = g.add_vertex(None);
        let b = g.add_vertex(None);
        g.add_edge(a, b).unwrap();
        let j: serde_json::Value = serde_json::from_slice(&export(&g, ExportFormat::Json)).unwrap();
        assert_eq!(j["vertices"].as_array().unwrap().len(), 2);
        assert_eq!(j["edges"].as_array().unwrap().len(), 1);
        assert_eq!(j["rotation"]["0"], serde_json::json!([0]));
    }

    #[test]
    fn round_trip_keeps_tombstoned_ids() {
        let mut g = MultiGraph::new();
        let v: Vec<_> = (0..4).map(|_| g.add_vertex(Some(Label::GridVertex { row: 1, col: 1 }))).collect();
        let e0 = g.add_edge(v[0], v[1]).unwrap();
        g.add_arc(v[1], v[2]).unwrap();
        g.add_edge(v[2], v[0]).unwrap();
        g.remove_edge(e0).unwrap();
        g.remove_vertex(v[3]).unwrap();
        let back = import_json(&export(&g, ExportFormat::Json)).unwrap();
        assert_eq!(back, g);
        assert!(!back.has_edge(e0));
        assert!(back.edge(EdgeId(1)).directed);
    }

    #[test]
    fn dot_uses_arrows_for_arcs() {
        let mut g = MultiGraph::new();
        let a = g.add_vertex(Some(Label::GridVertex { row: 2, col: 3 }));
        let b = g.add_vertex(None);
        g.add_arc(a, b).unwrap();
        g.add_edge(a, b).unwrap();
        let s = String::from_utf8(export(&g, ExportFormat::Dot)).unwrap();
        assert!(s.starts_with("digraph G {"));
        assert!(s.contains("0 -> 1 [id=\"e0\"];"));
        assert!(s.contains("dir=none"));
        assert!(s.contains("row=2, col=3"));
    }

    #[test]
    fn unknown_format_is_rejected() {
        assert!(matches!("svg".parse::<ExportFormat>(), Err(GraphError::UnsupportedFormat(_))));
    }
}
