use serde::{Deserialize, Serialize};

use super::{LayoutMap, ReductionError, Stage};
use crate::graph::{GraphError, GraphJson, MultiGraph, VertexId};

/// A Minimum Shared Edges instance: find `p` simple `s`-`t` routes such that
/// at most `k` edges lie on two or more of them.
#[derive(Debug, Clone, PartialEq)]
pub struct MseInstance {
    pub graph: MultiGraph,
    pub s: VertexId,
    pub t: VertexId,
    pub p: u64,
    pub k: u64,
}

impl MseInstance {
    pub fn new(graph: MultiGraph, s: VertexId, t: VertexId, p: u64, k: u64) -> Result<Self, GraphError> {
        for v in [s, t] {
            if !graph.has_vertex(v) {
                return Err(GraphError::UnknownVertex(v));
            }
        }
        if s == t {
            return Err(GraphError::Json("s and t must differ".into()));
        }
        if p == 0 {
            return Err(GraphError::Json("p must be at least 1".into()));
        }
        Ok(Self { graph, s, t, p, k })
    }

    pub fn with_budget(&self, k: u64) -> Self {
        Self { k, ..self.clone() }
    }

    pub fn to_file(&self, stage: Option<Stage>, layout: Option<&LayoutMap>) -> InstanceFile {
        InstanceFile {
            s: self.s,
            t: self.t,
            p: self.p,
            k: self.k,
            stage,
            layout_digest: layout.map(LayoutMap::digest),
            graph: GraphJson::from(&self.graph),
        }
    }

    pub fn to_json(&self, stage: Option<Stage>, layout: Option<&LayoutMap>) -> Vec<u8> {
        serde_json::to_vec(&self.to_file(stage, layout)).expect("instance serialises")
    }

    pub fn from_json(bytes: &[u8]) -> Result<(Self, InstanceFile), ReductionError> {
        let file: InstanceFile = serde_json::from_slice(bytes).map_err(|e| GraphError::Json(e.to_string()))?;
        let inst = file.clone().into_instance()?;
        Ok((inst, file))
    }
}

/// On-disk form: a header followed by the graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct InstanceFile {
    pub s: VertexId,
    pub t: VertexId,
    pub p: u64,
    pub k: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stage: Option<Stage>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layout_digest: Option<String>,
    pub graph: GraphJson,
}

impl InstanceFile {
    pub fn into_instance(self) -> Result<MseInstance, ReductionError> {
        let graph = MultiGraph::try_from(self.graph)?;
        Ok(MseInstance::new(graph, self.s, self.t, self.p, self.k)?)
    }

    /// Confirms that `layout` is the one this instance was written with.
    pub fn check_layout(&self, layout: &LayoutMap) -> Result<(), ReductionError> {
        match &self.layout_digest {
            Some(d) if *d == layout.digest() => Ok(()),
            Some(_) => Err(ReductionError::Layout("layout digest does not match the instance header".into())),
            None => Err(ReductionError::Layout("instance header carries no layout digest".into())),
        }
    }
}
