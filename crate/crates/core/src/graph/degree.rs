use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::MultiGraph;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeProfile {
    /// Degree value -> number of vertices with that degree.
    pub counts: BTreeMap<usize, usize>,
    /// Present only when the graph has at least one arc.
    pub max_in: Option<usize>,
    pub max_out: Option<usize>,
}

impl DegreeProfile {
    pub fn max_degree(&self) -> usize {
        self.counts.keys().next_back().copied().unwrap_or(0)
    }

    pub fn vertex_total(&self) -> usize {
        self.counts.values().sum()
    }
}

pub fn degree_profile(g: &MultiGraph) -> DegreeProfile {
    let mut counts = BTreeMap::new();
    for v in g.vertices() {
        *counts.entry(g.degree(v)).or_insert(0) += 1;
    }
    let (max_in, max_out) = if g.is_directed() {
        let mut indeg = vec![0usize; g.vertex_bound()];
        let mut outdeg = vec![0usize; g.vertex_bound()];
        for (_, e) in g.edges().filter(|(_, e)| e.directed) {
            outdeg[e.a.index()] += 1;
            indeg[e.b.index()] += 1;
        }
        (indeg.into_iter().max(), outdeg.into_iter().max())
    } else {
        (None, None)
    };
    DegreeProfile { counts, max_in, max_out }
}
