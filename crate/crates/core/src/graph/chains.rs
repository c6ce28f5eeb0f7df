use super::{EdgeId, MultiGraph, VertexId};

/// A path whose inner vertices all have degree two and whose endpoints do not.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProperChain {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
}

impl ProperChain {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

#[derive(Debug, Clone, Default)]
pub struct ChainDecomposition {
    pub chains: Vec<ProperChain>,
    /// Components made only of degree-2 vertices. They have no endpoint of
    /// degree other than two and so are not chains.
    pub cycles: Vec<Vec<EdgeId>>,
}

impl ChainDecomposition {
    pub fn min_len(&self) -> Option<usize> {
        self.chains.iter().map(ProperChain::len).min()
    }
}

/// Walks every maximal proper chain, calling `emit` with its vertices and
/// edges. Returns the edge lists of leftover all-degree-2 cycles.
fn walk_chains(g: &MultiGraph, record_path: bool, mut emit: impl FnMut(&[VertexId], &[EdgeId], usize)) -> Vec<Vec<EdgeId>> {
    let mut used = vec![false; g.edge_bound()];
    let mut vs = Vec::new();
    let mut es = Vec::new();
    for u in g.vertices() {
        if g.degree(u) == 2 {
            continue;
        }
        for &first in g.rotation(u) {
            if used[first.index()] {
                continue;
            }
            vs.clear();
            es.clear();
            let mut len = 0;
            let mut cur = u;
            let mut e = first;
            if record_path {
                vs.push(u);
            }
            loop {
                used[e.index()] = true;
                len += 1;
                let next = g.edge(e).other(cur);
                if record_path {
                    es.push(e);
                    vs.push(next);
                }
                if g.degree(next) != 2 {
                    break;
                }
                let rot = g.rotation(next);
                e = if rot[0] == e { rot[1] } else { rot[0] };
                cur = next;
            }
            emit(&vs, &es, len);
        }
    }
    let mut cycles = Vec::new();
    for (e, _) in g.edges() {
        if used[e.index()] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut cur = g.edge(e).a;
        let mut edge = e;
        while !used[edge.index()] {
            used[edge.index()] = true;
            cycle.push(edge);
            cur = g.edge(edge).other(cur);
            let rot = g.rotation(cur);
            edge = if rot[0] == edge { rot[1] } else { rot[0] };
        }
        cycles.push(cycle);
    }
    cycles
}

/// Every maximal proper chain of `g`. An edge joining two vertices of degree
/// other than two comes back as a chain of length one.
pub fn maximal_proper_chains(g: &MultiGraph) -> ChainDecomposition {
    let mut chains = Vec::new();
    let cycles = walk_chains(g, true, |vs, es, _| {
        chains.push(ProperChain {
            vertices: vs.to_vec(),
            edges: es.to_vec(),
        })
    });
    ChainDecomposition { chains, cycles }
}

/// Length of the shortest maximal proper chain, without materialising the
/// chains. `None` when the graph has no chain.
pub fn min_proper_chain_length(g: &MultiGraph) -> Option<usize> {
    let mut best: Option<usize> = None;
    walk_chains(g, false, |_, _, len| {
        best = Some(best.map_or(len, |b| b.min(len)));
    });
    best
}
