//! Degree reduction: subdivision rounds, rainbows in place of bundles, and
//! binary trees in place of the terminals.

use std::collections::hash_map::Entry;
use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{Connection, EdgeRole, LayoutMap, MseInstance, Origin, Part, ReductionError, Stage};
use crate::gadgets::{make_rainbow, GadgetRole};
use crate::graph::{min_proper_chain_length, EdgeId, Label, MultiGraph, Terminal, VertexId};

pub(crate) fn expect_stage(layout: &LayoutMap, expected: Stage) -> Result<(), ReductionError> {
    if layout.stage == expected {
        Ok(())
    } else {
        Err(ReductionError::WrongStage {
            expected,
            found: layout.stage,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RoundRecord {
    pub edges: usize,
    pub budget: u64,
    /// Length of the shortest maximal proper chain.
    pub min_chain: usize,
}

/// State before the first round followed by the state after each round.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SubdivisionLedger {
    /// `2 * M * c'`; rounds stop once the shortest chain exceeds it.
    pub threshold: u64,
    pub rounds: u32,
    pub records: Vec<RoundRecord>,
}

fn subdivide_once(g: &mut MultiGraph, layout: &mut LayoutMap) {
    let pairs = g.subdivide_in_place();
    layout.roles.resize(g.edge_bound(), None);
    layout.lineage.resize(g.edge_bound(), None);
    for (parent, half) in pairs {
        let role = layout.roles[parent.index()].expect("live edge has a role");
        let origin = layout.lineage[parent.index()].expect("live edge has an origin");
        let (first, second) = match role.part.position() {
            Some(p) => (role.part.at(2 * p), role.part.at(2 * p + 1)),
            None => (role.part, role.part),
        };
        layout.set(parent, EdgeRole { part: first, ..role }, origin);
        layout.set(half, EdgeRole { part: second, ..role }, origin);
    }
}

/// Subdivides every edge and doubles the budget until the shortest maximal
/// proper chain is longer than `2 * M * c'`, with `c'` the bundle count.
pub fn subdivision_rounds(
    mut inst: MseInstance,
    mut layout: LayoutMap,
) -> Result<(MseInstance, LayoutMap, SubdivisionLedger), ReductionError> {
    expect_stage(&layout, Stage::Base)?;
    let threshold = 2 * layout.params.big_m * layout.bundle_count();
    let record = |inst: &MseInstance| RoundRecord {
        edges: inst.graph.edge_count(),
        budget: inst.k,
        min_chain: min_proper_chain_length(&inst.graph).unwrap_or(0),
    };
    let mut records = vec![record(&inst)];
    while (records.last().unwrap().min_chain as u64) <= threshold {
        if records.last().unwrap().min_chain == 0 {
            return Err(ReductionError::Precondition {
                stage: Stage::Subdivided,
                detail: "graph has no proper chain to lengthen".into(),
            });
        }
        subdivide_once(&mut inst.graph, &mut layout);
        inst.k = inst.k.checked_mul(2).ok_or(ReductionError::Overflow)?;
        records.push(record(&inst));
    }
    let rounds = records.len() as u32 - 1;
    layout.rounds = rounds;
    layout.stage = Stage::Subdivided;
    Ok((inst, layout, SubdivisionLedger { threshold, rounds, records }))
}

/// Bundle chains of one connection, indexed by chain, each in position order.
fn bundle_chains(layout: &LayoutMap) -> HashMap<Connection, Vec<Vec<EdgeId>>> {
    let mut raw: HashMap<Connection, Vec<Vec<(u32, EdgeId)>>> = HashMap::new();
    for (i, r) in layout.roles.iter().enumerate() {
        if let Some(EdgeRole {
            connection,
            part: Part::BundleChain { chain, position },
        }) = *r
        {
            let chains = raw.entry(connection).or_default();
            if chains.len() <= chain as usize {
                chains.resize(chain as usize + 1, Vec::new());
            }
            chains[chain as usize].push((position, EdgeId(i as u32)));
        }
    }
    raw.into_iter()
        .map(|(c, chains)| {
            let chains = chains
                .into_iter()
                .map(|mut ch| {
                    ch.sort_unstable();
                    ch.into_iter().map(|(_, e)| e).collect()
                })
                .collect();
            (c, chains)
        })
        .collect()
}

/// Removes the listed edges and every endpoint other than `keep`.
pub(crate) fn remove_paths(g: &mut MultiGraph, layout: &mut LayoutMap, edges: &[EdgeId], keep: [VertexId; 2]) -> Result<(), ReductionError> {
    let mut interior = Vec::new();
    for &e in edges {
        let edge = g.remove_edge(e)?;
        layout.clear(e);
        interior.extend([edge.a, edge.b].into_iter().filter(|v| !keep.contains(v)));
    }
    interior.sort_unstable();
    interior.dedup();
    for v in interior {
        g.remove_vertex(v)?;
    }
    Ok(())
}

/// Replaces every `(a, d)`-bundle by an `(a, d + 2ac)`-rainbow attached at
/// its rail ends and raises the budget by `2ac`, where `a = M` and `c` is
/// the number of bundles.
pub fn replace_bundles_with_rainbows(mut inst: MseInstance, mut layout: LayoutMap) -> Result<(MseInstance, LayoutMap), ReductionError> {
    expect_stage(&layout, Stage::Subdivided)?;
    let a = layout.params.big_m;
    let c = layout.bundle_count();
    let extra = 2 * a * c;
    let b = min_proper_chain_length(&inst.graph).unwrap_or(0) as u64;
    if b <= extra {
        return Err(ReductionError::Precondition {
            stage: Stage::Rainbow,
            detail: format!("shortest proper chain has length {b}, need more than 2ac = {extra}"),
        });
    }
    let mut groups = bundle_chains(&layout);
    let mut cache = HashMap::new();
    let g = &mut inst.graph;
    for connection in layout.bundle_connections() {
        let chains = groups
            .remove(&connection)
            .ok_or_else(|| ReductionError::Layout(format!("no bundle recorded for {connection:?}")))?;
        if chains.len() as u64 != a || chains.iter().any(Vec::is_empty) {
            return Err(ReductionError::Layout(format!("{connection:?} is not a bundle of width {a}")));
        }
        let d = chains[0].len();
        if chains.iter().any(|ch| ch.len() != d) {
            return Err(ReductionError::Layout(format!("{connection:?} has chains of unequal length")));
        }
        if d as u64 <= inst.k {
            return Err(ReductionError::Precondition {
                stage: Stage::Rainbow,
                detail: format!("{connection:?} has chain length {d}, not above the budget {}", inst.k),
            });
        }
        let from = g.edge(chains[0][0]).a;
        let to = g.edge(*chains[0].last().unwrap()).b;
        let length = u32::try_from(d as u64 + extra).map_err(|_| ReductionError::Overflow)?;
        let rainbow = match cache.entry(length) {
            Entry::Occupied(e) => e.into_mut(),
            Entry::Vacant(e) => e.insert(make_rainbow(a as u32, length)?),
        };
        let rainbow = &*rainbow;
        let sp = g.splice_fragment(&rainbow.graph, [(rainbow.terminals.0, from), (rainbow.terminals.1, to)], false)?;
        let firsts: Vec<EdgeId> = chains.iter().map(|ch| ch[0]).collect();
        let lasts: Vec<EdgeId> = chains.iter().map(|ch| *ch.last().unwrap()).collect();
        g.replace_block(from, &firsts, &sp.blocks[0])?;
        g.replace_block(to, &lasts, &sp.blocks[1])?;

        let origins: Vec<Origin> = firsts.iter().map(|e| layout.lineage[e.index()].expect("live edge")).collect();
        let l = origins.len() as u32;
        for (fe, _) in rainbow.graph.edges() {
            let role = rainbow.role(fe);
            let origin = match role {
                GadgetRole::BundleChain { chain, .. } => origins[chain as usize],
                GadgetRole::Rail { side: 1, position } => origins[(l - 1 - position) as usize],
                GadgetRole::Rail { position, .. } => origins[position as usize],
                _ => unreachable!("rainbows hold rails and chains only"),
            };
            let part = Part::from_gadget(role);
            layout.set(sp.edge_map[fe.index()], EdgeRole { connection, part }, origin);
        }
        let old: Vec<EdgeId> = chains.into_iter().flatten().collect();
        remove_paths(g, &mut layout, &old, [from, to])?;
    }
    inst.k = inst.k.checked_add(extra).ok_or(ReductionError::Overflow)?;
    layout.stage = Stage::Rainbow;
    Ok((inst, layout))
}

/// Replaces `s` and `t` by complete binary trees with `(n + 1) / 2` leaves,
/// two former neighbours per leaf, and raises the budget by `2 * (n - 1)`.
/// The roots keep the ids of `s` and `t`.
pub fn replace_terminals_with_trees(mut inst: MseInstance, mut layout: LayoutMap) -> Result<(MseInstance, LayoutMap), ReductionError> {
    expect_stage(&layout, Stage::Rainbow)?;
    let n = layout.n();
    if !(n + 1).is_power_of_two() {
        return Err(ReductionError::NotPowerOfTwo(n + 1));
    }
    let leaves = n.div_ceil(2);
    for (end, root) in [(Terminal::S, inst.s), (Terminal::T, inst.t)] {
        let g = &mut inst.graph;
        let darts = g.rotation(root).to_vec();
        if darts.len() != (n + 1) as usize {
            return Err(ReductionError::Precondition {
                stage: Stage::Tree,
                detail: format!("{end:?} has degree {}, expected n + 1 = {}", darts.len(), n + 1),
            });
        }
        // Heap order: node 1 is the root, node h has children 2h and 2h + 1.
        let mut nodes = vec![root; 2 * leaves as usize];
        for h in 2..2 * leaves {
            let depth = 31 - h.leading_zeros();
            nodes[h as usize] = g.add_vertex(Some(Label::TreeNode {
                depth,
                index: h - (1 << depth),
            }));
        }
        let mut up = vec![None; 2 * leaves as usize];
        for h in 2..2 * leaves {
            let (parent, child) = (nodes[(h / 2) as usize], nodes[h as usize]);
            // s-tree edges point away from the root, t-tree edges towards it.
            let e = match end {
                Terminal::S => g.push_detached(parent, child, false)?,
                Terminal::T => g.push_detached(child, parent, false)?,
            };
            layout.set(e, EdgeRole { connection: Connection::Tree { end }, part: Part::Tree }, Origin::Terminal(end));
            layout.tree_edges.push(e);
            up[h as usize] = Some(e);
        }
        for j in 0..leaves {
            let leaf = nodes[(leaves + j) as usize];
            if leaf != root {
                for &d in &darts[2 * j as usize..2 * j as usize + 2] {
                    g.reattach(d, root, leaf)?;
                }
            }
        }
        for h in 1..2 * leaves {
            let below: Vec<EdgeId> = if h >= leaves {
                let j = (h - leaves) as usize;
                darts[2 * j..2 * j + 2].to_vec()
            } else {
                vec![up[2 * h as usize].unwrap(), up[2 * h as usize + 1].unwrap()]
            };
            g.set_rotation(nodes[h as usize], below.into_iter().chain(up[h as usize]));
        }
    }
    inst.k = inst.k.checked_add(2 * (n as u64 - 1)).ok_or(ReductionError::Overflow)?;
    layout.stage = Stage::Tree;
    Ok((inst, layout))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{degree_profile, maximal_proper_chains, verify_planar_embedding};
    use crate::reduction::{build_base, VcInstance};

    fn base(n: u32, edges: &[(u32, u32)], k: u32) -> (MseInstance, LayoutMap) {
        build_base(&VcInstance::new(n, edges.iter().copied(), k).unwrap()).unwrap()
    }

    #[test]
    fn six_rounds_for_single_edge() {
        let (inst, layout) = base(2, &[(1, 2)], 1);
        let (inst, layout, ledger) = subdivision_rounds(inst, layout).unwrap();
        assert_eq!(ledger.threshold, 48);
        assert_eq!(ledger.rounds, 6);
        assert_eq!(inst.k, 192);
        assert_eq!(ledger.records.last().unwrap().min_chain, 64);
        for w in ledger.records.windows(2) {
            assert_eq!(w[1].edges, 2 * w[0].edges);
            assert_eq!(w[1].budget, 2 * w[0].budget);
            assert_eq!(w[1].min_chain, 2 * w[0].min_chain);
        }
        layout.check_total(&inst.graph).unwrap();
        assert!(verify_planar_embedding(&inst.graph).unwrap().is_certified());
    }

    #[test]
    fn rainbows_require_long_chains() {
        let (inst, mut layout) = base(2, &[(1, 2)], 1);
        layout.stage = Stage::Subdivided;
        let err = replace_bundles_with_rainbows(inst, layout).unwrap_err();
        assert!(matches!(err, ReductionError::Precondition { stage: Stage::Rainbow, .. }), "{err}");
    }

    #[test]
    fn wrong_stage_is_rejected() {
        let (inst, layout) = base(2, &[(1, 2)], 1);
        let err = replace_terminals_with_trees(inst, layout).unwrap_err();
        assert_eq!(err, ReductionError::WrongStage { expected: Stage::Rainbow, found: Stage::Base });
    }

    #[test]
    fn rainbow_and_tree_stages() {
        let (inst, layout) = base(3, &[(1, 2), (2, 3)], 1);
        let (inst, layout, _) = subdivision_rounds(inst, layout).unwrap();
        let before = inst.k;
        let (inst, layout) = replace_bundles_with_rainbows(inst, layout).unwrap();
        let c = layout.bundle_count();
        assert_eq!(inst.k, before + 2 * layout.params.big_m * c);
        layout.check_total(&inst.graph).unwrap();
        assert!(verify_planar_embedding(&inst.graph).unwrap().is_certified());
        let big: Vec<VertexId> = inst.graph.vertices().filter(|&v| inst.graph.degree(v) > 4).collect();
        assert!(big.iter().all(|v| [inst.s, inst.t].contains(v)));
        assert_eq!(inst.graph.degree(inst.s), 4);

        let (inst, layout) = replace_terminals_with_trees(inst, layout).unwrap();
        assert_eq!(inst.k, before + 2 * layout.params.big_m * c + 4);
        assert_eq!(layout.tree_edges.len(), 4);
        layout.check_total(&inst.graph).unwrap();
        assert!(verify_planar_embedding(&inst.graph).unwrap().is_certified());
        assert_eq!(degree_profile(&inst.graph).max_degree(), 4);
        assert_eq!(inst.graph.degree(inst.s), 2);
        assert!(maximal_proper_chains(&inst.graph).cycles.is_empty());
    }

    #[test]
    fn trees_need_padding() {
        let (inst, layout) = base(4, &[(1, 2)], 1);
        let (inst, layout, _) = subdivision_rounds(inst, layout).unwrap();
        let (inst, layout) = replace_bundles_with_rainbows(inst, layout).unwrap();
        assert_eq!(replace_terminals_with_trees(inst, layout).unwrap_err(), ReductionError::NotPowerOfTwo(5));
    }
}
