use std::collections::hash_map::Entry;
use std::collections::HashMap;

use super::stages::{expect_stage, remove_paths};
use super::{Connection, EdgeRole, LayoutMap, MseInstance, Part, ReductionError, Stage};
use crate::gadgets::make_crossing;
use crate::graph::EdgeId;

/// Orients every edge along its stored direction (left to right, away from
/// the s-root, towards the t-root) and replaces each vertical connection by
/// the crossing gadget whose chain keeps the connection's current length.
pub fn make_directed(mut inst: MseInstance, mut layout: LayoutMap) -> Result<(MseInstance, LayoutMap), ReductionError> {
    expect_stage(&layout, Stage::Tree)?;
    let mut verticals: HashMap<Connection, Vec<(u32, EdgeId)>> = HashMap::new();
    let live: Vec<EdgeId> = inst.graph.edges().map(|(e, _)| e).collect();
    for e in live {
        let role = layout.role(e).expect("live edge has a role");
        if role.connection.is_vertical() {
            let position = role.part.position().expect("vertical connections are chains");
            verticals.entry(role.connection).or_default().push((position, e));
        } else {
            inst.graph.set_directed(e, true);
        }
    }
    let mut cache = HashMap::new();
    let g = &mut inst.graph;
    for row in 1..layout.n() {
        for col in 1..=layout.m() + 1 {
            let connection = Connection::Vertical { row, col };
            let mut chain = verticals
                .remove(&connection)
                .ok_or_else(|| ReductionError::Layout(format!("missing vertical connection ({row}, {col})")))?;
            chain.sort_unstable();
            let chain: Vec<EdgeId> = chain.into_iter().map(|(_, e)| e).collect();
            let (first, last) = (chain[0], *chain.last().unwrap());
            let (upper, lower) = (g.edge(first).a, g.edge(last).b);
            let len = chain.len() as u32;
            let gadget = match cache.entry(len) {
                Entry::Occupied(e) => e.into_mut(),
                Entry::Vacant(e) => e.insert(make_crossing(len)?),
            };
            let gadget = &*gadget;
            let sp = g.splice_fragment(&gadget.graph, [(gadget.terminals.0, upper), (gadget.terminals.1, lower)], false)?;
            g.replace_block(upper, &[first], &sp.blocks[0])?;
            g.replace_block(lower, &[last], &sp.blocks[1])?;
            let origin = layout.lineage[first.index()].expect("live edge");
            for (fe, _) in gadget.graph.edges() {
                let part = Part::from_gadget(gadget.role(fe));
                layout.set(sp.edge_map[fe.index()], EdgeRole { connection, part }, origin);
            }
            remove_paths(g, &mut layout, &chain, [upper, lower])?;
        }
    }
    layout.stage = Stage::Directed;
    Ok((inst, layout))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{degree_profile, verify_planar_embedding};
    use crate::reduction::{full_pipeline, VcInstance};

    #[test]
    fn directed_degrees_are_at_most_three() {
        let vc = VcInstance::new(3, [(1, 2), (2, 3)], 1).unwrap();
        let (inst, layout, _) = full_pipeline(&vc).unwrap();
        let (inst, layout) = make_directed(inst, layout).unwrap();
        layout.check_total(&inst.graph).unwrap();
        assert!(verify_planar_embedding(&inst.graph).unwrap().is_certified());
        let p = degree_profile(&inst.graph);
        assert!(p.max_in.unwrap() <= 3 && p.max_out.unwrap() <= 3, "{p:?}");
        assert!(inst.graph.edges().all(|(_, e)| e.directed));
        let s_out = inst.graph.incident(inst.s).filter(|(_, e)| e.a == inst.s).count();
        assert_eq!(s_out, inst.graph.degree(inst.s));
        let t_in = inst.graph.incident(inst.t).filter(|(_, e)| e.b == inst.t).count();
        assert_eq!(t_in, inst.graph.degree(inst.t));
    }

    #[test]
    fn directed_needs_tree_stage() {
        let vc = VcInstance::new(3, [(1, 2)], 1).unwrap();
        let (inst, layout) = crate::reduction::build_base(&vc).unwrap();
        assert!(matches!(make_directed(inst, layout), Err(ReductionError::WrongStage { .. })));
    }
}
