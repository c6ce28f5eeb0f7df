use super::{compute_params, Connection, EdgeRole, HorizontalKind, LayoutMap, MseInstance, Origin, Part, ReductionError, Stage, VcInstance};
use crate::gadgets::{make_chain, make_feather, GadgetHandle, GadgetRole};
use crate::graph::{EdgeId, InternalRole, Label, MultiGraph, Spliced, Terminal, VertexId};

/// Darts at a grid vertex, grouped by compass slot. Concatenated in field
/// order they give the counter-clockwise rotation.
#[derive(Debug, Clone, Default)]
struct Slots {
    east: Vec<EdgeId>,
    north: Vec<EdgeId>,
    /// Validation chain from s, only at (1, 1).
    north_west: Vec<EdgeId>,
    west: Vec<EdgeId>,
    south: Vec<EdgeId>,
    /// Validation chain to t, only at (n, m + 1).
    south_east: Vec<EdgeId>,
}

impl Slots {
    fn rotation(&self) -> impl Iterator<Item = EdgeId> + '_ {
        [&self.east, &self.north, &self.north_west, &self.west, &self.south, &self.south_east]
            .into_iter()
            .flatten()
            .copied()
    }
}

/// Shape of a feather fragment, used to renumber parts when it is spliced
/// in the opposite direction.
struct FeatherShape {
    shaft: u32,
    chains: u32,
    length: u32,
}

impl FeatherShape {
    fn of(h: &GadgetHandle) -> Self {
        let mut shape = FeatherShape { shaft: 0, chains: 0, length: 0 };
        for r in &h.roles {
            match *r {
                GadgetRole::Shaft { .. } => shape.shaft += 1,
                GadgetRole::BundleChain { chain, position } => {
                    shape.chains = shape.chains.max(chain + 1);
                    shape.length = shape.length.max(position + 1);
                }
                _ => {}
            }
        }
        shape
    }

    fn reverse(&self, part: Part) -> Part {
        match part {
            Part::Shaft { position } => Part::Shaft {
                position: self.shaft - 1 - position,
            },
            Part::BundleChain { chain, position } => Part::BundleChain {
                chain: self.chains - 1 - chain,
                position: self.length - 1 - position,
            },
            other => other,
        }
    }
}

fn place(
    g: &mut MultiGraph,
    layout: &mut LayoutMap,
    h: &GadgetHandle,
    hosts: (VertexId, VertexId),
    reversed: bool,
    connection: Connection,
) -> Result<Spliced, ReductionError> {
    let spliced = g.splice_fragment(&h.graph, [(h.terminals.0, hosts.0), (h.terminals.1, hosts.1)], reversed)?;
    let shape = reversed.then(|| FeatherShape::of(h));
    for (fe, _) in h.graph.edges() {
        let mut part = Part::from_gadget(h.role(fe));
        if let Some(shape) = &shape {
            part = shape.reverse(part);
        }
        let e = spliced.edge_map[fe.index()];
        layout.set(e, EdgeRole { connection, part }, Origin::Edge(e));
    }
    Ok(spliced)
}

fn hub(h: &GadgetHandle, spliced: &Spliced) -> VertexId {
    let v = h
        .graph
        .vertices()
        .find(|&v| matches!(h.graph.label(v), Some(Label::GadgetInternal { role: InternalRole::Hub, .. })))
        .expect("feather has a hub");
    spliced.vertex_map[v.index()]
}

fn narrow(x: u64) -> Result<u32, ReductionError> {
    u32::try_from(x).map_err(|_| ReductionError::Overflow)
}

/// Builds the base instance: the `n x (m+1)` grid with feathers on the
/// horizontal edges of non-incident (row, column) pairs, `(k'+1)`-chains on
/// vertical edges, s- and t-feathers on the outer columns, and the two
/// validation chains at `(1, 1)` and `(n, m + 1)`.
pub fn build_base(vc: &VcInstance) -> Result<(MseInstance, LayoutMap), ReductionError> {
    let params = compute_params(vc)?;
    let (n, m) = (vc.n, vc.m());
    let cols = m + 1;
    let width = narrow(params.big_m)?;
    let long = narrow(params.k_prime + 1)?;
    let cube = m.checked_pow(3).ok_or(ReductionError::Overflow)?;

    let s_feather = make_feather(cube, width, long)?;
    let h_feather = make_feather(1, width, long)?;
    let t_feather = h_feather.clone();
    let chain = make_chain(long)?;

    let mut g = MultiGraph::new();
    let s = g.add_vertex(Some(Label::Terminal { which: Terminal::S }));
    let grid: Vec<VertexId> = (1..=n)
        .flat_map(|row| (1..=cols).map(move |col| (row, col)))
        .map(|(row, col)| g.add_vertex(Some(Label::GridVertex { row, col })))
        .collect();
    let t = g.add_vertex(Some(Label::Terminal { which: Terminal::T }));
    let at = |row: u32, col: u32| ((row - 1) * cols + (col - 1)) as usize;

    let mut layout = LayoutMap {
        vc: vc.clone(),
        params,
        stage: Stage::Base,
        rounds: 0,
        s,
        t,
        grid: grid.clone(),
        horizontal: Vec::with_capacity((n * m) as usize),
        s_hubs: Vec::with_capacity(n as usize),
        t_hubs: Vec::with_capacity(n as usize),
        tree_edges: Vec::new(),
        roles: Vec::new(),
        lineage: Vec::new(),
    };
    let mut slots = vec![Slots::default(); grid.len()];
    let mut s_darts = Vec::with_capacity(n as usize);
    let mut t_darts = Vec::with_capacity(n as usize);

    for row in 1..=n {
        let sp = place(&mut g, &mut layout, &s_feather, (s, grid[at(row, 1)]), false, Connection::SFeather { row })?;
        layout.s_hubs.push(hub(&s_feather, &sp));
        let [shaft, bundle] = sp.blocks;
        s_darts.push(shaft);
        slots[at(row, 1)].west = bundle;

        for col in 1..=m {
            let (left, right) = (grid[at(row, col)], grid[at(row, col + 1)]);
            let connection = Connection::Horizontal { row, col };
            if vc.incident(row, col) {
                let e = g.push_detached(left, right, false)?;
                layout.set(e, EdgeRole { connection, part: Part::Chain { position: 0 } }, Origin::Edge(e));
                layout.horizontal.push(HorizontalKind::Plain);
                slots[at(row, col)].east = vec![e];
                slots[at(row, col + 1)].west = vec![e];
            } else {
                let sp = place(&mut g, &mut layout, &h_feather, (left, right), false, connection)?;
                layout.horizontal.push(HorizontalKind::Feather { hub: hub(&h_feather, &sp) });
                let [shaft, bundle] = sp.blocks;
                slots[at(row, col)].east = shaft;
                slots[at(row, col + 1)].west = bundle;
            }
        }

        // Spliced backwards so that every edge points from the grid to t.
        let sp = place(&mut g, &mut layout, &t_feather, (t, grid[at(row, cols)]), true, Connection::TFeather { row })?;
        layout.t_hubs.push(hub(&t_feather, &sp));
        let [shaft, bundle] = sp.blocks;
        t_darts.push(shaft);
        slots[at(row, cols)].east = bundle;
    }

    for row in 1..n {
        for col in 1..=cols {
            let hosts = (grid[at(row, col)], grid[at(row + 1, col)]);
            let sp = place(&mut g, &mut layout, &chain, hosts, false, Connection::Vertical { row, col })?;
            let [upper, lower] = sp.blocks;
            slots[at(row, col)].south = upper;
            slots[at(row + 1, col)].north = lower;
        }
    }

    let sp = place(&mut g, &mut layout, &chain, (s, grid[at(1, 1)]), false, Connection::Validation { end: Terminal::S })?;
    let [s_validation, corner] = sp.blocks;
    slots[at(1, 1)].north_west = corner;
    let sp = place(&mut g, &mut layout, &chain, (grid[at(n, cols)], t), false, Connection::Validation { end: Terminal::T })?;
    let [corner, t_validation] = sp.blocks;
    slots[at(n, cols)].south_east = corner;

    for (v, sl) in grid.iter().zip(&slots) {
        g.set_rotation(*v, sl.rotation());
    }
    // Rows are stacked top to bottom, so counter-clockwise at s runs from row
    // n up to row 1 and on to the validation chain; at t it runs downward.
    g.set_rotation(s, s_darts.iter().rev().flatten().chain(&s_validation).copied());
    g.set_rotation(t, t_darts.iter().flatten().chain(&t_validation).copied());
    g.validate_rotation()?;

    let inst = MseInstance::new(g, s, t, params.p, params.k_prime)?;
    Ok((inst, layout))
}
