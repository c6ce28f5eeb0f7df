//! Building blocks of the reduction: chains, bundles, feathers, rainbows,
//! grids and the directed crossing gadget.
//!
//! Every constructor returns a [`GadgetHandle`] holding a standalone planar
//! fragment with two designated terminals. The rotation stored at each
//! terminal is a *linear* counter-clockwise order that starts right after
//! the corner of the outer face. Splicing relies on this: inserting the
//! block as-is in place of a single host dart keeps the embedding planar.
//!
//! Edge orientation follows the gadget's natural direction of travel from
//! the first terminal to the second. The reduction uses this orientation
//! verbatim when it later directs the graph.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{EdgeId, InternalRole, Label, MultiGraph, VertexId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GadgetError {
    #[error("{gadget}: parameter {name} must be at least 1")]
    ZeroParameter { gadget: &'static str, name: &'static str },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Upper,
    Lower,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "role", rename_all = "snake_case")]
pub enum GadgetRole {
    Chain { position: u32 },
    Shaft { position: u32 },
    BundleChain { chain: u32, position: u32 },
    /// Rail 1 leaves the first terminal, rail 2 arrives at the second.
    Rail { side: u8, position: u32 },
    GridHorizontal { row: u32, col: u32 },
    GridVertical { row: u32, col: u32 },
    CrossingEntry { from: Side },
    CrossingExit { to: Side },
    CrossingChain { position: u32 },
}

#[derive(Debug, Clone)]
pub struct GadgetHandle {
    pub graph: MultiGraph,
    /// For a feather: (free end of the shaft, far endpoint of the bundle).
    pub terminals: (VertexId, VertexId),
    /// Indexed by edge id; every edge has exactly one role.
    pub roles: Vec<GadgetRole>,
}

impl GadgetHandle {
    pub fn role(&self, e: EdgeId) -> GadgetRole {
        self.roles[e.index()]
    }
}

fn check(gadget: &'static str, params: &[(&'static str, u32)]) -> Result<(), GadgetError> {
    match params.iter().find(|(_, v)| *v == 0) {
        Some((name, _)) => Err(GadgetError::ZeroParameter { gadget, name }),
        None => Ok(()),
    }
}

struct Builder {
    g: MultiGraph,
    roles: Vec<GadgetRole>,
    interior: u32,
}

impl Builder {
    fn new() -> Self {
        Self {
            g: MultiGraph::new(),
            roles: Vec::new(),
            interior: 0,
        }
    }

    fn port(&mut self, ordinal: u32) -> VertexId {
        self.g.add_vertex(Some(Label::GadgetInternal {
            role: InternalRole::Port,
            ordinal,
        }))
    }

    fn internal(&mut self, role: InternalRole) -> VertexId {
        self.interior += 1;
        self.g.add_vertex(Some(Label::GadgetInternal {
            role,
            ordinal: self.interior - 1,
        }))
    }

    fn edge(&mut self, a: VertexId, b: VertexId, directed: bool, role: GadgetRole) -> EdgeId {
        let e = if directed { self.g.add_arc(a, b) } else { self.g.add_edge(a, b) }.expect("gadget endpoints are distinct");
        self.roles.push(role);
        e
    }

    /// A path of `len` edges from `from` to `to` with fresh interior vertices.
    fn path(&mut self, from: VertexId, to: VertexId, len: u32, directed: bool, role: impl Fn(u32) -> GadgetRole) -> Vec<EdgeId> {
        let mut cur = from;
        let mut out = Vec::with_capacity(len as usize);
        for pos in 0..len {
            let next = if pos + 1 == len { to } else { self.internal(InternalRole::ChainInterior) };
            out.push(self.edge(cur, next, directed, role(pos)));
            cur = next;
        }
        out
    }

    fn finish(self, terminals: (VertexId, VertexId)) -> GadgetHandle {
        debug_assert!(self.g.validate_rotation().is_ok());
        GadgetHandle {
            graph: self.g,
            terminals,
            roles: self.roles,
        }
    }
}

/// A path with `m` edges.
pub fn make_chain(m: u32) -> Result<GadgetHandle, GadgetError> {
    check("chain", &[("m", m)])?;
    let mut b = Builder::new();
    let s = b.port(0);
    let t = b.port(1);
    b.path(s, t, m, false, |position| GadgetRole::Chain { position });
    Ok(b.finish((s, t)))
}

/// `l` chains of length `m` sharing both endpoints, in fan order: chain 0 is
/// the bottom of the fan when drawn from the first terminal to the second.
pub fn make_bundle(l: u32, m: u32) -> Result<GadgetHandle, GadgetError> {
    check("bundle", &[("l", l), ("m", m)])?;
    let mut b = Builder::new();
    let s = b.port(0);
    let t = b.port(1);
    let chains: Vec<Vec<EdgeId>> = (0..l)
        .map(|c| b.path(s, t, m, false, |position| GadgetRole::BundleChain { chain: c, position }))
        .collect();
    b.g.set_rotation(s, chains.iter().map(|c| c[0]));
    b.g.set_rotation(t, chains.iter().rev().map(|c| *c.last().unwrap()));
    Ok(b.finish((s, t)))
}

/// A `(l, m)`-bundle with a `q`-chain (the shaft) attached at one endpoint.
/// Terminals are the free end of the shaft and the far end of the bundle.
pub fn make_feather(q: u32, l: u32, m: u32) -> Result<GadgetHandle, GadgetError> {
    check("feather", &[("q", q), ("l", l), ("m", m)])?;
    let mut b = Builder::new();
    let s = b.port(0);
    let t = b.port(1);
    let hub = b.internal(InternalRole::Hub);
    let shaft = b.path(s, hub, q, false, |position| GadgetRole::Shaft { position });
    let chains: Vec<Vec<EdgeId>> = (0..l)
        .map(|c| b.path(hub, t, m, false, |position| GadgetRole::BundleChain { chain: c, position }))
        .collect();
    b.g.set_rotation(hub, chains.iter().map(|c| c[0]).chain([*shaft.last().unwrap()]));
    b.g.set_rotation(t, chains.iter().rev().map(|c| *c.last().unwrap()));
    Ok(b.finish((s, t)))
}

/// Two rails `p1_1..p1_{l+1}` and `p2_1..p2_{l+1}` with an `m`-chain joining
/// `p1_x` to `p2_x` for every `x` in `1..=l`. The terminals are the chainless
/// rail ends `p1_{l+1}` and `p2_{l+1}`; chain `x` is nested inside chain `x+1`.
pub fn make_rainbow(l: u32, m: u32) -> Result<GadgetHandle, GadgetError> {
    check("rainbow", &[("l", l), ("m", m)])?;
    let mut b = Builder::new();
    let s = b.port(0);
    let t = b.port(1);
    // rail1[x] = p1_{x+1}, with rail1[l] = s.
    let mut rail1: Vec<VertexId> = (0..l).map(|_| b.internal(InternalRole::Rail)).collect();
    rail1.push(s);
    let mut rail2: Vec<VertexId> = (0..l).map(|_| b.internal(InternalRole::Rail)).collect();
    rail2.push(t);
    // Travel order: inward along rail 1, across a chain, outward along rail 2.
    let r1: Vec<EdgeId> = (0..l as usize)
        .map(|x| {
            b.edge(rail1[x + 1], rail1[x], false, GadgetRole::Rail {
                side: 1,
                position: l - 1 - x as u32,
            })
        })
        .collect();
    let chains: Vec<Vec<EdgeId>> = (0..l as usize)
        .map(|x| {
            b.path(rail1[x], rail2[x], m, false, |position| GadgetRole::BundleChain {
                chain: x as u32,
                position,
            })
        })
        .collect();
    let r2: Vec<EdgeId> = (0..l as usize)
        .map(|x| b.edge(rail2[x], rail2[x + 1], false, GadgetRole::Rail { side: 2, position: x as u32 }))
        .collect();
    // r1[x] joins p1_{x+1} (index x) and p1_{x+2} (index x+1).
    for x in 0..l as usize {
        let inner1 = (x > 0).then(|| r1[x - 1]);
        b.g.set_rotation(rail1[x], inner1.into_iter().chain([chains[x][0], r1[x]]));
        let inner2 = (x > 0).then(|| r2[x - 1]);
        b.g.set_rotation(rail2[x], [r2[x], *chains[x].last().unwrap()].into_iter().chain(inner2));
    }
    b.g.set_rotation(s, [r1[l as usize - 1]]);
    b.g.set_rotation(t, [r2[l as usize - 1]]);
    Ok(b.finish((s, t)))
}

/// The `a × b` grid. Rows grow downward, columns to the right; the rotation
/// at `(i, j)` is east, north, west, south. Terminals are `(1,1)` and `(a,b)`.
pub fn make_grid(a: u32, b: u32) -> Result<GadgetHandle, GadgetError> {
    check("grid", &[("a", a), ("b", b)])?;
    let mut bl = Builder::new();
    let idx = |i: u32, j: u32| ((i - 1) * b + (j - 1)) as usize;
    let ids: Vec<VertexId> = (1..=a)
        .flat_map(|i| (1..=b).map(move |j| (i, j)))
        .map(|(row, col)| bl.g.add_vertex(Some(Label::GridVertex { row, col })))
        .collect();
    let mut east = vec![None; ids.len()];
    let mut south = vec![None; ids.len()];
    for i in 1..=a {
        for j in 1..=b {
            if j < b {
                east[idx(i, j)] = Some(bl.edge(ids[idx(i, j)], ids[idx(i, j + 1)], false, GadgetRole::GridHorizontal { row: i, col: j }));
            }
            if i < a {
                south[idx(i, j)] = Some(bl.edge(ids[idx(i, j)], ids[idx(i + 1, j)], false, GadgetRole::GridVertical { row: i, col: j }));
            }
        }
    }
    for i in 1..=a {
        for j in 1..=b {
            let north = if i > 1 { south[idx(i - 1, j)] } else { None };
            let west = if j > 1 { east[idx(i, j - 1)] } else { None };
            let mut rot: Vec<EdgeId> = [east[idx(i, j)], north, west, south[idx(i, j)]].into_iter().flatten().collect();
            if (i, j) == (1, 1) && rot.len() == 2 {
                // outer corner at (1,1) spans west/north; start after it
                rot.reverse();
            }
            bl.g.set_rotation(ids[idx(i, j)], rot);
        }
    }
    Ok(bl.finish((ids[0], ids[ids.len() - 1])))
}

/// Directed replacement for a vertical connection between an upper vertex
/// `v` and a lower vertex `w`: fresh `a` and `b`, arcs `v->a`, `w->a`,
/// `b->v`, `b->w`, and a directed `len`-chain `a -> b`.
/// Terminals are `(v, w)`.
pub fn make_crossing(len: u32) -> Result<GadgetHandle, GadgetError> {
    check("crossing", &[("len", len)])?;
    let mut bl = Builder::new();
    let v = bl.port(0);
    let w = bl.port(1);
    let a = bl.internal(InternalRole::CrossingHead);
    let b = bl.internal(InternalRole::CrossingTail);
    let va = bl.edge(v, a, true, GadgetRole::CrossingEntry { from: Side::Upper });
    let wa = bl.edge(w, a, true, GadgetRole::CrossingEntry { from: Side::Lower });
    let bv = bl.edge(b, v, true, GadgetRole::CrossingExit { to: Side::Upper });
    let bw = bl.edge(b, w, true, GadgetRole::CrossingExit { to: Side::Lower });
    let chain = bl.path(a, b, len, true, |position| GadgetRole::CrossingChain { position });
    // a sits west of the old vertical line, b east of it.
    bl.g.set_rotation(v, [va, bv]);
    bl.g.set_rotation(w, [bw, wa]);
    bl.g.set_rotation(a, [chain[0], va, wa]);
    bl.g.set_rotation(b, [bv, *chain.last().unwrap(), bw]);
    Ok(bl.finish((v, w)))
}
