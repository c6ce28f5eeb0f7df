use std::collections::{BTreeSet, HashMap};

use super::{OracleError, Route, RouteSet};
use crate::gadgets::Side;
use crate::graph::{EdgeId, MultiGraph, Terminal, VertexId};
use crate::reduction::{Connection, HorizontalKind, LayoutMap, MseInstance, Part, Stage};

/// Parent pointers of one terminal tree: node -> (parent, edge).
type Parents = HashMap<VertexId, (VertexId, EdgeId)>;

struct Index<'a> {
    g: &'a MultiGraph,
    layout: &'a LayoutMap,
    by_conn: HashMap<Connection, Vec<(Part, EdgeId)>>,
    s_tree: Parents,
    t_tree: Parents,
}

impl<'a> Index<'a> {
    fn new(inst: &'a MseInstance, layout: &'a LayoutMap) -> Self {
        let g = &inst.graph;
        let mut by_conn: HashMap<Connection, Vec<(Part, EdgeId)>> = HashMap::new();
        for (e, _) in g.edges() {
            if let Some(r) = layout.role(e) {
                by_conn.entry(r.connection).or_default().push((r.part, e));
            }
        }
        let mut s_tree = Parents::new();
        let mut t_tree = Parents::new();
        for &e in &layout.tree_edges {
            let edge = g.edge(e);
            match layout.role(e).map(|r| r.connection) {
                // s-tree edges run parent -> child, t-tree edges child -> parent.
                Some(Connection::Tree { end: Terminal::S }) => {
                    s_tree.insert(edge.b, (edge.a, e));
                }
                Some(Connection::Tree { end: Terminal::T }) => {
                    t_tree.insert(edge.a, (edge.b, e));
                }
                _ => {}
            }
        }
        Self {
            g,
            layout,
            by_conn,
            s_tree,
            t_tree,
        }
    }

    fn parts(&self, c: Connection) -> &[(Part, EdgeId)] {
        self.by_conn.get(&c).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Shaft, plus one chain of the bundle and the rail stretches reaching it.
    fn feather(&self, c: Connection, chain: u32, out: &mut Vec<EdgeId>) {
        let l = self.layout.params.big_m as u32;
        for &(part, e) in self.parts(c) {
            let keep = match part {
                Part::Shaft { .. } => true,
                Part::BundleChain { chain: x, .. } => x == chain,
                Part::Rail { side: 1, position } => position <= l - 1 - chain,
                Part::Rail { position, .. } => position >= chain,
                _ => false,
            };
            if keep {
                out.push(e);
            }
        }
    }

    fn all(&self, c: Connection, out: &mut Vec<EdgeId>) {
        out.extend(self.parts(c).iter().map(|&(_, e)| e));
    }

    /// One step between rows `row` and `row + 1` in column `col`.
    fn vertical(&self, row: u32, col: u32, down: bool, out: &mut Vec<EdgeId>) {
        let c = Connection::Vertical { row, col };
        if self.layout.stage < Stage::Directed {
            return self.all(c, out);
        }
        let (from, to) = if down { (Side::Upper, Side::Lower) } else { (Side::Lower, Side::Upper) };
        for &(part, e) in self.parts(c) {
            let keep = match part {
                Part::CrossingEntry { from: f } => f == from,
                Part::CrossingExit { to: t } => t == to,
                Part::CrossingChain { .. } => true,
                _ => false,
            };
            if keep {
                out.push(e);
            }
        }
    }

    fn row_route(&self, row: u32, chain: u32) -> Vec<EdgeId> {
        let mut out = Vec::new();
        self.feather(Connection::SFeather { row }, chain, &mut out);
        for col in 1..=self.layout.m() {
            let c = Connection::Horizontal { row, col };
            match self.layout.horizontal_kind(row, col) {
                HorizontalKind::Plain => self.all(c, &mut out),
                HorizontalKind::Feather { .. } => self.feather(c, chain, &mut out),
            }
        }
        self.feather(Connection::TFeather { row }, chain, &mut out);
        out
    }

    fn validation_route(&self, cover: &BTreeSet<u32>) -> Result<Vec<EdgeId>, OracleError> {
        let vc = &self.layout.vc;
        let mut out = Vec::new();
        self.all(Connection::Validation { end: Terminal::S }, &mut out);
        let mut row = 1;
        let walk = |from: u32, to: u32, col: u32, out: &mut Vec<EdgeId>| {
            for r in from.min(to)..from.max(to) {
                self.vertical(r, col, to > from, out);
            }
        };
        for (j, &(u, v)) in vc.edges.iter().enumerate() {
            let col = j as u32 + 1;
            let target = [u, v].into_iter().find(|x| cover.contains(x)).ok_or(OracleError::NotACover { column: col, edge: col })?;
            walk(row, target, col, &mut out);
            self.all(Connection::Horizontal { row: target, col }, &mut out);
            row = target;
        }
        walk(row, self.layout.n(), vc.m() + 1, &mut out);
        self.all(Connection::Validation { end: Terminal::T }, &mut out);
        Ok(out)
    }

    /// Closes a chain of non-tree edges with the tree paths to both roots,
    /// then orders it from `s`.
    fn finish(&self, s: VertexId, t: VertexId, mut edges: Vec<EdgeId>) -> Result<Route, OracleError> {
        let mut degree: HashMap<VertexId, u32> = HashMap::new();
        for &e in &edges {
            let edge = self.g.edge(e);
            *degree.entry(edge.a).or_default() += 1;
            *degree.entry(edge.b).or_default() += 1;
        }
        let ends: Vec<VertexId> = degree.iter().filter(|(_, &d)| d == 1).map(|(v, _)| *v).collect();
        if ends.len() != 2 {
            return Err(OracleError::Layout(format!("route pieces have {} loose ends", ends.len())));
        }
        let on_s = |v: VertexId| v == s || self.s_tree.contains_key(&v);
        let (mut head, mut tail) = if on_s(ends[0]) { (ends[0], ends[1]) } else { (ends[1], ends[0]) };
        while let Some(&(parent, e)) = self.s_tree.get(&head) {
            edges.push(e);
            head = parent;
        }
        while let Some(&(parent, e)) = self.t_tree.get(&tail) {
            edges.push(e);
            tail = parent;
        }
        if head != s || tail != t {
            return Err(OracleError::Layout("route pieces do not reach s and t".into()));
        }

        let mut adj: HashMap<VertexId, Vec<EdgeId>> = HashMap::new();
        for &e in &edges {
            let edge = self.g.edge(e);
            adj.entry(edge.a).or_default().push(e);
            adj.entry(edge.b).or_default().push(e);
        }
        let mut ordered = Vec::with_capacity(edges.len());
        let (mut cur, mut prev) = (s, None);
        while cur != t {
            let next = adj[&cur]
                .iter()
                .copied()
                .find(|&e| Some(e) != prev)
                .ok_or_else(|| OracleError::Layout(format!("route breaks off at {cur}")))?;
            ordered.push(next);
            cur = self.g.edge(next).other(cur);
            prev = Some(next);
            if ordered.len() > edges.len() {
                return Err(OracleError::Layout("route pieces contain a cycle".into()));
            }
        }
        if ordered.len() != edges.len() {
            return Err(OracleError::Layout("route pieces are not a single path".into()));
        }
        Route::from_edges(self.g, s, ordered)
    }
}

/// The routes induced by a vertex cover `cover` (1-based VC vertices): `M`
/// copies of each selected row, one route through every other row, and one
/// route along the validation chains that crosses column `j` in a selected
/// endpoint of edge `j`. A cover smaller than the VC budget is completed with
/// the lowest unselected rows. Works at every stage.
pub fn build_canonical_routes(inst: &MseInstance, layout: &LayoutMap, cover: &[u32]) -> Result<RouteSet, OracleError> {
    let vc = &layout.vc;
    let mut selected: BTreeSet<u32> = BTreeSet::new();
    for &v in cover {
        if v == 0 || v > vc.n {
            return Err(OracleError::BadCover(format!("vertex {v} is not in 1..={}", vc.n)));
        }
        selected.insert(v);
    }
    if selected.len() as u32 > vc.k {
        return Err(OracleError::CoverSize {
            expected: vc.k,
            found: selected.len() as u32,
        });
    }
    let idx = Index::new(inst, layout);
    // Checked before padding so that the error names the caller's cover.
    let validation = idx.validation_route(&selected)?;
    for v in 1..=vc.n {
        if selected.len() as u32 == vc.k {
            break;
        }
        selected.insert(v);
    }

    let mut routes = Vec::with_capacity(inst.p as usize);
    for row in 1..=vc.n {
        let copies = if selected.contains(&row) { layout.params.big_m as u32 } else { 1 };
        for chain in 0..copies {
            routes.push(idx.finish(inst.s, inst.t, idx.row_route(row, chain))?);
        }
    }
    routes.push(idx.finish(inst.s, inst.t, validation)?);
    Ok(RouteSet { routes })
}
