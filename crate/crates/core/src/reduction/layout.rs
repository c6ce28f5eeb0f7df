use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{Params, ReductionError, VcInstance};
use crate::gadgets::{GadgetRole, Side};
use crate::graph::{EdgeId, MultiGraph, Terminal, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Base,
    Subdivided,
    Rainbow,
    Tree,
    Directed,
}

impl Stage {
    pub const ALL: [Stage; 5] = [Stage::Base, Stage::Subdivided, Stage::Rainbow, Stage::Tree, Stage::Directed];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Base => "base",
            Stage::Subdivided => "subdivided",
            Stage::Rainbow => "rainbow",
            Stage::Tree => "tree",
            Stage::Directed => "directed",
        }
    }

    pub fn next(self) -> Option<Stage> {
        Stage::ALL.get(self as usize + 1).copied()
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Stage {
    type Err = ReductionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Stage::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| ReductionError::UnknownStage(s.to_string()))
    }
}

/// The connection of the construction an edge belongs to. Rows and columns
/// are 1-based; `Horizontal { row, col }` joins columns `col` and `col + 1`,
/// `Vertical { row, col }` joins rows `row` and `row + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Connection {
    SFeather { row: u32 },
    TFeather { row: u32 },
    Horizontal { row: u32, col: u32 },
    Vertical { row: u32, col: u32 },
    Validation { end: Terminal },
    Tree { end: Terminal },
}

impl Connection {
    pub fn is_vertical(self) -> bool {
        matches!(self, Connection::Vertical { .. })
    }
}

/// Position of an edge inside its connection. Positions count from the left
/// (or top) end, so within one path the edge at position `p` ends where the
/// edge at `p + 1` starts, and edge `a -> b` follows that order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "part", rename_all = "snake_case")]
pub enum Part {
    Chain { position: u32 },
    Shaft { position: u32 },
    BundleChain { chain: u32, position: u32 },
    Rail { side: u8, position: u32 },
    Tree,
    CrossingEntry { from: Side },
    CrossingExit { to: Side },
    CrossingChain { position: u32 },
}

impl Part {
    pub fn position(self) -> Option<u32> {
        match self {
            Part::Chain { position }
            | Part::Shaft { position }
            | Part::BundleChain { position, .. }
            | Part::Rail { position, .. }
            | Part::CrossingChain { position } => Some(position),
            _ => None,
        }
    }

    /// Same part at a new position.
    pub fn at(self, position: u32) -> Part {
        match self {
            Part::Chain { .. } => Part::Chain { position },
            Part::Shaft { .. } => Part::Shaft { position },
            Part::BundleChain { chain, .. } => Part::BundleChain { chain, position },
            Part::Rail { side, .. } => Part::Rail { side, position },
            Part::CrossingChain { .. } => Part::CrossingChain { position },
            other => other,
        }
    }

    pub(crate) fn from_gadget(role: GadgetRole) -> Part {
        match role {
            GadgetRole::Chain { position } => Part::Chain { position },
            GadgetRole::Shaft { position } => Part::Shaft { position },
            GadgetRole::BundleChain { chain, position } => Part::BundleChain { chain, position },
            GadgetRole::Rail { side, position } => Part::Rail { side, position },
            GadgetRole::GridHorizontal { col, .. } | GadgetRole::GridVertical { col, .. } => Part::Chain { position: col - 1 },
            GadgetRole::CrossingEntry { from } => Part::CrossingEntry { from },
            GadgetRole::CrossingExit { to } => Part::CrossingExit { to },
            GadgetRole::CrossingChain { position } => Part::CrossingChain { position },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EdgeRole {
    pub connection: Connection,
    pub part: Part,
}

/// Base-stage ancestry of an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "from", content = "id", rename_all = "snake_case")]
pub enum Origin {
    Edge(EdgeId),
    /// Tree edges replace a terminal vertex, not an edge.
    Terminal(Terminal),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HorizontalKind {
    Plain,
    Feather { hub: VertexId },
}

/// Which part of the constructed graph plays which role. Row `i` encodes VC
/// vertex `i`; column `j + 1` encodes VC edge `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LayoutMap {
    /// The (possibly padded) instance the construction was built from.
    pub vc: VcInstance,
    pub params: Params,
    pub stage: Stage,
    pub rounds: u32,
    pub s: VertexId,
    pub t: VertexId,
    /// Grid vertex `(i, j)` at index `(i - 1) * (m + 1) + (j - 1)`.
    pub grid: Vec<VertexId>,
    /// Connection between `(i, j)` and `(i, j + 1)` at `(i - 1) * m + (j - 1)`.
    pub horizontal: Vec<HorizontalKind>,
    pub s_hubs: Vec<VertexId>,
    pub t_hubs: Vec<VertexId>,
    pub tree_edges: Vec<EdgeId>,
    /// Indexed by edge id; `None` exactly for removed ids.
    pub roles: Vec<Option<EdgeRole>>,
    pub lineage: Vec<Option<Origin>>,
}

impl LayoutMap {
    pub fn n(&self) -> u32 {
        self.vc.n
    }

    pub fn m(&self) -> u32 {
        self.vc.m()
    }

    pub fn row_of(&self, vertex: u32) -> u32 {
        vertex
    }

    pub fn col_of(&self, edge: u32) -> u32 {
        edge + 1
    }

    pub fn grid_vertex(&self, row: u32, col: u32) -> VertexId {
        self.grid[((row - 1) * (self.m() + 1) + (col - 1)) as usize]
    }

    pub fn horizontal_kind(&self, row: u32, col: u32) -> HorizontalKind {
        self.horizontal[((row - 1) * self.m() + (col - 1)) as usize]
    }

    pub fn role(&self, e: EdgeId) -> Option<EdgeRole> {
        self.roles.get(e.index()).copied().flatten()
    }

    /// Number of bundles: one per s-feather, t-feather and horizontal feather.
    pub fn bundle_count(&self) -> u64 {
        let feathers = self.horizontal.iter().filter(|h| matches!(h, HorizontalKind::Feather { .. })).count();
        2 * self.n() as u64 + feathers as u64
    }

    /// Connections holding a bundle, in row-major order.
    pub fn bundle_connections(&self) -> Vec<Connection> {
        let mut out = Vec::new();
        for row in 1..=self.n() {
            out.push(Connection::SFeather { row });
            for col in 1..=self.m() {
                if matches!(self.horizontal_kind(row, col), HorizontalKind::Feather { .. }) {
                    out.push(Connection::Horizontal { row, col });
                }
            }
            out.push(Connection::TFeather { row });
        }
        out
    }

    /// Edges of every connection, in edge id order.
    pub fn edges_by_connection(&self) -> HashMap<Connection, Vec<EdgeId>> {
        let mut out: HashMap<Connection, Vec<EdgeId>> = HashMap::new();
        for (i, r) in self.roles.iter().enumerate() {
            if let Some(r) = r {
                out.entry(r.connection).or_default().push(EdgeId(i as u32));
            }
        }
        out
    }

    pub(crate) fn set(&mut self, e: EdgeId, role: EdgeRole, origin: Origin) {
        let i = e.index();
        if self.roles.len() <= i {
            self.roles.resize(i + 1, None);
            self.lineage.resize(i + 1, None);
        }
        self.roles[i] = Some(role);
        self.lineage[i] = Some(origin);
    }

    pub(crate) fn clear(&mut self, e: EdgeId) {
        self.roles[e.index()] = None;
        self.lineage[e.index()] = None;
    }

    /// Checks that exactly the live edges of `g` carry a role and an origin.
    pub fn check_total(&self, g: &MultiGraph) -> Result<(), ReductionError> {
        for (e, _) in g.edges() {
            if self.role(e).is_none() || self.lineage.get(e.index()).copied().flatten().is_none() {
                return Err(ReductionError::Layout(format!("edge {e} has no role")));
            }
        }
        let labelled = self.roles.iter().filter(|r| r.is_some()).count();
        if labelled != g.edge_count() {
            return Err(ReductionError::Layout(format!(
                "{labelled} roles recorded for {} live edges",
                g.edge_count()
            )));
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON encoding, as lowercase hex.
    pub fn digest(&self) -> String {
        let mut hasher = Sha256::new();
        serde_json::to_writer(HashWriter(&mut hasher), self).expect("layout serialises");
        hex::encode(hasher.finalize())
    }
}

struct HashWriter<'a>(&'a mut Sha256);

impl std::io::Write for HashWriter<'_> {
    fn write(&mut self, buf: &[u8]) -> std::io::Result<usize> {
        self.0.update(buf);
        Ok(buf.len())
    }

    fn flush(&mut self) -> std::io::Result<()> {
        Ok(())
    }
}
