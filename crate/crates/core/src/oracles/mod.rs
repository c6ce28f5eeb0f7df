//! Exact reference solvers and checkers.
//!
//! Two independent MSE solvers are provided: a subset search over shared
//! edge sets backed by max-flow ([`solve_mse_exact_flow`]) and an
//! enumeration of multisets of simple paths ([`solve_mse_exact_paths`]).
//! They share no code beyond [`RouteSet`] and the verifier.

mod canonical;
mod flow;
mod invariants;
mod paths;
mod routes;
mod vc;

use thiserror::Error;

pub use canonical::build_canonical_routes;
pub use flow::{min_shared_flow, solve_mse_exact_flow, FlowConfig};
pub use invariants::{check_invariant_1, check_invariant_2, InvariantReport};
pub use paths::{enumerate_simple_paths, min_shared_paths, solve_mse_exact_paths, PathsConfig};
pub use routes::{shared_edge_report, verify_routes, Rejection, Route, RouteSet, RouteVerdict, SharedEdgeReport};
pub use vc::{covers_of_size, min_cover_size, solve_vc_bruteforce, VcVerdict, DEFAULT_VC_CAP};

use crate::graph::{EdgeId, GraphError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("{what} is {actual}, above the cap of {limit}")]
    CapExceeded { what: &'static str, limit: u64, actual: u64 },
    #[error("W is not a vertex cover: column {column} (edge e{edge}) has no selected endpoint")]
    NotACover { column: u32, edge: u32 },
    #[error("cover has {found} vertices, the instance budget is {expected}")]
    CoverSize { expected: u32, found: u32 },
    #[error("invalid cover: {0}")]
    BadCover(String),
    #[error("layout: {0}")]
    Layout(String),
    #[error("routes: {0}")]
    Routes(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Outcome of an exact MSE decision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MseVerdict {
    /// `shared` contains every edge used by two or more of `routes`.
    Yes { shared: Vec<EdgeId>, routes: RouteSet },
    No,
}

impl MseVerdict {
    pub fn is_yes(&self) -> bool {
        matches!(self, MseVerdict::Yes { .. })
    }
}
