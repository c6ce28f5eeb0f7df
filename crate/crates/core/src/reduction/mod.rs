//! Vertex Cover to planar Minimum Shared Edges.
//!
//! Stages run in a fixed order: base construction, subdivision rounds,
//! bundle-to-rainbow replacement, binary trees at the terminals, and the
//! optional directed variant. Every stage consumes the previous instance and
//! its [`LayoutMap`] and returns updated ones.

mod base;
mod directed;
mod instance;
mod layout;
mod pipeline;
mod stages;
mod vc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use base::build_base;
pub use directed::make_directed;
pub use instance::{InstanceFile, MseInstance};
pub use layout::{Connection, EdgeRole, HorizontalKind, LayoutMap, Origin, Part, Stage};
pub use pipeline::{continue_pipeline, estimate_pipeline, full_pipeline, run_pipeline, stage_report, PipelineEstimate, PipelineReport, StageReport};
pub use stages::{replace_bundles_with_rainbows, replace_terminals_with_trees, subdivision_rounds, RoundRecord, SubdivisionLedger};
pub use vc::{VcError, VcInstance};

use crate::gadgets::GadgetError;
use crate::graph::GraphError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReductionError {
    #[error("trivial instance: a graph without edges is covered by the empty set")]
    TrivialInstance,
    #[error("parameters overflow 64-bit integers")]
    Overflow,
    #[error("expected a {expected}-stage instance, found {found}")]
    WrongStage { expected: Stage, found: Stage },
    #[error("unknown stage `{0}`")]
    UnknownStage(String),
    #[error("precondition of the {stage} stage violated: {detail}")]
    Precondition { stage: Stage, detail: String },
    #[error("n + 1 = {0} is not a power of two; pad the instance first")]
    NotPowerOfTwo(u32),
    #[error("layout: {0}")]
    Layout(String),
    #[error(transparent)]
    Vc(#[from] VcError),
    #[error(transparent)]
    Gadget(#[from] GadgetError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Construction parameters. `big_m` is the bundle width, `k_prime` the
/// shared-edge budget and `p` the number of routes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Params {
    pub n: u32,
    pub m: u32,
    pub k: u32,
    #[serde(rename = "M")]
    pub big_m: u64,
    pub k_prime: u64,
    pub p: u64,
}

pub fn compute_params(vc: &VcInstance) -> Result<Params, ReductionError> {
    let (n, m, k) = (vc.n as u64, vc.m() as u64, vc.k as u64);
    if m == 0 {
        return Err(ReductionError::TrivialInstance);
    }
    let big_m = 2 * (m + 1) + 2;
    let cube = m.checked_pow(3).ok_or(ReductionError::Overflow)?;
    let k_prime = k.checked_mul(cube + m + 1).ok_or(ReductionError::Overflow)?;
    let p = k.checked_mul(big_m).ok_or(ReductionError::Overflow)? + (n - k) + 1;
    Ok(Params {
        n: vc.n,
        m: vc.m(),
        k: vc.k,
        big_m,
        k_prime,
        p,
    })
}
