use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::{
    build_base, compute_params, make_directed, replace_bundles_with_rainbows, replace_terminals_with_trees, subdivision_rounds, LayoutMap,
    MseInstance, ReductionError, Stage, SubdivisionLedger, VcInstance,
};
use crate::graph::{degree_profile, min_proper_chain_length, verify_planar_embedding, PlanarVerdict};

/// Structural summary of one stage's output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StageReport {
    pub stage: Stage,
    pub vertex_count: usize,
    pub edge_count: usize,
    pub budget: u64,
    pub routes: u64,
    pub min_proper_chain_length: Option<usize>,
    pub max_degree: usize,
    pub max_in_degree: Option<usize>,
    pub max_out_degree: Option<usize>,
    /// `Err` carries the reason the check could not run.
    pub planar_verdict: Result<PlanarVerdict, String>,
    pub wall_time_ms: f64,
}

impl StageReport {
    pub fn is_planar(&self) -> bool {
        matches!(self.planar_verdict, Ok(v) if v.is_certified())
    }
}

pub fn stage_report(inst: &MseInstance, stage: Stage, elapsed: Duration) -> StageReport {
    let profile = degree_profile(&inst.graph);
    StageReport {
        stage,
        vertex_count: inst.graph.vertex_count(),
        edge_count: inst.graph.edge_count(),
        budget: inst.k,
        routes: inst.p,
        min_proper_chain_length: min_proper_chain_length(&inst.graph),
        max_degree: profile.max_degree(),
        max_in_degree: profile.max_in,
        max_out_degree: profile.max_out,
        planar_verdict: verify_planar_embedding(&inst.graph).map_err(|e| e.to_string()),
        wall_time_ms: elapsed.as_secs_f64() * 1e3,
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PipelineReport {
    /// Vertex count of the input before padding, when padding added rows.
    pub padded_from: Option<u32>,
    pub stages: Vec<StageReport>,
    pub subdivision: Option<SubdivisionLedger>,
}

/// Runs the stage after `layout.stage`.
fn advance(
    inst: MseInstance,
    layout: LayoutMap,
    report: &mut PipelineReport,
) -> Result<(MseInstance, LayoutMap), ReductionError> {
    let next = layout.stage.next().ok_or(ReductionError::WrongStage {
        expected: Stage::Tree,
        found: Stage::Directed,
    })?;
    let start = Instant::now();
    let (inst, layout) = match next {
        Stage::Subdivided => {
            let (inst, layout, ledger) = subdivision_rounds(inst, layout)?;
            report.subdivision = Some(ledger);
            (inst, layout)
        }
        Stage::Rainbow => replace_bundles_with_rainbows(inst, layout)?,
        Stage::Tree => replace_terminals_with_trees(inst, layout)?,
        Stage::Directed => make_directed(inst, layout)?,
        Stage::Base => unreachable!("base has no predecessor"),
    };
    report.stages.push(stage_report(&inst, next, start.elapsed()));
    Ok((inst, layout))
}

/// Runs the stages after `layout.stage` up to and including `until`.
pub fn continue_pipeline(
    mut inst: MseInstance,
    mut layout: LayoutMap,
    until: Stage,
) -> Result<(MseInstance, LayoutMap, PipelineReport), ReductionError> {
    let mut report = PipelineReport::default();
    while layout.stage < until {
        (inst, layout) = advance(inst, layout, &mut report)?;
    }
    Ok((inst, layout, report))
}

/// Builds the base instance and runs the stages up to `until`. The input is
/// padded with isolated vertices whenever the run goes past the base stage,
/// so that the tree stage finds `n + 1` a power of two.
pub fn run_pipeline(vc: &VcInstance, until: Stage) -> Result<(MseInstance, LayoutMap, PipelineReport), ReductionError> {
    let padded = if until > Stage::Base { vc.padded() } else { vc.clone() };
    let mut report = PipelineReport {
        padded_from: (padded.n != vc.n).then_some(vc.n),
        ..PipelineReport::default()
    };
    let start = Instant::now();
    let (mut inst, mut layout) = build_base(&padded)?;
    report.stages.push(stage_report(&inst, Stage::Base, start.elapsed()));
    while layout.stage < until {
        (inst, layout) = advance(inst, layout, &mut report)?;
    }
    Ok((inst, layout, report))
}

/// Pads, then runs base, subdivision, rainbow and tree stages.
pub fn full_pipeline(vc: &VcInstance) -> Result<(MseInstance, LayoutMap, PipelineReport), ReductionError> {
    run_pipeline(vc, Stage::Tree)
}

/// Closed-form sizes of every stage, computed without building anything.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PipelineEstimate {
    /// Vertex count after padding.
    pub n: u32,
    pub bundles: u64,
    pub rounds: u32,
    /// Edge count after each stage, in stage order.
    pub edges: [u64; 5],
    /// Budget after each stage, in stage order.
    pub budgets: [u64; 5],
}

impl PipelineEstimate {
    pub fn edges_at(&self, stage: Stage) -> u64 {
        self.edges[stage as usize]
    }

    pub fn budget_at(&self, stage: Stage) -> u64 {
        self.budgets[stage as usize]
    }
}

/// Predicts the pipeline on the padded instance. The shortest base chain is
/// a plain grid edge of length one, so the round count is the least `r`
/// with `2^r > 2 M c'`.
pub fn estimate_pipeline(vc: &VcInstance) -> Result<PipelineEstimate, ReductionError> {
    let vc = vc.padded();
    let params = compute_params(&vc)?;
    let (n, m) = (vc.n as u64, vc.m() as u64);
    let (big_m, kp) = (params.big_m, params.k_prime);
    let plain = 2 * m;
    let feathers = n * m - plain;
    let bundles = 2 * n + feathers;
    let bundle = big_m * (kp + 1);
    let base = n * (m * m * m + bundle) + n * (1 + bundle) + plain + feathers * (1 + bundle) + (n - 1) * (m + 1) * (kp + 1) + 2 * (kp + 1);
    let threshold = 2 * big_m * bundles;
    let rounds = (threshold + 1).next_power_of_two().trailing_zeros();
    let scale = 1u64 << rounds;
    let subdivided = base * scale;
    let rainbow = subdivided + bundles * (2 * big_m + big_m * threshold);
    let tree = rainbow + 2 * (n - 1);
    let directed = tree + 4 * (n - 1) * (m + 1);
    let b1 = kp * scale;
    let b2 = b1 + threshold;
    let b3 = b2 + 2 * (n - 1);
    Ok(PipelineEstimate {
        n: vc.n,
        bundles,
        rounds,
        edges: [base, subdivided, rainbow, tree, directed],
        budgets: [kp, b1, b2, b3, b3],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn estimate_matches_construction() {
        for (n, edges, k) in [(3, vec![(1, 2), (2, 3)], 1), (2, vec![(1, 2)], 0), (4, vec![(1, 2), (3, 4)], 2)] {
            let vc = VcInstance::new(n, edges, k).unwrap();
            let est = estimate_pipeline(&vc).unwrap();
            let (inst, layout, report) = run_pipeline(&vc, Stage::Directed).unwrap();
            assert_eq!(layout.rounds, est.rounds);
            for st in &report.stages {
                assert_eq!(st.edge_count as u64, est.edges_at(st.stage), "{:?}", st.stage);
                assert_eq!(st.budget, est.budget_at(st.stage), "{:?}", st.stage);
                assert!(st.is_planar(), "{:?}", st.stage);
            }
            assert_eq!(report.stages.len(), 5);
            assert_eq!(inst.k, est.budgets[4]);
        }
    }

    #[test]
    fn padding_only_past_base() {
        let vc = VcInstance::new(4, [(1, 2)], 1).unwrap();
        let (_, layout, report) = run_pipeline(&vc, Stage::Base).unwrap();
        assert_eq!((layout.n(), report.padded_from), (4, None));
        let (_, layout, report) = run_pipeline(&vc, Stage::Tree).unwrap();
        assert_eq!((layout.n(), report.padded_from), (7, Some(4)));
    }

    #[test]
    fn tree_stage_budget_composition() {
        let vc = VcInstance::new(2, [(1, 2)], 1).unwrap();
        let (inst, layout, report) = full_pipeline(&vc).unwrap();
        let ledger = report.subdivision.unwrap();
        let c = layout.bundle_count();
        let expected = (1u64 << ledger.rounds) * 3 + 2 * 6 * c + 2 * (layout.n() as u64 - 1);
        assert_eq!(inst.k, expected);
        assert_eq!(report.stages.last().unwrap().max_degree, 4);
    }
}
