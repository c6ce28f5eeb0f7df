use serde::{Deserialize, Serialize};

use super::{shared_edge_report, OracleError, RouteSet};
use crate::graph::Terminal;
use crate::reduction::{Connection, LayoutMap, Stage};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct InvariantReport {
    pub holds: bool,
    /// Routes through the s-feather of each row, row 1 first.
    pub per_row: Vec<u32>,
    /// Routes through the s-side validation chain.
    pub validation: u32,
    pub violations: Vec<String>,
}

fn tally(layout: &LayoutMap, routes: &RouteSet) -> Result<(Vec<u32>, u32), OracleError> {
    let mut per_row = vec![0u32; layout.n() as usize];
    let mut validation = 0;
    for (i, r) in routes.routes.iter().enumerate() {
        // The first edge outside the s-tree decides the entry.
        let entry = r
            .edges
            .iter()
            .filter_map(|&e| layout.role(e))
            .map(|role| role.connection)
            .find(|c| !matches!(c, Connection::Tree { .. }))
            .ok_or_else(|| OracleError::Routes(format!("route {i} has no labelled edge")))?;
        match entry {
            Connection::SFeather { row } => per_row[row as usize - 1] += 1,
            Connection::Validation { end: Terminal::S } => validation += 1,
            other => return Err(OracleError::Routes(format!("route {i} leaves s through {other:?}"))),
        }
    }
    Ok((per_row, validation))
}

/// Exactly `k` rows carry `M` routes, the other `n - k` rows carry one, and
/// one route takes the validation chain.
pub fn check_invariant_1(layout: &LayoutMap, routes: &RouteSet) -> Result<InvariantReport, OracleError> {
    let (per_row, validation) = tally(layout, routes)?;
    let big_m = layout.params.big_m as u32;
    let mut violations = Vec::new();
    let full = per_row.iter().filter(|&&c| c == big_m).count() as u32;
    let single = per_row.iter().filter(|&&c| c == 1).count() as u32;
    if full != layout.vc.k || single != layout.n() - layout.vc.k {
        violations.push(format!(
            "{full} rows carry {big_m} routes and {single} carry one; expected {} and {}",
            layout.vc.k,
            layout.n() - layout.vc.k
        ));
    }
    if validation != 1 {
        violations.push(format!("{validation} routes take the validation chain"));
    }
    Ok(InvariantReport {
        holds: violations.is_empty(),
        per_row,
        validation,
        violations,
    })
}

/// Every shared edge lies in the s-feather, horizontal connections or
/// t-feather of a row carrying `M` routes, and before the rainbow stage each
/// such row shares exactly `(m + 1) * 2^rounds` edges right of its first grid
/// vertex. Tree edges are ignored.
pub fn check_invariant_2(layout: &LayoutMap, routes: &RouteSet) -> Result<InvariantReport, OracleError> {
    let (per_row, validation) = tally(layout, routes)?;
    let big_m = layout.params.big_m as u32;
    let full = |row: u32| per_row[row as usize - 1] == big_m;
    let report = shared_edge_report(routes);
    let mut right = vec![0u64; layout.n() as usize];
    let mut violations = Vec::new();
    for &e in &report.shared {
        let Some(role) = layout.role(e) else {
            violations.push(format!("shared edge {e} has no role"));
            continue;
        };
        match role.connection {
            Connection::Tree { .. } => {}
            Connection::SFeather { row } if full(row) => {}
            Connection::Horizontal { row, .. } | Connection::TFeather { row } if full(row) => right[row as usize - 1] += 1,
            other => violations.push(format!("shared edge {e} lies in {other:?}")),
        }
    }
    if layout.stage <= Stage::Subdivided {
        let expected = (layout.m() as u64 + 1) << layout.rounds;
        for row in (1..=layout.n()).filter(|&r| full(r)) {
            let got = right[row as usize - 1];
            if got != expected {
                violations.push(format!("row {row} shares {got} edges right of column 1, expected {expected}"));
            }
        }
    }
    Ok(InvariantReport {
        holds: violations.is_empty(),
        per_row,
        validation,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::{build_canonical_routes, Route};
    use crate::reduction::{build_base, run_pipeline, VcInstance};

    #[test]
    fn canonical_routes_satisfy_both() {
        let vc = VcInstance::new(3, [(1, 2), (2, 3)], 1).unwrap();
        for stage in [Stage::Base, Stage::Subdivided, Stage::Tree] {
            let (inst, layout, _) = run_pipeline(&vc, stage).unwrap();
            let routes = build_canonical_routes(&inst, &layout, &[2]).unwrap();
            let one = check_invariant_1(&layout, &routes).unwrap();
            assert!(one.holds, "{stage}: {:?}", one.violations);
            let two = check_invariant_2(&layout, &routes).unwrap();
            assert!(two.holds, "{stage}: {:?}", two.violations);
        }
    }

    #[test]
    fn perturbed_routes_fail() {
        let vc = VcInstance::new(2, [(1, 2)], 1).unwrap();
        let (inst, layout) = build_base(&vc).unwrap();
        let mut routes = build_canonical_routes(&inst, &layout, &[1]).unwrap();
        // Move one copy of row 1 onto row 2.
        let row2 = routes.routes.iter().position(|r| {
            matches!(layout.role(r.edges[0]).unwrap().connection, Connection::SFeather { row: 2 })
        });
        let row2: Route = routes.routes[row2.unwrap()].clone();
        routes.routes[0] = row2;
        let one = check_invariant_1(&layout, &routes).unwrap();
        assert!(!one.holds);
        assert_eq!(one.per_row, vec![5, 2]);
        let two = check_invariant_2(&layout, &routes).unwrap();
        assert!(!two.holds, "row 2 now shares edges");
    }
}
