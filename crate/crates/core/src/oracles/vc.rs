use itertools::Itertools;

use super::OracleError;
use crate::reduction::VcInstance;

pub const DEFAULT_VC_CAP: u32 = 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VcVerdict {
    /// A cover of size at most `k`, sorted.
    Yes(Vec<u32>),
    No,
}

fn check_cap(vc: &VcInstance, cap: u32) -> Result<(), OracleError> {
    if vc.n > cap {
        return Err(OracleError::CapExceeded {
            what: "vertex count",
            limit: cap as u64,
            actual: vc.n as u64,
        });
    }
    Ok(())
}

/// Every vertex cover of exactly `size` vertices, in lexicographic order.
pub fn covers_of_size(vc: &VcInstance, size: u32) -> Vec<Vec<u32>> {
    (1..=vc.n)
        .combinations(size as usize)
        .filter(|w| vc.is_cover(w))
        .collect()
}

/// Exhaustive search over subsets by increasing size.
pub fn solve_vc_bruteforce(vc: &VcInstance, cap: u32) -> Result<VcVerdict, OracleError> {
    check_cap(vc, cap)?;
    for size in 0..=vc.k {
        if let Some(w) = (1..=vc.n).combinations(size as usize).find(|w| vc.is_cover(w)) {
            return Ok(VcVerdict::Yes(w));
        }
    }
    Ok(VcVerdict::No)
}

pub fn min_cover_size(vc: &VcInstance, cap: u32) -> Result<u32, OracleError> {
    check_cap(vc, cap)?;
    Ok((0..=vc.n)
        .find(|&size| (1..=vc.n).combinations(size as usize).any(|w| vc.is_cover(&w)))
        .expect("the full vertex set is a cover"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn figure_graph_has_cover_of_two() {
        let vc = VcInstance::new(4, [(1, 2), (2, 3), (3, 4), (1, 3)], 2).unwrap();
        let VcVerdict::Yes(w) = solve_vc_bruteforce(&vc, DEFAULT_VC_CAP).unwrap() else {
            panic!("expected a cover")
        };
        assert!(vc.is_cover(&w));
        assert_eq!(w.len(), 2);
        assert!(covers_of_size(&vc, 2).contains(&vec![1, 3]));
    }

    #[test]
    fn triangle_needs_two() {
        let vc = VcInstance::new(3, [(1, 2), (2, 3), (1, 3)], 1).unwrap();
        assert_eq!(solve_vc_bruteforce(&vc, DEFAULT_VC_CAP).unwrap(), VcVerdict::No);
        assert_eq!(min_cover_size(&vc, DEFAULT_VC_CAP).unwrap(), 2);
    }

    #[test]
    fn edgeless_is_yes_with_empty_cover() {
        let vc = VcInstance::new(5, [], 0).unwrap();
        assert_eq!(solve_vc_bruteforce(&vc, DEFAULT_VC_CAP).unwrap(), VcVerdict::Yes(vec![]));
    }

    #[test]
    fn cap_is_enforced() {
        let vc = VcInstance::new(21, [(1, 2)], 1).unwrap();
        assert!(matches!(solve_vc_bruteforce(&vc, DEFAULT_VC_CAP), Err(OracleError::CapExceeded { .. })));
    }
}
