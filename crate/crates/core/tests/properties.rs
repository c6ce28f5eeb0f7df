use mse_core::gadgets::{make_bundle, make_feather, make_grid, make_rainbow};
use mse_core::graph::{min_proper_chain_length, subdivide_all_edges, verify_planar_embedding};
use mse_core::oracles::{
    build_canonical_routes, check_invariant_1, covers_of_size, min_cover_size, min_shared_paths, solve_mse_exact_flow, solve_mse_exact_paths,
    verify_routes, FlowConfig, PathsConfig, RouteSet, DEFAULT_VC_CAP,
};
use mse_core::random::{random_multigraph, random_vc, MultigraphShape};
use mse_core::reduction::{build_base, estimate_pipeline, Stage, VcInstance};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

fn flow() -> FlowConfig {
    FlowConfig::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn oracles_agree_on_random_multigraphs(seed in any::<u64>()) {
        let inst = random_multigraph(&mut StdRng::seed_from_u64(seed), &MultigraphShape::default());
        let a = solve_mse_exact_flow(&inst, &flow()).unwrap();
        let b = solve_mse_exact_paths(&inst, &PathsConfig::default()).unwrap();
        prop_assert_eq!(a.is_yes(), b.is_yes());
    }

    #[test]
    fn more_budget_never_hurts(seed in any::<u64>()) {
        let inst = random_multigraph(&mut StdRng::seed_from_u64(seed), &MultigraphShape { max_k: 1, ..MultigraphShape::default() });
        if solve_mse_exact_flow(&inst, &flow()).unwrap().is_yes() {
            prop_assert!(solve_mse_exact_flow(&inst.with_budget(inst.k + 1), &flow()).unwrap().is_yes());
        }
    }

    #[test]
    fn fewer_routes_never_hurt(seed in any::<u64>()) {
        let inst = random_multigraph(&mut StdRng::seed_from_u64(seed), &MultigraphShape::default());
        if inst.p > 1 && solve_mse_exact_paths(&inst, &PathsConfig::default()).unwrap().is_yes() {
            let mut fewer = inst.clone();
            fewer.p -= 1;
            prop_assert!(solve_mse_exact_paths(&fewer, &PathsConfig::default()).unwrap().is_yes());
        }
    }

    #[test]
    fn subdivision_preserves_planarity(a in 1u32..5, b in 1u32..5, l in 1u32..4, m in 1u32..4) {
        for g in [make_grid(a, b).unwrap().graph, make_bundle(l, m).unwrap().graph, make_rainbow(l, m).unwrap().graph] {
            let before = verify_planar_embedding(&g).unwrap();
            let sub = subdivide_all_edges(&g);
            let after = verify_planar_embedding(&sub).unwrap();
            prop_assert!(before.is_certified() && after.is_certified());
            prop_assert_eq!(sub.edge_count(), 2 * g.edge_count());
            prop_assert_eq!(min_proper_chain_length(&sub), min_proper_chain_length(&g).map(|x| 2 * x));
        }
    }

    #[test]
    fn feather_shares_its_shaft(q in 1u32..4, l in 2u32..4, m in 1u32..3) {
        // l routes fit one per chain, so only the shaft is shared.
        let h = make_feather(q, l, m).unwrap();
        let inst = mse_core::reduction::MseInstance::new(h.graph, h.terminals.0, h.terminals.1, l as u64, 0).unwrap();
        prop_assert_eq!(min_shared_paths(&inst, &PathsConfig::default()).unwrap(), Some(q as u64));
    }

    #[test]
    fn base_stage_matches_estimate(seed in any::<u64>()) {
        let vc = random_vc(&mut StdRng::seed_from_u64(seed), 4, 3);
        let (inst, layout) = build_base(&vc).unwrap();
        // The estimate describes the padded instance; compare only when no
        // padding is needed.
        if vc.is_padded() {
            prop_assert_eq!(inst.graph.edge_count() as u64, estimate_pipeline(&vc).unwrap().edges_at(Stage::Base));
        }
        prop_assert_eq!(inst.k, layout.params.k_prime);
        prop_assert!(verify_planar_embedding(&inst.graph).unwrap().is_certified());
    }

    #[test]
    fn canonical_routes_for_every_minimum_cover(seed in any::<u64>()) {
        let probe = random_vc(&mut StdRng::seed_from_u64(seed), 4, 3);
        let tau = min_cover_size(&probe, DEFAULT_VC_CAP).unwrap();
        let vc = probe.with_k(tau).unwrap();
        let (inst, layout) = build_base(&vc).unwrap();
        for w in covers_of_size(&vc, tau) {
            let routes = build_canonical_routes(&inst, &layout, &w).unwrap();
            let verdict = verify_routes(&inst, &routes);
            prop_assert!(verdict.is_accept());
            prop_assert_eq!(verdict.report().unwrap().count as u64, inst.k);
            prop_assert!(check_invariant_1(&layout, &routes).unwrap().holds);
            let round = RouteSet::from_json(&routes.to_json(), &inst.graph).unwrap();
            prop_assert_eq!(round, routes);
        }
    }

    #[test]
    fn vc_text_round_trip(seed in any::<u64>()) {
        let vc = random_vc(&mut StdRng::seed_from_u64(seed), 6, 6);
        let back: VcInstance = vc.to_text().parse().unwrap();
        prop_assert_eq!(back, vc);
    }
}
