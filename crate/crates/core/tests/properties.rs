//! Cross-module invariants on random models.

use memdp_core::benchgen::{gen_random, RandomParams};
use memdp_core::bsg::{generate_game_slice, Label};
use memdp_core::envgraph::EnvGraph;
use memdp_core::reference::{as_winning_recursive, verify_policy};
use memdp_core::solver::{find_policy, preprocess};
use memdp_core::{Bomdp, BoundMode, Heuristic, RegionStore, SolveOptions, Verdict};
use proptest::prelude::*;

fn params() -> impl Strategy<Value = RandomParams> {
    (any::<u64>(), 2usize..=7, 1usize..=4, 1usize..=3, any::<bool>())
        .prop_map(|(seed, s, e, a, acyclic)| RandomParams::new(seed, s, e, a, acyclic))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn verdict_independent_of_configuration(p in params(), bound0 in 1usize..6) {
        let m = gen_random(&p);
        let reference = as_winning_recursive(&m);
        for h in Heuristic::ALL {
            for bounds in BoundMode::ALL {
                let opts = SolveOptions { heuristic: h, bounds, bound0: Some(bound0), ..SolveOptions::default() };
                let out = find_policy(&m, &opts).unwrap();
                prop_assert_eq!(out.verdict == Verdict::Satisfiable, reference, "{}/{}", h.name(), bounds.name());
            }
        }
    }

    #[test]
    fn satisfiable_verdicts_ship_verified_policies(p in params()) {
        let m = gen_random(&p);
        let out = find_policy(&m, &SolveOptions::default()).unwrap();
        prop_assert_eq!(out.policy.is_some(), out.verdict == Verdict::Satisfiable);
        if let Some(fsc) = &out.policy {
            let report = verify_policy(&m, fsc).unwrap();
            prop_assert!(report.all_pass(), "fails in {:?}", report.failing());
        }
    }

    #[test]
    fn environment_graph_is_a_refinement_dag(p in params()) {
        let m = gen_random(&p);
        let g = EnvGraph::reachable(&m, &m.all_envs());
        prop_assert_eq!(&g.vertices[0], &m.all_envs());
        for &(a, b) in &g.edges {
            prop_assert!(g.vertices[b].is_strict_subset(&g.vertices[a]));
        }
        prop_assert!(g.longest_path() <= m.num_envs());
    }

    #[test]
    fn preprocessing_seeds_are_valid(p in params()) {
        let m = gen_random(&p);
        let (won, lost) = preprocess(&m);
        let b = Bomdp::build(&m, 1_000_000).unwrap();
        let win = b.win(&b.target_obs());
        for o in b.observations() {
            if won.contains(o.state, &o.belief) {
                prop_assert!(win.contains(o));
            }
            if lost.contains(o.state, &o.belief) {
                prop_assert!(!win.contains(o));
            }
        }
    }

    #[test]
    fn full_game_matches_explicit_bomdp_on_acyclic_models(seed in any::<u64>()) {
        let m = gen_random(&RandomParams::new(seed, 7, 4, 3, true));
        let full = generate_game_slice(
            &m,
            &RegionStore::winning(m.num_states()),
            &RegionStore::losing(m.num_states()),
            usize::MAX,
            Heuristic::Dfs,
        );
        prop_assert!(full.is_complete());
        let g = full.game;
        let game_win = g.win(&g.mask_of(&[Label::Target]));
        let b = Bomdp::build(&m, 1_000_000).unwrap();
        let win = b.win(&b.target_obs());
        for v in 0..g.num_p1() {
            prop_assert_eq!(game_win[v], win.contains(&g.p1(v).obs));
        }
    }
}
