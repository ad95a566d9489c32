//! Property tests for the contract-level invariants: serialization round
//! trips, order insensitivity, support monotonicity, window arithmetic,
//! verifier/solver agreement, and cleaning conservativity. Graphs are
//! derived from seeds through the shared instance samplers so failures
//! shrink to a reproducing seed.

use proptest::prelude::*;

use hypercycle::cleaning::clean_dense;
use hypercycle::constructions::gen_weak_lower_bound;
use hypercycle::hypergraph::{compute_t, supported_codegree, verify_strong_independent, Hypergraph};
use hypercycle::instances;
use hypercycle::lp::{solve_weighted_pfm, verify_certificate, verify_matching, PfmResult, WeightVector};
use hypercycle::oracle::{hamilton_ell_cycle, OracleBudget, OracleOutcome};
use hypercycle::util::{format_ratio, parse_ratio, ratio, sub_seed};
use hypercycle::walks::{verify_hamilton_ell_cycle, verify_tight_walk};

fn small_graph(n: usize, seed: u64) -> Hypergraph {
    instances::random_kgraph(n, 3, (1, 2), seed).expect("sampler accepts these parameters")
}

proptest! {
    #[test]
    fn json_round_trip_preserves_the_graph(n in 3usize..8, seed: u64) {
        let g = small_graph(n, seed);
        let back = Hypergraph::from_json_str(&g.to_json_string()).unwrap();
        prop_assert_eq!(back.n(), g.n());
        prop_assert_eq!(back.k(), g.k());
        prop_assert_eq!(back.edges(), g.edges());
    }

    #[test]
    fn edge_membership_ignores_vertex_order(n in 3usize..8, seed: u64, rot in 0usize..6) {
        let g = small_graph(n, seed);
        for e in g.edges() {
            let mut shuffled = e.clone();
            shuffled.rotate_left(rot % e.len());
            shuffled.reverse();
            prop_assert!(g.contains_edge(&shuffled));
        }
    }

    #[test]
    fn subsets_of_supported_sets_are_supported(n in 3usize..8, seed: u64) {
        let g = small_graph(n, seed);
        for e in g.edges() {
            for skip in 0..e.len() {
                let sub: Vec<u32> = e
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != skip)
                    .map(|(_, &v)| v)
                    .collect();
                prop_assert!(g.is_supported(&sub), "co-edges support all their subsets");
            }
        }
    }

    #[test]
    fn window_arithmetic_stays_in_range(k in 3usize..10, ell_off in 0usize..9) {
        let ell = 1 + ell_off % (k - 1);
        let p = compute_t(k, ell).unwrap();
        prop_assert_eq!(p.t % p.step(), 0, "the window offset is a multiple of the step");
        prop_assert!(p.t >= ell + 1 && p.t <= k);
        prop_assert!(2 * p.t >= k + 1, "windows overlap their successors");
        prop_assert_eq!(p.t, (k / (k - ell)) * (k - ell));
    }

    #[test]
    fn rational_strings_round_trip(p in -1_000_000i64..1_000_000, q in 1i64..1_000_000) {
        let r = ratio(p, q);
        prop_assert_eq!(parse_ratio(&format_ratio(&r)).unwrap(), r);
    }

    #[test]
    fn labeled_seeds_are_deterministic_and_distinct(seed: u64) {
        prop_assert_eq!(sub_seed("alpha", seed), sub_seed("alpha", seed));
        prop_assert_ne!(sub_seed("alpha", seed), sub_seed("beta", seed));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lp_solver_always_verifies_exactly_one_side(n in 4usize..6, seed: u64, ell in 1usize..3) {
        let g = small_graph(n, seed);
        let params = compute_t(3, ell).unwrap();
        let w = WeightVector::canonical(params);
        match solve_weighted_pfm(&g, &w).unwrap() {
            PfmResult::Feasible(m) => prop_assert!(verify_matching(&g, &m, true)),
            PfmResult::Infeasible(c) => prop_assert!(verify_certificate(&g, &w, &c)),
        }
    }

    #[test]
    fn cleaning_removes_only_whole_vertices(n in 8usize..14, seed: u64) {
        let g = instances::random_kgraph(n, 3, (9, 10), seed).unwrap();
        let report = clean_dense(&g, &ratio(1, 4)).unwrap();
        prop_assert_eq!(report.output.n(), g.n(), "the vertex universe is preserved");
        for e in report.output.edges() {
            prop_assert!(g.contains_edge(e), "cleaning never adds edges");
            for &v in e {
                prop_assert!(
                    !report.removed_vertices.contains(&v),
                    "removed vertices vanish from every surviving edge"
                );
            }
        }
    }

    #[test]
    fn weak_bound_always_hits_its_codegree_formula(
        k in 3usize..6,
        ell_off in 0usize..5,
        m in 2usize..5,
    ) {
        let ell = 1 + ell_off % (k - 1);
        let params = compute_t(k, ell).unwrap();
        let n = params.step() * m + params.t * 2; // valid and comfortably sized
        prop_assume!(n / params.t + 1 + (k - 1) <= n);
        prop_assume!(n % params.step() == 0);
        let w = gen_weak_lower_bound(k, ell, n).unwrap();
        prop_assert_eq!(supported_codegree(&w.graph), Some(n - n / params.t - (k - 1)));
        prop_assert!(verify_strong_independent(&w.graph, &w.a));
    }

    #[test]
    fn oracle_witnesses_always_verify(n in 4usize..7, seed: u64, ell in 1usize..3) {
        let g = instances::random_kgraph(n, 3, (4, 5), seed).unwrap();
        let params = compute_t(3, ell).unwrap();
        prop_assume!(n % params.step() == 0);
        let outcome = hamilton_ell_cycle(&g, params, &OracleBudget::generous()).unwrap();
        if let OracleOutcome::Found(w) = outcome {
            prop_assert!(verify_hamilton_ell_cycle(&g, &w, params));
            prop_assert_eq!(w.len(), n);
        }
    }

    #[test]
    fn tight_walk_verifier_agrees_with_the_window_definition(
        n in 6usize..10,
        seed: u64,
        len in 3usize..9,
    ) {
        // Any vertex sequence, valid or not: the verifier must equal the
        // all-windows-are-edges definition.
        let g = instances::random_kgraph(n, 3, (3, 4), seed).unwrap();
        let mut rngseq = Vec::with_capacity(len);
        let mut x = seed | 1;
        for _ in 0..len {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            rngseq.push((x >> 33) as u32 % n as u32);
        }
        let by_definition = rngseq.len() >= 3
            && rngseq.windows(3).all(|w| {
                let mut e = w.to_vec();
                e.sort_unstable();
                e.dedup();
                e.len() == 3 && g.contains_edge(&e)
            });
        prop_assert_eq!(verify_tight_walk(&g, &rngseq), by_definition);
    }
}
