//! Cross-validation of the fast paths against brute-force ground truth on
//! seeded random instances.

use genpf::corpus::{random_candidate, random_irreducible_system, CorpusParams};
use genpf::irreducibility::{brute_force_irreducible, test_irreducible};
use genpf::oracle::enumerate_solve;
use genpf::solver::{solve, SolverConfig};
use genpf::system::fixtures;

#[test]
fn cluster_test_matches_brute_force_on_random_candidates() {
    let params = CorpusParams::default();
    for seed in 0..300 {
        let sys = random_candidate(seed, &params).unwrap();
        if sys.selection_count() > 10_000 {
            continue;
        }
        let fast = test_irreducible(&sys).unwrap();
        let slow = brute_force_irreducible(&sys, 10_000).unwrap();
        assert_eq!(
            fast.irreducible, slow.irreducible,
            "seed {seed} disagrees: cluster test {fast:?}, brute force {slow:?}"
        );
        assert!(fast.rounds <= sys.entities().saturating_sub(1));
        // A selection witness must actually be reducible.
        if let Some(genpf::irreducibility::ReducibilityWitness::ReducibleSelection(sel)) =
            &fast.witness
        {
            let sub = sys.apply_selection(sel).unwrap();
            assert!(!genpf::irreducibility::is_irreducible_square(&sub.system).unwrap());
        }
    }
}

#[test]
fn cluster_merges_only_provably_linked_entities() {
    // Entities merged by the cluster test must share a component in the
    // constraint graph of every (sampled) hidden square subsystem, at
    // every round and whatever the final verdict.
    let params = CorpusParams::default();
    for seed in 0..120 {
        let sys = random_candidate(seed, &params).unwrap();
        let history = genpf::irreducibility::cluster_partitions(&sys).unwrap();
        assert!(!history.is_empty());
        // Monotone coarsening: cluster counts strictly decrease.
        for pair in history.windows(2) {
            assert!(pair[1].clusters.len() < pair[0].clusters.len(), "seed {seed}");
        }
        for sel in sys.selections().take(20) {
            let sub = sys.apply_selection(&sel).unwrap();
            let graph = genpf::graph::build_constraint_graph(&sub.system);
            let partition = genpf::graph::scc(&graph);
            for stage in &history {
                // Disjoint clusters covering every entity.
                let mut seen = vec![false; sys.entities()];
                for cluster in &stage.clusters {
                    for &e in cluster {
                        assert!(!seen[e], "seed {seed}: entity {e} in two clusters");
                        seen[e] = true;
                    }
                }
                assert!(seen.iter().all(|&s| s), "seed {seed}: partition incomplete");
                // Co-clustered entities share a component in this
                // selection's constraint graph.
                for cluster in &stage.clusters {
                    for pair in cluster.windows(2) {
                        assert_eq!(
                            partition.component_of[pair[0]], partition.component_of[pair[1]],
                            "seed {seed}: round {} split entities {} and {}",
                            stage.round, pair[0], pair[1]
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn solver_matches_enumeration_oracle_on_random_instances() {
    let params = CorpusParams::default();
    let cfg = SolverConfig::default();
    for seed in 1000..1040 {
        let (sys, _) = random_irreducible_system(seed, &params).unwrap();
        let sol = solve(&sys, &cfg).unwrap();
        let oracle = enumerate_solve(&sys, 100_000).unwrap();
        let rel = (sol.beta_star - oracle.best_beta).abs() / oracle.best_beta.abs().max(1.0);
        assert!(
            rel <= 1e-9,
            "seed {seed}: solver {} vs oracle {}",
            sol.beta_star,
            oracle.best_beta
        );
        assert!(
            oracle.optimal_selections.contains(&sol.selection),
            "seed {seed}: selection {:?} not among optimal {:?}",
            sol.selection.affectors(),
            oracle
                .optimal_selections
                .iter()
                .map(|s| s.affectors())
                .collect::<Vec<_>>()
        );
    }
}

#[test]
fn fixtures_agree_with_brute_force() {
    for (sys, expected) in [
        (fixtures::sys_a(), true),
        (fixtures::sys_b(), true),
        (fixtures::sys_c(), true),
        (fixtures::sys_d(), false),
    ] {
        assert_eq!(test_irreducible(&sys).unwrap().irreducible, expected);
        assert_eq!(
            brute_force_irreducible(&sys, 10_000).unwrap().irreducible,
            expected
        );
    }
}
