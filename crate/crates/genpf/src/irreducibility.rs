//! Irreducibility of square and nonsquare systems.
//!
//! A square system is irreducible when its supporter matrix is nonsingular
//! and its repressor matrix is irreducible. A nonsquare system is
//! irreducible when *every* hidden square subsystem is. Enumerating the
//! subsystems is exponential, so [`test_irreducible`] decides the question
//! in polynomial time by coarsening a partition of the entities: clusters
//! merge when they provably share a strongly connected component in every
//! per-selection constraint graph, and the system is reducible exactly when
//! the merging gets stuck before a single cluster remains.

use std::collections::BTreeSet;

use crate::graph::{build_constraint_graph, scc_of_adjacency};
use crate::system::{GainSystem, Selection, SystemClass};
use crate::{Error, Result};

/// Entity partition at one round of the cluster-merging loop.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterPartition {
    pub round: usize,
    /// Disjoint entity sets covering all entities, each sorted, the list
    /// ordered by smallest member.
    pub clusters: Vec<Vec<usize>>,
}

/// Why a system was declared reducible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReducibilityWitness {
    /// Two entities share a supporter, so some selection induces a
    /// singular supporter matrix.
    OverlappingSupporters {
        affector: usize,
        entities: (usize, usize),
    },
    /// A concrete selection whose square subsystem is reducible.
    ReducibleSelection(Selection),
    /// The cluster graph of this round has only singleton components, so
    /// no merge is possible; kept when no concrete selection could be
    /// reconstructed.
    StuckClusterGraph {
        partition: ClusterPartition,
        edges: Vec<(usize, usize)>,
    },
}

/// Outcome of [`test_irreducible`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IrreducibilityReport {
    pub irreducible: bool,
    /// Merging rounds executed; always at most `n - 1`.
    pub rounds: usize,
    /// Present exactly when the system is reducible.
    pub witness: Option<ReducibilityWitness>,
}

impl IrreducibilityReport {
    pub fn summary(&self) -> String {
        if self.irreducible {
            format!("irreducible after {} rounds", self.rounds)
        } else {
            match &self.witness {
                Some(ReducibilityWitness::OverlappingSupporters { affector, entities }) => {
                    format!(
                        "entities {} and {} share supporter {affector}",
                        entities.0, entities.1
                    )
                }
                Some(ReducibilityWitness::ReducibleSelection(sel)) => {
                    format!("selection {:?} induces a reducible square system", sel.affectors())
                }
                Some(ReducibilityWitness::StuckClusterGraph { partition, .. }) => format!(
                    "cluster merging stuck at round {} with {} clusters",
                    partition.round,
                    partition.clusters.len()
                ),
                None => "reducible".to_string(),
            }
        }
    }
}

/// Direct check for square systems: disjoint supporters with a positive
/// diagonal (nonsingular supporter matrix) and a strongly connected
/// constraint graph (irreducible repressor matrix).
///
/// Strong connectivity here demands a directed path of positive length
/// between every ordered vertex pair, so a single entity without a
/// self-loop is reducible, matching the matrix definition.
pub fn is_irreducible_square(system: &GainSystem) -> Result<bool> {
    if system.classify()? != SystemClass::Square {
        return Err(Error::NotSquare);
    }
    if find_supporter_overlap(system).is_some() || system.entities() > system.affectors() {
        return Ok(false);
    }
    let graph = build_constraint_graph(system);
    let connected = graph.is_strongly_connected()
        && (system.entities() > 1 || graph.has_edge(0, 0));
    Ok(connected)
}

fn find_supporter_overlap(system: &GainSystem) -> Option<(usize, (usize, usize))> {
    let m = system.affectors();
    let mut owner: Vec<Option<usize>> = vec![None; m];
    for i in 0..system.entities() {
        for &j in system.supporters(i) {
            match owner[j] {
                Some(prev) => return Some((j, (prev, i))),
                None => owner[j] = Some(i),
            }
        }
    }
    None
}

/// Polynomial-time irreducibility test by cluster merging.
///
/// Requires a valid system with no redundant affectors; callers should run
/// [`GainSystem::remove_redundant_affectors`] first.
pub fn test_irreducible(system: &GainSystem) -> Result<IrreducibilityReport> {
    Ok(run_cluster_merging(system)?.1)
}

/// The partition after every merging round, starting from singletons.
/// Entities sharing a cluster at any round provably share a strongly
/// connected component in the constraint graph of every hidden square
/// subsystem.
pub fn cluster_partitions(system: &GainSystem) -> Result<Vec<ClusterPartition>> {
    Ok(run_cluster_merging(system)?.0)
}

fn run_cluster_merging(
    system: &GainSystem,
) -> Result<(Vec<ClusterPartition>, IrreducibilityReport)> {
    let violations = system.validate();
    if !violations.is_empty() {
        return Err(Error::InvalidSystem(violations));
    }
    let redundant = system.redundant_affectors();
    if !redundant.is_empty() {
        return Err(Error::RedundantAffectors(redundant));
    }
    let n = system.entities();

    let singletons = ClusterPartition {
        round: 0,
        clusters: (0..n).map(|i| vec![i]).collect(),
    };
    let mut history = vec![singletons];

    // Disjoint supporter sets are necessary: a shared supporter yields a
    // selection with singular supporter matrix.
    if let Some((affector, entities)) = find_supporter_overlap(system) {
        return Ok((
            history,
            IrreducibilityReport {
                irreducible: false,
                rounds: 0,
                witness: Some(ReducibilityWitness::OverlappingSupporters { affector, entities }),
            },
        ));
    }

    // A single entity never represses itself, so its only square subsystem
    // has a zero repressor matrix.
    if n == 1 {
        let sel = Selection::complete(&[system.supporters(0)[0]]);
        return Ok((
            history,
            IrreducibilityReport {
                irreducible: false,
                rounds: 0,
                witness: Some(ReducibilityWitness::ReducibleSelection(sel)),
            },
        ));
    }

    let mut clusters: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut round = 0;
    while clusters.len() > 1 {
        let repressor_unions: Vec<BTreeSet<usize>> = clusters
            .iter()
            .map(|c| {
                c.iter()
                    .flat_map(|&k| system.repressors(k).iter().copied())
                    .collect()
            })
            .collect();
        // Cluster edge (i, j) iff some entity of cluster i has all of its
        // supporters repressing cluster j, whichever supporter it selects.
        let adj: Vec<Vec<usize>> = (0..clusters.len())
            .map(|i| {
                (0..clusters.len())
                    .filter(|&j| {
                        clusters[i].iter().any(|&k| {
                            system
                                .supporters(k)
                                .iter()
                                .all(|a| repressor_unions[j].contains(a))
                        })
                    })
                    .collect()
            })
            .collect();
        let partition = scc_of_adjacency(&adj);
        if partition.count == clusters.len() {
            // Nothing merged: reducible. Try to reconstruct a concrete
            // reducible selection from a cluster no other cluster must
            // repress.
            let witness = extract_selection_witness(system, &clusters, &adj, &repressor_unions)
                .unwrap_or_else(|| ReducibilityWitness::StuckClusterGraph {
                    partition: ClusterPartition {
                        round,
                        clusters: clusters.clone(),
                    },
                    edges: adj
                        .iter()
                        .enumerate()
                        .flat_map(|(u, outs)| outs.iter().map(move |&v| (u, v)))
                        .collect(),
                });
            return Ok((
                history,
                IrreducibilityReport {
                    irreducible: false,
                    rounds: round,
                    witness: Some(witness),
                },
            ));
        }
        let mut merged: Vec<Vec<usize>> = (0..partition.count)
            .map(|c| {
                let mut members: Vec<usize> = partition
                    .members(c)
                    .into_iter()
                    .flat_map(|ci| clusters[ci].iter().copied())
                    .collect();
                members.sort_unstable();
                members
            })
            .collect();
        merged.sort_by_key(|c| c[0]);
        clusters = merged;
        round += 1;
        history.push(ClusterPartition {
            round,
            clusters: clusters.clone(),
        });
    }
    Ok((
        history,
        IrreducibilityReport {
            irreducible: true,
            rounds: round,
            witness: None,
        },
    ))
}

/// Builds a selection that provably disconnects the constraint graph when
/// the cluster graph has a source cluster: every entity outside the source
/// picks a supporter that does not repress it.
fn extract_selection_witness(
    system: &GainSystem,
    clusters: &[Vec<usize>],
    adj: &[Vec<usize>],
    repressor_unions: &[BTreeSet<usize>],
) -> Option<ReducibilityWitness> {
    let k = clusters.len();
    let mut indegree = vec![0usize; k];
    for (u, outs) in adj.iter().enumerate() {
        for &v in outs {
            if u != v {
                indegree[v] += 1;
            }
        }
    }
    let source = (0..k).find(|&c| indegree[c] == 0)?;
    let blocked = &repressor_unions[source];
    let in_source = |entity: usize| clusters[source].contains(&entity);
    let mut picks = Vec::with_capacity(system.entities());
    for entity in 0..system.entities() {
        let choice = if in_source(entity) {
            Some(system.supporters(entity)[0])
        } else {
            system
                .supporters(entity)
                .iter()
                .copied()
                .find(|a| !blocked.contains(a))
        };
        picks.push(choice?);
    }
    let sel = Selection::complete(&picks);
    // Sanity: the claimed witness must actually induce a reducible square
    // system; fall back to the stuck-graph report otherwise.
    let sub = system.apply_selection(&sel).ok()?;
    match is_irreducible_square(&sub.system) {
        Ok(false) => Some(ReducibilityWitness::ReducibleSelection(sel)),
        _ => None,
    }
}

/// Verdict plus witness from exhaustive selection enumeration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BruteForceVerdict {
    pub irreducible: bool,
    /// First reducible selection in lexicographic order, if any.
    pub witness: Option<Selection>,
    pub checked: u64,
}

/// Ground-truth irreducibility by checking every hidden square subsystem.
pub fn brute_force_irreducible(system: &GainSystem, budget: u64) -> Result<BruteForceVerdict> {
    let count = system.selection_count();
    if count > budget as u128 {
        return Err(Error::BudgetExceeded {
            required: count,
            budget,
        });
    }
    let mut checked = 0;
    for sel in system.selections() {
        checked += 1;
        let sub = system.apply_selection(&sel)?;
        if !is_irreducible_square(&sub.system)? {
            return Ok(BruteForceVerdict {
                irreducible: false,
                witness: Some(sel),
                checked,
            });
        }
    }
    Ok(BruteForceVerdict {
        irreducible: true,
        witness: None,
        checked,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::fixtures;

    #[test]
    fn square_fixture_is_irreducible() {
        assert!(is_irreducible_square(&fixtures::sys_c()).unwrap());
    }

    #[test]
    fn square_without_return_edge_is_reducible() {
        let sys = GainSystem::from_signed_ints(&[vec![1, -1], vec![0, 1]]).unwrap();
        assert!(!is_irreducible_square(&sys).unwrap());
    }

    #[test]
    fn square_with_shared_supporter_is_reducible() {
        // Both entities lean on affector 0; m <= n keeps it in the square
        // family but the supporter matrix is singular.
        let sys = GainSystem::from_split(
            vec![
                vec![crate::numeric::rat_int(1), crate::numeric::rat_int(0)],
                vec![crate::numeric::rat_int(2), crate::numeric::rat_int(0)],
            ],
            vec![
                vec![crate::numeric::rat_int(0), crate::numeric::rat_int(1)],
                vec![crate::numeric::rat_int(0), crate::numeric::rat_int(0)],
            ],
        )
        .unwrap();
        assert!(!is_irreducible_square(&sys).unwrap());
    }

    #[test]
    fn square_check_rejects_nonsquare() {
        assert!(matches!(
            is_irreducible_square(&fixtures::sys_a()),
            Err(Error::NotSquare)
        ));
    }

    #[test]
    fn test_irreducible_accepts_sys_a_in_one_round() {
        let report = test_irreducible(&fixtures::sys_a()).unwrap();
        assert!(report.irreducible);
        assert_eq!(report.rounds, 1);
        assert!(report.witness.is_none());
    }

    #[test]
    fn test_irreducible_rejects_sys_d_with_selection_witness() {
        let report = test_irreducible(&fixtures::sys_d()).unwrap();
        assert!(!report.irreducible);
        match report.witness {
            Some(ReducibilityWitness::ReducibleSelection(sel)) => {
                let sub = fixtures::sys_d().apply_selection(&sel).unwrap();
                assert!(!is_irreducible_square(&sub.system).unwrap());
            }
            other => panic!("expected a selection witness, got {other:?}"),
        }
    }

    #[test]
    fn test_irreducible_agrees_on_square_path() {
        let report = test_irreducible(&fixtures::sys_c()).unwrap();
        assert!(report.irreducible);
        assert!(report.rounds <= 1);
    }

    #[test]
    fn test_irreducible_rejects_redundant_affectors() {
        let sys = GainSystem::from_signed_ints(&[vec![1, -2, 0], vec![-1, 1, -1]]).unwrap();
        assert!(matches!(
            test_irreducible(&sys),
            Err(Error::RedundantAffectors(_))
        ));
    }

    #[test]
    fn overlapping_supporters_reported() {
        let sys = GainSystem::from_signed_ints(&[
            vec![1, 1, -1, 0],
            vec![0, 1, 1, -1],
            vec![-1, 0, 0, 1],
        ])
        .unwrap();
        let report = test_irreducible(&sys).unwrap();
        assert!(!report.irreducible);
        assert!(matches!(
            report.witness,
            Some(ReducibilityWitness::OverlappingSupporters {
                affector: 1,
                entities: (0, 1)
            })
        ));
    }

    #[test]
    fn single_entity_system_is_reducible() {
        let sys = GainSystem::from_signed_ints(&[vec![1, 2]]).unwrap();
        let report = test_irreducible(&sys).unwrap();
        assert!(!report.irreducible);
        let brute = brute_force_irreducible(&sys, 10).unwrap();
        assert!(!brute.irreducible);
    }

    #[test]
    fn brute_force_verdicts_on_fixtures() {
        assert!(brute_force_irreducible(&fixtures::sys_a(), 100)
            .unwrap()
            .irreducible);
        let verdict = brute_force_irreducible(&fixtures::sys_d(), 100).unwrap();
        assert!(!verdict.irreducible);
        assert_eq!(verdict.witness.unwrap().affectors(), vec![1, 2]);
        assert!(brute_force_irreducible(&fixtures::sys_c(), 100)
            .unwrap()
            .irreducible);
    }

    #[test]
    fn brute_force_respects_budget() {
        assert!(matches!(
            brute_force_irreducible(&fixtures::sys_a(), 2),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn rounds_bounded_by_entities() {
        for sys in [fixtures::sys_a(), fixtures::sys_b(), fixtures::sys_c()] {
            let report = test_irreducible(&sys).unwrap();
            assert!(report.rounds <= sys.entities().saturating_sub(1));
        }
    }

    #[test]
    fn cluster_test_matches_brute_force_on_fixtures() {
        for sys in [
            fixtures::sys_a(),
            fixtures::sys_b(),
            fixtures::sys_c(),
            fixtures::sys_d(),
        ] {
            let fast = test_irreducible(&sys).unwrap().irreducible;
            let slow = brute_force_irreducible(&sys, 10_000).unwrap().irreducible;
            assert_eq!(fast, slow);
        }
    }
}
