//! Constraint graphs over entities and the connectivity machinery built on
//! them.
//!
//! The constraint graph has an edge `i -> j` exactly when some supporter of
//! entity `i` is a repressor of entity `j`. Strong connectivity of these
//! graphs, across every hidden square subsystem, is what irreducibility of
//! a nonsquare system boils down to.

use crate::system::GainSystem;
use crate::{Error, Result};

/// Directed graph on entity indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintGraph {
    n: usize,
    adj: Vec<Vec<usize>>,
}

impl ConstraintGraph {
    pub fn new(n: usize, mut adj: Vec<Vec<usize>>) -> Self {
        assert_eq!(adj.len(), n, "adjacency list length must equal n");
        for out in &mut adj {
            out.sort_unstable();
            out.dedup();
        }
        ConstraintGraph { n, adj }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn out_neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.adj[from].binary_search(&to).is_ok()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, outs)| outs.iter().map(move |&v| (u, v)))
    }

    /// One strongly connected component covering every vertex.
    pub fn is_strongly_connected(&self) -> bool {
        scc(self).count == 1
    }

    /// GraphViz DOT rendering, vertices named after entities.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph constraints {\n");
        for v in 0..self.n {
            out.push_str(&format!("  e{v};\n"));
        }
        for (u, v) in self.edges() {
            out.push_str(&format!("  e{u} -> e{v};\n"));
        }
        out.push_str("}\n");
        out
    }
}

/// Builds the constraint graph of a system: edge `i -> j` iff the supporter
/// set of `i` intersects the repressor set of `j`.
pub fn build_constraint_graph(system: &GainSystem) -> ConstraintGraph {
    let n = system.entities();
    let adj = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| intersects(system.supporters(i), system.repressors(j)))
                .collect()
        })
        .collect();
    ConstraintGraph::new(n, adj)
}

/// True when two ascending index slices share an element.
pub(crate) fn intersects(a: &[usize], b: &[usize]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return true,
        }
    }
    false
}

/// Strongly-connected-component decomposition with deterministic numbering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SccPartition {
    /// Component id per vertex; components are numbered by their smallest
    /// contained vertex, ascending.
    pub component_of: Vec<usize>,
    pub count: usize,
    /// Condensation edges `(component, component)`, deduplicated, sorted.
    pub condensation: Vec<(usize, usize)>,
}

impl SccPartition {
    pub fn members(&self, component: usize) -> Vec<usize> {
        (0..self.component_of.len())
            .filter(|&v| self.component_of[v] == component)
            .collect()
    }
}

/// Tarjan's algorithm on a [`ConstraintGraph`].
pub fn scc(graph: &ConstraintGraph) -> SccPartition {
    scc_of_adjacency(&graph.adj)
}

/// Tarjan's algorithm on a raw adjacency list.
pub fn scc_of_adjacency(adj: &[Vec<usize>]) -> SccPartition {
    let n = adj.len();
    let mut state = Tarjan {
        index: 0,
        stack: Vec::new(),
        on_stack: vec![false; n],
        idx: vec![None; n],
        low: vec![0; n],
        comps: Vec::new(),
    };
    for v in 0..n {
        if state.idx[v].is_none() {
            strongconnect(v, adj, &mut state);
        }
    }
    // Renumber components by minimum vertex for reproducible output.
    let mut comps = state.comps;
    comps.sort_by_key(|c| *c.iter().min().unwrap());
    let mut component_of = vec![0; n];
    for (id, comp) in comps.iter().enumerate() {
        for &v in comp {
            component_of[v] = id;
        }
    }
    let mut condensation: Vec<(usize, usize)> = Vec::new();
    for (u, outs) in adj.iter().enumerate() {
        for &v in outs {
            if component_of[u] != component_of[v] {
                condensation.push((component_of[u], component_of[v]));
            }
        }
    }
    condensation.sort_unstable();
    condensation.dedup();
    SccPartition {
        component_of,
        count: comps.len(),
        condensation,
    }
}

struct Tarjan {
    index: usize,
    stack: Vec<usize>,
    on_stack: Vec<bool>,
    idx: Vec<Option<usize>>,
    low: Vec<usize>,
    comps: Vec<Vec<usize>>,
}

fn strongconnect(v: usize, adj: &[Vec<usize>], state: &mut Tarjan) {
    state.idx[v] = Some(state.index);
    state.low[v] = state.index;
    state.index += 1;
    state.stack.push(v);
    state.on_stack[v] = true;

    for &w in &adj[v] {
        if state.idx[w].is_none() {
            strongconnect(w, adj, state);
            state.low[v] = state.low[v].min(state.low[w]);
        } else if state.on_stack[w] {
            state.low[v] = state.low[v].min(state.idx[w].unwrap());
        }
    }

    if state.low[v] == state.idx[v].unwrap() {
        let mut comp = Vec::new();
        loop {
            let w = state.stack.pop().expect("tarjan stack underflow");
            state.on_stack[w] = false;
            comp.push(w);
            if w == v {
                break;
            }
        }
        state.comps.push(comp);
    }
}

/// Breadth-first layers from `root`: layer `k` holds the vertices at
/// shortest directed distance `k`. Unreachable vertices are returned
/// separately.
pub fn bfs_layers(graph: &ConstraintGraph, root: usize) -> (Vec<Vec<usize>>, Vec<usize>) {
    assert!(root < graph.n, "root out of range");
    let mut dist = vec![None; graph.n];
    dist[root] = Some(0usize);
    let mut layers = vec![vec![root]];
    loop {
        let mut next = Vec::new();
        for &u in layers.last().unwrap() {
            for &v in graph.out_neighbors(u) {
                if dist[v].is_none() {
                    dist[v] = Some(layers.len());
                    next.push(v);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        next.sort_unstable();
        layers.push(next);
    }
    let unreachable = (0..graph.n).filter(|&v| dist[v].is_none()).collect();
    (layers, unreachable)
}

/// Exhaustively checks that the constraint graph of every hidden square
/// subsystem is strongly connected. Declines when the selection count
/// exceeds `budget`; use the cluster-merging irreducibility test instead.
pub fn is_robustly_strongly_connected(system: &GainSystem, budget: u64) -> Result<bool> {
    let count = system.selection_count();
    if count > budget as u128 {
        return Err(Error::BudgetExceeded {
            required: count,
            budget,
        });
    }
    for sel in system.selections() {
        let sub = system.apply_selection(&sel)?;
        if !build_constraint_graph(&sub.system).is_strongly_connected() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::fixtures;
    use crate::system::Selection;

    #[test]
    fn constraint_graph_of_sys_a_is_two_cycle() {
        let g = build_constraint_graph(&fixtures::sys_a());
        assert!(g.has_edge(0, 1));
        assert!(g.has_edge(1, 0));
        assert!(!g.has_edge(0, 0));
        assert!(!g.has_edge(1, 1));
    }

    #[test]
    fn constraint_graph_of_sys_c_is_two_cycle() {
        let g = build_constraint_graph(&fixtures::sys_c());
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 0)]);
    }

    #[test]
    fn single_entity_no_repressors_has_no_edges() {
        let sys = crate::system::GainSystem::from_signed_ints(&[vec![1]]).unwrap();
        let g = build_constraint_graph(&sys);
        assert_eq!(g.edges().count(), 0);
    }

    #[test]
    fn scc_on_cycle_is_single_component() {
        let g = ConstraintGraph::new(2, vec![vec![1], vec![0]]);
        let p = scc(&g);
        assert_eq!(p.count, 1);
        assert!(g.is_strongly_connected());
        assert!(p.condensation.is_empty());
    }

    #[test]
    fn scc_on_single_edge_is_two_components() {
        let g = ConstraintGraph::new(2, vec![vec![1], vec![]]);
        let p = scc(&g);
        assert_eq!(p.count, 2);
        assert_eq!(p.component_of, vec![0, 1]);
        assert_eq!(p.condensation, vec![(0, 1)]);
    }

    #[test]
    fn scc_of_sys_d_partial_selection_graph() {
        // Selecting affector 1 for entity 0 contracts SYS-D to a system
        // whose constraint graph has the single edge 1 -> 0.
        let sys = fixtures::sys_d();
        let c = sys
            .apply_selection(&Selection::from_pairs(&[(0, 1)]))
            .unwrap();
        let g = build_constraint_graph(&c.system);
        let p = scc(&g);
        assert_eq!(p.count, 2);
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(1, 0)]);
    }

    #[test]
    fn bfs_layers_on_two_cycle() {
        let g = ConstraintGraph::new(2, vec![vec![1], vec![0]]);
        let (layers, unreachable) = bfs_layers(&g, 0);
        assert_eq!(layers, vec![vec![0], vec![1]]);
        assert!(unreachable.is_empty());
    }

    #[test]
    fn bfs_layers_on_isolated_root() {
        let g = ConstraintGraph::new(3, vec![vec![], vec![2], vec![1]]);
        let (layers, unreachable) = bfs_layers(&g, 0);
        assert_eq!(layers, vec![vec![0]]);
        assert_eq!(unreachable, vec![1, 2]);
    }

    #[test]
    fn bfs_layers_on_three_cycle() {
        let g = ConstraintGraph::new(3, vec![vec![1], vec![2], vec![0]]);
        let (layers, unreachable) = bfs_layers(&g, 1);
        assert_eq!(layers, vec![vec![1], vec![2], vec![0]]);
        assert!(unreachable.is_empty());
    }

    #[test]
    fn robust_connectivity_of_fixtures() {
        assert!(is_robustly_strongly_connected(&fixtures::sys_a(), 100).unwrap());
        assert!(!is_robustly_strongly_connected(&fixtures::sys_d(), 100).unwrap());
        // A square system has a single selection, so the robust check is
        // plain strong connectivity.
        assert!(is_robustly_strongly_connected(&fixtures::sys_c(), 1).unwrap());
        assert!(matches!(
            is_robustly_strongly_connected(&fixtures::sys_a(), 3),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn removing_affectors_never_adds_edges() {
        let sys = fixtures::sys_b();
        let full = build_constraint_graph(&sys);
        for sel in sys.selections() {
            let sub = sys.apply_selection(&sel).unwrap();
            let g = build_constraint_graph(&sub.system);
            // Every edge of the subsystem graph exists in the full graph.
            for (u, v) in g.edges() {
                assert!(full.has_edge(u, v));
            }
        }
    }

    #[test]
    fn dot_export_mentions_all_edges() {
        let g = build_constraint_graph(&fixtures::sys_a());
        let dot = g.to_dot();
        assert!(dot.contains("e0 -> e1"));
        assert!(dot.contains("e1 -> e0"));
    }
}
