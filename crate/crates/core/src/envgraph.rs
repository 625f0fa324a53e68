//! The environment graph: belief supports connected by strict refinements.

use crate::envset::EnvSet;
use crate::model::Memdp;
use std::collections::{BTreeSet, HashMap};
use std::fmt::Write;

/// All beliefs `J' ≠ J` obtainable from `J` by one realizable transition.
/// Every result is a strict nonempty subset of `J`. Sorted for determinism.
pub fn env_graph_successors(m: &Memdp, belief: &EnvSet) -> Vec<EnvSet> {
    let mut out: BTreeSet<EnvSet> = BTreeSet::new();
    for s in 0..m.num_states() {
        for a in 0..m.num_actions() {
            for entry in m.support(s, a) {
                let next = belief.intersection(&entry.envs);
                if !next.is_empty() && next != *belief {
                    out.insert(next);
                }
            }
        }
    }
    out.into_iter().collect()
}

/// The fragment of the environment graph reachable from a root belief.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnvGraph {
    /// Vertices in discovery order; the root comes first.
    pub vertices: Vec<EnvSet>,
    /// Edges as vertex index pairs `(from, to)`.
    pub edges: Vec<(usize, usize)>,
}

impl EnvGraph {
    pub fn reachable(m: &Memdp, root: &EnvSet) -> EnvGraph {
        let mut index: HashMap<EnvSet, usize> = HashMap::new();
        let mut vertices = vec![root.clone()];
        index.insert(root.clone(), 0);
        let mut edges = Vec::new();
        let mut next = 0;
        while next < vertices.len() {
            let current = vertices[next].clone();
            for succ in env_graph_successors(m, &current) {
                let id = *index.entry(succ.clone()).or_insert_with(|| {
                    vertices.push(succ);
                    vertices.len() - 1
                });
                edges.push((next, id));
            }
            next += 1;
        }
        EnvGraph { vertices, edges }
    }

    /// Number of vertices on the longest path.
    pub fn longest_path(&self) -> usize {
        // Successors are strict subsets, so ordering by size is topological.
        let mut order: Vec<usize> = (0..self.vertices.len()).collect();
        order.sort_by_key(|&v| self.vertices[v].len());
        let mut depth = vec![1usize; self.vertices.len()];
        for &v in &order {
            for &(from, to) in &self.edges {
                if from == v {
                    depth[from] = depth[from].max(depth[to] + 1);
                }
            }
        }
        depth.into_iter().max().unwrap_or(0)
    }

    /// DOT digraph with one-based environment labels such as `{1,2,3}`.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph envgraph {\n");
        for (v, set) in self.vertices.iter().enumerate() {
            let _ = writeln!(out, "  v{v} [label=\"{}\"];", one_based(set));
        }
        for &(from, to) in &self.edges {
            let _ = writeln!(out, "  v{from} -> v{to};");
        }
        out.push_str("}\n");
        out
    }
}

/// `{1,2,3}` style label for a belief.
pub fn one_based(set: &EnvSet) -> String {
    let items: Vec<String> = set.iter().map(|e| (e + 1).to_string()).collect();
    format!("{{{}}}", items.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchgen::{gen_exponential, gen_random, running_example, RandomParams};

    fn sets(n: usize, items: &[&[usize]]) -> Vec<EnvSet> {
        let mut v: Vec<EnvSet> = items
            .iter()
            .map(|s| EnvSet::from_indices(n, s.iter().map(|i| i - 1)))
            .collect();
        v.sort();
        v
    }

    #[test]
    fn running_example_successors() {
        let m = running_example();
        let succ = env_graph_successors(&m, &m.all_envs());
        // {1,3} comes from a2 at s0: good in N2, bad in N1 and N3.
        assert_eq!(
            succ,
            sets(3, &[&[2, 3], &[1, 2], &[1, 3], &[1], &[2], &[3]])
        );
        let j12 = EnvSet::from_indices(3, [0, 1]);
        assert_eq!(env_graph_successors(&m, &j12), sets(3, &[&[1], &[2]]));
        for i in 0..3 {
            assert!(env_graph_successors(&m, &EnvSet::singleton(3, i)).is_empty());
        }
    }

    #[test]
    fn dot_labels_are_one_based() {
        let m = running_example();
        let g = EnvGraph::reachable(&m, &m.all_envs());
        let dot = g.to_dot();
        assert!(dot.contains("v0 [label=\"{1,2,3}\"]"));
        let j23 = g
            .vertices
            .iter()
            .position(|v| *v == EnvSet::from_indices(3, [1, 2]))
            .unwrap();
        assert!(dot.contains(&format!("v0 -> v{j23};")));
        assert_eq!(g.vertices.len(), 7);
    }

    #[test]
    fn exponential_root_splits_off_single_environments() {
        let m = gen_exponential(2).unwrap();
        let g = EnvGraph::reachable(&m, &m.all_envs());
        for drop in 0..4 {
            let mut child = m.all_envs();
            child.remove(drop);
            assert!(g.vertices.contains(&child), "missing I minus {drop}");
        }
    }

    #[test]
    fn random_structure_bounds() {
        for seed in 0..60 {
            let m = gen_random(&RandomParams::new(seed, 8, 4, 3, seed % 2 == 1));
            let g = EnvGraph::reachable(&m, &m.all_envs());
            assert!(g.longest_path() <= m.num_envs());
            let bound = m.num_states() * m.num_states() * m.num_actions();
            for (v, set) in g.vertices.iter().enumerate() {
                let out: Vec<_> = g.edges.iter().filter(|e| e.0 == v).collect();
                assert!(out.len() <= bound);
                for &&(_, to) in &out {
                    assert!(g.vertices[to].is_strict_subset(set));
                    assert!(!g.vertices[to].is_empty());
                }
            }
        }
    }
}
