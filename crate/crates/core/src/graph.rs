//! Undirected weighted multigraphs and the connectivity checks every solver shares.

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::weight::PerturbedWeight;

pub type NodeId = usize;
pub type EdgeId = usize;
pub type NodeSet = BTreeSet<NodeId>;
pub type EdgeSet = BTreeSet<EdgeId>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub u: NodeId,
    pub v: NodeId,
    pub weight: PerturbedWeight,
}

impl Edge {
    pub fn other(&self, x: NodeId) -> NodeId {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }
}

/// Source `s1`, partner `s2` and destination `t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Terminals {
    pub s1: NodeId,
    pub s2: NodeId,
    pub t: NodeId,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PerturbMode {
    Edges,
    Nodes,
}

/// Adjacency lists hold `(edge, neighbor)` pairs in edge insertion order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    node_weights: Vec<PerturbedWeight>,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<(EdgeId, NodeId)>>,
}

impl Graph {
    /// A graph with `n` isolated nodes of weight 1.
    pub fn new(n: usize) -> Self {
        Self::with_node_weights(vec![PerturbedWeight::base(1); n])
    }

    pub fn with_node_weights(node_weights: Vec<PerturbedWeight>) -> Self {
        let n = node_weights.len();
        Graph {
            node_weights,
            edges: Vec::new(),
            adjacency: vec![Vec::new(); n],
        }
    }

    /// Unit node weights, integer edge weights.
    pub fn from_edges(n: usize, edges: &[(NodeId, NodeId, i64)]) -> Result<Self> {
        let mut graph = Graph::new(n);
        for &(u, v, w) in edges {
            graph.add_edge(u, v, PerturbedWeight::base(w))?;
        }
        Ok(graph)
    }

    pub fn add_node(&mut self, weight: PerturbedWeight) -> NodeId {
        self.node_weights.push(weight);
        self.adjacency.push(Vec::new());
        self.node_weights.len() - 1
    }

    pub fn add_edge(&mut self, u: NodeId, v: NodeId, weight: PerturbedWeight) -> Result<EdgeId> {
        let id = self.edges.len();
        self.check_node(u)?;
        self.check_node(v)?;
        if u == v {
            return Err(Error::SelfLoop(id));
        }
        self.edges.push(Edge { u, v, weight });
        self.adjacency[u].push((id, v));
        self.adjacency[v].push((id, u));
        Ok(id)
    }

    pub fn check_node(&self, v: NodeId) -> Result<()> {
        if v < self.node_count() {
            Ok(())
        } else {
            Err(Error::NodeOutOfRange(v))
        }
    }

    pub fn node_count(&self) -> usize {
        self.node_weights.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e]
    }

    pub fn endpoints(&self, e: EdgeId) -> (NodeId, NodeId) {
        (self.edges[e].u, self.edges[e].v)
    }

    pub fn neighbors(&self, v: NodeId) -> &[(EdgeId, NodeId)] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.adjacency[v].len()
    }

    pub fn node_weight(&self, v: NodeId) -> &PerturbedWeight {
        &self.node_weights[v]
    }

    pub fn node_weights(&self) -> &[PerturbedWeight] {
        &self.node_weights
    }

    pub fn edge_weight(&self, e: EdgeId) -> &PerturbedWeight {
        &self.edges[e].weight
    }

    pub fn set_node_weight(&mut self, v: NodeId, weight: PerturbedWeight) {
        self.node_weights[v] = weight;
    }

    pub fn set_edge_weight(&mut self, e: EdgeId, weight: PerturbedWeight) {
        self.edges[e].weight = weight;
    }

    pub fn is_adjacent(&self, u: NodeId, v: NodeId) -> bool {
        self.adjacency[u].iter().any(|&(_, w)| w == v)
    }

    /// Rejects weights that are not strictly positive.
    pub fn check_positive_weights(&self) -> Result<()> {
        for (v, w) in self.node_weights.iter().enumerate() {
            if !w.is_positive() {
                return Err(Error::NonPositiveWeight(format!("node {v} has weight {w}")));
            }
        }
        for (e, edge) in self.edges.iter().enumerate() {
            if !edge.weight.is_positive() {
                return Err(Error::NonPositiveWeight(format!(
                    "edge {e} has weight {}",
                    edge.weight
                )));
            }
        }
        Ok(())
    }

    /// Element `i` (in id order) gets weight `c_i + e^(i+1)`, so no two distinct
    /// element subsets share a total. Infinite weights are left alone.
    pub fn perturb(&self, mode: PerturbMode) -> Graph {
        let mut out = self.clone();
        let tag = |w: &PerturbedWeight, rank: usize| match w.base_value() {
            Some(c) => PerturbedWeight::with_epsilon(c, rank),
            None => PerturbedWeight::Infinite,
        };
        match mode {
            PerturbMode::Edges => {
                for (i, edge) in out.edges.iter_mut().enumerate() {
                    edge.weight = tag(&edge.weight, i + 1);
                }
            }
            PerturbMode::Nodes => {
                for (i, w) in out.node_weights.iter_mut().enumerate() {
                    *w = tag(w, i + 1);
                }
            }
        }
        out
    }

    /// True when every finite weight of the given kind carries exactly one
    /// unit infinitesimal term and no two elements share a rank.
    pub fn is_perturbed(&self, mode: PerturbMode) -> bool {
        let weights: Vec<&PerturbedWeight> = match mode {
            PerturbMode::Edges => self.edges.iter().map(|e| &e.weight).collect(),
            PerturbMode::Nodes => self.node_weights.iter().collect(),
        };
        let mut seen = BTreeSet::new();
        for w in weights {
            if w.is_infinite() {
                continue;
            }
            match w.epsilon_terms().as_slice() {
                [(rank, 1)] if seen.insert(*rank) => {}
                _ => return false,
            }
        }
        true
    }

    /// Reachability mask from `seed` after deleting the flagged nodes and edges.
    pub fn component_mask(&self, seed: NodeId, node_removed: &[bool], edge_removed: &[bool]) -> Vec<bool> {
        let mut seen = vec![false; self.node_count()];
        if node_removed.get(seed).copied().unwrap_or(false) {
            return seen;
        }
        seen[seed] = true;
        let mut queue = VecDeque::from([seed]);
        while let Some(x) = queue.pop_front() {
            for &(e, y) in &self.adjacency[x] {
                if seen[y]
                    || edge_removed.get(e).copied().unwrap_or(false)
                    || node_removed.get(y).copied().unwrap_or(false)
                {
                    continue;
                }
                seen[y] = true;
                queue.push_back(y);
            }
        }
        seen
    }

    pub fn connected_component(
        &self,
        seed: NodeId,
        removed_nodes: &NodeSet,
        removed_edges: &EdgeSet,
    ) -> Result<NodeSet> {
        self.check_node(seed)?;
        if removed_nodes.contains(&seed) {
            return Err(Error::SeedRemoved(seed));
        }
        let mut node_removed = vec![false; self.node_count()];
        for &v in removed_nodes {
            self.check_node(v)?;
            node_removed[v] = true;
        }
        let mut edge_removed = vec![false; self.edge_count()];
        for &e in removed_edges {
            if e >= self.edge_count() {
                return Err(Error::EdgeOutOfRange(e));
            }
            edge_removed[e] = true;
        }
        let mask = self.component_mask(seed, &node_removed, &edge_removed);
        Ok(mask_to_set(&mask))
    }

    pub fn is_connected(&self) -> bool {
        self.node_count() == 0 || self.component_mask(0, &[], &[]).iter().all(|&x| x)
    }

    /// A node cut preserving `s1`–`s2` while separating `t` exists iff some
    /// `s1`–`s2` path avoids `t` and all of its neighbors.
    pub fn is_feasible_cpmnc(&self, s1: NodeId, s2: NodeId, t: NodeId) -> Result<bool> {
        self.check_terminals(s1, s2, t)?;
        let mut removed = vec![false; self.node_count()];
        removed[t] = true;
        for &(_, y) in &self.adjacency[t] {
            removed[y] = true;
        }
        if removed[s1] || removed[s2] {
            return Ok(false);
        }
        Ok(self.component_mask(s1, &removed, &[])[s2])
    }

    /// An edge cut of the same kind exists iff `s1` and `s2` stay connected without `t`.
    pub fn is_feasible_cpmec(&self, s1: NodeId, s2: NodeId, t: NodeId) -> Result<bool> {
        self.check_terminals(s1, s2, t)?;
        let mut removed = vec![false; self.node_count()];
        removed[t] = true;
        Ok(self.component_mask(s1, &removed, &[])[s2])
    }

    pub fn check_terminals(&self, s1: NodeId, s2: NodeId, t: NodeId) -> Result<()> {
        self.check_node(s1)?;
        self.check_node(s2)?;
        self.check_node(t)?;
        if s1 == s2 || s1 == t || s2 == t {
            return Err(Error::NonDistinctTerminals);
        }
        Ok(())
    }

    /// Copy with adjacency lists reversed; used to probe order independence.
    pub fn with_reversed_adjacency(&self) -> Graph {
        let mut out = self.clone();
        for list in &mut out.adjacency {
            list.reverse();
        }
        out
    }
}

pub fn mask_to_set(mask: &[bool]) -> NodeSet {
    mask.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> Graph {
        let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1, 1)).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    #[test]
    fn self_loops_are_rejected() {
        let mut g = Graph::new(2);
        assert_eq!(g.add_edge(1, 1, 1.into()), Err(Error::SelfLoop(0)));
        assert!(g.add_edge(0, 2, 1.into()).is_err());
        g.add_edge(0, 1, 1.into()).unwrap();
        g.add_edge(0, 1, 1.into()).unwrap();
        assert_eq!(g.degree(0), 2);
    }

    #[test]
    fn components_after_deletions() {
        let g = path(3);
        let none = EdgeSet::new();
        let comp = g.connected_component(0, &NodeSet::from([1]), &none).unwrap();
        assert_eq!(comp, NodeSet::from([0]));
        let comp = g.connected_component(0, &NodeSet::new(), &EdgeSet::from([1])).unwrap();
        assert_eq!(comp, NodeSet::from([0, 1]));
        let tri = Graph::from_edges(3, &[(0, 1, 1), (1, 2, 1), (2, 0, 1)]).unwrap();
        for seed in 0..3 {
            let comp = tri.connected_component(seed, &NodeSet::new(), &none).unwrap();
            assert_eq!(comp.len(), 3);
        }
        assert_eq!(
            g.connected_component(1, &NodeSet::from([1]), &none),
            Err(Error::SeedRemoved(1))
        );
    }

    #[test]
    fn node_cut_feasibility() {
        // s1-a-s2-b-t
        let g = path(5);
        assert!(g.is_feasible_cpmnc(0, 2, 4).unwrap());
        let tri = Graph::from_edges(3, &[(0, 1, 1), (1, 2, 1), (2, 0, 1)]).unwrap();
        assert!(!tri.is_feasible_cpmnc(0, 1, 2).unwrap());
        let star = Graph::from_edges(3, &[(2, 0, 1), (2, 1, 1)]).unwrap();
        assert!(!star.is_feasible_cpmnc(0, 1, 2).unwrap());
        assert_eq!(g.is_feasible_cpmnc(0, 0, 4), Err(Error::NonDistinctTerminals));
    }

    #[test]
    fn edge_cut_feasibility() {
        let g = path(5);
        assert!(g.is_feasible_cpmec(0, 2, 4).unwrap());
        // s1-t-s2
        let g = Graph::from_edges(3, &[(0, 2, 1), (2, 1, 1)]).unwrap();
        assert!(!g.is_feasible_cpmec(0, 1, 2).unwrap());
        // s1-s2-t-x-s1
        let g = Graph::from_edges(4, &[(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 0, 1)]).unwrap();
        assert!(g.is_feasible_cpmec(0, 1, 2).unwrap());
    }

    #[test]
    fn perturbation_tags_ranks_in_id_order() {
        let g = Graph::from_edges(3, &[(0, 1, 1), (1, 2, 1), (0, 2, 1)]).unwrap();
        assert!(!g.is_perturbed(PerturbMode::Edges));
        let p = g.perturb(PerturbMode::Edges);
        assert!(p.is_perturbed(PerturbMode::Edges));
        assert_eq!(*p.edge_weight(0), PerturbedWeight::with_epsilon(1, 1));
        assert_eq!(*p.edge_weight(2), PerturbedWeight::with_epsilon(1, 3));
        let two = p.edge_weight(0) + p.edge_weight(1);
        assert!(two > *p.edge_weight(2));

        let single = Graph::from_edges(2, &[(0, 1, 5)]).unwrap().perturb(PerturbMode::Edges);
        assert!(*single.edge_weight(0) > PerturbedWeight::base(5));

        let nodes = g.perturb(PerturbMode::Nodes);
        assert!(nodes.is_perturbed(PerturbMode::Nodes));
        assert!(!nodes.is_perturbed(PerturbMode::Edges));
    }

    #[test]
    fn all_subset_sums_distinct_after_perturbation() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut g = Graph::new(6);
        while g.edge_count() < 10 {
            let u = rng.gen_range(0..6);
            let v = rng.gen_range(0..6);
            if u != v {
                g.add_edge(u, v, rng.gen_range(1..4).into()).unwrap();
            }
        }
        let p = g.perturb(PerturbMode::Edges);
        let mut sums = BTreeSet::new();
        for mask in 0u32..1 << 10 {
            let total: PerturbedWeight = (0..10)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| p.edge_weight(i))
                .sum();
            assert!(sums.insert(total));
        }
        assert_eq!(sums.len(), 1024);
    }
}
