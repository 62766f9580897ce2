//! Exhaustive reference solvers, written straight from the problem definitions.
//!
//! The cut oracles run a depth-first branch and bound over element subsets.
//! A branch is pruned when its weight already reaches the incumbent, when the
//! deletions so far disconnect `s1` from `s2` (more deletions cannot repair
//! that), or when deleting everything still undecided would leave `s1`
//! connected to `t`. None of these prunes can discard the optimum.
//!
//! The node oracle also merges true twins (nodes with equal closed
//! neighborhoods): deleting only part of a twin class never changes
//! connectivity, so optimal cuts take whole classes or nothing.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph, NodeId, Terminals};
use crate::lcsp::{ConstrainedPath, LcspQuery, Route};
use crate::mincut::{CutKind, CutResult};
use crate::reductions::SetCoverInstance;
use crate::weight::PerturbedWeight;

pub const DEFAULT_LIMIT: usize = 20;

struct Search<'a> {
    graph: &'a Graph,
    terminals: Terminals,
    kind: CutKind,
    /// Each choice deletes a group of elements (nodes or edges).
    groups: Vec<Vec<usize>>,
    weights: Vec<PerturbedWeight>,
    best: Option<(PerturbedWeight, Vec<usize>)>,
}

impl Search<'_> {
    fn masks(&self, chosen: &[usize], undecided_from: Option<usize>) -> (Vec<bool>, Vec<bool>) {
        let mut nodes = vec![false; self.graph.node_count()];
        let mut edges = vec![false; self.graph.edge_count()];
        let extra = undecided_from.map(|k| k..self.groups.len()).unwrap_or(0..0);
        for g in chosen.iter().copied().chain(extra) {
            for &x in &self.groups[g] {
                match self.kind {
                    CutKind::Node => nodes[x] = true,
                    CutKind::Edge => edges[x] = true,
                }
            }
        }
        (nodes, edges)
    }

    fn reach(&self, chosen: &[usize], undecided_from: Option<usize>) -> Vec<bool> {
        let (nodes, edges) = self.masks(chosen, undecided_from);
        self.graph.component_mask(self.terminals.s1, &nodes, &edges)
    }

    fn run(&mut self, k: usize, chosen: &mut Vec<usize>, weight: PerturbedWeight) {
        if let Some((best, _)) = &self.best {
            if weight >= *best {
                return;
            }
        }
        let Terminals { s2, t, .. } = self.terminals;
        let now = self.reach(chosen, None);
        if !now[s2] {
            return;
        }
        if !now[t] {
            self.best = Some((weight, chosen.clone()));
            return;
        }
        if k == self.groups.len() || self.reach(chosen, Some(k))[t] {
            return;
        }
        chosen.push(k);
        let with = &weight + &self.weights[k];
        self.run(k + 1, chosen, with);
        chosen.pop();
        self.run(k + 1, chosen, weight);
    }

    fn finish(self) -> Option<CutResult> {
        let (value, chosen) = self.best?;
        let mut elements: Vec<usize> = chosen.iter().flat_map(|&g| self.groups[g].iter().copied()).collect();
        elements.sort_unstable();
        let mut result = CutResult {
            kind: self.kind,
            elements,
            value,
            source_side: Vec::new(),
        };
        let (nodes, edges) = result.removal_masks(self.graph);
        let reach = self.graph.component_mask(self.terminals.s1, &nodes, &edges);
        result.source_side = (0..reach.len()).filter(|&v| reach[v]).collect();
        Some(result)
    }
}

/// Minimum weight node set, avoiding the terminals, whose deletion separates
/// `s1` from `t` and keeps `s1` connected to `s2`. `Ok(None)` when no such set
/// exists. `limit` bounds the number of twin classes searched.
pub fn oracle_cpmnc(graph: &Graph, terminals: Terminals, limit: usize) -> Result<Option<CutResult>> {
    let Terminals { s1, s2, t } = terminals;
    graph.check_terminals(s1, s2, t)?;
    let closed = |v: NodeId| -> BTreeSet<NodeId> {
        graph.neighbors(v).iter().map(|&(_, w)| w).chain([v]).collect()
    };
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut keys: Vec<BTreeSet<NodeId>> = Vec::new();
    for v in (0..graph.node_count()).filter(|&v| v != s1 && v != s2 && v != t) {
        let key = closed(v);
        match keys.iter().position(|k| *k == key) {
            Some(i) => groups[i].push(v),
            None => {
                keys.push(key);
                groups.push(vec![v]);
            }
        }
    }
    if groups.len() > limit {
        return Err(Error::LimitExceeded {
            count: groups.len(),
            limit,
        });
    }
    let weights = groups
        .iter()
        .map(|g| g.iter().map(|&v| graph.node_weight(v)).sum())
        .collect();
    let mut search = Search {
        graph,
        terminals,
        kind: CutKind::Node,
        groups,
        weights,
        best: None,
    };
    search.run(0, &mut Vec::new(), PerturbedWeight::zero());
    Ok(search.finish())
}

/// Edge analogue of [`oracle_cpmnc`]; `limit` bounds the edge count.
pub fn oracle_cpmec(graph: &Graph, terminals: Terminals, limit: usize) -> Result<Option<CutResult>> {
    let Terminals { s1, s2, t } = terminals;
    graph.check_terminals(s1, s2, t)?;
    if graph.edge_count() > limit {
        return Err(Error::LimitExceeded {
            count: graph.edge_count(),
            limit,
        });
    }
    let mut search = Search {
        graph,
        terminals,
        kind: CutKind::Edge,
        groups: (0..graph.edge_count()).map(|e| vec![e]).collect(),
        weights: graph.edges().iter().map(|e| e.weight.clone()).collect(),
        best: None,
    };
    search.run(0, &mut Vec::new(), PerturbedWeight::zero());
    Ok(search.finish())
}

/// Calls `visit` with the nodes and edges of every simple `a`–`b` path that
/// avoids infinite edges.
pub fn for_each_simple_path(graph: &Graph, a: NodeId, b: NodeId, visit: &mut dyn FnMut(&[NodeId], &[EdgeId])) {
    fn walk(
        graph: &Graph,
        b: NodeId,
        nodes: &mut Vec<NodeId>,
        edges: &mut Vec<EdgeId>,
        on_path: &mut [bool],
        visit: &mut dyn FnMut(&[NodeId], &[EdgeId]),
    ) {
        let x = *nodes.last().unwrap();
        if x == b {
            visit(nodes, edges);
            return;
        }
        for &(e, y) in graph.neighbors(x) {
            if on_path[y] || graph.edge_weight(e).is_infinite() {
                continue;
            }
            on_path[y] = true;
            nodes.push(y);
            edges.push(e);
            walk(graph, b, nodes, edges, on_path, visit);
            edges.pop();
            nodes.pop();
            on_path[y] = false;
        }
    }
    let mut on_path = vec![false; graph.node_count()];
    on_path[a] = true;
    walk(graph, b, &mut vec![a], &mut Vec::new(), &mut on_path, visit);
}

/// Cheapest simple `A`–`B` path passing the side test, by enumerating every
/// simple path. `limit` bounds the number of paths visited.
pub fn oracle_lcsp(query: &LcspQuery, limit: usize) -> Result<Option<ConstrainedPath>> {
    query.validate()?;
    let graph = query.embedding.graph();
    let mut count = 0;
    let mut best: Option<ConstrainedPath> = None;
    for_each_simple_path(graph, query.a, query.b, &mut |nodes, edges| {
        count += 1;
        if count > limit {
            return;
        }
        let weight: PerturbedWeight = edges.iter().map(|&e| graph.edge_weight(e)).sum();
        if best.as_ref().is_some_and(|p| p.route.weight <= weight) {
            return;
        }
        let mask = query.above_mask(edges);
        if mask[query.face] {
            best = Some(ConstrainedPath {
                route: Route {
                    nodes: nodes.to_vec(),
                    edges: edges.to_vec(),
                    weight,
                },
                above: (0..mask.len()).filter(|&f| mask[f]).collect(),
            });
        }
    });
    if count > limit {
        return Err(Error::LimitExceeded { count, limit });
    }
    Ok(best)
}

/// Minimum-weight cover by enumerating all subsets of sets; ties go to the
/// first subset in binary order.
pub fn oracle_set_cover(sc: &SetCoverInstance) -> Result<(Vec<usize>, i64)> {
    sc.validate()?;
    let k = sc.sets.len();
    if k > DEFAULT_LIMIT {
        return Err(Error::LimitExceeded { count: k, limit: DEFAULT_LIMIT });
    }
    let mut best: Option<(Vec<usize>, i64)> = None;
    for mask in 0u32..1 << k {
        let chosen: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 1).collect();
        let weight = sc.weight_of(&chosen);
        if best.as_ref().is_some_and(|b| weight >= b.1) || !sc.is_cover(&chosen) {
            continue;
        }
        best = Some((chosen, weight));
    }
    Ok(best.expect("validated instances are coverable"))
}
