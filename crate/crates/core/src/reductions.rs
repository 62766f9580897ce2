//! Set cover to connectivity preserving node cut, plus the unit-weight and
//! bipartite transforms of the generated graphs.
//!
//! Every element gets a gadget: two endpoints with one internal node per set
//! containing the element, each joined to both endpoints. Gadgets form a chain
//! from `s1` to `s2`. Internal nodes of set `i` hang off a set node of weight
//! `w_i * n * k`, and every set node is joined to `t`. A valid cut must leave
//! some internal node in every gadget, so its set nodes form a cover.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph, NodeId, Terminals};
use crate::mincut::{CutKind, CutResult};
use crate::planar::CpmcSolution;
use crate::weight::PerturbedWeight;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightedSet {
    pub ids: Vec<usize>,
    pub weight: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetCoverInstance {
    /// Ground set size; elements are `0..n`.
    pub n: usize,
    pub sets: Vec<WeightedSet>,
    /// Weight bound used in the budget; defaults to the total set weight.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d1: Option<i64>,
}

impl SetCoverInstance {
    pub fn new(n: usize, sets: &[(&[usize], i64)]) -> Self {
        SetCoverInstance {
            n,
            sets: sets
                .iter()
                .map(|&(ids, weight)| WeightedSet { ids: ids.to_vec(), weight })
                .collect(),
            d1: None,
        }
    }

    /// Three elements; sets {0,2}, {1,2}, {0,1} of unit weight.
    pub fn three_element_example() -> Self {
        SetCoverInstance::new(3, &[(&[0, 2], 1), (&[1, 2], 1), (&[0, 1], 1)])
    }

    pub fn validate(&self) -> Result<()> {
        for (i, set) in self.sets.iter().enumerate() {
            if set.weight <= 0 {
                return Err(Error::NonPositiveWeight(format!("set {i}")));
            }
            if let Some(&x) = set.ids.iter().find(|&&x| x >= self.n) {
                return Err(Error::Format(format!("set {i} names element {x} of a ground set of size {}", self.n)));
            }
        }
        if let Some(e) = (0..self.n).find(|&e| !self.sets.iter().any(|s| s.ids.contains(&e))) {
            return Err(Error::ElementUncovered(e));
        }
        Ok(())
    }

    pub fn bound(&self) -> i64 {
        self.d1.unwrap_or_else(|| self.sets.iter().map(|s| s.weight).sum())
    }

    pub fn is_cover(&self, chosen: &[usize]) -> bool {
        (0..self.n).all(|e| chosen.iter().any(|&i| self.sets[i].ids.contains(&e)))
    }

    pub fn weight_of(&self, chosen: &[usize]) -> i64 {
        chosen.iter().map(|&i| self.sets[i].weight).sum()
    }
}

/// How consecutive gadgets meet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Chaining {
    /// The right endpoint of one gadget is the left endpoint of the next.
    Shared,
    /// Each gadget has its own endpoints; consecutive ones are joined by an edge.
    Linked,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionArtifact {
    pub graph: Graph,
    pub terminals: Terminals,
    pub budget: i64,
    pub chaining: Chaining,
    /// Left and right endpoint of each element gadget.
    pub endpoints: Vec<(NodeId, NodeId)>,
    /// Internal node of each (element, set) incidence.
    pub internal: BTreeMap<(usize, usize), NodeId>,
    pub set_nodes: Vec<NodeId>,
    /// Edges joining consecutive gadgets (linked chaining only).
    pub links: Vec<EdgeId>,
}

/// Builds the gadget graph with shared endpoints.
pub fn build_cpmnc_from_set_cover(sc: &SetCoverInstance) -> Result<ReductionArtifact> {
    build_with(sc, Chaining::Shared)
}

pub fn build_with(sc: &SetCoverInstance, chaining: Chaining) -> Result<ReductionArtifact> {
    sc.validate()?;
    let n1 = sc.n;
    let k = sc.sets.len();
    if n1 == 0 {
        return Err(Error::Precondition("empty ground set".into()));
    }
    let scale = (n1 * k) as i64;
    let mut graph = Graph::new(0);
    let endpoints: Vec<(NodeId, NodeId)> = match chaining {
        Chaining::Shared => {
            let nodes: Vec<NodeId> = (0..=n1).map(|_| graph.add_node(1.into())).collect();
            (0..n1).map(|e| (nodes[e], nodes[e + 1])).collect()
        }
        Chaining::Linked => (0..n1)
            .map(|_| (graph.add_node(1.into()), graph.add_node(1.into())))
            .collect(),
    };
    let mut internal = BTreeMap::new();
    for e in 0..n1 {
        for (i, set) in sc.sets.iter().enumerate() {
            if set.ids.contains(&e) {
                internal.insert((e, i), graph.add_node(1.into()));
            }
        }
    }
    let set_nodes: Vec<NodeId> = sc
        .sets
        .iter()
        .map(|s| graph.add_node(PerturbedWeight::base(s.weight * scale)))
        .collect();
    let t = graph.add_node(1.into());

    for (&(e, _), &x) in &internal {
        graph.add_edge(endpoints[e].0, x, 1.into())?;
        graph.add_edge(x, endpoints[e].1, 1.into())?;
    }
    let links = match chaining {
        Chaining::Shared => Vec::new(),
        Chaining::Linked => (0..n1 - 1)
            .map(|e| graph.add_edge(endpoints[e].1, endpoints[e + 1].0, 1.into()))
            .collect::<Result<_>>()?,
    };
    for (&(_, i), &x) in &internal {
        graph.add_edge(x, set_nodes[i], 1.into())?;
    }
    for &s in &set_nodes {
        graph.add_edge(s, t, 1.into())?;
    }
    Ok(ReductionArtifact {
        graph,
        terminals: Terminals {
            s1: endpoints[0].0,
            s2: endpoints[n1 - 1].1,
            t,
        },
        budget: scale * sc.bound() + scale - 1,
        chaining,
        endpoints,
        internal,
        set_nodes,
        links,
    })
}

/// Sets whose set node lies in `cut`, with their total weight. The cut must
/// be a valid connectivity preserving node cut of the artifact.
pub fn extract_cover(sc: &SetCoverInstance, artifact: &ReductionArtifact, cut: &CutResult) -> Result<(Vec<usize>, i64)> {
    if cut.kind != CutKind::Node {
        return Err(Error::InvalidCut("expected a node cut".into()));
    }
    let mut checked = cut.clone();
    checked.source_side.clear();
    CpmcSolution::certify(&artifact.graph, artifact.terminals, checked).map_err(|e| Error::InvalidCut(e.to_string()))?;
    let cover: Vec<usize> = (0..artifact.set_nodes.len())
        .filter(|&i| cut.elements.binary_search(&artifact.set_nodes[i]).is_ok())
        .collect();
    if let Some(e) = (0..sc.n).find(|&e| !cover.iter().any(|&i| sc.sets[i].ids.contains(&e))) {
        return Err(Error::ElementUncovered(e));
    }
    let weight = sc.weight_of(&cover);
    Ok((cover, weight))
}

/// A unit-weight graph with the node copies standing for each original node.
#[derive(Clone, Debug)]
pub struct UnitWeight {
    pub graph: Graph,
    pub terminals: Terminals,
    pub copies: Vec<Vec<NodeId>>,
}

/// Replaces every non-terminal node of integer weight `c` by a clique of `c`
/// unit nodes, each adjacent to every copy of every former neighbor.
/// Terminals stay single.
pub fn to_unit_weight(graph: &Graph, terminals: Terminals) -> Result<UnitWeight> {
    let is_terminal = |v: NodeId| v == terminals.s1 || v == terminals.s2 || v == terminals.t;
    let mut out = Graph::new(0);
    let mut copies = Vec::with_capacity(graph.node_count());
    for v in 0..graph.node_count() {
        let c = match graph.node_weight(v).base_value() {
            Some(c) if c >= 1 => c as usize,
            _ => return Err(Error::NonPositiveWeight(format!("node {v} needs a positive integer weight"))),
        };
        let count = if is_terminal(v) { 1 } else { c };
        let ids: Vec<NodeId> = (0..count).map(|_| out.add_node(1.into())).collect();
        for (i, &x) in ids.iter().enumerate() {
            for &y in &ids[i + 1..] {
                out.add_edge(x, y, 1.into())?;
            }
        }
        copies.push(ids);
    }
    for edge in graph.edges() {
        for &x in &copies[edge.u] {
            for &y in &copies[edge.v] {
                out.add_edge(x, y, edge.weight.clone())?;
            }
        }
    }
    Ok(UnitWeight {
        terminals: Terminals {
            s1: copies[terminals.s1][0],
            s2: copies[terminals.s2][0],
            t: copies[terminals.t][0],
        },
        graph: out,
        copies,
    })
}

/// Two-coloring by breadth-first search, if one exists.
pub fn two_coloring(graph: &Graph) -> Option<Vec<bool>> {
    let mut color: Vec<Option<bool>> = vec![None; graph.node_count()];
    for start in 0..graph.node_count() {
        if color[start].is_some() {
            continue;
        }
        color[start] = Some(false);
        let mut queue = VecDeque::from([start]);
        while let Some(x) = queue.pop_front() {
            let cx = color[x].unwrap();
            for &(_, y) in graph.neighbors(x) {
                match color[y] {
                    None => {
                        color[y] = Some(!cx);
                        queue.push_back(y);
                    }
                    Some(cy) if cy == cx => return None,
                    _ => {}
                }
            }
        }
    }
    Some(color.into_iter().map(|c| c.unwrap()).collect())
}

#[derive(Clone, Debug)]
pub struct Bipartite {
    pub graph: Graph,
    pub terminals: Terminals,
    /// New id of every artifact node.
    pub node_map: Vec<NodeId>,
    pub coloring: Vec<bool>,
}

/// Contracts the edges joining consecutive gadgets and checks that the result
/// is bipartite. Shared-endpoint artifacts pass through unchanged.
pub fn to_bipartite(artifact: &ReductionArtifact) -> Result<Bipartite> {
    let g = &artifact.graph;
    let mut rep: Vec<NodeId> = (0..g.node_count()).collect();
    for &e in &artifact.links {
        let (u, v) = g.endpoints(e);
        rep[v] = rep[u];
    }
    let mut node_map = vec![usize::MAX; g.node_count()];
    let mut out = Graph::new(0);
    for v in 0..g.node_count() {
        if rep[v] == v {
            node_map[v] = out.add_node(g.node_weight(v).clone());
        }
    }
    for v in 0..g.node_count() {
        node_map[v] = node_map[rep[v]];
    }
    for (e, edge) in g.edges().iter().enumerate() {
        if !artifact.links.contains(&e) {
            out.add_edge(node_map[edge.u], node_map[edge.v], edge.weight.clone())?;
        }
    }
    let coloring = two_coloring(&out).ok_or(Error::NotBipartite)?;
    let Terminals { s1, s2, t } = artifact.terminals;
    Ok(Bipartite {
        graph: out,
        terminals: Terminals {
            s1: node_map[s1],
            s2: node_map[s2],
            t: node_map[t],
        },
        node_map,
        coloring,
    })
}
