//! Minimum s-t cuts over [`PerturbedWeight`] capacities.
//!
//! Max-flow uses shortest augmenting paths (Edmonds-Karp), which only needs
//! addition, subtraction, minimum and comparison, so the flow and the cut are
//! exact. The returned cut is the one closest to the source: its source side is
//! the residual reachability set. With perturbed weights the minimum cut is
//! unique, so that choice is immaterial.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph, NodeId};
use crate::weight::PerturbedWeight;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CutKind {
    Edge,
    Node,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum AdjacencyOrder {
    #[default]
    Forward,
    Reversed,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutResult {
    pub kind: CutKind,
    /// Edge ids or node ids, sorted.
    pub elements: Vec<usize>,
    pub value: PerturbedWeight,
    /// Component of the source after deleting the cut, sorted. Empty when the
    /// value is infinite.
    pub source_side: Vec<NodeId>,
}

impl CutResult {
    pub fn is_infinite(&self) -> bool {
        self.value.is_infinite()
    }

    fn infinite(kind: CutKind) -> Self {
        CutResult {
            kind,
            elements: Vec::new(),
            value: PerturbedWeight::Infinite,
            source_side: Vec::new(),
        }
    }

    /// Sum of the element weights as stored in `graph`.
    pub fn element_total(&self, graph: &Graph) -> PerturbedWeight {
        match self.kind {
            CutKind::Edge => self.elements.iter().map(|&e| graph.edge_weight(e)).sum(),
            CutKind::Node => self.elements.iter().map(|&v| graph.node_weight(v)).sum(),
        }
    }

    pub fn removal_masks(&self, graph: &Graph) -> (Vec<bool>, Vec<bool>) {
        let mut nodes = vec![false; graph.node_count()];
        let mut edges = vec![false; graph.edge_count()];
        for &x in &self.elements {
            match self.kind {
                CutKind::Edge => edges[x] = true,
                CutKind::Node => nodes[x] = true,
            }
        }
        (nodes, edges)
    }
}

struct FlowNetwork {
    adjacency: Vec<Vec<usize>>,
    head: Vec<usize>,
    residual: Vec<PerturbedWeight>,
}

impl FlowNetwork {
    fn new(n: usize) -> Self {
        FlowNetwork {
            adjacency: vec![Vec::new(); n],
            head: Vec::new(),
            residual: Vec::new(),
        }
    }

    /// Arc pair `from -> to` with capacity `forward` and the reverse arc with `backward`.
    fn add_arc(&mut self, from: usize, to: usize, forward: PerturbedWeight, backward: PerturbedWeight) {
        let id = self.head.len();
        self.head.push(to);
        self.residual.push(forward);
        self.adjacency[from].push(id);
        self.head.push(from);
        self.residual.push(backward);
        self.adjacency[to].push(id + 1);
    }

    fn tail(&self, arc: usize) -> usize {
        self.head[arc ^ 1]
    }

    /// `None` when an augmenting path of infinite capacity exists.
    fn max_flow(&mut self, source: usize, sink: usize, order: AdjacencyOrder) -> Option<PerturbedWeight> {
        if order == AdjacencyOrder::Reversed {
            for list in &mut self.adjacency {
                list.reverse();
            }
        }
        let mut total = PerturbedWeight::zero();
        loop {
            let mut parent = vec![usize::MAX; self.adjacency.len()];
            let mut queue = VecDeque::from([source]);
            let mut found = false;
            'bfs: while let Some(x) = queue.pop_front() {
                for &arc in &self.adjacency[x] {
                    let y = self.head[arc];
                    if y == source || parent[y] != usize::MAX || !self.residual[arc].is_positive() {
                        continue;
                    }
                    parent[y] = arc;
                    if y == sink {
                        found = true;
                        break 'bfs;
                    }
                    queue.push_back(y);
                }
            }
            if !found {
                return Some(total);
            }
            let mut bottleneck = PerturbedWeight::Infinite;
            let mut y = sink;
            while y != source {
                let arc = parent[y];
                if self.residual[arc] < bottleneck {
                    bottleneck = self.residual[arc].clone();
                }
                y = self.tail(arc);
            }
            if bottleneck.is_infinite() {
                return None;
            }
            let mut y = sink;
            while y != source {
                let arc = parent[y];
                self.residual[arc] -= &bottleneck;
                self.residual[arc ^ 1] += &bottleneck;
                y = self.tail(arc);
            }
            total += &bottleneck;
        }
    }

    fn reachable(&self, source: usize) -> Vec<bool> {
        let mut seen = vec![false; self.adjacency.len()];
        seen[source] = true;
        let mut queue = VecDeque::from([source]);
        while let Some(x) = queue.pop_front() {
            for &arc in &self.adjacency[x] {
                let y = self.head[arc];
                if !seen[y] && self.residual[arc].is_positive() {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        seen
    }
}

fn check_sources(graph: &Graph, sources: &[NodeId], sink: NodeId) -> Result<()> {
    graph.check_node(sink)?;
    for &s in sources {
        graph.check_node(s)?;
        if s == sink {
            return Err(if sources.len() == 1 {
                Error::SameSourceSink
            } else {
                Error::SinkProtected(sink)
            });
        }
    }
    Ok(())
}

/// Minimum edge cut separating every node of `sources` from `sink`. More than
/// one source is handled through a dummy node joined to each by an infinite arc.
fn edge_cut(graph: &Graph, sources: &[NodeId], sink: NodeId, order: AdjacencyOrder) -> Result<CutResult> {
    check_sources(graph, sources, sink)?;
    let n = graph.node_count();
    let mut network = FlowNetwork::new(n + 1);
    for edge in graph.edges() {
        network.add_arc(edge.u, edge.v, edge.weight.clone(), edge.weight.clone());
    }
    let source = if sources.len() == 1 {
        sources[0]
    } else {
        for &s in sources {
            network.add_arc(n, s, PerturbedWeight::Infinite, PerturbedWeight::zero());
        }
        n
    };
    let Some(flow) = network.max_flow(source, sink, order) else {
        return Ok(CutResult::infinite(CutKind::Edge));
    };
    let reach = network.reachable(source);
    let elements: Vec<EdgeId> = graph
        .edges()
        .iter()
        .enumerate()
        .filter(|(_, e)| reach[e.u] != reach[e.v])
        .map(|(i, _)| i)
        .collect();
    let result = CutResult {
        kind: CutKind::Edge,
        elements,
        value: flow,
        source_side: (0..n).filter(|&v| reach[v]).collect(),
    };
    debug_assert_eq!(result.element_total(graph), result.value);
    Ok(result)
}

/// Minimum node cut: every node outside `protected` and the sink is split
/// into an in-copy and an out-copy joined by an arc of its weight. Protected
/// nodes and the sink stay whole and can never be cut.
fn node_cut(graph: &Graph, protected: &[NodeId], sink: NodeId, order: AdjacencyOrder) -> Result<CutResult> {
    check_sources(graph, protected, sink)?;
    let n = graph.node_count();
    let mut whole = vec![false; n];
    whole[sink] = true;
    for &p in protected {
        whole[p] = true;
    }
    let inside = |v: usize| v;
    let outside = |v: usize| if whole[v] { v } else { n + v };
    let mut network = FlowNetwork::new(2 * n + 1);
    for v in 0..n {
        if !whole[v] {
            network.add_arc(inside(v), outside(v), graph.node_weight(v).clone(), PerturbedWeight::zero());
        }
    }
    for edge in graph.edges() {
        network.add_arc(outside(edge.u), inside(edge.v), PerturbedWeight::Infinite, PerturbedWeight::zero());
        network.add_arc(outside(edge.v), inside(edge.u), PerturbedWeight::Infinite, PerturbedWeight::zero());
    }
    let source = if protected.len() == 1 {
        protected[0]
    } else {
        for &p in protected {
            network.add_arc(2 * n, p, PerturbedWeight::Infinite, PerturbedWeight::zero());
        }
        2 * n
    };
    let Some(flow) = network.max_flow(source, sink, order) else {
        return Ok(CutResult::infinite(CutKind::Node));
    };
    let reach = network.reachable(source);
    let elements: Vec<NodeId> = (0..n)
        .filter(|&v| !whole[v] && reach[inside(v)] && !reach[outside(v)])
        .collect();
    let source_side = (0..n).filter(|&v| reach[outside(v)]).collect();
    let result = CutResult {
        kind: CutKind::Node,
        elements,
        value: flow,
        source_side,
    };
    debug_assert_eq!(result.element_total(graph), result.value);
    Ok(result)
}

pub fn min_edge_cut(graph: &Graph, source: NodeId, sink: NodeId) -> Result<CutResult> {
    edge_cut(graph, &[source], sink, AdjacencyOrder::Forward)
}

pub fn min_edge_cut_ordered(graph: &Graph, source: NodeId, sink: NodeId, order: AdjacencyOrder) -> Result<CutResult> {
    edge_cut(graph, &[source], sink, order)
}

/// Cheapest set of nodes other than `source` and `sink` whose deletion
/// separates them; infinite when they are adjacent.
pub fn min_node_cut(graph: &Graph, source: NodeId, sink: NodeId) -> Result<CutResult> {
    node_cut(graph, &[source], sink, AdjacencyOrder::Forward)
}

pub fn min_node_cut_ordered(graph: &Graph, source: NodeId, sink: NodeId, order: AdjacencyOrder) -> Result<CutResult> {
    node_cut(graph, &[source], sink, order)
}

/// Minimum cut separating `source_set` and `extra` from `sink`, as a cut
/// between a dummy node tied to all of them and `sink`. For node cuts the
/// protected nodes count as infinitely heavy.
pub fn min_cut_from_set(
    graph: &Graph,
    source_set: &[NodeId],
    extra: Option<NodeId>,
    sink: NodeId,
    kind: CutKind,
) -> Result<CutResult> {
    let mut sources: Vec<NodeId> = source_set.iter().copied().chain(extra).collect();
    sources.sort_unstable();
    sources.dedup();
    if sources.is_empty() {
        return Err(Error::InvalidCut("empty source set".into()));
    }
    if sources.contains(&sink) {
        return Err(Error::SinkProtected(sink));
    }
    match kind {
        CutKind::Edge => edge_cut(graph, &sources, sink, AdjacencyOrder::Forward),
        CutKind::Node => node_cut(graph, &sources, sink, AdjacencyOrder::Forward),
    }
}
