//! Planar connectivity preserving cuts: the same-face node-cut solver and the
//! region-growing edge-cut solver.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::embed::{Embedding, FaceId, RotationSystem};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId, PerturbMode, Terminals};
use crate::mincut::{min_cut_from_set, min_edge_cut, CutKind, CutResult};
use crate::weight::PerturbedWeight;

#[derive(Clone, Debug)]
pub struct PlanarInstance {
    pub embedding: Embedding,
    pub terminals: Terminals,
}

impl PlanarInstance {
    pub fn new(graph: Graph, rotation: RotationSystem, terminals: Terminals) -> Result<Self> {
        graph.check_terminals(terminals.s1, terminals.s2, terminals.t)?;
        Ok(PlanarInstance {
            embedding: Embedding::new(graph, rotation)?,
            terminals,
        })
    }

    pub fn graph(&self) -> &Graph {
        self.embedding.graph()
    }

    /// Same embedding and terminals, weights perturbed in id order.
    pub fn perturbed(&self, mode: PerturbMode) -> Self {
        PlanarInstance {
            embedding: self.embedding.with_graph(self.graph().perturb(mode)).unwrap(),
            terminals: self.terminals,
        }
    }
}

/// A verified connectivity preserving cut.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CpmcSolution {
    pub cut: CutResult,
    /// Component of `s1` (and `s2`) after deleting the cut.
    pub preserved: Vec<NodeId>,
    /// Component of `t` after deleting the cut.
    pub separated: Vec<NodeId>,
}

impl CpmcSolution {
    /// Checks the cut against the definition and records both components.
    pub fn certify(graph: &Graph, terminals: Terminals, mut cut: CutResult) -> Result<Self> {
        let Terminals { s1, s2, t } = terminals;
        let fail = |msg: String| Err(Error::Certificate(msg));
        if cut.is_infinite() {
            return fail("infinite cut".into());
        }
        let limit = match cut.kind {
            CutKind::Edge => graph.edge_count(),
            CutKind::Node => graph.node_count(),
        };
        if let Some(&x) = cut.elements.iter().find(|&&x| x >= limit) {
            return fail(format!("element {x} out of range"));
        }
        if cut.kind == CutKind::Node && cut.elements.iter().any(|&v| v == s1 || v == s2 || v == t) {
            return fail("node cut contains a terminal".into());
        }
        if cut.value != cut.element_total(graph) {
            return fail(format!("value {} differs from element total {}", cut.value, cut.element_total(graph)));
        }
        let (nodes, edges) = cut.removal_masks(graph);
        let from_s1 = graph.component_mask(s1, &nodes, &edges);
        if !from_s1[s2] {
            return fail("s1 and s2 are disconnected".into());
        }
        if from_s1[t] {
            return fail("t is still connected to s1".into());
        }
        let preserved: Vec<NodeId> = (0..from_s1.len()).filter(|&v| from_s1[v]).collect();
        if !cut.source_side.is_empty() && cut.source_side != preserved {
            return fail("source side differs from the component of s1".into());
        }
        cut.source_side = preserved.clone();
        let from_t = graph.component_mask(t, &nodes, &edges);
        Ok(CpmcSolution {
            cut,
            preserved,
            separated: (0..from_t.len()).filter(|&v| from_t[v]).collect(),
        })
    }
}

/// Minimum node cut separating `t` from `s1` while `s1` and `s2` stay
/// connected, for `s1` and `s2` on a common face. Some boundary path of that
/// face between them survives any such cut, so it suffices to protect each
/// path in turn.
pub fn solve_cpmnc_same_face(instance: &PlanarInstance) -> Result<CpmcSolution> {
    let graph = instance.graph();
    let Terminals { s1, s2, t } = instance.terminals;
    if !graph.is_feasible_cpmnc(s1, s2, t)? {
        return Err(Error::Infeasible);
    }
    let face = instance.embedding.same_face(s1, s2).ok_or(Error::NoSharedFace)?;
    let mut best: Option<CutResult> = None;
    for (a_path, b_path) in instance.embedding.all_boundary_paths(face, s1, s2) {
        for path in [a_path, b_path] {
            if path.contains(&t) {
                continue;
            }
            let cut = min_cut_from_set(graph, &path, None, t, CutKind::Node)?;
            if !cut.is_infinite() && best.as_ref().is_none_or(|b| cut.value < b.value) {
                best = Some(cut);
            }
        }
    }
    CpmcSolution::certify(graph, instance.terminals, best.ok_or(Error::Infeasible)?)
}

/// `C_{s1,v}` with its cut: the smallest-weight set containing `s1` and the
/// representative that can be separated from `t` by an edge cut.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Region {
    pub representative: NodeId,
    pub nodes: Vec<NodeId>,
    pub cut: CutResult,
}

impl Region {
    pub fn value(&self) -> &PerturbedWeight {
        &self.cut.value
    }
}

/// One accepted step of the region growing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub v: NodeId,
    pub s: NodeId,
    pub value: PerturbedWeight,
    /// Nodes labeled in this step, sorted.
    pub added: Vec<NodeId>,
}

#[derive(Clone, Debug)]
pub struct Growth {
    /// Region of every labeled node.
    pub regions: BTreeMap<NodeId, Region>,
    pub steps: Vec<Step>,
}

impl Growth {
    /// `S` after the first `k` steps.
    pub fn labeled_after(&self, k: usize) -> BTreeSet<NodeId> {
        self.steps[..k].iter().flat_map(|s| s.added.iter().copied()).collect()
    }

    pub fn is_monotone(&self) -> bool {
        self.steps.windows(2).all(|w| w[0].value <= w[1].value)
    }

    /// If `u` was labeled before `w` and lies in `w`'s region, its own region
    /// is a subset of `w`'s.
    pub fn regions_nested(&self) -> bool {
        let order: Vec<NodeId> = self.steps.iter().flat_map(|s| s.added.iter().copied()).collect();
        for (i, &u) in order.iter().enumerate() {
            let inner: BTreeSet<NodeId> = self.regions[&u].nodes.iter().copied().collect();
            for &w in &order[i + 1..] {
                let outer: BTreeSet<NodeId> = self.regions[&w].nodes.iter().copied().collect();
                if outer.contains(&u) && !inner.is_subset(&outer) {
                    return false;
                }
            }
        }
        true
    }

    /// After every step, each face with a node outside `S` reaches the outer
    /// face through faces with a node outside `S`, crossing shared edges.
    pub fn has_no_hole(&self, embedding: &Embedding) -> bool {
        (1..=self.steps.len()).all(|k| faces_hole_free(embedding, &self.labeled_after(k)))
    }

    /// After every step, the unlabeled nodes induce a connected subgraph.
    pub fn complement_connected(&self, graph: &Graph) -> bool {
        (1..=self.steps.len()).all(|k| {
            let s = self.labeled_after(k);
            let removed: Vec<bool> = (0..graph.node_count()).map(|v| s.contains(&v)).collect();
            match (0..graph.node_count()).find(|v| !s.contains(v)) {
                None => true,
                Some(seed) => graph
                    .component_mask(seed, &removed, &[])
                    .iter()
                    .zip(&removed)
                    .all(|(&r, &gone)| r || gone),
            }
        })
    }
}

fn faces_hole_free(embedding: &Embedding, s: &BTreeSet<NodeId>) -> bool {
    let open: Vec<bool> = embedding
        .faces()
        .iter()
        .map(|f| f.walk.iter().any(|v| !s.contains(v)))
        .collect();
    let outer = embedding.outer_face();
    if !open[outer] {
        return false;
    }
    let mut seen = vec![false; open.len()];
    seen[outer] = true;
    let mut queue = VecDeque::from([outer]);
    while let Some(f) = queue.pop_front() {
        for &d in &embedding.face(f).darts {
            let g: FaceId = embedding.face_of_dart(d ^ 1);
            if open[g] && !seen[g] {
                seen[g] = true;
                queue.push_back(g);
            }
        }
    }
    open.iter().zip(&seen).all(|(&o, &s)| !o || s)
}

/// Grows regions from `s1` until `stop` is labeled or the frontier is empty.
/// Each step picks the frontier pair `(v, s)` with the cheapest cut separating
/// `C_{s1,s}` and `v` from `t` (ties by `v`, then `s`), labels the nodes of
/// the new region not yet labeled, then adds them to `S`.
fn grow(graph: &Graph, terminals: Terminals, stop: Option<NodeId>) -> Result<Growth> {
    let Terminals { s1, t, .. } = terminals;
    let mut regions: BTreeMap<NodeId, Region> = BTreeMap::new();
    let mut steps = Vec::new();
    let mut cache: BTreeMap<(NodeId, NodeId), CutResult> = BTreeMap::new();

    let first = min_edge_cut(graph, s1, t)?;
    let mut pending = Some((s1, s1, first));
    while let Some((v, s, cut)) = pending.take() {
        if cut.is_infinite() {
            return Err(Error::Infeasible);
        }
        let region = Region {
            representative: v,
            nodes: cut.source_side.clone(),
            cut: cut.clone(),
        };
        let added: Vec<NodeId> = region.nodes.iter().copied().filter(|x| !regions.contains_key(x)).collect();
        for &x in &added {
            regions.insert(x, region.clone());
        }
        steps.push(Step {
            v,
            s,
            value: cut.value,
            added,
        });
        if stop.is_some_and(|x| regions.contains_key(&x)) {
            break;
        }

        let mut best: Option<(NodeId, NodeId)> = None;
        for (&s, region) in &regions {
            for &(_, v) in graph.neighbors(s) {
                if v == t || regions.contains_key(&v) {
                    continue;
                }
                if let std::collections::btree_map::Entry::Vacant(e) = cache.entry((v, s)) {
                    let cut = min_cut_from_set(graph, &region.nodes, Some(v), t, CutKind::Edge)?;
                    e.insert(cut);
                }
                let better = match best {
                    None => true,
                    Some(b) => (&cache[&(v, s)].value, v, s) < (&cache[&b].value, b.0, b.1),
                };
                if better {
                    best = Some((v, s));
                }
            }
        }
        pending = best.map(|(v, s)| (v, s, cache[&(v, s)].clone()));
    }
    Ok(Growth { regions, steps })
}

fn check_edge_instance(graph: &Graph, terminals: Terminals) -> Result<()> {
    let Terminals { s1, s2, t } = terminals;
    if !graph.is_perturbed(PerturbMode::Edges) {
        return Err(Error::Unperturbed);
    }
    if !graph.is_feasible_cpmec(s1, s2, t)? {
        return Err(Error::Infeasible);
    }
    Ok(())
}

/// Region growing with its full trace, stopping once `s2` is labeled.
pub fn cpmec_growth(instance: &PlanarInstance) -> Result<Growth> {
    check_edge_instance(instance.graph(), instance.terminals)?;
    grow(instance.graph(), instance.terminals, Some(instance.terminals.s2))
}

/// Minimum edge cut separating `t` from `s1` while `s1` and `s2` stay
/// connected. Requires edge-perturbed weights, which make the optimum unique.
pub fn solve_cpmec_planar(instance: &PlanarInstance) -> Result<CpmcSolution> {
    let growth = cpmec_growth(instance)?;
    let region = growth.regions.get(&instance.terminals.s2).ok_or(Error::Infeasible)?;
    CpmcSolution::certify(instance.graph(), instance.terminals, region.cut.clone())
}

/// The region-growing solver on an arbitrary graph. No optimality guarantee
/// holds without planarity; the returned cut is still a verified valid cut.
pub fn solve_cpmec_unchecked(graph: &Graph, terminals: Terminals) -> Result<CpmcSolution> {
    check_edge_instance(graph, terminals)?;
    let growth = grow(graph, terminals, Some(terminals.s2))?;
    let region = growth.regions.get(&terminals.s2).ok_or(Error::Infeasible)?;
    CpmcSolution::certify(graph, terminals, region.cut.clone())
}

/// Partition of the nodes reachable from `s1` without `t` into classes sharing
/// one region, in discovery order (so values never decrease).
pub fn cpe_classes(instance: &PlanarInstance) -> Result<Vec<(Region, Vec<NodeId>)>> {
    let graph = instance.graph();
    let Terminals { s1, s2, t } = instance.terminals;
    if !graph.is_perturbed(PerturbMode::Edges) {
        return Err(Error::Unperturbed);
    }
    graph.check_terminals(s1, s2, t)?;
    let growth = grow(graph, instance.terminals, None)?;
    let mut classes: Vec<(Region, Vec<NodeId>)> = Vec::new();
    for step in &growth.steps {
        for &x in &step.added {
            let region = &growth.regions[&x];
            match classes.iter_mut().find(|(r, _)| r.nodes == region.nodes) {
                Some((_, members)) => members.push(x),
                None => classes.push((region.clone(), vec![x])),
            }
        }
    }
    for (_, members) in &mut classes {
        members.sort_unstable();
    }
    Ok(classes)
}
