//! JSON instance and result files, a read-only DIMACS importer, and the
//! solver-independent result checker.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::embed::{Embedding, FaceId, RotationSystem};
use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph, NodeId, PerturbMode, Terminals};
use crate::lcsp::{ConstrainedPath, LcspQuery};
use crate::mincut::{CutKind, CutResult};
use crate::planar::{CpmcSolution, PlanarInstance};
use crate::weight::PerturbedWeight;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeEntry {
    pub id: NodeId,
    pub weight: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeEntry {
    pub id: EdgeId,
    pub u: NodeId,
    pub v: NodeId,
    pub weight: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingEntry {
    /// Edge ids around each node in counterclockwise order.
    pub rotations: BTreeMap<NodeId, Vec<EdgeId>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LcspEntry {
    pub a: NodeId,
    pub b: NodeId,
    /// Constrained face, by id in face-trace order.
    pub face: FaceId,
    /// Outer face; defaults to the lowest face containing both `a` and `b`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outer: Option<FaceId>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub nodes: Vec<NodeEntry>,
    pub edges: Vec<EdgeEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terminals: Option<Terminals>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub embedding: Option<EmbeddingEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lcsp: Option<LcspEntry>,
    #[serde(default, skip_serializing_if = "serde_json::Map::is_empty")]
    pub metadata: serde_json::Map<String, serde_json::Value>,
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance files always serialize")
    }

    /// Graph with base weights. Ids must be dense and listed in order.
    pub fn graph(&self) -> Result<Graph> {
        let mut g = Graph::new(0);
        for (i, node) in self.nodes.iter().enumerate() {
            if node.id != i {
                return Err(Error::Format(format!("node at position {i} has id {}", node.id)));
            }
            if node.weight <= 0 {
                return Err(Error::NonPositiveWeight(format!("node {i}")));
            }
            g.add_node(PerturbedWeight::base(node.weight));
        }
        for (i, edge) in self.edges.iter().enumerate() {
            if edge.id != i {
                return Err(Error::Format(format!("edge at position {i} has id {}", edge.id)));
            }
            if edge.weight <= 0 {
                return Err(Error::NonPositiveWeight(format!("edge {i}")));
            }
            g.add_edge(edge.u, edge.v, PerturbedWeight::base(edge.weight))?;
        }
        Ok(g)
    }

    pub fn terminals(&self) -> Result<Terminals> {
        self.terminals.ok_or_else(|| Error::Format("instance has no terminals".into()))
    }

    pub fn rotation(&self) -> Result<RotationSystem> {
        let emb = self
            .embedding
            .as_ref()
            .ok_or_else(|| Error::Precondition("instance has no embedding".into()))?;
        if let Some(&v) = emb.rotations.keys().find(|&&v| v >= self.nodes.len()) {
            return Err(Error::NodeOutOfRange(v));
        }
        Ok(RotationSystem::new(
            (0..self.nodes.len()).map(|v| emb.rotations.get(&v).cloned().unwrap_or_default()).collect(),
        ))
    }

    pub fn embedding(&self) -> Result<Embedding> {
        Embedding::new(self.graph()?, self.rotation()?)
    }

    pub fn planar_instance(&self) -> Result<PlanarInstance> {
        PlanarInstance::new(self.graph()?, self.rotation()?, self.terminals()?)
    }

    pub fn lcsp_query(&self) -> Result<LcspQuery> {
        let entry = self
            .lcsp
            .as_ref()
            .ok_or_else(|| Error::Precondition("instance has no lcsp section".into()))?;
        let emb = self.embedding()?;
        let outer = match entry.outer {
            Some(f) if f < emb.face_count() => f,
            Some(f) => return Err(Error::InvalidQuery(format!("outer face {f} out of range"))),
            None => emb
                .same_face(entry.a, entry.b)
                .ok_or_else(|| Error::InvalidQuery("A and B share no face".into()))?,
        };
        LcspQuery::new(emb.with_outer_face(outer), entry.a, entry.b, entry.face)
    }

    /// Instance file for a graph with integer base weights.
    pub fn from_parts(graph: &Graph, rotation: Option<&RotationSystem>, terminals: Option<Terminals>) -> Self {
        let base = |w: &PerturbedWeight| w.base_value().expect("instance files hold finite weights");
        InstanceFile {
            nodes: (0..graph.node_count())
                .map(|id| NodeEntry {
                    id,
                    weight: base(graph.node_weight(id)),
                })
                .collect(),
            edges: graph
                .edges()
                .iter()
                .enumerate()
                .map(|(id, e)| EdgeEntry {
                    id,
                    u: e.u,
                    v: e.v,
                    weight: base(&e.weight),
                })
                .collect(),
            terminals,
            embedding: rotation.map(|r| EmbeddingEntry {
                rotations: r.rotations.iter().cloned().enumerate().collect(),
            }),
            lcsp: None,
            metadata: serde_json::Map::new(),
        }
    }
}

/// Reads a plain graph in DIMACS form: `p <kind> n m`, then `e u v [w]` or
/// `a u v [w]` lines with 1-based node ids; `c` lines are comments. Node
/// weights are 1 and missing edge weights are 1. Arcs listed in both
/// directions are kept once.
pub fn read_dimacs(text: &str) -> Result<Graph> {
    let mut graph: Option<Graph> = None;
    let mut seen = std::collections::BTreeSet::new();
    for (lineno, line) in text.lines().enumerate() {
        let fields: Vec<&str> = line.split_whitespace().collect();
        let bad = || Error::Format(format!("line {}: {line:?}", lineno + 1));
        let num = |s: &str| s.parse::<i64>().map_err(|_| bad());
        match fields.first().copied() {
            None | Some("c") => {}
            Some("p") => {
                if fields.len() != 4 || graph.is_some() {
                    return Err(bad());
                }
                graph = Some(Graph::new(num(fields[2])? as usize));
            }
            Some("e") | Some("a") => {
                let g = graph.as_mut().ok_or_else(bad)?;
                if fields.len() < 3 || fields.len() > 4 {
                    return Err(bad());
                }
                let (u, v) = (num(fields[1])?, num(fields[2])?);
                let w = if fields.len() == 4 { num(fields[3])? } else { 1 };
                if u < 1 || v < 1 || w <= 0 {
                    return Err(bad());
                }
                let (u, v) = ((u - 1) as usize, (v - 1) as usize);
                if fields[0] == "a" && !seen.insert((u.min(v), u.max(v), w)) {
                    continue;
                }
                g.add_edge(u, v, w.into())?;
            }
            Some(_) => return Err(bad()),
        }
    }
    graph.ok_or_else(|| Error::Format("missing problem line".into()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResultKind {
    Edge,
    Node,
    Path,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpsilonTerm {
    pub rank: usize,
    pub coefficient: i64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificates {
    /// Component of `s1` after deleting the cut.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub preserved: Vec<NodeId>,
    /// Component of `t` after deleting the cut.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub separated: Vec<NodeId>,
    /// Node sequence of a path result.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub path: Vec<NodeId>,
    /// Faces above a path result.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub above: Vec<FaceId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultFile {
    pub solver: String,
    pub kind: ResultKind,
    /// Cut edges, cut nodes, or path edges.
    pub elements: Vec<usize>,
    pub base_value: i64,
    /// Infinitesimal part of the value under the solver's perturbation.
    pub epsilon: Vec<EpsilonTerm>,
    pub certificates: Certificates,
    pub wall_time_us: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<String>,
}

fn epsilon_of(w: &PerturbedWeight) -> Vec<EpsilonTerm> {
    w.epsilon_terms()
        .into_iter()
        .map(|(rank, coefficient)| EpsilonTerm { rank, coefficient })
        .collect()
}

impl ResultFile {
    pub fn from_cut(solver: &str, solution: &CpmcSolution, wall_time_us: u64) -> Self {
        let cut = &solution.cut;
        ResultFile {
            solver: solver.into(),
            kind: match cut.kind {
                CutKind::Edge => ResultKind::Edge,
                CutKind::Node => ResultKind::Node,
            },
            elements: cut.elements.clone(),
            base_value: cut.value.base_value().expect("certified cuts are finite"),
            epsilon: epsilon_of(&cut.value),
            certificates: Certificates {
                preserved: solution.preserved.clone(),
                separated: solution.separated.clone(),
                ..Default::default()
            },
            wall_time_us,
            oracle: None,
        }
    }

    pub fn from_path(solver: &str, path: &ConstrainedPath, wall_time_us: u64) -> Self {
        ResultFile {
            solver: solver.into(),
            kind: ResultKind::Path,
            elements: path.route.edges.clone(),
            base_value: path.route.weight.base_value().expect("paths avoid infinite edges"),
            epsilon: epsilon_of(&path.route.weight),
            certificates: Certificates {
                path: path.route.nodes.clone(),
                above: path.above.clone(),
                ..Default::default()
            },
            wall_time_us,
            oracle: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result files always serialize")
    }

    fn value(&self) -> PerturbedWeight {
        let mut coefficients = vec![self.base_value];
        for term in &self.epsilon {
            if coefficients.len() <= term.rank {
                coefficients.resize(term.rank + 1, 0);
            }
            coefficients[term.rank] = term.coefficient;
        }
        PerturbedWeight::from_coefficients(coefficients)
    }
}

/// Re-checks a result against its instance using connectivity alone.
pub fn verify(instance: &InstanceFile, result: &ResultFile) -> std::result::Result<(), String> {
    let graph = instance.graph().map_err(|e| e.to_string())?;
    match result.kind {
        ResultKind::Edge | ResultKind::Node => verify_cut(instance, &graph, result),
        ResultKind::Path => verify_path(instance, &graph, result),
    }
}

fn verify_cut(instance: &InstanceFile, graph: &Graph, result: &ResultFile) -> std::result::Result<(), String> {
    let terminals = instance.terminals().map_err(|e| e.to_string())?;
    let (kind, mode) = match result.kind {
        ResultKind::Edge => (CutKind::Edge, PerturbMode::Edges),
        _ => (CutKind::Node, PerturbMode::Nodes),
    };
    let mut elements = result.elements.clone();
    elements.sort_unstable();
    elements.dedup();
    if elements.len() != result.elements.len() {
        return Err("repeated cut elements".into());
    }
    let perturbed = graph.perturb(mode);
    let cut = CutResult {
        kind,
        value: result.value(),
        elements,
        source_side: Vec::new(),
    };
    let solution = CpmcSolution::certify(&perturbed, terminals, cut).map_err(|e| e.to_string())?;
    if solution.preserved != result.certificates.preserved {
        return Err("preserved component does not match".into());
    }
    if solution.separated != result.certificates.separated {
        return Err("separated component does not match".into());
    }
    Ok(())
}

fn verify_path(instance: &InstanceFile, graph: &Graph, result: &ResultFile) -> std::result::Result<(), String> {
    let query = instance.lcsp_query().map_err(|e| e.to_string())?;
    let nodes = &result.certificates.path;
    if nodes.len() != result.elements.len() + 1 {
        return Err("path has the wrong number of nodes".into());
    }
    if nodes.first() != Some(&query.a) || nodes.last() != Some(&query.b) {
        return Err("path does not run from A to B".into());
    }
    let mut sorted = nodes.clone();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != nodes.len() {
        return Err("path repeats a node".into());
    }
    for (w, &e) in nodes.windows(2).zip(&result.elements) {
        if e >= graph.edge_count() {
            return Err(format!("edge {e} out of range"));
        }
        let (u, v) = graph.endpoints(e);
        if (u, v) != (w[0], w[1]) && (v, u) != (w[0], w[1]) {
            return Err(format!("edge {e} does not join {} and {}", w[0], w[1]));
        }
    }
    let weight: PerturbedWeight = result.elements.iter().map(|&e| graph.edge_weight(e)).sum();
    if weight != result.value() {
        return Err(format!("value {} differs from path weight {weight}", result.value()));
    }
    let mask = query.above_mask(&result.elements);
    if !mask[query.face] {
        return Err("constrained face is not above the path".into());
    }
    let above: Vec<FaceId> = (0..mask.len()).filter(|&f| mask[f]).collect();
    if above != result.certificates.above {
        return Err("above-face certificate does not match".into());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::path_fixture;
    use crate::planar::solve_cpmec_planar;

    fn path5() -> InstanceFile {
        let (g, rot, terms) = path_fixture(5);
        InstanceFile::from_parts(&g, Some(&rot), terms)
    }

    #[test]
    fn instance_round_trip() {
        let file = path5();
        let back = InstanceFile::parse(&file.to_json()).unwrap();
        assert_eq!(file, back);
        assert_eq!(back.graph().unwrap().edge_count(), 4);
        assert!(back.planar_instance().is_ok());
    }

    #[test]
    fn malformed_instances_are_rejected() {
        assert!(InstanceFile::parse("{").is_err());
        let mut file = path5();
        file.edges[1].weight = 0;
        assert!(file.graph().is_err());
        let mut file = path5();
        file.nodes[2].id = 7;
        assert!(file.graph().is_err());
        let mut file = path5();
        file.embedding.as_mut().unwrap().rotations.insert(9, vec![]);
        assert!(file.rotation().is_err());
    }

    #[test]
    fn verify_accepts_solutions_and_rejects_tampering() {
        let file = path5();
        let inst = file.planar_instance().unwrap().perturbed(PerturbMode::Edges);
        let sol = solve_cpmec_planar(&inst).unwrap();
        let result = ResultFile::from_cut("cpmec-planar", &sol, 0);
        assert_eq!(verify(&file, &result), Ok(()));
        let back = ResultFile::parse(&result.to_json()).unwrap();
        assert_eq!(back, result);

        let mut dropped = result.clone();
        dropped.elements.clear();
        assert!(verify(&file, &dropped).is_err());
        let mut inflated = result.clone();
        inflated.base_value += 1;
        assert!(verify(&file, &inflated).is_err());
        let mut wrong_eps = result;
        wrong_eps.epsilon[0].rank = 1;
        assert!(verify(&file, &wrong_eps).is_err());
    }

    #[test]
    fn dimacs_import() {
        let g = read_dimacs("c demo\np edge 3 2\ne 1 2\ne 2 3 4\n").unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_weight(1), &4.into());
        let g = read_dimacs("p sp 2 2\na 1 2 3\na 2 1 3\n").unwrap();
        assert_eq!(g.edge_count(), 1);
        assert!(read_dimacs("e 1 2\n").is_err());
        assert!(read_dimacs("p edge 2 1\ne 1 1\n").is_err());
    }
}
