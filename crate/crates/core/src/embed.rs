//! Combinatorial embeddings given as rotation systems.
//!
//! Dart `2e` runs along edge `e` from its `u` endpoint, dart `2e + 1` from `v`.
//! A face is traced by following a dart into its head and leaving along the
//! edge that comes next in the head's rotation. Faces are numbered in trace
//! order, starting with the dart leaving node 0 along its first rotation entry.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph, NodeId};

pub type Dart = usize;
pub type FaceId = usize;

pub fn dart_edge(d: Dart) -> EdgeId {
    d / 2
}

pub fn reverse(d: Dart) -> Dart {
    d ^ 1
}

pub fn dart_from(graph: &Graph, e: EdgeId, tail: NodeId) -> Dart {
    if graph.edge(e).u == tail {
        2 * e
    } else {
        2 * e + 1
    }
}

pub fn dart_tail(graph: &Graph, d: Dart) -> NodeId {
    let edge = graph.edge(dart_edge(d));
    if d.is_multiple_of(2) {
        edge.u
    } else {
        edge.v
    }
}

pub fn dart_head(graph: &Graph, d: Dart) -> NodeId {
    dart_tail(graph, reverse(d))
}

/// Cyclic order of incident edges at every node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RotationSystem {
    pub rotations: Vec<Vec<EdgeId>>,
}

impl RotationSystem {
    pub fn new(rotations: Vec<Vec<EdgeId>>) -> Self {
        RotationSystem { rotations }
    }

    /// Each node's edges in adjacency order. Planar only for special graphs.
    pub fn from_adjacency(graph: &Graph) -> Self {
        RotationSystem {
            rotations: (0..graph.node_count())
                .map(|v| graph.neighbors(v).iter().map(|&(e, _)| e).collect())
                .collect(),
        }
    }

    /// Drops the flagged edges from every cycle.
    pub fn without_edges(&self, removed: &[bool]) -> Self {
        RotationSystem {
            rotations: self
                .rotations
                .iter()
                .map(|r| r.iter().copied().filter(|&e| !removed[e]).collect())
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    pub id: FaceId,
    pub darts: Vec<Dart>,
    /// Tail of each dart, in walk order; nodes repeat on non-simple walks.
    pub walk: Vec<NodeId>,
}

impl Face {
    pub fn contains(&self, v: NodeId) -> bool {
        self.walk.contains(&v)
    }

    pub fn len(&self) -> usize {
        self.darts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.darts.is_empty()
    }

    pub fn is_simple_cycle(&self) -> bool {
        let mut nodes = self.walk.clone();
        nodes.sort_unstable();
        nodes.dedup();
        nodes.len() == self.walk.len()
    }
}

/// Successor of every dart within its face.
fn next_darts(graph: &Graph, rotation: &RotationSystem) -> Result<Vec<Dart>> {
    let n = graph.node_count();
    if rotation.rotations.len() != n {
        return Err(Error::MalformedRotation(format!(
            "{} rotation lists for {} nodes",
            rotation.rotations.len(),
            n
        )));
    }
    // position of each dart's edge in its tail's rotation
    let mut position = vec![usize::MAX; 2 * graph.edge_count()];
    for (v, cycle) in rotation.rotations.iter().enumerate() {
        let mut expected: Vec<EdgeId> = graph.neighbors(v).iter().map(|&(e, _)| e).collect();
        let mut given = cycle.clone();
        expected.sort_unstable();
        given.sort_unstable();
        if expected != given {
            return Err(Error::MalformedRotation(format!(
                "node {v} lists edges {cycle:?}, incident edges are {expected:?}"
            )));
        }
        for (i, &e) in cycle.iter().enumerate() {
            position[dart_from(graph, e, v)] = i;
        }
    }
    let next = (0..2 * graph.edge_count())
        .map(|d| {
            let head = dart_head(graph, d);
            let cycle = &rotation.rotations[head];
            let at = position[reverse(d)];
            let e = cycle[(at + 1) % cycle.len()];
            dart_from(graph, e, head)
        })
        .collect();
    Ok(next)
}

/// Traces every face. Does not check Euler's formula.
pub fn trace_faces(graph: &Graph, rotation: &RotationSystem) -> Result<Vec<Face>> {
    let next = next_darts(graph, rotation)?;
    let mut face_of = vec![usize::MAX; next.len()];
    let mut faces = Vec::new();
    let starts = rotation
        .rotations
        .iter()
        .enumerate()
        .flat_map(|(v, cycle)| cycle.iter().map(move |&e| (v, e)));
    for (v, e) in starts {
        let start = dart_from(graph, e, v);
        if face_of[start] != usize::MAX {
            continue;
        }
        let id = faces.len();
        let mut darts = Vec::new();
        let mut d = start;
        loop {
            face_of[d] = id;
            darts.push(d);
            d = next[d];
            if d == start {
                break;
            }
        }
        let walk = darts.iter().map(|&d| dart_tail(graph, d)).collect();
        faces.push(Face { id, darts, walk });
    }
    Ok(faces)
}

/// Traces the faces and accepts them only for a sphere embedding of a connected graph.
pub fn validate_embedding(graph: &Graph, rotation: &RotationSystem) -> Result<Vec<Face>> {
    if graph.edge_count() == 0 {
        return Err(Error::MalformedRotation("graph has no edges".into()));
    }
    let faces = trace_faces(graph, rotation)?;
    if !graph.is_connected() {
        return Err(Error::Disconnected);
    }
    let (n, m, f) = (graph.node_count(), graph.edge_count(), faces.len());
    if n + f != m + 2 {
        return Err(Error::NonPlanarEmbedding {
            nodes: n,
            edges: m,
            faces: f,
        });
    }
    Ok(faces)
}

/// A validated planar embedding with a designated outer face.
#[derive(Clone, Debug)]
pub struct Embedding {
    graph: Graph,
    rotation: RotationSystem,
    faces: Vec<Face>,
    dart_face: Vec<FaceId>,
    outer: FaceId,
}

impl Embedding {
    pub fn new(graph: Graph, rotation: RotationSystem) -> Result<Self> {
        let faces = validate_embedding(&graph, &rotation)?;
        let mut dart_face = vec![0; 2 * graph.edge_count()];
        for face in &faces {
            for &d in &face.darts {
                dart_face[d] = face.id;
            }
        }
        Ok(Embedding {
            graph,
            rotation,
            faces,
            dart_face,
            outer: 0,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn rotation(&self) -> &RotationSystem {
        &self.rotation
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn face(&self, f: FaceId) -> &Face {
        &self.faces[f]
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn face_of_dart(&self, d: Dart) -> FaceId {
        self.dart_face[d]
    }

    pub fn outer_face(&self) -> FaceId {
        self.outer
    }

    pub fn tail(&self, d: Dart) -> NodeId {
        dart_tail(&self.graph, d)
    }

    pub fn head(&self, d: Dart) -> NodeId {
        dart_head(&self.graph, d)
    }

    /// Same embedding with a different graph weighting (topology must match).
    pub fn with_graph(&self, graph: Graph) -> Result<Self> {
        let mut out = Embedding::new(graph, self.rotation.clone())?;
        out.outer = self.outer;
        Ok(out)
    }

    pub fn with_outer_face(&self, f: FaceId) -> Self {
        assert!(f < self.faces.len(), "face {f} out of range");
        let mut out = self.clone();
        out.outer = f;
        out
    }

    /// Designates the lowest-numbered face incident to `node` as the outer face.
    pub fn reroot_outer_face(&self, node: NodeId) -> Self {
        let f = self
            .faces
            .iter()
            .find(|face| face.contains(node))
            .map(|face| face.id)
            .expect("every node of a connected graph with edges lies on a face");
        self.with_outer_face(f)
    }

    pub fn faces_of_node(&self, v: NodeId) -> Vec<FaceId> {
        self.faces.iter().filter(|f| f.contains(v)).map(|f| f.id).collect()
    }

    pub fn same_face(&self, a: NodeId, b: NodeId) -> Option<FaceId> {
        self.faces
            .iter()
            .find(|f| f.contains(a) && f.contains(b))
            .map(|f| f.id)
    }

    /// Splits the boundary walk of `face` at the first occurrences of `a` and
    /// `b`. Both returned node sequences run from `a` to `b`.
    pub fn boundary_paths(&self, face: FaceId, a: NodeId, b: NodeId) -> Result<(Vec<NodeId>, Vec<NodeId>)> {
        let walk = &self.faces[face].walk;
        let i = walk
            .iter()
            .position(|&x| x == a)
            .ok_or(Error::NodeNotOnFace { node: a, face })?;
        let j = walk
            .iter()
            .position(|&x| x == b)
            .ok_or(Error::NodeNotOnFace { node: b, face })?;
        Ok(split_walk(walk, i, j))
    }

    /// Every pair of boundary paths obtained from any occurrence of `a` and of
    /// `b` on the walk (differs from [`Self::boundary_paths`] only on
    /// non-simple walks).
    pub fn all_boundary_paths(&self, face: FaceId, a: NodeId, b: NodeId) -> Vec<(Vec<NodeId>, Vec<NodeId>)> {
        let walk = &self.faces[face].walk;
        let mut out = Vec::new();
        for (i, _) in walk.iter().enumerate().filter(|(_, &x)| x == a) {
            for (j, _) in walk.iter().enumerate().filter(|(_, &x)| x == b) {
                out.push(split_walk(walk, i, j));
            }
        }
        out
    }

    /// One dual node per face and one dual edge per primal edge whose two sides
    /// are different faces. Bridges would give loops and are dropped.
    pub fn build_dual(&self) -> DualGraph {
        let mut graph = Graph::new(self.faces.len());
        let mut dual_edge_of = vec![None; self.graph.edge_count()];
        let mut primal_edge_of = Vec::new();
        for (e, edge) in self.graph.edges().iter().enumerate() {
            let left = self.dart_face[2 * e];
            let right = self.dart_face[2 * e + 1];
            if left == right {
                continue;
            }
            let id = graph
                .add_edge(left, right, edge.weight.clone())
                .expect("faces are valid dual nodes");
            dual_edge_of[e] = Some(id);
            primal_edge_of.push(e);
        }
        let rotations = self
            .faces
            .iter()
            .map(|face| face.darts.iter().filter_map(|&d| dual_edge_of[dart_edge(d)]).collect())
            .collect();
        DualGraph {
            graph,
            rotation: RotationSystem::new(rotations),
            primal_edge_of,
            dual_edge_of,
        }
    }
}

fn split_walk(walk: &[NodeId], i: usize, j: usize) -> (Vec<NodeId>, Vec<NodeId>) {
    let len = walk.len();
    let forward_len = (j + len - i) % len;
    let first: Vec<NodeId> = (0..=forward_len).map(|k| walk[(i + k) % len]).collect();
    let mut second: Vec<NodeId> = (0..=len - forward_len).map(|k| walk[(j + k) % len]).collect();
    second.reverse();
    (first, second)
}

/// Face graph of an embedding. Dual node ids are primal face ids.
#[derive(Clone, Debug)]
pub struct DualGraph {
    pub graph: Graph,
    pub rotation: RotationSystem,
    pub primal_edge_of: Vec<EdgeId>,
    pub dual_edge_of: Vec<Option<EdgeId>>,
}

impl DualGraph {
    /// Embeds the dual and maps each dual face back to the primal node it
    /// surrounds. Dual dart `2k` leaves the face of primal dart `2e`
    /// (`e = primal_edge_of[k]`); the dual face it bounds surrounds that
    /// primal dart's tail.
    pub fn embedding(&self, primal: &Embedding) -> Result<(Embedding, BTreeMap<FaceId, NodeId>)> {
        let emb = Embedding::new(self.graph.clone(), self.rotation.clone())?;
        let mut map = BTreeMap::new();
        for face in emb.faces() {
            let d = face.darts[0];
            let k = dart_edge(d);
            let e = self.primal_edge_of[k];
            let tail_side = if dart_tail(&self.graph, d) == primal.face_of_dart(2 * e) {
                2 * e
            } else {
                2 * e + 1
            };
            map.insert(face.id, primal.tail(tail_side));
        }
        Ok((emb, map))
    }
}

/// Brute-force search for a planar rotation system; test helper for graphs
/// with at most eight nodes.
pub fn find_planar_rotation(graph: &Graph) -> Option<RotationSystem> {
    if graph.node_count() > 8 || graph.edge_count() == 0 || !graph.is_connected() {
        return None;
    }
    let base = RotationSystem::from_adjacency(graph);
    let choices: Vec<Vec<Vec<EdgeId>>> = base
        .rotations
        .iter()
        .map(|cycle| cyclic_orders(cycle))
        .collect();
    let mut pick = vec![0usize; choices.len()];
    loop {
        let rotation = RotationSystem::new(
            pick.iter()
                .zip(&choices)
                .map(|(&i, c)| c[i].clone())
                .collect(),
        );
        if validate_embedding(graph, &rotation).is_ok() {
            return Some(rotation);
        }
        let mut k = 0;
        loop {
            if k == pick.len() {
                return None;
            }
            pick[k] += 1;
            if pick[k] < choices[k].len() {
                break;
            }
            pick[k] = 0;
            k += 1;
        }
    }
}

/// All cyclic orders of `items`, with the first element fixed.
fn cyclic_orders(items: &[EdgeId]) -> Vec<Vec<EdgeId>> {
    if items.len() <= 2 {
        return vec![items.to_vec()];
    }
    let mut rest = items[1..].to_vec();
    let mut out = Vec::new();
    permute(&mut rest, 0, &mut |p| {
        let mut cycle = vec![items[0]];
        cycle.extend_from_slice(p);
        out.push(cycle);
    });
    out
}

fn permute(items: &mut Vec<EdgeId>, k: usize, visit: &mut dyn FnMut(&[EdgeId])) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, visit);
        items.swap(k, i);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;

    fn triangle() -> Embedding {
        let g = Graph::from_edges(3, &[(0, 1, 1), (1, 2, 1), (2, 0, 1)]).unwrap();
        let rot = RotationSystem::from_adjacency(&g);
        Embedding::new(g, rot).unwrap()
    }

    fn cycle(n: usize) -> Embedding {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n, 1)).collect();
        let g = Graph::from_edges(n, &edges).unwrap();
        let rot = RotationSystem::from_adjacency(&g);
        Embedding::new(g, rot).unwrap()
    }

    fn k4_rotation() -> (Graph, RotationSystem) {
        // 0 in the middle of triangle 1-2-3
        let g = Graph::from_edges(4, &[(0, 1, 1), (0, 2, 1), (0, 3, 1), (1, 2, 1), (2, 3, 1), (3, 1, 1)]).unwrap();
        let rot = RotationSystem::new(vec![vec![0, 1, 2], vec![0, 5, 3], vec![1, 3, 4], vec![2, 4, 5]]);
        (g, rot)
    }

    #[test]
    fn triangle_has_two_faces() {
        let emb = triangle();
        assert_eq!(emb.face_count(), 2);
        let total: usize = emb.faces().iter().map(|f| f.len()).sum();
        assert_eq!(total, 6);
    }

    #[test]
    fn k4_has_four_faces() {
        let (g, rot) = k4_rotation();
        let faces = validate_embedding(&g, &rot).unwrap();
        assert_eq!(faces.len(), 4);
        assert!(faces.iter().all(|f| f.len() == 3));
    }

    #[test]
    fn k4_with_bad_rotation_is_rejected() {
        let (g, mut rot) = k4_rotation();
        rot.rotations[0] = vec![0, 2, 1];
        assert!(matches!(validate_embedding(&g, &rot), Err(Error::NonPlanarEmbedding { .. })));
    }

    #[test]
    fn k5_has_no_planar_rotation() {
        let mut edges = Vec::new();
        for u in 0..5 {
            for v in u + 1..5 {
                edges.push((u, v, 1));
            }
        }
        let g = Graph::from_edges(5, &edges).unwrap();
        assert!(find_planar_rotation(&g).is_none());
        let rot = RotationSystem::from_adjacency(&g);
        assert!(matches!(validate_embedding(&g, &rot), Err(Error::NonPlanarEmbedding { .. })));
    }

    #[test]
    fn exhaustive_search_finds_k4() {
        let (g, _) = k4_rotation();
        let rot = find_planar_rotation(&g).unwrap();
        assert_eq!(validate_embedding(&g, &rot).unwrap().len(), 4);
    }

    #[test]
    fn malformed_rotations() {
        let g = Graph::from_edges(3, &[(0, 1, 1), (1, 2, 1)]).unwrap();
        let rot = RotationSystem::new(vec![vec![0], vec![0]]);
        assert!(matches!(validate_embedding(&g, &rot), Err(Error::MalformedRotation(_))));
        let rot = RotationSystem::new(vec![vec![0], vec![0, 0], vec![1]]);
        assert!(matches!(validate_embedding(&g, &rot), Err(Error::MalformedRotation(_))));
    }

    #[test]
    fn reroot_picks_lowest_face() {
        let emb = triangle().reroot_outer_face(2);
        assert_eq!(emb.outer_face(), 0);
        let (g, rot, _) = gen::path_fixture(5);
        let emb = Embedding::new(g, rot).unwrap();
        assert_eq!(emb.face_count(), 1);
        assert_eq!(emb.reroot_outer_face(3).outer_face(), 0);
    }

    #[test]
    fn reroot_on_grid_corner() {
        let (g, rot) = gen::grid(3, 3, &mut |_| 1);
        let emb = Embedding::new(g, rot).unwrap();
        assert_eq!(emb.face_count(), 5);
        let candidates: Vec<FaceId> = emb.faces_of_node(0);
        assert_eq!(candidates.len(), 2);
        assert_eq!(emb.reroot_outer_face(0).outer_face(), candidates[0]);
    }

    #[test]
    fn same_face_on_grids() {
        let emb = triangle();
        assert!(emb.same_face(0, 2).is_some());
        // 2x3 grid: nodes 0 1 2 / 3 4 5; square 0-1-4-3
        let (g, rot) = gen::grid(2, 3, &mut |_| 1);
        let emb = Embedding::new(g, rot).unwrap();
        let f = emb.same_face(0, 4).unwrap();
        let face = emb.face(f);
        assert_eq!(face.len(), 4);
        assert!([0, 1, 3, 4].iter().all(|&v| face.contains(v)));
        // every corner of a 3x3 node grid touches the centre's squares; use 3x3 cells
        let (g, rot) = gen::grid(4, 4, &mut |_| 1);
        let emb = Embedding::new(g, rot).unwrap();
        assert_eq!(emb.same_face(5, 15), None);
        assert!(emb.same_face(5, 0).is_some());
    }

    #[test]
    fn boundary_paths_split_the_walk() {
        let emb = cycle(4);
        let inner = emb.same_face(0, 2).unwrap();
        let (p, q) = emb.boundary_paths(inner, 0, 2).unwrap();
        let mut both = vec![p.clone(), q.clone()];
        both.sort();
        assert_eq!(both, vec![vec![0, 1, 2], vec![0, 3, 2]]);
        let (p, q) = emb.boundary_paths(inner, 0, 1).unwrap();
        assert_eq!(p.len().min(q.len()), 2);
        assert_eq!(p.len().max(q.len()), 4);
        let emb = cycle(6);
        let (p, q) = emb.boundary_paths(0, 0, 3).unwrap();
        assert_eq!((p.len(), q.len()), (4, 4));
        assert!(matches!(emb.boundary_paths(0, 0, 9), Err(Error::NodeNotOnFace { .. })));
    }

    #[test]
    fn dual_of_triangle_and_grid() {
        let dual = triangle().build_dual();
        assert_eq!(dual.graph.node_count(), 2);
        assert_eq!(dual.graph.edge_count(), 3);
        let (g, rot) = gen::grid(3, 3, &mut |_| 1);
        let emb = Embedding::new(g, rot).unwrap();
        let dual = emb.build_dual();
        assert_eq!(dual.graph.node_count(), 5);
        assert_eq!(dual.graph.edge_count(), 12);
        let (dual_emb, map) = dual.embedding(&emb).unwrap();
        assert_eq!(dual_emb.face_count(), 9);
        let mut nodes: Vec<NodeId> = map.values().copied().collect();
        nodes.sort_unstable();
        assert_eq!(nodes, (0..9).collect::<Vec<_>>());
    }

    #[test]
    fn bridges_vanish_from_the_dual() {
        let (g, rot, _) = gen::path_fixture(2);
        let emb = Embedding::new(g, rot).unwrap();
        let dual = emb.build_dual();
        assert_eq!(dual.graph.node_count(), 1);
        assert_eq!(dual.graph.edge_count(), 0);
    }
}
