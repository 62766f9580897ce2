//! Deterministic instance families: grids, paths and random planar graphs.
//!
//! Random planar graphs are grown combinatorially. Starting from a triangle,
//! each new node lands in a random triangular face and is joined to its three
//! corners, which is a triangulation of randomly inserted points. Random
//! diagonal flips diversify the triangulation before edges are subsampled
//! (keeping the graph connected). Every step edits the rotation system
//! directly, so the embedding is exact and no coordinates are involved.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::embed::{dart_edge, trace_faces, validate_embedding, Face, RotationSystem};
use crate::graph::{EdgeId, Graph, NodeId, Terminals};
use crate::weight::PerturbedWeight;

/// `rows x cols` grid; node `(r, c)` is `r * cols + c`. Horizontal edges come
/// first, row by row, then vertical edges.
pub fn grid(rows: usize, cols: usize, weight: &mut dyn FnMut(EdgeId) -> i64) -> (Graph, RotationSystem) {
    assert!(rows >= 1 && cols >= 1 && rows * cols >= 2, "grid needs at least two nodes");
    let id = |r: usize, c: usize| r * cols + c;
    let mut graph = Graph::new(rows * cols);
    let mut east = vec![None; rows * cols];
    let mut south = vec![None; rows * cols];
    for r in 0..rows {
        for c in 0..cols - 1 {
            let e = graph.edge_count();
            graph.add_edge(id(r, c), id(r, c + 1), weight(e).into()).unwrap();
            east[id(r, c)] = Some(e);
        }
    }
    for r in 0..rows - 1 {
        for c in 0..cols {
            let e = graph.edge_count();
            graph.add_edge(id(r, c), id(r + 1, c), weight(e).into()).unwrap();
            south[id(r, c)] = Some(e);
        }
    }
    let mut rotations = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            let v = id(r, c);
            let west = if c > 0 { east[id(r, c - 1)] } else { None };
            let north = if r > 0 { south[id(r - 1, c)] } else { None };
            // east, north, west, south
            rotations.push([east[v], north, west, south[v]].into_iter().flatten().collect());
        }
    }
    (graph, RotationSystem::new(rotations))
}

/// Path `0 - 1 - ... - (n-1)` with unit weights. For `n >= 3` the terminals
/// are `s1 = 0`, `t = n - 1` and `s2 = n - 3` (at least 1); for `n = 5` this
/// is the `s1 - a - s2 - b - t` fixture.
pub fn path_fixture(n: usize) -> (Graph, RotationSystem, Option<Terminals>) {
    let edges: Vec<_> = (0..n.saturating_sub(1)).map(|i| (i, i + 1, 1)).collect();
    let graph = Graph::from_edges(n, &edges).unwrap();
    let rotation = RotationSystem::from_adjacency(&graph);
    let terminals = (n >= 3).then(|| Terminals {
        s1: 0,
        s2: (n - 3).max(1),
        t: n - 1,
    });
    (graph, rotation, terminals)
}

#[derive(Clone, Copy, Debug)]
pub struct RandomPlanarParams {
    pub nodes: usize,
    pub max_edges: usize,
    pub max_weight: i64,
    pub flips: usize,
}

impl Default for RandomPlanarParams {
    fn default() -> Self {
        RandomPlanarParams {
            nodes: 8,
            max_edges: 14,
            max_weight: 5,
            flips: 6,
        }
    }
}

/// Adds an edge between the corners `i` and `j` of `face`. The corner `k` sits
/// at the tail of dart `k`, between the previous dart and dart `k`; the new
/// edge goes into the rotation right after the incoming edge.
fn insert_chord(graph: &mut Graph, rotation: &mut RotationSystem, face: &Face, i: usize, j: usize) -> EdgeId {
    let len = face.darts.len();
    let (y, z) = (face.walk[i], face.walk[j]);
    let e = graph.add_edge(y, z, PerturbedWeight::base(1)).unwrap();
    for (corner, node) in [(i, y), (j, z)] {
        let incoming = dart_edge(face.darts[(corner + len - 1) % len]);
        let cycle = &mut rotation.rotations[node];
        let at = cycle.iter().position(|&x| x == incoming).unwrap();
        cycle.insert(at + 1, e);
    }
    e
}

fn face_with(graph: &Graph, rotation: &RotationSystem, pred: impl Fn(&Face) -> bool) -> Option<Face> {
    trace_faces(graph, rotation).unwrap().into_iter().find(pred)
}

/// Random connected planar graph with its embedding. Node and edge weights
/// are uniform in `1..=max_weight`.
pub fn random_planar<R: Rng>(params: RandomPlanarParams, rng: &mut R) -> (Graph, RotationSystem) {
    let n = params.nodes.max(3);
    let mut graph = Graph::new(3);
    for (u, v) in [(0, 1), (1, 2), (2, 0)] {
        graph.add_edge(u, v, 1.into()).unwrap();
    }
    let mut rotation = RotationSystem::from_adjacency(&graph);

    while graph.node_count() < n {
        let faces = trace_faces(&graph, &rotation).unwrap();
        let target = faces.choose(rng).unwrap().clone();
        let corners = target.walk.clone();
        // x hangs off corner 0 first, then sits in a face with the other corners
        let x = attach_pendant(&mut graph, &mut rotation, &target, 0);
        for &corner in &corners[1..] {
            let face = face_with(&graph, &rotation, |f| f.contains(x) && f.contains(corner)).unwrap();
            let i = face.walk.iter().position(|&v| v == x).unwrap();
            let j = face.walk.iter().position(|&v| v == corner).unwrap();
            insert_chord(&mut graph, &mut rotation, &face, i, j);
        }
        debug_assert!(validate_embedding(&graph, &rotation).is_ok());
    }

    for _ in 0..params.flips {
        try_flip(&mut graph, &mut rotation, rng);
    }

    let target_edges = params.max_edges.max(n - 1);
    let mut order: Vec<EdgeId> = (0..graph.edge_count()).collect();
    order.shuffle(rng);
    let mut removed = vec![false; graph.edge_count()];
    let mut kept = graph.edge_count();
    for e in order {
        if kept <= target_edges {
            break;
        }
        removed[e] = true;
        if graph.component_mask(0, &[], &removed).iter().all(|&b| b) {
            kept -= 1;
        } else {
            removed[e] = false;
        }
    }

    let (mut graph, rotation) = compact(&graph, &rotation, &removed);
    for e in 0..graph.edge_count() {
        graph.set_edge_weight(e, rng.gen_range(1..=params.max_weight).into());
    }
    for v in 0..graph.node_count() {
        graph.set_node_weight(v, rng.gen_range(1..=params.max_weight).into());
    }
    debug_assert!(validate_embedding(&graph, &rotation).is_ok());
    (graph, rotation)
}

/// New node joined to the tail of corner `i` of `face`, inside that face.
fn attach_pendant(graph: &mut Graph, rotation: &mut RotationSystem, face: &Face, i: usize) -> NodeId {
    let len = face.darts.len();
    let corner = face.walk[i];
    let x = graph.add_node(1.into());
    let e = graph.add_edge(corner, x, 1.into()).unwrap();
    let incoming = dart_edge(face.darts[(i + len - 1) % len]);
    let cycle = &mut rotation.rotations[corner];
    let at = cycle.iter().position(|&k| k == incoming).unwrap();
    cycle.insert(at + 1, e);
    rotation.rotations.push(vec![e]);
    x
}

fn try_flip<R: Rng>(graph: &mut Graph, rotation: &mut RotationSystem, rng: &mut R) {
    let e = rng.gen_range(0..graph.edge_count());
    let faces = trace_faces(graph, rotation).unwrap();
    let sides: Vec<&Face> = faces
        .iter()
        .filter(|f| f.darts.iter().any(|&d| dart_edge(d) == e))
        .collect();
    if sides.len() != 2 || sides.iter().any(|f| f.len() != 3) {
        return;
    }
    let (a, b) = graph.endpoints(e);
    let apex = |f: &Face| f.walk.iter().copied().find(|&v| v != a && v != b).unwrap();
    let (c, d) = (apex(sides[0]), apex(sides[1]));
    if c == d || graph.is_adjacent(c, d) {
        return;
    }
    let mut removed = vec![false; graph.edge_count()];
    removed[e] = true;
    let (mut g, mut rot) = compact(graph, rotation, &removed);
    let face = face_with(&g, &rot, |f| f.contains(c) && f.contains(d) && f.len() == 4).unwrap();
    let i = face.walk.iter().position(|&v| v == c).unwrap();
    let j = face.walk.iter().position(|&v| v == d).unwrap();
    insert_chord(&mut g, &mut rot, &face, i, j);
    if validate_embedding(&g, &rot).is_ok() {
        *graph = g;
        *rotation = rot;
    }
}

/// Drops flagged edges and renumbers the rest in order.
fn compact(graph: &Graph, rotation: &RotationSystem, removed: &[bool]) -> (Graph, RotationSystem) {
    let mut renumber = vec![usize::MAX; graph.edge_count()];
    let mut out = Graph::with_node_weights(graph.node_weights().to_vec());
    for (e, edge) in graph.edges().iter().enumerate() {
        if !removed[e] {
            renumber[e] = out.add_edge(edge.u, edge.v, edge.weight.clone()).unwrap();
        }
    }
    let rotations = rotation
        .without_edges(removed)
        .rotations
        .into_iter()
        .map(|cycle| cycle.into_iter().map(|e| renumber[e]).collect())
        .collect();
    (out, RotationSystem::new(rotations))
}

/// Three distinct random terminals.
pub fn random_terminals<R: Rng>(n: usize, rng: &mut R) -> Terminals {
    let mut nodes: Vec<NodeId> = (0..n).collect();
    nodes.shuffle(rng);
    Terminals {
        s1: nodes[0],
        s2: nodes[1],
        t: nodes[2],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn grid_counts() {
        let (g, rot) = grid(2, 3, &mut |_| 1);
        assert_eq!((g.node_count(), g.edge_count()), (6, 7));
        assert_eq!(validate_embedding(&g, &rot).unwrap().len(), 3);
        let (g, rot) = grid(4, 4, &mut |_| 1);
        assert_eq!(validate_embedding(&g, &rot).unwrap().len(), 10);
    }

    #[test]
    fn random_planar_graphs_are_valid_and_deterministic() {
        for seed in 0..40 {
            let params = RandomPlanarParams {
                nodes: 3 + seed as usize % 7,
                ..Default::default()
            };
            let (g, rot) = random_planar(params, &mut ChaCha8Rng::seed_from_u64(seed));
            assert!(validate_embedding(&g, &rot).is_ok(), "seed {seed}");
            assert!(g.edge_count() <= params.max_edges.max(g.node_count() - 1));
            assert!(g.is_connected());
            let (g2, rot2) = random_planar(params, &mut ChaCha8Rng::seed_from_u64(seed));
            assert_eq!(g, g2);
            assert_eq!(rot, rot2);
        }
    }

    #[test]
    fn full_triangulation_has_3n_minus_6_edges() {
        let params = RandomPlanarParams {
            nodes: 9,
            max_edges: 100,
            max_weight: 1,
            flips: 20,
        };
        let (g, rot) = random_planar(params, &mut ChaCha8Rng::seed_from_u64(3));
        assert_eq!(g.edge_count(), 21);
        let faces = validate_embedding(&g, &rot).unwrap();
        assert!(faces.iter().all(|f| f.len() == 3));
    }
}
