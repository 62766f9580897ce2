//! Location constrained shortest paths and the dual-graph edge-cut solver for
//! `s1` and `t` on a common face.
//!
//! Side convention: the outer face of a valid query is bounded by a simple
//! cycle through `A` and `B`. An `A`–`B` path splits the inner disk in two,
//! and the "above" side is the one bounded by the path and the outer arc
//! walked from `B` to `A`. With counterclockwise rotations the outer face is
//! walked counterclockwise, and faces lie to the right of their darts, so
//! "above" is the left-hand side of the path.

use std::collections::{BTreeSet, VecDeque};

use crate::embed::{dart_edge, reverse, Dart, Embedding, FaceId, RotationSystem};
use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph, NodeId, PerturbMode, Terminals};
use crate::mincut::{CutKind, CutResult};
use crate::planar::{CpmcSolution, PlanarInstance};
use crate::weight::PerturbedWeight;

#[derive(Clone, Debug)]
pub struct LcspQuery {
    pub embedding: Embedding,
    pub a: NodeId,
    pub b: NodeId,
    /// The constrained face.
    pub face: FaceId,
}

impl LcspQuery {
    pub fn new(embedding: Embedding, a: NodeId, b: NodeId, face: FaceId) -> Result<Self> {
        let query = LcspQuery { embedding, a, b, face };
        query.validate()?;
        Ok(query)
    }

    pub fn validate(&self) -> Result<()> {
        let emb = &self.embedding;
        emb.graph().check_node(self.a)?;
        emb.graph().check_node(self.b)?;
        let outer = emb.face(emb.outer_face());
        let bad = |msg: &str| Err(Error::InvalidQuery(msg.into()));
        if self.a == self.b {
            return bad("A and B coincide");
        }
        if self.face >= emb.face_count() {
            return bad("constrained face out of range");
        }
        if self.face == emb.outer_face() {
            return bad("constrained face is the outer face");
        }
        if !outer.is_simple_cycle() {
            return bad("outer face is not bounded by a simple cycle");
        }
        if !outer.contains(self.a) || !outer.contains(self.b) {
            return bad("A and B must lie on the outer face");
        }
        Ok(())
    }

    fn outer_position(&self, v: NodeId) -> usize {
        let outer = self.embedding.face(self.embedding.outer_face());
        outer.walk.iter().position(|&x| x == v).expect("validated")
    }

    /// Faces on the "above" side of the path with the given edges.
    pub fn above_mask(&self, path_edges: &[EdgeId]) -> Vec<bool> {
        let emb = &self.embedding;
        let outer_id = emb.outer_face();
        let outer = emb.face(outer_id);
        let mut on_path = vec![false; emb.graph().edge_count()];
        for &e in path_edges {
            on_path[e] = true;
        }
        let mut seen = vec![false; emb.face_count()];
        let mut queue = VecDeque::new();
        let (ia, ib) = (self.outer_position(self.a), self.outer_position(self.b));
        let mut k = ib;
        while k != ia {
            let d = outer.darts[k];
            let g = emb.face_of_dart(reverse(d));
            if !on_path[dart_edge(d)] && g != outer_id && !seen[g] {
                seen[g] = true;
                queue.push_back(g);
            }
            k = (k + 1) % outer.len();
        }
        while let Some(f) = queue.pop_front() {
            for &d in &emb.face(f).darts {
                let g = emb.face_of_dart(reverse(d));
                if !on_path[dart_edge(d)] && g != outer_id && !seen[g] {
                    seen[g] = true;
                    queue.push_back(g);
                }
            }
        }
        seen
    }

    pub fn keeps_face_above(&self, path_edges: &[EdgeId]) -> bool {
        self.above_mask(path_edges)[self.face]
    }

    fn constrain(&self, route: Route) -> Option<ConstrainedPath> {
        let mask = self.above_mask(&route.edges);
        mask[self.face].then(|| ConstrainedPath {
            above: (0..mask.len()).filter(|&f| mask[f]).collect(),
            route,
        })
    }
}

/// A simple path with its edges and total weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Route {
    pub nodes: Vec<NodeId>,
    pub edges: Vec<EdgeId>,
    pub weight: PerturbedWeight,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstrainedPath {
    pub route: Route,
    /// Faces on the "above" side, sorted; contains the constrained face.
    pub above: Vec<FaceId>,
}

struct PathSearch<'a> {
    graph: &'a Graph,
    blocked: &'a [bool],
    target: NodeId,
    /// `(u, v, e)`: the path must step from `u` to `v` along `e`.
    via: Option<(NodeId, NodeId, EdgeId)>,
    on_path: Vec<bool>,
    nodes: Vec<NodeId>,
    edges: Vec<EdgeId>,
    best: Option<Route>,
}

impl PathSearch<'_> {
    fn step(&mut self, y: NodeId, e: EdgeId, weight: &PerturbedWeight, used: bool) {
        self.on_path[y] = true;
        self.nodes.push(y);
        self.edges.push(e);
        let next = weight + self.graph.edge_weight(e);
        self.run(y, next, used);
        self.edges.pop();
        self.nodes.pop();
        self.on_path[y] = false;
    }

    fn run(&mut self, x: NodeId, weight: PerturbedWeight, used: bool) {
        if self.best.as_ref().is_some_and(|b| weight >= b.weight) {
            return;
        }
        if x == self.target {
            if self.via.is_none() || used {
                self.best = Some(Route {
                    nodes: self.nodes.clone(),
                    edges: self.edges.clone(),
                    weight,
                });
            }
            return;
        }
        if let Some((u, v, e)) = self.via {
            if !used && x == u {
                if !self.on_path[v] && !self.blocked[e] && !self.graph.edge_weight(e).is_infinite() {
                    self.step(v, e, &weight, true);
                }
                return;
            }
        }
        for &(e, y) in self.graph.neighbors(x) {
            if self.blocked[e] || self.on_path[y] || self.graph.edge_weight(e).is_infinite() {
                continue;
            }
            if matches!(self.via, Some((_, v, _)) if !used && y == v) {
                continue;
            }
            self.step(y, e, &weight, used);
        }
    }
}

fn search(graph: &Graph, blocked: &[bool], a: NodeId, b: NodeId, via: Option<(NodeId, NodeId, EdgeId)>) -> Option<Route> {
    let mut s = PathSearch {
        graph,
        blocked,
        target: b,
        via,
        on_path: vec![false; graph.node_count()],
        nodes: vec![a],
        edges: Vec::new(),
        best: None,
    };
    s.on_path[a] = true;
    s.run(a, PerturbedWeight::zero(), false);
    s.best
}

/// Cheapest simple `a`–`b` path avoiding blocked and infinite edges.
pub fn shortest_path(graph: &Graph, blocked: &[bool], a: NodeId, b: NodeId) -> Option<Route> {
    search(graph, blocked, a, b, None)
}

/// Cheapest simple `a`–`b` path that traverses `dart` in its direction, i.e.
/// the cheapest pair of disjoint paths `a`–`U` and `V`–`b` plus the edge `UV`.
/// Exact branch and bound.
pub fn shortest_path_via_directed_edge(graph: &Graph, blocked: &[bool], a: NodeId, b: NodeId, dart: Dart) -> Option<Route> {
    let e = dart_edge(dart);
    let (u, v) = if dart.is_multiple_of(2) { graph.endpoints(e) } else { (graph.endpoints(e).1, graph.endpoints(e).0) };
    if u == b || v == a {
        return None;
    }
    search(graph, blocked, a, b, Some((u, v, e)))
}

/// Faces joined to `start` across removed edges.
fn merged_region(emb: &Embedding, start: FaceId, removed: &[bool]) -> Vec<bool> {
    let mut seen = vec![false; emb.face_count()];
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(f) = queue.pop_front() {
        for &d in &emb.face(f).darts {
            let g = emb.face_of_dart(reverse(d));
            if removed[dart_edge(d)] && !seen[g] {
                seen[g] = true;
                queue.push_back(g);
            }
        }
    }
    seen
}

/// Shortest simple `A`–`B` path keeping the constrained face above.
///
/// The constrained face grows into a region `R` of faces. Each round tries
/// every edge on `R`'s boundary, traversed with `R` on the left; any path
/// through such an edge that avoids `R`'s interior keeps the face above. Then
/// `R`'s edges are deleted along with dangling nodes, merging `R` with its
/// neighbors. Once `R` reaches the outer face, every remaining path lies on a
/// single side of it, and the plain shortest path is checked directly.
pub fn solve_lcsp(query: &LcspQuery) -> Result<ConstrainedPath> {
    query.validate()?;
    let emb = &query.embedding;
    let graph = emb.graph();
    let mut removed = vec![false; graph.edge_count()];
    let mut best: Option<ConstrainedPath> = None;
    let offer = |route: Option<Route>, best: &mut Option<ConstrainedPath>| {
        if let Some(path) = route.and_then(|r| query.constrain(r)) {
            if best.as_ref().is_none_or(|b| path.route.weight < b.route.weight) {
                *best = Some(path);
            }
        }
    };
    loop {
        let region = merged_region(emb, query.face, &removed);
        if region[emb.outer_face()] {
            break;
        }
        let darts: BTreeSet<Dart> = (0..emb.face_count())
            .filter(|&f| region[f])
            .flat_map(|f| emb.face(f).darts.iter().copied())
            .filter(|&d| !removed[dart_edge(d)])
            .collect();
        if darts.is_empty() {
            break;
        }
        for &d in &darts {
            let route = shortest_path_via_directed_edge(graph, &removed, query.a, query.b, reverse(d));
            offer(route, &mut best);
        }
        for &d in &darts {
            removed[dart_edge(d)] = true;
        }
        prune_dangling(graph, &mut removed, query.a, query.b);
    }
    offer(shortest_path(graph, &removed, query.a, query.b), &mut best);
    best.ok_or(Error::NoFeasiblePath)
}

/// Repeatedly deletes the last edge of nodes other than `a` and `b` that have
/// exactly one remaining edge.
fn prune_dangling(graph: &Graph, removed: &mut [bool], a: NodeId, b: NodeId) {
    loop {
        let mut changed = false;
        for v in (0..graph.node_count()).filter(|&v| v != a && v != b) {
            let live: Vec<EdgeId> = graph.neighbors(v).iter().map(|&(e, _)| e).filter(|&e| !removed[e]).collect();
            if live.len() == 1 {
                removed[live[0]] = true;
                changed = true;
            }
        }
        if !changed {
            return;
        }
    }
}

/// The dual with the shared face `F` split into one node per boundary dart,
/// those nodes joined in a ring of impassable edges that bounds the outer face.
struct SplitDual {
    embedding: Embedding,
    /// Primal edge of each dual edge; `None` on the ring.
    primal_of: Vec<Option<EdgeId>>,
    /// Dual node standing for dart `k` of `F`.
    beta: Vec<NodeId>,
    /// Dual edge joining `beta[k]` and `beta[k + 1]`.
    ring: Vec<EdgeId>,
    /// Dual face surrounding each primal node.
    node_face: Vec<Option<FaceId>>,
}

fn split_dual(primal: &Embedding, f: FaceId) -> Result<SplitDual> {
    let pg = primal.graph();
    let face_f = primal.face(f);
    let len = face_f.len();
    let mut node_of_face = vec![usize::MAX; primal.face_count()];
    let mut next = 0;
    for g in (0..primal.face_count()).filter(|&g| g != f) {
        node_of_face[g] = next;
        next += 1;
    }
    let beta: Vec<NodeId> = (next..next + len).collect();
    let mut position = vec![usize::MAX; 2 * pg.edge_count()];
    for (k, &d) in face_f.darts.iter().enumerate() {
        position[d] = k;
    }
    let side = |d: Dart| {
        let g = primal.face_of_dart(d);
        if g == f {
            beta[position[d]]
        } else {
            node_of_face[g]
        }
    };

    let mut graph = Graph::new(next + len);
    let mut dual_of = vec![None; pg.edge_count()];
    let mut primal_of = Vec::new();
    for e in 0..pg.edge_count() {
        let (x, y) = (side(2 * e), side(2 * e + 1));
        if x != y {
            dual_of[e] = Some(graph.add_edge(x, y, pg.edge_weight(e).clone())?);
            primal_of.push(Some(e));
        }
    }
    let ring: Vec<EdgeId> = (0..len)
        .map(|k| {
            primal_of.push(None);
            graph.add_edge(beta[k], beta[(k + 1) % len], PerturbedWeight::Infinite)
        })
        .collect::<Result<_>>()?;

    let mut embedding = None;
    for flipped in [false, true] {
        let mut rotations: Vec<Vec<EdgeId>> = (0..primal.face_count())
            .filter(|&g| g != f)
            .map(|g| primal.face(g).darts.iter().filter_map(|&d| dual_of[dart_edge(d)]).collect())
            .collect();
        for k in 0..len {
            let own = dual_of[dart_edge(face_f.darts[k])].expect("darts of F always survive");
            let (ahead, behind) = (ring[k], ring[(k + len - 1) % len]);
            rotations.push(if flipped { vec![own, behind, ahead] } else { vec![own, ahead, behind] });
        }
        let Ok(emb) = Embedding::new(graph.clone(), RotationSystem::new(rotations)) else {
            continue;
        };
        let ring_set: BTreeSet<EdgeId> = ring.iter().copied().collect();
        if let Some(outer) = emb.faces().iter().find(|h| h.darts.iter().all(|&d| ring_set.contains(&dart_edge(d)))) {
            embedding = Some(emb.with_outer_face(outer.id));
            break;
        }
    }
    let embedding = embedding.ok_or_else(|| Error::Certificate("split dual has no ring face".into()))?;
    let node_face = locate_node_faces(primal, &embedding, &dual_of)?;
    Ok(SplitDual {
        embedding,
        primal_of,
        beta,
        ring,
        node_face,
    })
}

/// Dual face around each primal node. A dual dart is taken to match the
/// primal dart it crosses from left to right or from right to left, whichever
/// gives every node a single face. Nodes whose edges were all dropped inherit
/// the face of the nearest node across dropped edges.
fn locate_node_faces(primal: &Embedding, dual: &Embedding, dual_of: &[Option<EdgeId>]) -> Result<Vec<Option<FaceId>>> {
    let pg = primal.graph();
    for flip in [0, 1] {
        let mut faces: Vec<BTreeSet<FaceId>> = vec![BTreeSet::new(); pg.node_count()];
        for d in 0..2 * pg.edge_count() {
            if let Some(k) = dual_of[dart_edge(d)] {
                faces[primal.tail(d)].insert(dual.face_of_dart(2 * k + ((d & 1) ^ flip)));
            }
        }
        if faces.iter().all(|s| s.len() <= 1) {
            let mut out: Vec<Option<FaceId>> = faces.iter().map(|s| s.first().copied()).collect();
            loop {
                let mut changed = false;
                for e in (0..pg.edge_count()).filter(|&e| dual_of[e].is_none()) {
                    let (u, v) = pg.endpoints(e);
                    match (out[u], out[v]) {
                        (Some(x), None) => out[v] = Some(x),
                        (None, Some(x)) => out[u] = Some(x),
                        _ => continue,
                    }
                    changed = true;
                }
                if !changed {
                    return Ok(out);
                }
            }
        }
    }
    Err(Error::Certificate("dual faces do not match primal nodes".into()))
}

/// Minimum edge cut separating `t` from `s1` while keeping `s1` and `s2`
/// connected, for `s1` and `t` on a common face `F`. A minimal cut is a dual
/// cycle through `F`; splitting `F` along its boundary turns it into a dual
/// path between two boundary nodes on opposite sides of the corners of `s1`
/// and `t`, with the face of `s2` on the side of `s1`.
pub fn solve_cpmec_same_face(instance: &PlanarInstance) -> Result<CpmcSolution> {
    let graph = instance.graph();
    let Terminals { s1, s2, t } = instance.terminals;
    let f = instance.embedding.same_face(s1, t).ok_or(Error::NotCoFacial)?;
    if !graph.is_perturbed(PerturbMode::Edges) {
        return Err(Error::Unperturbed);
    }
    if !graph.is_feasible_cpmec(s1, s2, t)? {
        return Err(Error::Infeasible);
    }
    let split = split_dual(&instance.embedding, f)?;
    let walk = &instance.embedding.face(f).walk;
    let len = walk.len();
    let p = walk.iter().position(|&x| x == s1).expect("s1 is on F");
    let q = walk.iter().position(|&x| x == t).expect("t is on F");
    // the corner of s1 sits on the ring edge just before beta[p]
    let s1_ring = split.ring[(p + len - 1) % len];
    let constrained = split.node_face[s2].ok_or(Error::Infeasible)?;
    let dual = &split.embedding;
    let outer = dual.face(dual.outer_face());

    let mut best: Option<CutResult> = None;
    let arc = |from: usize, to: usize| {
        let n = (to + len - from) % len;
        (0..n).map(move |k| (from + k) % len)
    };
    for i in arc(p, q) {
        for j in arc(q, p) {
            let (x, y) = (split.beta[i], split.beta[j]);
            let pos = |v: NodeId| outer.walk.iter().position(|&w| w == v).expect("beta nodes bound the outer face");
            // orient so the corner of s1 lies on the arc walked from B to A
            let (ix, iy) = (pos(x), pos(y));
            let mut s1_between = false;
            let mut k = iy;
            while k != ix {
                s1_between |= dart_edge(outer.darts[k]) == s1_ring;
                k = (k + 1) % outer.len();
            }
            let (a, b) = if s1_between { (x, y) } else { (y, x) };
            let query = LcspQuery {
                embedding: dual.clone(),
                a,
                b,
                face: constrained,
            };
            let path = match solve_lcsp(&query) {
                Ok(path) => path,
                Err(Error::NoFeasiblePath) => continue,
                Err(e) => return Err(e),
            };
            let mut elements: Vec<EdgeId> = path
                .route
                .edges
                .iter()
                .map(|&h| split.primal_of[h].expect("ring edges are impassable"))
                .collect();
            elements.sort_unstable();
            let value = elements.iter().map(|&e| graph.edge_weight(e)).sum();
            if best.as_ref().is_none_or(|c: &CutResult| value < c.value) {
                best = Some(CutResult {
                    kind: CutKind::Edge,
                    elements,
                    value,
                    source_side: Vec::new(),
                });
            }
        }
    }
    CpmcSolution::certify(graph, instance.terminals, best.ok_or(Error::Infeasible)?)
}
