use thiserror::Error;

use crate::graph::{EdgeId, NodeId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("edge {0} is a self-loop")]
    SelfLoop(EdgeId),
    #[error("node {0} out of range")]
    NodeOutOfRange(NodeId),
    #[error("edge {0} out of range")]
    EdgeOutOfRange(EdgeId),
    #[error("weights must be positive: {0}")]
    NonPositiveWeight(String),
    #[error("seed node {0} is removed")]
    SeedRemoved(NodeId),
    #[error("terminals must be distinct")]
    NonDistinctTerminals,
    #[error("source and sink coincide")]
    SameSourceSink,
    #[error("sink {0} lies in the protected source set")]
    SinkProtected(NodeId),
    #[error("malformed rotation system: {0}")]
    MalformedRotation(String),
    #[error("rotation system is not planar: n - m + f = {nodes} - {edges} + {faces} != 2")]
    NonPlanarEmbedding {
        nodes: usize,
        edges: usize,
        faces: usize,
    },
    #[error("graph is not connected")]
    Disconnected,
    #[error("node {node} is not on face {face}")]
    NodeNotOnFace { node: NodeId, face: usize },
    #[error("nodes do not share a face")]
    NoSharedFace,
    #[error("s1 and t do not share a face")]
    NotCoFacial,
    #[error("no connectivity preserving cut exists")]
    Infeasible,
    #[error("edge weights must be perturbed before solving")]
    Unperturbed,
    #[error("precondition unmet: {0}")]
    Precondition(String),
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error("no path keeps the constrained face on the required side")]
    NoFeasiblePath,
    #[error("search limit exceeded: {count} > {limit}")]
    LimitExceeded { count: usize, limit: usize },
    #[error("element {0} belongs to no set")]
    ElementUncovered(usize),
    #[error("invalid cut: {0}")]
    InvalidCut(String),
    #[error("graph is not bipartite")]
    NotBipartite,
    #[error("certificate check failed: {0}")]
    Certificate(String),
    #[error("malformed input: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
