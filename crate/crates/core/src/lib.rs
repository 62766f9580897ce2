//! Exact solvers for the connectivity preserving minimum cut problem on
//! planar graphs: cut `t` away from `s1` while `s1` stays connected to `s2`.

pub mod embed;
pub mod error;
pub mod gen;
pub mod graph;
pub mod instance;
pub mod lcsp;
pub mod mincut;
pub mod oracle;
pub mod planar;
pub mod reductions;
pub mod weight;

pub use error::{Error, Result};
pub use graph::{EdgeId, Graph, NodeId, PerturbMode, Terminals};
pub use weight::PerturbedWeight;
