//! Packet routing: the sector-domain phantom pipeline and the comparison protocols.

pub mod baselines;
pub mod greedy;
pub mod psspr;

use thiserror::Error;

use crate::network::{NetworkError, NodeId};

#[derive(Debug, Error, PartialEq)]
pub enum RoutingError {
    #[error("source is the sink")]
    SourceIsSink,
    #[error("node {0} is not reachable from the sink")]
    Unreachable(NodeId),
    #[error("invalid routing parameters: {0}")]
    InvalidParams(String),
    #[error("no candidate phantom nodes in any sector")]
    EmptyDomain,
    #[error("no node at exactly {0} hops from the source")]
    EmptyRing(u32),
    #[error("greedy forwarding stuck at node {0}")]
    RoutingStuck(NodeId),
    #[error("hop budget of {0} exceeded")]
    HopBudgetExceeded(usize),
    #[error(transparent)]
    Network(#[from] NetworkError),
}
