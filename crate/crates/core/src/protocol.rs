//! Protocol selection and per-source router state.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::network::{Network, NodeId};
use crate::routing::baselines::{hbdrw_route, shortest_path_route, BaselineParams, PusbrfRouter};
use crate::routing::psspr::{PssprRouter, SectorParams};
use crate::routing::RoutingError;
use crate::trace::RouteTrace;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProtocolKind {
    Psspr,
    Hbdrw,
    Pusbrf,
    ShortestPath,
}

impl ProtocolKind {
    pub const ALL: [ProtocolKind; 4] = [
        ProtocolKind::Psspr,
        ProtocolKind::Hbdrw,
        ProtocolKind::Pusbrf,
        ProtocolKind::ShortestPath,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ProtocolKind::Psspr => "PSSPR",
            ProtocolKind::Hbdrw => "HBDRW",
            ProtocolKind::Pusbrf => "PUSBRF",
            ProtocolKind::ShortestPath => "SHORTEST",
        }
    }
}

impl fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
#[error("unknown protocol `{0}` (expected psspr, hbdrw, pusbrf or shortest)")]
pub struct UnknownProtocol(pub String);

impl FromStr for ProtocolKind {
    type Err = UnknownProtocol;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "psspr" => Ok(ProtocolKind::Psspr),
            "hbdrw" => Ok(ProtocolKind::Hbdrw),
            "pusbrf" => Ok(ProtocolKind::Pusbrf),
            "shortest" | "shortest-path" | "shortest_path" => Ok(ProtocolKind::ShortestPath),
            _ => Err(UnknownProtocol(s.trim().to_string())),
        }
    }
}

/// A protocol together with its parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Protocol {
    Psspr(SectorParams),
    Hbdrw(BaselineParams),
    Pusbrf(BaselineParams),
    ShortestPath,
}

impl Protocol {
    pub fn kind(&self) -> ProtocolKind {
        match self {
            Protocol::Psspr(_) => ProtocolKind::Psspr,
            Protocol::Hbdrw(_) => ProtocolKind::Hbdrw,
            Protocol::Pusbrf(_) => ProtocolKind::Pusbrf,
            Protocol::ShortestPath => ProtocolKind::ShortestPath,
        }
    }

    /// Precomputes whatever the protocol needs for packets from `source`.
    pub fn prepare(&self, net: &Network, source: NodeId) -> Result<Router, RoutingError> {
        Ok(match *self {
            Protocol::Psspr(params) => Router::Psspr(PssprRouter::new(net, source, params)?),
            Protocol::Hbdrw(params) => {
                net.node(source)?;
                Router::Hbdrw { source, params }
            }
            Protocol::Pusbrf(params) => Router::Pusbrf(PusbrfRouter::new(net, source, &params)?),
            Protocol::ShortestPath => {
                // Validates the source and caches the (fixed) route.
                Router::ShortestPath(shortest_path_route(net, source)?)
            }
        })
    }
}

#[derive(Clone, Debug)]
pub enum Router {
    Psspr(PssprRouter),
    Hbdrw { source: NodeId, params: BaselineParams },
    Pusbrf(PusbrfRouter),
    ShortestPath(RouteTrace),
}

impl Router {
    pub fn route<R: Rng + ?Sized>(&self, net: &Network, rng: &mut R) -> Result<RouteTrace, RoutingError> {
        match self {
            Router::Psspr(r) => r.route(net, rng),
            Router::Hbdrw { source, params } => hbdrw_route(net, *source, params, rng),
            Router::Pusbrf(r) => Ok(r.route(net, rng)),
            Router::ShortestPath(trace) => Ok(trace.clone()),
        }
    }
}
