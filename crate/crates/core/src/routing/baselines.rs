//! Comparison protocols: hop-based directed random walk (HBDRW), restricted
//! flooding phantom selection (PUSBRF) and plain min-hop routing.

use rand::Rng;

use crate::network::{Network, NodeId, UNREACHABLE};
use crate::routing::greedy::descend_to_sink;
use crate::routing::RoutingError;
use crate::trace::{Phase, RouteTrace};

/// Phantom walk length `h`, hops.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BaselineParams {
    walk_hops: u32,
}

impl BaselineParams {
    pub fn new(walk_hops: u32) -> Result<Self, RoutingError> {
        if walk_hops == 0 {
            return Err(RoutingError::InvalidParams("walk_hops must be at least 1".into()));
        }
        Ok(Self { walk_hops })
    }

    pub fn walk_hops(&self) -> u32 {
        self.walk_hops
    }
}

fn check_source(net: &Network, source: NodeId) -> Result<(), RoutingError> {
    let node = net.node(source)?;
    if !node.is_reachable() {
        return Err(RoutingError::Unreachable(source));
    }
    Ok(())
}

/// Min-hop route to the sink.
pub fn shortest_path_route(net: &Network, source: NodeId) -> Result<RouteTrace, RoutingError> {
    check_source(net, source)?;
    let mut trace = RouteTrace::start(source);
    descend_to_sink(net, &mut trace, Phase::ShortestPath)?;
    trace.delivered = true;
    Ok(trace)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum WalkSet {
    Parent,
    Child,
}

impl WalkSet {
    fn other(self) -> Self {
        match self {
            WalkSet::Parent => WalkSet::Child,
            WalkSet::Child => WalkSet::Parent,
        }
    }

    fn members(self, net: &Network, node: NodeId) -> Vec<NodeId> {
        let hop = net.hop(node);
        net.neighbors(node)
            .iter()
            .filter(|n| {
                n.hop_to_sink != UNREACHABLE
                    && match self {
                        WalkSet::Parent => n.hop_to_sink < hop,
                        WalkSet::Child => n.hop_to_sink > hop,
                    }
            })
            .map(|n| n.id)
            .collect()
    }
}

/// Directed random walk of `h` hops committed to the parent or the child
/// set, then min-hop routing from the walk's endpoint (the phantom).
pub fn hbdrw_route<R: Rng + ?Sized>(
    net: &Network,
    source: NodeId,
    params: &BaselineParams,
    rng: &mut R,
) -> Result<RouteTrace, RoutingError> {
    check_source(net, source)?;
    let mut trace = RouteTrace::start(source);
    let committed = if rng.gen_bool(0.5) { WalkSet::Parent } else { WalkSet::Child };
    for _ in 0..params.walk_hops {
        let cur = trace.current();
        if cur == net.sink() {
            break;
        }
        let prev = trace.previous();
        let mut set = committed.members(net, cur);
        set.retain(|&n| Some(n) != prev);
        let relaxed = set.is_empty();
        if relaxed {
            set = committed.other().members(net, cur);
            set.retain(|&n| Some(n) != prev);
        }
        if set.is_empty() {
            break;
        }
        let next = set[rng.gen_range(0..set.len())];
        trace.push_step(next, Phase::RandomWalk, relaxed);
    }
    trace.phantom = Some(trace.hops.len() - 1);
    trace.delivered = descend_to_sink(net, &mut trace, Phase::ShortestPath).is_ok();
    Ok(trace)
}

/// PUSBRF state for one source: its hop field and the ring of nodes exactly
/// `h` source-hops away.
#[derive(Clone, Debug)]
pub struct PusbrfRouter {
    source: NodeId,
    source_hops: Vec<u32>,
    ring: Vec<NodeId>,
}

impl PusbrfRouter {
    pub fn new(net: &Network, source: NodeId, params: &BaselineParams) -> Result<Self, RoutingError> {
        check_source(net, source)?;
        let source_hops = net.bfs_from(source);
        let h = params.walk_hops;
        let ring: Vec<NodeId> = net
            .nodes()
            .iter()
            .filter(|n| source_hops[n.id.index()] == h && n.is_reachable())
            .map(|n| n.id)
            .collect();
        if ring.is_empty() {
            return Err(RoutingError::EmptyRing(h));
        }
        Ok(Self { source, source_hops, ring })
    }

    pub fn ring(&self) -> &[NodeId] {
        &self.ring
    }

    pub fn source_hops(&self) -> &[u32] {
        &self.source_hops
    }

    pub fn pick_phantom<R: Rng + ?Sized>(&self, rng: &mut R) -> NodeId {
        self.ring[rng.gen_range(0..self.ring.len())]
    }

    pub fn route<R: Rng + ?Sized>(&self, net: &Network, rng: &mut R) -> RouteTrace {
        let phantom = self.pick_phantom(rng);
        let mut trace = self.path_to(net, phantom);
        trace.phantom = Some(trace.hops.len() - 1);
        trace.delivered = descend_to_sink(net, &mut trace, Phase::ShortestPath).is_ok();
        trace
    }

    /// Min-hop path from the source to `target` over the source hop field,
    /// built backward from `target` (ties to the node nearest the source).
    fn path_to(&self, net: &Network, target: NodeId) -> RouteTrace {
        let src = net.pos(self.source);
        let mut back = vec![target];
        let mut cur = target;
        while cur != self.source {
            let want = self.source_hops[cur.index()] - 1;
            cur = net
                .neighbors(cur)
                .iter()
                .filter(|n| self.source_hops[n.id.index()] == want)
                .map(|n| (n.pos.distance_sq(src), n.id))
                .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
                .map(|(_, id)| id)
                .expect("BFS parent exists for every reached node");
            back.push(cur);
        }
        let mut trace = RouteTrace::start(self.source);
        for &n in back.iter().rev().skip(1) {
            trace.push(n, Phase::RestrictedFlood);
        }
        trace
    }
}

pub fn pusbrf_route<R: Rng + ?Sized>(
    net: &Network,
    source: NodeId,
    params: &BaselineParams,
    rng: &mut R,
) -> Result<RouteTrace, RoutingError> {
    Ok(PusbrfRouter::new(net, source, params)?.route(net, rng))
}
