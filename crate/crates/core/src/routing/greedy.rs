//! Forwarding primitives shared by every protocol. Each one extends a trace in
//! place so that a failed phase still leaves the partial path behind.

use std::collections::HashSet;

use crate::geometry::{angle_between, Point};
use crate::network::{Network, NodeId, UNREACHABLE};
use crate::routing::RoutingError;
use crate::trace::{Phase, RouteTrace};

/// Greedy geographic forwarding toward `target` until `done` holds for the
/// trace head. Nodes already visited in this call are never revisited. At a
/// local minimum the best non-improving neighbor is taken once (marked
/// relaxed); a second non-improving step in a row is `RoutingStuck`.
pub(crate) fn greedy_toward(
    net: &Network,
    trace: &mut RouteTrace,
    target: Point,
    max_hops: usize,
    phase: Phase,
    mut done: impl FnMut(NodeId) -> bool,
) -> Result<(), RoutingError> {
    let mut escaping = false;
    let mut taken = 0;
    let mut visited = HashSet::from([trace.current()]);
    while !done(trace.current()) {
        if taken == max_hops {
            return Err(RoutingError::HopBudgetExceeded(max_hops));
        }
        let cur = trace.current();
        let here = net.pos(cur).distance_sq(target);
        let best = net
            .neighbors(cur)
            .iter()
            .filter(|n| !visited.contains(&n.id))
            .map(|n| (n.pos.distance_sq(target), n.id))
            .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let Some((d, next)) = best else {
            return Err(RoutingError::RoutingStuck(cur));
        };
        let improving = d < here;
        if !improving && escaping {
            return Err(RoutingError::RoutingStuck(cur));
        }
        escaping = !improving;
        trace.push_step(next, phase, !improving);
        visited.insert(next);
        taken += 1;
    }
    Ok(())
}

/// Hop-shortest forwarding that ends exactly on `target`: each relay
/// forwards to a neighbor one hop closer to `target`, ties broken by
/// Euclidean distance to it.
pub(crate) fn shortest_to_node(
    net: &Network,
    trace: &mut RouteTrace,
    target: NodeId,
    phase: Phase,
) -> Result<(), RoutingError> {
    let field = net.bfs_from(target);
    let goal = net.pos(target);
    while trace.current() != target {
        let cur = trace.current();
        let d = field[cur.index()];
        if d == UNREACHABLE {
            return Err(RoutingError::Unreachable(cur));
        }
        let next = net
            .neighbors(cur)
            .iter()
            .filter(|n| field[n.id.index()].wrapping_add(1) == d)
            .map(|n| (n.pos.distance_sq(goal), n.id))
            .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
            .map(|(_, id)| id)
            .ok_or(RoutingError::RoutingStuck(cur))?;
        trace.push(next, phase);
    }
    Ok(())
}

/// Variable-angle forwarding: among the neighbors one hop closer to the
/// sink, each relay picks the one whose direction makes the smallest angle
/// with `reference` (the source-to-sink vector). Stops when `stop` holds or
/// the sink is reached.
pub(crate) fn compass_toward_sink(
    net: &Network,
    trace: &mut RouteTrace,
    reference: Point,
    mut stop: impl FnMut(NodeId) -> bool,
) -> Result<(), RoutingError> {
    let sink = net.sink();
    while trace.current() != sink && !stop(trace.current()) {
        let cur = trace.current();
        let here = net.pos(cur);
        let hop = net.hop(cur);
        let next = net
            .neighbors(cur)
            .iter()
            .filter(|n| n.hop_to_sink.wrapping_add(1) == hop)
            .map(|n| (angle_between(n.pos - here, reference), n.id))
            .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
            .map(|(_, id)| id)
            .ok_or(RoutingError::Unreachable(cur))?;
        trace.push(next, Phase::VariableAngle);
    }
    Ok(())
}

/// Min-hop descent to the sink: each relay forwards to a neighbor one hop
/// closer, ties broken by Euclidean distance to the sink.
pub(crate) fn descend_to_sink(net: &Network, trace: &mut RouteTrace, phase: Phase) -> Result<(), RoutingError> {
    let sink_pos = net.sink_pos();
    while trace.current() != net.sink() {
        let cur = trace.current();
        let hop = net.hop(cur);
        let next = net
            .neighbors(cur)
            .iter()
            .filter(|n| n.hop_to_sink.wrapping_add(1) == hop)
            .map(|n| (n.pos.distance_sq(sink_pos), n.id))
            .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
            .map(|(_, id)| id)
            .ok_or(RoutingError::Unreachable(cur))?;
        trace.push(next, phase);
    }
    Ok(())
}
