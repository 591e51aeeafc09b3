//! Patient backtracking adversary.
//!
//! The adversary starts at the sink. For every packet it replays the
//! transmissions in order and relocates to the sender of the first one it
//! overhears (sender within `r` of its perch). It then waits for the next
//! packet: the rest of the current packet travels away from the source, so
//! following it would undo the backtrack. Capture happens once the perch is
//! within `r0` of the source or is the source itself.

use rand::Rng;

use crate::network::{Network, NodeId};
use crate::protocol::Router;
use crate::routing::RoutingError;
use crate::trace::RouteTrace;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AdversaryState {
    pub at: NodeId,
    pub moves: u32,
    pub captured: bool,
}

impl AdversaryState {
    pub fn at_sink(net: &Network) -> Self {
        Self { at: net.sink(), moves: 0, captured: false }
    }
}

/// True if a perch at `at` exposes `source`.
pub fn exposes(net: &Network, at: NodeId, source: NodeId) -> bool {
    at == source || net.pos(at).distance(net.pos(source)) <= net.r0()
}

/// Feeds one packet's trace to the adversary.
pub fn observe_packet(net: &Network, state: AdversaryState, source: NodeId, trace: &RouteTrace) -> AdversaryState {
    if state.captured {
        return state;
    }
    let here = net.pos(state.at);
    let r = net.r();
    let overheard = trace.hops[..trace.hops.len().saturating_sub(1)]
        .iter()
        .copied()
        .find(|&sender| sender != state.at && net.pos(sender).distance(here) <= r);
    match overheard {
        Some(sender) => AdversaryState {
            at: sender,
            moves: state.moves + 1,
            captured: exposes(net, sender, source),
        },
        None => state,
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RunMetrics {
    /// Packets sent up to and including the one that led to capture (all
    /// packets sent when the session ends uncaptured).
    pub safety_time: u32,
    pub total_hops: u64,
    pub delivered: u32,
    pub captured: bool,
    /// Packets whose phantom-to-sink leg entered the visible area.
    pub failure_paths: u32,
}

impl RunMetrics {
    pub fn mean_hops_per_packet(&self) -> f64 {
        if self.safety_time == 0 {
            0.0
        } else {
            self.total_hops as f64 / self.safety_time as f64
        }
    }
}

/// Runs packets from `source` until capture or `max_packets`.
pub fn run_session<R: Rng + ?Sized>(
    net: &Network,
    router: &Router,
    source: NodeId,
    max_packets: u32,
    rng: &mut R,
) -> Result<RunMetrics, RoutingError> {
    run_session_with(net, router, source, max_packets, rng, |_, _| {})
}

/// [`run_session`] with a callback receiving every trace and the adversary
/// state after observing it.
pub fn run_session_with<R: Rng + ?Sized>(
    net: &Network,
    router: &Router,
    source: NodeId,
    max_packets: u32,
    rng: &mut R,
    mut on_packet: impl FnMut(&RouteTrace, &AdversaryState),
) -> Result<RunMetrics, RoutingError> {
    if max_packets == 0 {
        return Err(RoutingError::InvalidParams("max_packets must be at least 1".into()));
    }
    let source_pos = net.pos(source);
    let mut state = AdversaryState::at_sink(net);
    let mut metrics = RunMetrics::default();
    while metrics.safety_time < max_packets && !state.captured {
        let trace = router.route(net, rng)?;
        metrics.safety_time += 1;
        metrics.total_hops += trace.hop_count() as u64;
        metrics.delivered += u32::from(trace.delivered);
        if trace.phantom_leg_enters(net, source_pos, net.r0()) {
            metrics.failure_paths += 1;
        }
        state = observe_packet(net, state, source, &trace);
        on_packet(&trace, &state);
    }
    metrics.captured = state.captured;
    Ok(metrics)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;
    use crate::protocol::Protocol;
    use crate::trace::Phase;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn line(n: usize) -> Network {
        let sensors = (1..=n).map(|i| Point::new(50.0 + 80.0 * i as f64, 50.0)).collect();
        Network::from_positions(Point::new(50.0, 50.0), sensors, 100.0 + 80.0 * n as f64, 100.0, 300.0).unwrap()
    }

    #[test]
    fn one_hop_source_is_captured_immediately() {
        let net = line(3);
        let mut trace = RouteTrace::start(NodeId(1));
        trace.push(NodeId(0), Phase::DirectToSink);
        let s = observe_packet(&net, AdversaryState::at_sink(&net), NodeId(1), &trace);
        assert_eq!(s.at, NodeId(1));
        assert_eq!(s.moves, 1);
        assert!(s.captured);
    }

    #[test]
    fn nothing_overheard() {
        let net = line(12);
        let mut trace = RouteTrace::start(NodeId(12));
        trace.push(NodeId(11), Phase::Directed);
        trace.push(NodeId(10), Phase::Directed);
        let start = AdversaryState::at_sink(&net);
        assert_eq!(observe_packet(&net, start, NodeId(12), &trace), start);
    }

    #[test]
    fn backtracks_one_hop_per_packet_on_a_line() {
        // Spacing 80 m with r = 100 m: only adjacent nodes are heard.
        let net = line(10);
        let router = Protocol::ShortestPath.prepare(&net, NodeId(10)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut perches = Vec::new();
        let m = run_session_with(&net, &router, NodeId(10), 100, &mut rng, |_, s| perches.push(s.at)).unwrap();
        // r0 = 300 m = 3.75 spacings, so node 7 (240 m away) exposes node 10.
        assert_eq!(perches, (1..=7).map(NodeId).collect::<Vec<_>>());
        assert!(m.captured);
        assert_eq!(m.safety_time, 7);
        assert_eq!(m.total_hops, 70);
        assert_eq!(m.delivered, 7);
    }

    #[test]
    fn zero_packets_rejected() {
        let net = line(3);
        let router = Protocol::ShortestPath.prepare(&net, NodeId(1)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(run_session(&net, &router, NodeId(1), 0, &mut rng).is_err());
        let m = run_session(&net, &router, NodeId(1), 1, &mut rng).unwrap();
        assert_eq!(m.safety_time, 1);
        assert!(m.captured);
    }
}
