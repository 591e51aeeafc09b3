//! Sector-domain phantom routing with same-hop and variable-angle phases.
//!
//! Geometry, in the frame of one source `S`:
//!
//! * the x-axis runs through the sink and `S`, pointing from the sink to `S`;
//!   the y-axis passes through the sink;
//! * `V` is the midpoint of `S` and the sink;
//! * the primary phantom area is the half annulus `[r_min·r, r_max·r]`
//!   around `S` on the side facing the sink, split into `ω` sectors of
//!   angle `π/ω` swept from the `+y` side to the `−y` side;
//! * the mirror area is its point reflection through `V`.
//!
//! Each packet draws a sector, a node `p1` inside it and its mirror `p2`,
//! and carries the packet through one of the two.

use rand::Rng;

use crate::geometry::{law_of_cosines_angle, Point};
use crate::network::{Network, NodeId, UNREACHABLE};
use crate::routing::greedy::{compass_toward_sink, descend_to_sink, greedy_toward, shortest_to_node};
use crate::routing::RoutingError;
use crate::trace::{Phase, RouteTrace};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SectorParams {
    r_min: u32,
    r_max: u32,
    omega: u32,
    theta: f64,
}

impl SectorParams {
    pub fn new(r_min: u32, r_max: u32, omega: u32) -> Result<Self, RoutingError> {
        if r_min == 0 || r_min >= r_max {
            return Err(RoutingError::InvalidParams(format!(
                "need 0 < r_min < r_max, got r_min={r_min} r_max={r_max}"
            )));
        }
        if omega < 2 || omega % 2 != 0 {
            return Err(RoutingError::InvalidParams(format!(
                "sector count must be even and at least 2, got {omega}"
            )));
        }
        Ok(Self {
            r_min,
            r_max,
            omega,
            theta: std::f64::consts::PI / omega as f64,
        })
    }

    /// Inner radius, hops.
    pub fn r_min(&self) -> u32 {
        self.r_min
    }

    /// Outer radius, hops.
    pub fn r_max(&self) -> u32 {
        self.r_max
    }

    pub fn omega(&self) -> u32 {
        self.omega
    }

    /// Angular width of one sector, radians.
    pub fn theta(&self) -> f64 {
        self.theta
    }
}

/// Coordinate frame of one source.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SourceFrame {
    pub source: NodeId,
    pub source_pos: Point,
    pub sink_pos: Point,
    pub center_v: Point,
    /// Unit vector from the sink toward the source.
    pub x_axis: Point,
    /// Hop distance from the source to the sink.
    pub h_distance: u32,
}

impl SourceFrame {
    /// Unit y-axis (x-axis rotated by +90°).
    pub fn y_axis(&self) -> Point {
        Point::new(-self.x_axis.y, self.x_axis.x)
    }

    /// Coordinates of `p` in the frame, origin at the sink.
    pub fn to_frame(&self, p: Point) -> (f64, f64) {
        let d = p - self.sink_pos;
        (d.dot(self.x_axis), d.dot(self.y_axis()))
    }

    pub fn frame_y(&self, p: Point) -> f64 {
        (p - self.sink_pos).dot(self.y_axis())
    }

    /// True if `p` lies on the source's side of `V` along the x-axis.
    pub fn on_source_side(&self, p: Point) -> bool {
        self.to_frame(p).0 >= self.to_frame(self.center_v).0
    }

    /// Sector (1-based) of the primary phantom area containing `p`, if any.
    pub fn sector_of(&self, p: Point, params: &SectorParams, r: f64) -> Option<u32> {
        let rel = p - self.source_pos;
        let dist = rel.norm();
        if dist < params.r_min as f64 * r || dist > params.r_max as f64 * r {
            return None;
        }
        let ahead = -rel.dot(self.x_axis);
        if ahead < 0.0 {
            return None;
        }
        let lateral = rel.dot(self.y_axis());
        // Sweep angle measured from the +y direction, in [0, π].
        let sweep = std::f64::consts::FRAC_PI_2 - lateral.atan2(ahead);
        let idx = ((sweep / params.theta).floor() as u32).min(params.omega - 1);
        Some(idx + 1)
    }
}

pub fn build_frame(net: &Network, source: NodeId) -> Result<SourceFrame, RoutingError> {
    let node = net.node(source)?;
    if source == net.sink() {
        return Err(RoutingError::SourceIsSink);
    }
    if !node.is_reachable() {
        return Err(RoutingError::Unreachable(source));
    }
    let sink_pos = net.sink_pos();
    let x_axis = (node.pos - sink_pos)
        .unit()
        .ok_or(RoutingError::SourceIsSink)?;
    Ok(SourceFrame {
        source,
        source_pos: node.pos,
        sink_pos,
        center_v: node.pos.midpoint(sink_pos),
        x_axis,
        h_distance: node.hop_to_sink,
    })
}

/// Candidate phantom nodes of the primary area, grouped by sector.
#[derive(Clone, Debug, PartialEq)]
pub struct CandidateDomain {
    pub sectors: Vec<Vec<NodeId>>,
}

impl CandidateDomain {
    pub fn is_empty(&self) -> bool {
        self.sectors.iter().all(Vec::is_empty)
    }

    pub fn len(&self) -> usize {
        self.sectors.iter().map(Vec::len).sum()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.sectors.iter().flatten().copied()
    }
}

pub fn candidate_domain(
    net: &Network,
    frame: &SourceFrame,
    params: &SectorParams,
) -> Result<CandidateDomain, RoutingError> {
    let mut sectors = vec![Vec::new(); params.omega as usize];
    for node in net.nodes() {
        if node.id == frame.source || node.id == net.sink() || !node.is_reachable() {
            continue;
        }
        if let Some(s) = frame.sector_of(node.pos, params, net.r()) {
            sectors[s as usize - 1].push(node.id);
        }
    }
    let domain = CandidateDomain { sectors };
    if domain.is_empty() {
        return Err(RoutingError::EmptyDomain);
    }
    Ok(domain)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhantomChoice {
    /// Sector index in `1..=ω`.
    pub domain_index: u32,
    pub p1: NodeId,
    /// Node nearest the reflection of `p1` through `V`; `None` when no node
    /// lies within `r` of that point or the nearest one is closer than
    /// `r_min·r` to the source, in which case `chosen == p1`.
    pub p2: Option<NodeId>,
    /// `2·V − pos(p1)`.
    pub mirror_point: Point,
    pub chosen: NodeId,
    /// Angle in degrees, in `[0, 180]`.
    pub beta: f64,
}

/// Picks a phantom for one packet. Sectors are drawn uniformly among the
/// non-empty ones, `p1` uniformly within the sector, and the carrier
/// uniformly from the pseudo-phantom pair.
pub fn select_phantom<R: Rng + ?Sized>(
    net: &Network,
    frame: &SourceFrame,
    params: &SectorParams,
    domain: &CandidateDomain,
    rng: &mut R,
) -> Result<PhantomChoice, RoutingError> {
    let non_empty: Vec<usize> = (0..domain.sectors.len())
        .filter(|&i| !domain.sectors[i].is_empty())
        .collect();
    if non_empty.is_empty() {
        return Err(RoutingError::EmptyDomain);
    }
    let sector = non_empty[rng.gen_range(0..non_empty.len())];
    let members = &domain.sectors[sector];
    let p1 = members[rng.gen_range(0..members.len())];

    let mirror_point = net.pos(p1).reflect_through(frame.center_v);
    let keep_out = params.r_min as f64 * net.r();
    let p2 = net.nearest_within(mirror_point, net.r()).filter(|&n| {
        n != net.sink()
            && net.node(n).is_ok_and(|node| node.is_reachable())
            && net.pos(n).distance(frame.source_pos) >= keep_out
    });
    let use_mirror = rng.gen_bool(0.5);
    let chosen = match p2 {
        Some(p2) if use_mirror => p2,
        _ => p1,
    };
    Ok(PhantomChoice {
        domain_index: sector as u32 + 1,
        p1,
        p2,
        mirror_point,
        chosen,
        beta: same_hop_angle(net, frame, params, chosen),
    })
}

/// Angle β (degrees) that sets the same-hop length. For a phantom on the
/// source side of `V` it is the angle at the source between the phantom and
/// the anchor `A` = the point `r_max·r` from the source toward the sink; on
/// the sink side it is the angle at the sink between the phantom and the
/// mirrored anchor `2V − A`.
pub fn same_hop_angle(net: &Network, frame: &SourceFrame, params: &SectorParams, phantom: NodeId) -> f64 {
    let reach = params.r_max as f64 * net.r();
    let anchor_a = frame.source_pos - frame.x_axis * reach;
    let p = net.pos(phantom);
    let (vertex, anchor) = if frame.on_source_side(p) {
        (frame.source_pos, anchor_a)
    } else {
        (frame.sink_pos, anchor_a.reflect_through(frame.center_v))
    };
    law_of_cosines_angle(vertex.distance(anchor), vertex.distance(p), anchor.distance(p)).to_degrees()
}

/// Number of same-hop relays for angle `beta` (degrees), rounded half away
/// from zero.
pub fn same_hop_count(beta: f64, params: &SectorParams) -> u32 {
    let beta = beta.clamp(0.0, 180.0);
    (beta / 180.0 * params.r_max as f64).round() as u32
}

/// Lateral direction of a same-hop phase.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SameHopDirection {
    /// Minimize `|frame y|`.
    TowardAxis,
    /// Maximize `frame y · side`.
    AwayFromAxis { side: f64 },
}

/// Outcome of a same-hop phase.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SameHopOutcome {
    pub taken: u32,
    pub relaxed: bool,
}

/// Up to `h_m` relays that keep the hop count to the sink constant, each one
/// strictly improving the direction's score. The phase ends early once no
/// same-hop neighbor improves. When no unvisited same-hop neighbor exists at
/// all it takes one improving ±1-hop step (marked relaxed) and ends.
pub(crate) fn same_hop_steps(
    net: &Network,
    trace: &mut RouteTrace,
    frame: &SourceFrame,
    h_m: u32,
    direction: SameHopDirection,
) -> SameHopOutcome {
    let mut visited = vec![trace.current()];
    if let Some(prev) = trace.previous() {
        visited.push(prev);
    }
    let score = |id: NodeId| {
        let y = frame.frame_y(net.pos(id));
        match direction {
            SameHopDirection::TowardAxis => y.abs(),
            SameHopDirection::AwayFromAxis { side } => -y * side,
        }
    };
    let mut taken = 0;
    while taken < h_m {
        let cur = trace.current();
        let hop = net.hop(cur);
        let here = score(cur);
        let unvisited = |want: &dyn Fn(u32) -> bool| {
            net.neighbors(cur)
                .iter()
                .filter(|n| want(n.hop_to_sink) && !visited.contains(&n.id))
                .map(|n| (score(n.id), n.id))
                .collect::<Vec<_>>()
        };
        let best = |cands: Vec<(f64, NodeId)>| {
            cands
                .into_iter()
                .filter(|c| c.0 < here)
                .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
                .map(|(_, id)| id)
        };
        let same = unvisited(&|h| h == hop);
        if !same.is_empty() {
            let Some(next) = best(same) else { break };
            trace.push(next, Phase::SameHop);
            visited.push(next);
            taken += 1;
            continue;
        }
        let relaxed = best(unvisited(&|h| h != crate::network::UNREACHABLE && h.abs_diff(hop) == 1));
        if let Some(next) = relaxed {
            trace.push_step(next, Phase::SameHop, true);
            taken += 1;
            return SameHopOutcome { taken, relaxed: true };
        }
        break;
    }
    SameHopOutcome { taken, relaxed: false }
}

/// Public form of the same-hop phase starting at `from`.
pub fn same_hop_route(
    net: &Network,
    from: NodeId,
    frame: &SourceFrame,
    h_m: u32,
    direction: SameHopDirection,
) -> Result<RouteTrace, RoutingError> {
    net.node(from)?;
    let mut trace = RouteTrace::start(from);
    same_hop_steps(net, &mut trace, frame, h_m, direction);
    Ok(trace)
}

/// Greedy geographic forwarding toward `target`, stopping within `r` of it
/// or after `max_hops`.
pub fn directed_route(
    net: &Network,
    from: NodeId,
    target: Point,
    max_hops: usize,
) -> Result<RouteTrace, RoutingError> {
    net.node(from)?;
    let mut trace = RouteTrace::start(from);
    let r = net.r();
    match greedy_toward(net, &mut trace, target, max_hops, Phase::Directed, |n| {
        net.pos(n).distance(target) <= r
    }) {
        Ok(()) | Err(RoutingError::HopBudgetExceeded(_)) => Ok(trace),
        Err(e) => Err(e),
    }
}

/// Variable-angle routing from `from` to the sink.
pub fn variable_angle_route(
    net: &Network,
    from: NodeId,
    frame: &SourceFrame,
) -> Result<RouteTrace, RoutingError> {
    net.node(from)?;
    let mut trace = RouteTrace::start(from);
    compass_toward_sink(net, &mut trace, -frame.x_axis, |_| false)?;
    trace.delivered = true;
    Ok(trace)
}

/// Per-source routing state: frame and precomputed candidate domain.
#[derive(Clone, Debug)]
pub struct PssprRouter {
    pub frame: SourceFrame,
    pub params: SectorParams,
    pub domain: CandidateDomain,
    direct: bool,
}

impl PssprRouter {
    pub fn new(net: &Network, source: NodeId, params: SectorParams) -> Result<Self, RoutingError> {
        let frame = build_frame(net, source)?;
        let direct = frame.source_pos.distance(frame.sink_pos) <= net.r();
        let domain = if direct {
            CandidateDomain { sectors: vec![Vec::new(); params.omega as usize] }
        } else {
            candidate_domain(net, &frame, &params)?
        };
        Ok(Self { frame, params, domain, direct })
    }

    pub fn route<R: Rng + ?Sized>(&self, net: &Network, rng: &mut R) -> Result<RouteTrace, RoutingError> {
        self.route_with_choice(net, rng).map(|(t, _)| t)
    }

    /// Routes one packet; the phantom choice is `None` on the direct branch.
    /// Phase failures yield an undelivered trace rather than an error.
    pub fn route_with_choice<R: Rng + ?Sized>(
        &self,
        net: &Network,
        rng: &mut R,
    ) -> Result<(RouteTrace, Option<PhantomChoice>), RoutingError> {
        let source = self.frame.source;
        let mut trace = RouteTrace::start(source);
        if self.direct {
            trace.push(net.sink(), Phase::DirectToSink);
            trace.delivered = true;
            return Ok((trace, None));
        }
        let choice = select_phantom(net, &self.frame, &self.params, &self.domain, rng)?;
        let h_m = same_hop_count(choice.beta, &self.params);
        let outcome = if self.frame.on_source_side(net.pos(choice.chosen)) {
            self.source_side(net, &mut trace, choice.chosen, h_m)
        } else {
            self.sink_side(net, &mut trace, choice.chosen, h_m)
        };
        trace.delivered = outcome.is_ok() && trace.current() == net.sink();
        Ok((trace, Some(choice)))
    }

    fn leg_budget(&self, net: &Network, from: Point, to: Point) -> usize {
        2 * (from.distance(to) / net.r()).ceil() as usize + 10
    }

    /// Directed to the phantom, onward to `r_max` from the source, same-hop
    /// toward the x-axis, then variable-angle to the sink.
    fn source_side(&self, net: &Network, trace: &mut RouteTrace, phantom: NodeId, h_m: u32) -> Result<(), RoutingError> {
        let f = &self.frame;
        let p = net.pos(phantom);
        shortest_to_node(net, trace, phantom, Phase::Directed)?;
        trace.phantom = Some(trace.hops.len() - 1);

        let reach = self.params.r_max as f64 * net.r();
        let dir = (p - f.source_pos).unit().unwrap_or(-f.x_axis);
        let exit = f.source_pos + dir * reach;
        let r = net.r();
        let src = f.source_pos;
        let exit_node = net.nearest_within(exit, r).filter(|&n| n != net.sink() && net.hop(n) != UNREACHABLE);
        match exit_node {
            Some(exit_node) => shortest_to_node(net, trace, exit_node, Phase::Directed)?,
            None => match greedy_toward(net, trace, exit, self.leg_budget(net, p, exit), Phase::Directed, |n| {
                let q = net.pos(n);
                q.distance(src) >= reach || q.distance(exit) <= r
            }) {
                // The exit point sits beyond the field edge; stop where greedy stops.
                Ok(()) | Err(RoutingError::RoutingStuck(_)) | Err(RoutingError::HopBudgetExceeded(_)) => {}
                Err(e) => return Err(e),
            },
        }

        same_hop_steps(net, trace, f, h_m, SameHopDirection::TowardAxis);
        compass_toward_sink(net, trace, -f.x_axis, |_| false)
    }

    /// Mirror image of the source-side pipeline: variable-angle from the
    /// source until within `r_max` of the sink, same-hop away from the
    /// x-axis toward the phantom's side, directed through the phantom, then
    /// directed to the sink.
    fn sink_side(&self, net: &Network, trace: &mut RouteTrace, phantom: NodeId, h_m: u32) -> Result<(), RoutingError> {
        let f = &self.frame;
        let reach = self.params.r_max as f64 * net.r();
        let sink_pos = f.sink_pos;
        compass_toward_sink(net, trace, -f.x_axis, |n| {
            net.pos(n).distance(sink_pos) <= reach
        })?;
        let p = net.pos(phantom);
        let side = if f.frame_y(p) >= 0.0 { 1.0 } else { -1.0 };
        same_hop_steps(net, trace, f, h_m, SameHopDirection::AwayFromAxis { side });

        shortest_to_node(net, trace, phantom, Phase::Directed)?;
        trace.phantom = Some(trace.hops.len() - 1);
        descend_to_sink(net, trace, Phase::Directed)
    }
}

/// Routes one packet from `frame.source`, building the candidate domain on
/// the fly. Prefer [`PssprRouter`] when routing many packets.
pub fn route_packet<R: Rng + ?Sized>(
    net: &Network,
    frame: &SourceFrame,
    params: &SectorParams,
    rng: &mut R,
) -> Result<RouteTrace, RoutingError> {
    let router = PssprRouter::new(net, frame.source, *params)?;
    router.route(net, rng)
}
