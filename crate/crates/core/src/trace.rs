//! Per-packet route records.

use std::fmt;
use std::io::{self, Write};

use crate::geometry::Point;
use crate::network::{Network, NodeId};

/// Routing phase responsible for one transmission.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Phase {
    DirectToSink,
    Directed,
    SameHop,
    VariableAngle,
    RandomWalk,
    RestrictedFlood,
    ShortestPath,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::DirectToSink => "direct-to-sink",
            Phase::Directed => "directed",
            Phase::SameHop => "same-hop",
            Phase::VariableAngle => "variable-angle",
            Phase::RandomWalk => "random-walk",
            Phase::RestrictedFlood => "restricted-flood",
            Phase::ShortestPath => "shortest-path",
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Ordered node sequence of one packet.
///
/// `phases[i]` and `relaxed[i]` describe the transmission `hops[i] → hops[i+1]`.
/// A relaxed transmission left the rule of its phase (same-hop ±1 relaxation,
/// random-walk set fallback, directed-routing local-minimum escape).
#[derive(Clone, Debug, PartialEq)]
pub struct RouteTrace {
    pub hops: Vec<NodeId>,
    pub phases: Vec<Phase>,
    pub relaxed: Vec<bool>,
    /// Index into `hops` of the phantom node, if the protocol uses one.
    pub phantom: Option<usize>,
    pub delivered: bool,
}

impl RouteTrace {
    pub fn start(node: NodeId) -> Self {
        Self {
            hops: vec![node],
            phases: Vec::new(),
            relaxed: Vec::new(),
            phantom: None,
            delivered: false,
        }
    }

    pub fn current(&self) -> NodeId {
        *self.hops.last().expect("trace is never empty")
    }

    pub fn previous(&self) -> Option<NodeId> {
        self.hops.len().checked_sub(2).map(|i| self.hops[i])
    }

    pub fn push(&mut self, node: NodeId, phase: Phase) {
        self.push_step(node, phase, false);
    }

    pub fn push_step(&mut self, node: NodeId, phase: Phase, relaxed: bool) {
        self.hops.push(node);
        self.phases.push(phase);
        self.relaxed.push(relaxed);
    }

    /// Appends `other`, which must start at this trace's current node.
    pub fn extend(&mut self, other: RouteTrace) {
        debug_assert_eq!(other.hops.first(), Some(&self.current()));
        if let Some(p) = other.phantom {
            self.phantom = Some(self.hops.len() - 1 + p);
        }
        self.hops.extend(other.hops.into_iter().skip(1));
        self.phases.extend(other.phases);
        self.relaxed.extend(other.relaxed);
    }

    /// Number of transmissions.
    pub fn hop_count(&self) -> usize {
        self.phases.len()
    }

    /// Nodes from the phantom (inclusive) to the end of the trace.
    pub fn phantom_to_sink(&self) -> &[NodeId] {
        match self.phantom {
            Some(i) => &self.hops[i..],
            None => &[],
        }
    }

    /// True if any node after the phantom lies within `radius` of `center`.
    pub fn phantom_leg_enters(&self, net: &Network, center: Point, radius: f64) -> bool {
        self.phantom_to_sink()
            .iter()
            .any(|&n| net.pos(n).distance(center) <= radius)
    }

    /// Writes `packet_id,hop_index,node_id,phase` rows; the first node of a
    /// trace carries the phase of its outgoing transmission.
    pub fn write_csv_rows<W: Write>(&self, packet_id: usize, out: &mut W) -> io::Result<()> {
        for (i, node) in self.hops.iter().enumerate() {
            let phase = if i == 0 {
                self.phases.first()
            } else {
                self.phases.get(i - 1)
            };
            let phase = phase.map_or("none", |p| p.as_str());
            writeln!(out, "{packet_id},{i},{node},{phase}")?;
        }
        Ok(())
    }
}
