//! Sensor field deployment, neighbor discovery and sink-rooted hop flooding.

use std::collections::VecDeque;
use std::fmt;
use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::geometry::Point;

/// Hop count assigned to nodes the sink flood never reached.
pub const UNREACHABLE: u32 = u32::MAX;

/// Deployments with a larger unreachable fraction are rejected.
pub const MAX_UNREACHABLE_FRACTION: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One row of a node's neighbor table, as learned from the sink flood.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NeighborEntry {
    pub id: NodeId,
    pub pos: Point,
    pub hop_to_sink: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SensorNode {
    pub id: NodeId,
    pub pos: Point,
    pub hop_to_sink: u32,
    pub neighbors: Vec<NeighborEntry>,
}

impl SensorNode {
    pub fn is_reachable(&self) -> bool {
        self.hop_to_sink != UNREACHABLE
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum NetworkError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("{unreachable} of {total} nodes unreachable from the sink")]
    Connectivity { unreachable: usize, total: usize },
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
}

/// Uniform grid over the field with cells of side `r`; used for radius queries.
#[derive(Clone, Debug)]
struct SpatialGrid {
    cell: f64,
    cols: usize,
    rows: usize,
    cells: Vec<Vec<u32>>,
}

impl SpatialGrid {
    fn build(points: &[Point], cell: f64, side: f64) -> Self {
        let cols = ((side / cell).ceil() as usize).max(1);
        let rows = cols;
        let mut cells = vec![Vec::new(); cols * rows];
        let mut grid = Self { cell, cols, rows, cells: Vec::new() };
        for (i, p) in points.iter().enumerate() {
            let (cx, cy) = grid.cell_of(*p);
            cells[cy * cols + cx].push(i as u32);
        }
        grid.cells = cells;
        grid
    }

    fn cell_of(&self, p: Point) -> (usize, usize) {
        let cx = ((p.x / self.cell).floor().max(0.0) as usize).min(self.cols - 1);
        let cy = ((p.y / self.cell).floor().max(0.0) as usize).min(self.rows - 1);
        (cx, cy)
    }

    /// Calls `f` with every indexed point in cells that may lie within `radius` of `p`.
    fn for_each_candidate(&self, p: Point, radius: f64, mut f: impl FnMut(u32)) {
        let reach = (radius / self.cell).ceil() as i64;
        let cx = (p.x / self.cell).floor() as i64;
        let cy = (p.y / self.cell).floor() as i64;
        for y in (cy - reach).max(0)..=(cy + reach).min(self.rows as i64 - 1) {
            for x in (cx - reach).max(0)..=(cx + reach).min(self.cols as i64 - 1) {
                for &i in &self.cells[y as usize * self.cols + x as usize] {
                    f(i);
                }
            }
        }
    }
}

/// An immutable deployed sensor field with the sink at its center.
#[derive(Clone, Debug)]
pub struct Network {
    nodes: Vec<SensorNode>,
    sink: NodeId,
    r: f64,
    r0: f64,
    field_side: f64,
    seed: u64,
    grid: SpatialGrid,
}

impl Network {
    /// Places `n_nodes` sensors uniformly in the square `[0, field_side)²`
    /// plus a sink at the exact center (node 0), then floods hop counts.
    pub fn deploy(
        n_nodes: usize,
        field_side: f64,
        r: f64,
        r0: f64,
        seed: u64,
    ) -> Result<Self, NetworkError> {
        validate(n_nodes, field_side, r, r0)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sensors: Vec<Point> = (0..n_nodes)
            .map(|_| {
                Point::new(
                    rng.gen_range(0.0..field_side),
                    rng.gen_range(0.0..field_side),
                )
            })
            .collect();
        let center = Point::new(field_side / 2.0, field_side / 2.0);
        Self::build(center, sensors, field_side, r, r0, seed)
    }

    /// Builds a network from explicit positions; the sink becomes node 0 and
    /// `sensors[i]` becomes node `i + 1`.
    pub fn from_positions(
        sink: Point,
        sensors: Vec<Point>,
        field_side: f64,
        r: f64,
        r0: f64,
    ) -> Result<Self, NetworkError> {
        validate(sensors.len().max(2), field_side, r, r0)?;
        let inside = |p: Point| p.is_finite() && (0.0..=field_side).contains(&p.x) && (0.0..=field_side).contains(&p.y);
        if let Some(p) = std::iter::once(sink).chain(sensors.iter().copied()).find(|p| !inside(*p)) {
            return Err(NetworkError::InvalidParameter(format!(
                "position ({}, {}) outside the field",
                p.x, p.y
            )));
        }
        Self::build(sink, sensors, field_side, r, r0, 0)
    }

    fn build(
        sink_pos: Point,
        sensors: Vec<Point>,
        field_side: f64,
        r: f64,
        r0: f64,
        seed: u64,
    ) -> Result<Self, NetworkError> {
        let mut positions = Vec::with_capacity(sensors.len() + 1);
        positions.push(sink_pos);
        positions.extend(sensors);

        let grid = SpatialGrid::build(&positions, r, field_side);
        let r_sq = r * r;
        let nodes = positions
            .iter()
            .enumerate()
            .map(|(i, &pos)| {
                let mut ids = Vec::new();
                grid.for_each_candidate(pos, r, |j| {
                    if j as usize != i && positions[j as usize].distance_sq(pos) <= r_sq {
                        ids.push(j);
                    }
                });
                ids.sort_unstable();
                SensorNode {
                    id: NodeId(i as u32),
                    pos,
                    hop_to_sink: UNREACHABLE,
                    neighbors: ids
                        .into_iter()
                        .map(|j| NeighborEntry {
                            id: NodeId(j),
                            pos: positions[j as usize],
                            hop_to_sink: UNREACHABLE,
                        })
                        .collect(),
                }
            })
            .collect();

        let mut net = Self {
            nodes,
            sink: NodeId(0),
            r,
            r0,
            field_side,
            seed,
            grid,
        };
        let unreachable = net.flood();
        let total = net.nodes.len();
        if unreachable as f64 > MAX_UNREACHABLE_FRACTION * total as f64 {
            return Err(NetworkError::Connectivity { unreachable, total });
        }
        Ok(net)
    }

    /// Sink-rooted flood: every node keeps the minimum hop count it hears and
    /// records each neighbor's (id, position, hop count). Returns the number
    /// of nodes the flood never reached.
    pub fn flood(&mut self) -> usize {
        let hops = self.bfs_from(self.sink);
        for (node, &h) in self.nodes.iter_mut().zip(&hops) {
            node.hop_to_sink = h;
        }
        for node in &mut self.nodes {
            for entry in &mut node.neighbors {
                entry.hop_to_sink = hops[entry.id.index()];
            }
        }
        hops.iter().filter(|&&h| h == UNREACHABLE).count()
    }

    /// Hop distances from `root` over the neighbor graph (`UNREACHABLE` if none).
    pub fn bfs_from(&self, root: NodeId) -> Vec<u32> {
        let mut dist = vec![UNREACHABLE; self.nodes.len()];
        let mut queue = VecDeque::new();
        dist[root.index()] = 0;
        queue.push_back(root);
        while let Some(u) = queue.pop_front() {
            let next = dist[u.index()] + 1;
            for n in &self.nodes[u.index()].neighbors {
                if dist[n.id.index()] == UNREACHABLE {
                    dist[n.id.index()] = next;
                    queue.push_back(n.id);
                }
            }
        }
        dist
    }

    pub fn nodes(&self) -> &[SensorNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: NodeId) -> Result<&SensorNode, NetworkError> {
        self.nodes.get(id.index()).ok_or(NetworkError::UnknownNode(id))
    }

    /// Unchecked accessors for ids that came out of this network.
    pub fn pos(&self, id: NodeId) -> Point {
        self.nodes[id.index()].pos
    }

    pub fn hop(&self, id: NodeId) -> u32 {
        self.nodes[id.index()].hop_to_sink
    }

    pub fn neighbors(&self, id: NodeId) -> &[NeighborEntry] {
        &self.nodes[id.index()].neighbors
    }

    pub fn sink(&self) -> NodeId {
        self.sink
    }

    pub fn sink_pos(&self) -> Point {
        self.pos(self.sink)
    }

    /// Communication radius, also the adversary's eavesdrop radius.
    pub fn r(&self) -> f64 {
        self.r
    }

    /// Visible-area radius around the source.
    pub fn r0(&self) -> f64 {
        self.r0
    }

    pub fn field_side(&self) -> f64 {
        self.field_side
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn are_neighbors(&self, a: NodeId, b: NodeId) -> bool {
        self.neighbors(a).binary_search_by_key(&b, |e| e.id).is_ok()
    }

    /// Neighbors of `node` whose hop count to the sink equals `target_hop`.
    pub fn neighbors_at_hop(&self, node: NodeId, target_hop: u32) -> Result<Vec<NodeId>, NetworkError> {
        Ok(self
            .node(node)?
            .neighbors
            .iter()
            .filter(|n| n.hop_to_sink == target_hop)
            .map(|n| n.id)
            .collect())
    }

    /// Euclidean distance between two nodes in units of `r`.
    pub fn euclidean_hops(&self, a: NodeId, b: NodeId) -> Result<f64, NetworkError> {
        let pa = self.node(a)?.pos;
        let pb = self.node(b)?.pos;
        Ok(pa.distance(pb) / self.r)
    }

    /// Node nearest to `p` among those within `radius`, ties to the lower id.
    pub fn nearest_within(&self, p: Point, radius: f64) -> Option<NodeId> {
        let mut best: Option<(f64, u32)> = None;
        let limit = radius * radius;
        self.grid.for_each_candidate(p, radius, |i| {
            let d = self.nodes[i as usize].pos.distance_sq(p);
            if d <= limit && best.map_or(true, |(bd, bi)| d < bd || (d == bd && i < bi)) {
                best = Some((d, i));
            }
        });
        best.map(|(_, i)| NodeId(i))
    }

    /// Reachable non-sink nodes whose hop count lies in `[lo, hi]`.
    pub fn nodes_with_hop_in(&self, lo: u32, hi: u32) -> Vec<NodeId> {
        self.nodes
            .iter()
            .filter(|n| n.id != self.sink && n.is_reachable() && (lo..=hi).contains(&n.hop_to_sink))
            .map(|n| n.id)
            .collect()
    }

    /// Writes `id,x,y,hop_to_sink,neighbor_count` rows; unreachable nodes get `-1`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "id,x,y,hop_to_sink,neighbor_count")?;
        for n in &self.nodes {
            let hop = if n.is_reachable() { i64::from(n.hop_to_sink) } else { -1 };
            writeln!(
                out,
                "{},{:.6},{:.6},{},{}",
                n.id,
                n.pos.x,
                n.pos.y,
                hop,
                n.neighbors.len()
            )?;
        }
        Ok(())
    }
}

fn validate(n_nodes: usize, field_side: f64, r: f64, r0: f64) -> Result<(), NetworkError> {
    let bad = |msg: &str| Err(NetworkError::InvalidParameter(msg.to_string()));
    if n_nodes < 2 {
        return bad("n_nodes must be at least 2");
    }
    if !(field_side.is_finite() && field_side > 0.0) {
        return bad("field_side must be positive");
    }
    if !(r.is_finite() && r > 0.0) {
        return bad("r must be positive");
    }
    if !(r0.is_finite() && r0 >= r) {
        return bad("r0 must be at least r");
    }
    Ok(())
}
