//! Hop-level wireless sensor network simulator for source-location privacy.
//!
//! * [`network`]: deployment, neighbor tables, sink-rooted hop flooding.
//! * [`routing`]: sector-domain phantom routing (PSSPR) and the HBDRW,
//!   PUSBRF and shortest-path comparison protocols.
//! * [`adversary`]: the patient backtracking adversary and session metrics.
//! * [`analysis`]: closed-form security/overhead measures and tables.
//! * [`harness`]: experiment configuration, seed sweeps and CSV output.

pub mod adversary;
pub mod analysis;
pub mod geometry;
pub mod harness;
pub mod network;
pub mod protocol;
pub mod routing;
pub mod trace;

pub use geometry::Point;
pub use network::{Network, NetworkError, NodeId, SensorNode};
pub use protocol::{Protocol, ProtocolKind, Router};
pub use trace::{Phase, RouteTrace};
