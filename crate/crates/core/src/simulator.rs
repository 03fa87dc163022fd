//! Deterministic discrete-event execution of a single geocast.
//!
//! Every transmission is delivered exactly one tick after it is emitted, with
//! no losses or collisions. Events are processed in emission order, which for
//! unit latency is the same as `(deliver_time, sequence)` order.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::baselines::{BaselineRule, ZoneForwarding};
use crate::geometry::{Quadrant, Rect};
use crate::planar::PlanarGraph;
use crate::protocols::{self, GeographicGeocast, GeographicVariant};
use crate::topology::{nodes_in_region, NodeId, Topology};

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("sender {0} is not a node of the topology")]
    UnknownSender(NodeId),
    #[error("no termination after {events} events (bound {bound})")]
    NonTermination { events: u64, bound: u64 },
    #[error("region contains no nodes")]
    EmptyRegion,
}

pub type GeocastId = u64;

/// Everything a handler may look at besides its own state. Precomputed once
/// per (topology, region) and shared across senders and protocols.
#[derive(Debug, Clone)]
pub struct Scene<'a> {
    pub topology: &'a Topology,
    pub planar: &'a PlanarGraph,
    pub region: Rect,
    /// Deployment area, used by border-aware suppression.
    pub network_bounds: Rect,
    region_member: Vec<bool>,
    border: Vec<bool>,
    empty_quadrants: Vec<Vec<Quadrant>>,
    region_nodes: Vec<NodeId>,
}

impl<'a> Scene<'a> {
    pub fn new(topology: &'a Topology, planar: &'a PlanarGraph, region: Rect) -> Self {
        let region_member: Vec<bool> = topology
            .nodes()
            .map(|n| region.contains(topology.position(n)))
            .collect();
        let border = topology
            .nodes()
            .map(|n| region_member[n.index()] && protocols::is_border_node(topology, &region, n))
            .collect();
        let empty_quadrants = topology
            .nodes()
            .map(|n| protocols::empty_quadrants(topology, n))
            .collect();
        Self {
            topology,
            planar,
            region,
            network_bounds: topology.bounds(),
            region_member,
            border,
            empty_quadrants,
            region_nodes: nodes_in_region(topology, &region),
        }
    }

    pub fn view(&self, id: NodeId) -> NodeView<'_, 'a> {
        NodeView { id, scene: self }
    }

    pub fn region_nodes(&self) -> &[NodeId] {
        &self.region_nodes
    }

    pub fn in_region(&self, n: NodeId) -> bool {
        self.region_member[n.index()]
    }
}

/// Read-only view of the network from one node.
#[derive(Debug, Clone, Copy)]
pub struct NodeView<'s, 'a> {
    pub id: NodeId,
    pub scene: &'s Scene<'a>,
}

impl NodeView<'_, '_> {
    pub fn position(&self) -> crate::geometry::Point {
        self.scene.topology.position(self.id)
    }

    pub fn in_region(&self) -> bool {
        self.scene.region_member[self.id.index()]
    }

    /// Region node with at least one physical neighbour outside the region.
    pub fn is_border(&self) -> bool {
        self.scene.border[self.id.index()]
    }

    /// Quadrants of the radio range holding no physical neighbour.
    pub fn empty_quadrants(&self) -> &[Quadrant] {
        &self.scene.empty_quadrants[self.id.index()]
    }

    pub fn neighbors(&self) -> &[NodeId] {
        self.scene.topology.neighbors(self.id)
    }

    pub fn planar_neighbors(&self) -> &[NodeId] {
        self.scene.planar.neighbors(self.id)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Transmission<P> {
    /// Delivered to every unit-disk neighbour.
    Broadcast(P),
    /// Delivered to one addressee.
    Unicast { to: NodeId, packet: P },
}

impl<P> Transmission<P> {
    pub fn packet(&self) -> &P {
        match self {
            Transmission::Broadcast(p) | Transmission::Unicast { packet: p, .. } => p,
        }
    }
}

pub trait PacketInfo {
    fn kind_label(&self) -> &'static str;
    /// True for hops of the unicast that carries the packet to the region.
    fn is_route_hop(&self) -> bool {
        false
    }
}

/// A geocast protocol as per-node transition functions. The engine owns all
/// per-node state and hands each call only the state of the acting node.
pub trait PacketHandler {
    type Packet: Clone + fmt::Debug + PacketInfo;
    type State: Default + Clone;

    fn originate(
        &self,
        view: NodeView<'_, '_>,
        state: &mut Self::State,
        geocast_id: GeocastId,
    ) -> Vec<Transmission<Self::Packet>>;

    fn receive(
        &self,
        view: NodeView<'_, '_>,
        state: &mut Self::State,
        packet: &Self::Packet,
        from: NodeId,
    ) -> Vec<Transmission<Self::Packet>>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Protocol {
    Flood,
    Frfz,
    Arfz,
    Pcn,
    Gfg,
    Gfpg,
    GfpgStar { border_enhancements: bool },
}

impl Protocol {
    pub const NAMES: [&'static str; 7] = ["flood", "frfz", "arfz", "pcn", "gfg", "gfpg", "gfpg-star"];

    pub fn name(&self) -> &'static str {
        match self {
            Protocol::Flood => "flood",
            Protocol::Frfz => "frfz",
            Protocol::Arfz => "arfz",
            Protocol::Pcn => "pcn",
            Protocol::Gfg => "gfg",
            Protocol::Gfpg => "gfpg",
            Protocol::GfpgStar { .. } => "gfpg-star",
        }
    }

    /// Parses a CLI name. `gfpg-star` starts without border enhancements.
    pub fn parse(name: &str) -> Option<Protocol> {
        Some(match name.trim().to_ascii_lowercase().as_str() {
            "flood" => Protocol::Flood,
            "frfz" => Protocol::Frfz,
            "arfz" => Protocol::Arfz,
            "pcn" => Protocol::Pcn,
            "gfg" => Protocol::Gfg,
            "gfpg" => Protocol::Gfpg,
            "gfpg-star" | "gfpg*" | "gfpg_star" => Protocol::GfpgStar {
                border_enhancements: false,
            },
            _ => return None,
        })
    }

    /// Protocols whose delivery is checked against the oracle.
    pub fn claims_full_delivery(&self) -> bool {
        matches!(self, Protocol::Gfpg | Protocol::GfpgStar { .. })
    }

    pub fn with_border_enhancements(self, on: bool) -> Protocol {
        match self {
            Protocol::GfpgStar { .. } => Protocol::GfpgStar {
                border_enhancements: on,
            },
            other => other,
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeocastResult {
    pub delivered_region_nodes: BTreeSet<NodeId>,
    pub forwarding_nodes: BTreeSet<NodeId>,
    pub total_transmissions: u64,
    pub unicast_path_length: u64,
    pub terminated_normally: bool,
    pub events_processed: u64,
}

/// Number of distinct nodes that transmitted anything for this geocast.
pub fn overhead(result: &GeocastResult) -> usize {
    result.forwarding_nodes.len()
}

pub fn delivery_rate(result: &GeocastResult, t: &Topology, region: &Rect) -> Result<f64, SimError> {
    let population = nodes_in_region(t, region).len();
    if population == 0 {
        return Err(SimError::EmptyRegion);
    }
    Ok(result.delivered_region_nodes.len() as f64 / population as f64)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEntry {
    pub tick: u64,
    pub node: NodeId,
    pub kind: &'static str,
    pub action: String,
}

impl fmt::Display for TraceEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t={:<4} node={:<5} {:<9} {}", self.tick, self.node, self.kind, self.action)
    }
}

struct Event<P> {
    deliver_time: u64,
    sequence: u64,
    target: NodeId,
    from: NodeId,
    packet: P,
}

/// Runs `handler` from `sender` until no events remain.
pub fn execute<H: PacketHandler>(
    scene: &Scene<'_>,
    handler: &H,
    sender: NodeId,
    geocast_id: GeocastId,
    mut trace: Option<&mut Vec<TraceEntry>>,
) -> Result<GeocastResult, SimError> {
    let t = scene.topology;
    let n = t.node_count();
    if sender.index() >= n {
        return Err(SimError::UnknownSender(sender));
    }
    let bound = 64 * (n as u64) * (n as u64);
    let mut states = vec![H::State::default(); n];
    let mut queue: VecDeque<Event<H::Packet>> = VecDeque::new();
    let mut sequence = 0u64;
    let mut result = GeocastResult {
        delivered_region_nodes: BTreeSet::new(),
        forwarding_nodes: BTreeSet::new(),
        total_transmissions: 0,
        unicast_path_length: 0,
        terminated_normally: false,
        events_processed: 0,
    };

    let mut emit = |now: u64,
                    from: NodeId,
                    txs: Vec<Transmission<H::Packet>>,
                    queue: &mut VecDeque<Event<H::Packet>>,
                    result: &mut GeocastResult,
                    trace: &mut Option<&mut Vec<TraceEntry>>| {
        for tx in txs {
            result.total_transmissions += 1;
            result.forwarding_nodes.insert(from);
            if tx.packet().is_route_hop() {
                result.unicast_path_length += 1;
            }
            if let Some(log) = trace.as_deref_mut() {
                let action = match &tx {
                    Transmission::Broadcast(_) => "broadcast".to_string(),
                    Transmission::Unicast { to, .. } => format!("send to {to}"),
                };
                log.push(TraceEntry {
                    tick: now,
                    node: from,
                    kind: tx.packet().kind_label(),
                    action,
                });
            }
            let mut push = |target: NodeId, packet: H::Packet| {
                queue.push_back(Event {
                    deliver_time: now + 1,
                    sequence,
                    target,
                    from,
                    packet,
                });
                sequence += 1;
            };
            match tx {
                Transmission::Broadcast(packet) => {
                    for &nbr in t.neighbors(from) {
                        push(nbr, packet.clone());
                    }
                }
                Transmission::Unicast { to, packet } => push(to, packet),
            }
        }
    };

    if scene.in_region(sender) {
        result.delivered_region_nodes.insert(sender);
    }
    let initial = handler.originate(scene.view(sender), &mut states[sender.index()], geocast_id);
    emit(0, sender, initial, &mut queue, &mut result, &mut trace);

    let mut last = (0u64, 0u64);
    while let Some(event) = queue.pop_front() {
        debug_assert!((event.deliver_time, event.sequence) >= last);
        last = (event.deliver_time, event.sequence);
        result.events_processed += 1;
        if result.events_processed > bound {
            return Err(SimError::NonTermination {
                events: result.events_processed,
                bound,
            });
        }
        let at = event.target;
        if scene.in_region(at) {
            result.delivered_region_nodes.insert(at);
        }
        let out = handler.receive(scene.view(at), &mut states[at.index()], &event.packet, event.from);
        if let Some(log) = trace.as_deref_mut() {
            log.push(TraceEntry {
                tick: event.deliver_time,
                node: at,
                kind: event.packet.kind_label(),
                action: format!(
                    "recv from {}{}",
                    event.from,
                    if out.is_empty() { ", no action" } else { "" }
                ),
            });
        }
        emit(event.deliver_time, at, out, &mut queue, &mut result, &mut trace);
    }
    result.terminated_normally = true;
    Ok(result)
}

/// Runs one geocast of `protocol` on an existing scene.
pub fn run_on_scene(
    scene: &Scene<'_>,
    protocol: Protocol,
    sender: NodeId,
    trace: Option<&mut Vec<TraceEntry>>,
) -> Result<GeocastResult, SimError> {
    const GEOCAST_ID: GeocastId = 1;
    match protocol {
        Protocol::Flood => execute(scene, &ZoneForwarding::new(BaselineRule::Flood), sender, GEOCAST_ID, trace),
        Protocol::Frfz => execute(scene, &ZoneForwarding::new(BaselineRule::FixedZone), sender, GEOCAST_ID, trace),
        Protocol::Arfz => execute(scene, &ZoneForwarding::new(BaselineRule::AdaptiveZone), sender, GEOCAST_ID, trace),
        Protocol::Pcn => execute(
            scene,
            &ZoneForwarding::new(BaselineRule::ProgressivelyCloser),
            sender,
            GEOCAST_ID,
            trace,
        ),
        Protocol::Gfg => execute(scene, &GeographicGeocast::new(GeographicVariant::Gfg), sender, GEOCAST_ID, trace),
        Protocol::Gfpg => execute(scene, &GeographicGeocast::new(GeographicVariant::Gfpg), sender, GEOCAST_ID, trace),
        Protocol::GfpgStar { border_enhancements } => {
            let mut handler = GeographicGeocast::new(GeographicVariant::GfpgStar);
            handler.border_enhancements = border_enhancements;
            execute(scene, &handler, sender, GEOCAST_ID, trace)
        }
    }
}

/// Convenience wrapper building the scene for a single run.
pub fn run_geocast(
    t: &Topology,
    g: &PlanarGraph,
    protocol: Protocol,
    sender: NodeId,
    region: &Rect,
) -> Result<GeocastResult, SimError> {
    let scene = Scene::new(t, g, *region);
    run_on_scene(&scene, protocol, sender, None)
}
