//! Geographic geocast: GFG, GFPG and GFPG*.
//!
//! All three carry the packet to the region with greedy/face routing and then
//! flood it among region nodes. GFPG adds face traversals started by every
//! region border node toward its outside planar neighbours, which reconnects
//! region clusters separated by gaps. GFPG* starts a traversal only from
//! region nodes that see an empty quadrant around them.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::geometry::{left_hand_next, quadrant_of, right_hand_next, Point, Quadrant, Rect};
use crate::planar::DirectedEdge;
use crate::routing::{gpsr_step, RouteStep, UnicastState};
use crate::simulator::{GeocastId, NodeView, PacketHandler, PacketInfo, Transmission};
use crate::topology::{NodeId, Topology};

/// Hop budget of each perimeter copy when border enhancements are on.
pub const BORDER_PERIMETER_TTL: u8 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PacketKind {
    UnicastToRegion,
    Flood,
    Perimeter,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Hand {
    Right,
    Left,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeocastPacket {
    pub geocast_id: GeocastId,
    pub region: Rect,
    pub kind: PacketKind,
    pub previous_hop: NodeId,
    /// Node that started this perimeter traversal.
    pub origin: NodeId,
    /// Remaining perimeter hops; only set with border enhancements.
    pub ttl: Option<u8>,
    pub hand: Hand,
    pub unicast_state: Option<UnicastState>,
    /// Edge on which a perimeter traversal left its origin.
    pub initial_edge: Option<DirectedEdge>,
}

impl GeocastPacket {
    fn new(geocast_id: GeocastId, region: Rect, kind: PacketKind, sender: NodeId) -> Self {
        Self {
            geocast_id,
            region,
            kind,
            previous_hop: sender,
            origin: sender,
            ttl: None,
            hand: Hand::Right,
            unicast_state: None,
            initial_edge: None,
        }
    }
}

impl PacketInfo for GeocastPacket {
    fn kind_label(&self) -> &'static str {
        match (self.kind, self.hand) {
            (PacketKind::UnicastToRegion, _) => "unicast",
            (PacketKind::Flood, _) => "flood",
            (PacketKind::Perimeter, Hand::Right) => "perim-R",
            (PacketKind::Perimeter, Hand::Left) => "perim-L",
        }
    }

    fn is_route_hop(&self) -> bool {
        self.kind == PacketKind::UnicastToRegion
    }
}

#[derive(Debug, Clone, Default)]
pub struct NodeProtocolState {
    pub flooded: HashSet<GeocastId>,
    pub perimeter_seen: HashSet<(GeocastId, NodeId, Hand)>,
}

/// Region node with at least one unit-disk neighbour outside `region`.
pub fn is_border_node(t: &Topology, region: &Rect, n: NodeId) -> bool {
    region.contains(t.position(n)) && t.neighbors(n).iter().any(|&v| !region.contains(t.position(v)))
}

/// Quadrants of `n`'s radio range that contain no unit-disk neighbour.
pub fn empty_quadrants(t: &Topology, n: NodeId) -> Vec<Quadrant> {
    let center = t.position(n);
    let mut occupied = [false; 4];
    for &v in t.neighbors(n) {
        if let Ok(q) = quadrant_of(center, t.position(v)) {
            occupied[Quadrant::ALL.iter().position(|&a| a == q).unwrap()] = true;
        }
    }
    Quadrant::ALL
        .iter()
        .zip(occupied)
        .filter(|(_, occ)| !occ)
        .map(|(&q, _)| q)
        .collect()
}

/// A perimeter packet a region node decides to start.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PerimeterEmission {
    pub quadrant: Option<Quadrant>,
    pub target: NodeId,
    pub hand: Hand,
    pub ttl: Option<u8>,
}

/// Planar neighbour met first when sweeping from the ray at angle `ray`,
/// counterclockwise for the right hand and clockwise for the left.
fn first_from_ray(view: NodeView<'_, '_>, ray: f64, hand: Hand) -> Option<NodeId> {
    let nbrs = view.planar_neighbors();
    if nbrs.is_empty() {
        return None;
    }
    let t = view.scene.topology;
    let here = view.position();
    let reference = here.offset(ray, t.radio_range());
    let pts: Vec<Point> = nbrs.iter().map(|&v| t.position(v)).collect();
    let i = match hand {
        Hand::Right => right_hand_next(here, reference, &pts),
        Hand::Left => left_hand_next(here, reference, &pts),
    };
    Some(nbrs[i])
}

/// One right-hand emission per empty quadrant, aimed at the first planar
/// neighbour counterclockwise from the quadrant's counterclockwise boundary.
pub fn quadrant_emissions(view: NodeView<'_, '_>) -> Vec<PerimeterEmission> {
    view.empty_quadrants()
        .iter()
        .filter_map(|&q| {
            first_from_ray(view, q.ccw_boundary(), Hand::Right).map(|target| PerimeterEmission {
                quadrant: Some(q),
                target,
                hand: Hand::Right,
                ttl: None,
            })
        })
        .collect()
}

/// True when the empty quadrant faces the edge of the deployment area, i.e.
/// its quarter disk is not contained in the network rectangle.
pub fn quadrant_beyond_boundary(center: Point, q: Quadrant, radio_range: f64, network: &Rect) -> bool {
    !network.contains_rect(&q.quarter_disk_bounds(center, radio_range))
}

/// Border-region variant: drops emissions for quadrants facing the network
/// edge, then sends every remaining emission both ways around the empty
/// quadrant with a hop budget of [`BORDER_PERIMETER_TTL`].
pub fn apply_border_enhancements(
    emissions: Vec<PerimeterEmission>,
    view: NodeView<'_, '_>,
) -> Vec<PerimeterEmission> {
    let range = view.scene.topology.radio_range();
    let mut out = Vec::with_capacity(emissions.len() * 2);
    for e in emissions {
        if let Some(q) = e.quadrant {
            if quadrant_beyond_boundary(view.position(), q, range, &view.scene.network_bounds) {
                continue;
            }
        }
        out.push(PerimeterEmission {
            hand: Hand::Right,
            ttl: Some(BORDER_PERIMETER_TTL),
            ..e
        });
        let left_target = match e.quadrant {
            Some(q) => first_from_ray(view, q.cw_boundary(), Hand::Left),
            None => Some(e.target),
        };
        if let Some(target) = left_target {
            out.push(PerimeterEmission {
                target,
                hand: Hand::Left,
                ttl: Some(BORDER_PERIMETER_TTL),
                ..e
            });
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GeographicVariant {
    Gfg,
    Gfpg,
    GfpgStar,
}

/// Engine adapter for the geographic protocols.
#[derive(Debug, Clone, Copy)]
pub struct GeographicGeocast {
    pub variant: GeographicVariant,
    /// GFPG* only: TTL-limited two-handed traversals and boundary
    /// suppression for regions at the edge of the network.
    pub border_enhancements: bool,
}

impl GeographicGeocast {
    pub fn new(variant: GeographicVariant) -> Self {
        Self {
            variant,
            border_enhancements: false,
        }
    }
}

fn perimeter_packet(view: NodeView<'_, '_>, region: Rect, id: GeocastId, e: PerimeterEmission) -> Transmission<GeocastPacket> {
    Transmission::Unicast {
        to: e.target,
        packet: GeocastPacket {
            ttl: e.ttl,
            hand: e.hand,
            initial_edge: Some((view.id, e.target)),
            ..GeocastPacket::new(id, region, PacketKind::Perimeter, view.id)
        },
    }
}

impl GeographicGeocast {
    /// Flood plus whatever perimeter traversals this variant starts. Called
    /// exactly once per region node, on its first copy of the geocast.
    fn first_region_receipt(
        &self,
        view: NodeView<'_, '_>,
        state: &mut NodeProtocolState,
        id: GeocastId,
        region: Rect,
    ) -> Vec<Transmission<GeocastPacket>> {
        debug_assert!(view.in_region());
        if !state.flooded.insert(id) {
            return Vec::new();
        }
        let mut out = vec![Transmission::Broadcast(GeocastPacket::new(
            id,
            region,
            PacketKind::Flood,
            view.id,
        ))];
        let emissions = match self.variant {
            GeographicVariant::Gfg => Vec::new(),
            GeographicVariant::Gfpg => {
                if !view.is_border() {
                    Vec::new()
                } else {
                    let t = view.scene.topology;
                    view.planar_neighbors()
                        .iter()
                        .filter(|&&v| !region.contains(t.position(v)))
                        .map(|&v| PerimeterEmission {
                            quadrant: None,
                            target: v,
                            hand: Hand::Right,
                            ttl: None,
                        })
                        .collect()
                }
            }
            GeographicVariant::GfpgStar => {
                let mut e = quadrant_emissions(view);
                if self.border_enhancements {
                    e = apply_border_enhancements(e, view);
                }
                e
            }
        };
        // two empty quadrants can open onto the same edge and face
        let mut started: HashSet<(NodeId, Hand)> = HashSet::new();
        for e in emissions {
            if started.insert((e.target, e.hand)) {
                out.push(perimeter_packet(view, region, id, e));
            }
        }
        out
    }

    /// Next hop of a perimeter packet that arrived from `from`, or `None`
    /// when its hop budget is spent or its face is complete.
    fn forward_perimeter(
        &self,
        view: NodeView<'_, '_>,
        packet: &GeocastPacket,
        from: NodeId,
    ) -> Option<Transmission<GeocastPacket>> {
        let ttl = match packet.ttl {
            Some(0) | Some(1) => return None,
            Some(n) => Some(n - 1),
            None => None,
        };
        let t = view.scene.topology;
        let nbrs = view.planar_neighbors();
        if nbrs.is_empty() {
            return None;
        }
        let pts: Vec<Point> = nbrs.iter().map(|&v| t.position(v)).collect();
        let i = match packet.hand {
            Hand::Right => right_hand_next(view.position(), t.position(from), &pts),
            Hand::Left => left_hand_next(view.position(), t.position(from), &pts),
        };
        let next = nbrs[i];
        if packet.initial_edge == Some((view.id, next)) {
            return None;
        }
        Some(Transmission::Unicast {
            to: next,
            packet: GeocastPacket {
                previous_hop: view.id,
                ttl,
                ..packet.clone()
            },
        })
    }
}

/// GFG: route to the region, then flood it. Nodes outside the region drop
/// flood packets.
pub fn gfg_handle(
    handler: &GeographicGeocast,
    state: &mut NodeProtocolState,
    packet: &GeocastPacket,
    from: NodeId,
    view: NodeView<'_, '_>,
) -> Vec<Transmission<GeocastPacket>> {
    match packet.kind {
        PacketKind::UnicastToRegion => {
            if view.in_region() {
                return handler.first_region_receipt(view, state, packet.geocast_id, packet.region);
            }
            let mut unicast = packet
                .unicast_state
                .clone()
                .unwrap_or_else(|| UnicastState::new(packet.region.center()));
            let scene = view.scene;
            match gpsr_step(scene.topology, scene.planar, view.id, Some(from), &packet.region, &mut unicast) {
                RouteStep::Forward(next) => vec![Transmission::Unicast {
                    to: next,
                    packet: GeocastPacket {
                        previous_hop: view.id,
                        unicast_state: Some(unicast),
                        ..packet.clone()
                    },
                }],
                RouteStep::Arrived | RouteStep::Unreachable => Vec::new(),
            }
        }
        PacketKind::Flood => {
            if view.in_region() && !state.flooded.contains(&packet.geocast_id) {
                handler.first_region_receipt(view, state, packet.geocast_id, packet.region)
            } else {
                Vec::new()
            }
        }
        PacketKind::Perimeter => Vec::new(),
    }
}

/// GFPG: GFG plus perimeter traversals from every border node to each of its
/// outside planar neighbours. A traversal ends at the first region node it
/// reaches, which floods if it had not already.
pub fn gfpg_handle(
    handler: &GeographicGeocast,
    state: &mut NodeProtocolState,
    packet: &GeocastPacket,
    from: NodeId,
    view: NodeView<'_, '_>,
) -> Vec<Transmission<GeocastPacket>> {
    if packet.kind != PacketKind::Perimeter {
        return gfg_handle(handler, state, packet, from, view);
    }
    if view.in_region() {
        return handler.first_region_receipt(view, state, packet.geocast_id, packet.region);
    }
    handler.forward_perimeter(view, packet, from).into_iter().collect()
}

/// GFPG*: GFG plus perimeter traversals started only around empty quadrants.
/// Perimeter packets are forwarded by every node, inside the region or not,
/// and dropped when the same neighbour delivers them a second time.
pub fn gfpg_star_handle(
    handler: &GeographicGeocast,
    state: &mut NodeProtocolState,
    packet: &GeocastPacket,
    from: NodeId,
    view: NodeView<'_, '_>,
) -> Vec<Transmission<GeocastPacket>> {
    if packet.kind != PacketKind::Perimeter {
        return gfg_handle(handler, state, packet, from, view);
    }
    if !state.perimeter_seen.insert((packet.geocast_id, from, packet.hand)) {
        return Vec::new();
    }
    let mut out = Vec::new();
    if view.in_region() {
        out = handler.first_region_receipt(view, state, packet.geocast_id, packet.region);
    }
    out.extend(handler.forward_perimeter(view, packet, from));
    out
}

impl PacketHandler for GeographicGeocast {
    type Packet = GeocastPacket;
    type State = NodeProtocolState;

    fn originate(
        &self,
        view: NodeView<'_, '_>,
        state: &mut NodeProtocolState,
        geocast_id: GeocastId,
    ) -> Vec<Transmission<GeocastPacket>> {
        let region = view.scene.region;
        if view.in_region() {
            return self.first_region_receipt(view, state, geocast_id, region);
        }
        let mut unicast = UnicastState::new(region.center());
        let scene = view.scene;
        match gpsr_step(scene.topology, scene.planar, view.id, None, &region, &mut unicast) {
            RouteStep::Forward(next) => vec![Transmission::Unicast {
                to: next,
                packet: GeocastPacket {
                    unicast_state: Some(unicast),
                    ..GeocastPacket::new(geocast_id, region, PacketKind::UnicastToRegion, view.id)
                },
            }],
            RouteStep::Arrived | RouteStep::Unreachable => Vec::new(),
        }
    }

    fn receive(
        &self,
        view: NodeView<'_, '_>,
        state: &mut NodeProtocolState,
        packet: &GeocastPacket,
        from: NodeId,
    ) -> Vec<Transmission<GeocastPacket>> {
        match self.variant {
            GeographicVariant::Gfg => gfg_handle(self, state, packet, from, view),
            GeographicVariant::Gfpg => gfpg_handle(self, state, packet, from, view),
            GeographicVariant::GfpgStar => gfpg_star_handle(self, state, packet, from, view),
        }
    }
}
