//! Flooding-based comparison protocols: global flooding, fixed and adaptive
//! rectangular forwarding zones, and progressively closer nodes.
//!
//! Every node decides once, on the first copy it hears. Later copies are
//! ignored even if they carry a more favourable zone or previous hop.

use std::collections::HashSet;

use crate::geometry::{bounding_rect, distance, Point, Rect};
use crate::simulator::{GeocastId, NodeView, PacketHandler, PacketInfo, Transmission};
use crate::topology::NodeId;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineRule {
    Flood,
    /// FRFZ: zone fixed at the sender.
    FixedZone,
    /// ARFZ: zone recomputed from the previous hop.
    AdaptiveZone,
    /// PCN: forward only when closer to the region centre than the previous
    /// hop, or when inside the region.
    ProgressivelyCloser,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselinePacket {
    pub geocast_id: GeocastId,
    pub region: Rect,
    /// FRFZ: the sender's zone. ARFZ: the zone of the transmitting hop.
    pub zone: Option<Rect>,
    pub previous_hop: NodeId,
    pub previous_hop_position: Point,
}

impl PacketInfo for BaselinePacket {
    fn kind_label(&self) -> &'static str {
        "flood"
    }
}

#[derive(Debug, Clone, Default)]
pub struct BaselineState {
    received: HashSet<GeocastId>,
}

impl BaselineState {
    /// Records receipt; returns false for a duplicate.
    fn first_receipt(&mut self, id: GeocastId) -> bool {
        self.received.insert(id)
    }
}

fn rebroadcast(view: NodeView<'_, '_>, packet: &BaselinePacket, zone: Option<Rect>) -> Vec<Transmission<BaselinePacket>> {
    vec![Transmission::Broadcast(BaselinePacket {
        zone,
        previous_hop: view.id,
        previous_hop_position: view.position(),
        ..packet.clone()
    })]
}

pub fn flood_handle(
    state: &mut BaselineState,
    packet: &BaselinePacket,
    view: NodeView<'_, '_>,
) -> Vec<Transmission<BaselinePacket>> {
    if !state.first_receipt(packet.geocast_id) {
        return Vec::new();
    }
    rebroadcast(view, packet, None)
}

pub fn frfz_handle(
    state: &mut BaselineState,
    packet: &BaselinePacket,
    view: NodeView<'_, '_>,
) -> Vec<Transmission<BaselinePacket>> {
    if !state.first_receipt(packet.geocast_id) {
        return Vec::new();
    }
    let zone = packet.zone.expect("FRFZ packets carry the sender's zone");
    if zone.contains(view.position()) {
        rebroadcast(view, packet, Some(zone))
    } else {
        Vec::new()
    }
}

pub fn arfz_handle(
    state: &mut BaselineState,
    packet: &BaselinePacket,
    view: NodeView<'_, '_>,
) -> Vec<Transmission<BaselinePacket>> {
    if !state.first_receipt(packet.geocast_id) {
        return Vec::new();
    }
    let zone = bounding_rect(packet.previous_hop_position, &packet.region);
    let here = view.position();
    if zone.contains(here) {
        rebroadcast(view, packet, Some(bounding_rect(here, &packet.region)))
    } else {
        Vec::new()
    }
}

pub fn pcn_handle(
    state: &mut BaselineState,
    packet: &BaselinePacket,
    view: NodeView<'_, '_>,
) -> Vec<Transmission<BaselinePacket>> {
    if !state.first_receipt(packet.geocast_id) {
        return Vec::new();
    }
    let center = packet.region.center();
    let here = view.position();
    let closer = distance(here, center) < distance(packet.previous_hop_position, center);
    if closer || packet.region.contains(here) {
        rebroadcast(view, packet, None)
    } else {
        Vec::new()
    }
}

/// Engine adapter for the four baselines.
#[derive(Debug, Clone, Copy)]
pub struct ZoneForwarding {
    pub rule: BaselineRule,
}

impl ZoneForwarding {
    pub fn new(rule: BaselineRule) -> Self {
        Self { rule }
    }
}

impl PacketHandler for ZoneForwarding {
    type Packet = BaselinePacket;
    type State = BaselineState;

    fn originate(
        &self,
        view: NodeView<'_, '_>,
        state: &mut BaselineState,
        geocast_id: GeocastId,
    ) -> Vec<Transmission<BaselinePacket>> {
        state.first_receipt(geocast_id);
        let region = view.scene.region;
        let zone = match self.rule {
            BaselineRule::FixedZone | BaselineRule::AdaptiveZone => {
                Some(bounding_rect(view.position(), &region))
            }
            BaselineRule::Flood | BaselineRule::ProgressivelyCloser => None,
        };
        vec![Transmission::Broadcast(BaselinePacket {
            geocast_id,
            region,
            zone,
            previous_hop: view.id,
            previous_hop_position: view.position(),
        })]
    }

    fn receive(
        &self,
        view: NodeView<'_, '_>,
        state: &mut BaselineState,
        packet: &BaselinePacket,
        _from: NodeId,
    ) -> Vec<Transmission<BaselinePacket>> {
        match self.rule {
            BaselineRule::Flood => flood_handle(state, packet, view),
            BaselineRule::FixedZone => frfz_handle(state, packet, view),
            BaselineRule::AdaptiveZone => arfz_handle(state, packet, view),
            BaselineRule::ProgressivelyCloser => pcn_handle(state, packet, view),
        }
    }
}
