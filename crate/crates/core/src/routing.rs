//! Greedy forwarding with face-routing recovery toward a geocast region.
//!
//! The destination is the region centre, but delivery succeeds at the first
//! node found inside the region. [`gpsr_step`] is the per-hop decision and is
//! shared by [`route_to_region`] and the packet handlers.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{distance, right_hand_next, segment_crossing, Point, Rect};
use crate::planar::{DirectedEdge, PlanarGraph};
use crate::topology::{NodeId, Topology};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RoutingError {
    #[error("region unreachable from node {source_node}")]
    RegionUnreachable { source_node: NodeId },
    #[error("hop limit of {limit} exceeded")]
    HopLimitExceeded { limit: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RouteMode {
    Greedy,
    Perimeter,
}

/// Per-packet forwarding state carried in the header.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnicastState {
    pub mode: RouteMode,
    pub destination: Point,
    /// Location of the node where perimeter mode began.
    pub perimeter_entry: Point,
    pub perimeter_entry_distance: f64,
    /// First edge traversed on the current face.
    pub first_edge: Option<DirectedEdge>,
    /// Closest point to the destination where the traversal crossed the
    /// entry→destination segment.
    pub current_face_crossing: Option<Point>,
}

impl UnicastState {
    pub fn new(destination: Point) -> Self {
        Self {
            mode: RouteMode::Greedy,
            destination,
            perimeter_entry: destination,
            perimeter_entry_distance: 0.0,
            first_edge: None,
            current_face_crossing: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RouteStep {
    /// The current node lies inside the region.
    Arrived,
    Forward(NodeId),
    /// A face was toured completely without progress.
    Unreachable,
}

/// The unit-disk neighbour strictly closer to `dest` than `at` and closest
/// overall; ties go to the lower id.
pub fn greedy_next(t: &Topology, at: NodeId, dest: Point) -> Option<NodeId> {
    let mut best_d = distance(t.position(at), dest);
    let mut best = None;
    for &n in t.neighbors(at) {
        let d = distance(t.position(n), dest);
        if d < best_d {
            best_d = d;
            best = Some(n);
        }
    }
    best
}

fn planar_turn(t: &Topology, g: &PlanarGraph, at: NodeId, reference: Point) -> Option<NodeId> {
    let nbrs = g.neighbors(at);
    if nbrs.is_empty() {
        return None;
    }
    let pts: Vec<Point> = nbrs.iter().map(|&v| t.position(v)).collect();
    Some(nbrs[right_hand_next(t.position(at), reference, &pts)])
}

/// Decides what the node `at` does with a region-bound unicast that it just
/// received from `previous` (`None` at the originator).
pub fn gpsr_step(
    t: &Topology,
    g: &PlanarGraph,
    at: NodeId,
    previous: Option<NodeId>,
    region: &Rect,
    state: &mut UnicastState,
) -> RouteStep {
    let here = t.position(at);
    if region.contains(here) {
        return RouteStep::Arrived;
    }
    let dest = state.destination;

    if state.mode == RouteMode::Perimeter {
        if distance(here, dest) < state.perimeter_entry_distance {
            state.mode = RouteMode::Greedy;
            state.first_edge = None;
            state.current_face_crossing = None;
        } else if let Some(prev) = previous {
            return perimeter_step(t, g, at, prev, state);
        }
    }

    if let Some(next) = greedy_next(t, at, dest) {
        return RouteStep::Forward(next);
    }

    // Dead end: start a face traversal on the first edge counterclockwise
    // from the line toward the destination.
    let Some(first) = planar_turn(t, g, at, dest) else {
        return RouteStep::Unreachable;
    };
    state.mode = RouteMode::Perimeter;
    state.perimeter_entry = here;
    state.perimeter_entry_distance = distance(here, dest);
    state.current_face_crossing = Some(here);
    state.first_edge = Some((at, first));
    RouteStep::Forward(first)
}

fn perimeter_step(
    t: &Topology,
    g: &PlanarGraph,
    at: NodeId,
    prev: NodeId,
    state: &mut UnicastState,
) -> RouteStep {
    let here = t.position(at);
    let dest = state.destination;
    let Some(mut next) = planar_turn(t, g, at, t.position(prev)) else {
        return RouteStep::Unreachable;
    };
    let mut changed_face = false;
    loop {
        let crossing_best = state.current_face_crossing.unwrap_or(state.perimeter_entry);
        let crossing = segment_crossing(here, t.position(next), state.perimeter_entry, dest);
        match crossing {
            Some(x) if distance(x, dest) < distance(crossing_best, dest) => {
                state.current_face_crossing = Some(x);
                changed_face = true;
                // keep sweeping past the edge that crosses toward the destination
                next = planar_turn(t, g, at, t.position(next)).expect("at has planar neighbours");
            }
            _ => break,
        }
    }
    if changed_face {
        state.first_edge = Some((at, next));
    } else if state.first_edge == Some((at, next)) {
        return RouteStep::Unreachable;
    }
    RouteStep::Forward(next)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RouteOutcome {
    /// First node reached inside the region, if any.
    pub entry_node: Option<NodeId>,
    /// Every node that held the packet, source first.
    pub path: Vec<NodeId>,
    /// Hops taken in perimeter mode.
    pub perimeter_hops: usize,
}

impl RouteOutcome {
    pub fn entry(&self) -> Result<NodeId, RoutingError> {
        self.entry_node.ok_or(RoutingError::RegionUnreachable {
            source_node: self.path[0],
        })
    }
}

/// Simulates the region-bound unicast hop by hop.
pub fn route_to_region(
    t: &Topology,
    g: &PlanarGraph,
    source: NodeId,
    region: &Rect,
) -> Result<RouteOutcome, RoutingError> {
    let limit = 4 * t.node_count();
    let mut state = UnicastState::new(region.center());
    let mut path = vec![source];
    let mut at = source;
    let mut previous = None;
    let mut perimeter_hops = 0;
    loop {
        match gpsr_step(t, g, at, previous, region, &mut state) {
            RouteStep::Arrived => {
                return Ok(RouteOutcome {
                    entry_node: Some(at),
                    path,
                    perimeter_hops,
                })
            }
            RouteStep::Unreachable => {
                return Ok(RouteOutcome {
                    entry_node: None,
                    path,
                    perimeter_hops,
                })
            }
            RouteStep::Forward(next) => {
                if path.len() > limit {
                    return Err(RoutingError::HopLimitExceeded { limit });
                }
                if state.mode == RouteMode::Perimeter {
                    perimeter_hops += 1;
                }
                previous = Some(at);
                at = next;
                path.push(at);
            }
        }
    }
}
