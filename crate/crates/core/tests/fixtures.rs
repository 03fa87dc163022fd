//! Hand-built topologies with hand-traced expected outcomes.

use std::collections::BTreeSet;

use geocast::geometry::{Point, Quadrant, Rect};
use geocast::oracle::{check_guarantee, oracle_report, Verdict};
use geocast::planar::gabriel;
use geocast::protocols::{apply_border_enhancements, quadrant_emissions, Hand, BORDER_PERIMETER_TTL};
use geocast::routing::route_to_region;
use geocast::simulator::{run_geocast, run_on_scene, Protocol, Scene, TraceEntry};
use geocast::topology::{NodeId, Topology};

fn topo(points: &[(f64, f64)], side: f64) -> Topology {
    let pts = points.iter().map(|&(x, y)| Point::new(x, y)).collect();
    Topology::from_positions(pts, 1.0, side).unwrap()
}

fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Rect {
    Rect::from_corners(Point::new(x0, y0), Point::new(x1, y1))
}

fn ids(v: &[u32]) -> BTreeSet<NodeId> {
    v.iter().map(|&i| NodeId(i)).collect()
}

fn polar(c: (f64, f64), deg: f64, r: f64) -> (f64, f64) {
    let a = deg.to_radians();
    (c.0 + r * a.cos(), c.1 + r * a.sin())
}

/// Source 0 sits in the mouth of a C opening away from the region, so its
/// only neighbours are farther from the region than itself.
fn c_obstacle() -> (Topology, Rect) {
    let t = topo(
        &[
            (5.0, 5.0),   // 0 source
            (4.4, 5.7),   // 1 upper arm
            (4.8, 6.6),   // 2
            (5.7, 7.0),   // 3
            (6.6, 6.8),   // 4
            (7.4, 6.3),   // 5
            (8.0, 5.6),   // 6
            (8.6, 5.0),   // 7 region
            (9.2, 5.2),   // 8 region
            (4.4, 4.3),   // 9 lower arm
            (4.8, 3.4),   // 10
            (5.7, 3.0),   // 11
        ],
        12.0,
    );
    (t, rect(8.5, 4.5, 9.5, 5.5))
}

#[test]
fn c_obstacle_route_uses_perimeter_mode() {
    let (t, region) = c_obstacle();
    let g = gabriel(&t);
    let report = oracle_report(&t, NodeId(0), &region);
    assert_eq!(report.reachable_region_nodes, ids(&[7, 8]));
    let outcome = route_to_region(&t, &g, NodeId(0), &region).unwrap();
    let entry = outcome.entry().unwrap();
    assert!(region.contains(t.position(entry)));
    assert!(outcome.perimeter_hops > 0, "greedy alone cannot leave the C");
    assert_eq!(outcome.path.first(), Some(&NodeId(0)));
    assert_eq!(outcome.path.last(), Some(&entry));
    for w in outcome.path.windows(2) {
        assert!(t.neighbors(w[0]).contains(&w[1]));
    }
}

/// Two region clusters {1,2,8} and {6,7,9}; the only link between them is the
/// outside arc 3-4-5.
fn gap_fixture() -> (Topology, Rect) {
    let t = topo(
        &[
            (-0.4, 0.5), // 0 sender
            (0.5, 0.5),  // 1
            (1.0, 0.5),  // 2
            (1.3, 1.4),  // 3 outside bridge
            (2.0, 1.8),  // 4
            (2.7, 1.4),  // 5
            (3.0, 0.5),  // 6
            (3.5, 0.5),  // 7
            (0.8, 0.1),  // 8
            (3.3, 0.1),  // 9
        ],
        5.0,
    );
    (t, rect(0.0, 0.0, 4.0, 1.0))
}

#[test]
fn gap_fixture_oracle_flags_the_gap() {
    let (t, region) = gap_fixture();
    let report = oracle_report(&t, NodeId(0), &region);
    assert!(!report.region_subgraph_connected);
    assert!(report.gap_present);
    assert_eq!(report.reachable_region_nodes, ids(&[1, 2, 6, 7, 8, 9]));
}

#[test]
fn gfg_misses_the_far_cluster() {
    let (t, region) = gap_fixture();
    let g = gabriel(&t);
    let r = run_geocast(&t, &g, Protocol::Gfg, NodeId(0), &region).unwrap();
    assert_eq!(r.delivered_region_nodes, ids(&[1, 2, 8]));
    let verdict = check_guarantee(&r, &oracle_report(&t, NodeId(0), &region), None);
    assert_eq!(
        verdict,
        Verdict::Fail {
            missed: ids(&[6, 7, 9]),
            topology_seed: None
        }
    );
}

#[test]
fn gfpg_and_gfpg_star_bridge_the_gap() {
    let (t, region) = gap_fixture();
    let g = gabriel(&t);
    let report = oracle_report(&t, NodeId(0), &region);
    for p in [
        Protocol::Gfpg,
        Protocol::GfpgStar {
            border_enhancements: false,
        },
    ] {
        let r = run_geocast(&t, &g, p, NodeId(0), &region).unwrap();
        assert!(check_guarantee(&r, &report, None).is_pass(), "{p}");
        // the bridge carried perimeter traffic
        assert!(r.forwarding_nodes.contains(&NodeId(4)), "{p}");
    }
}

#[test]
fn gfpg_overhead_not_below_gfg_without_gap() {
    let (t, region) = c_obstacle();
    let g = gabriel(&t);
    let gfg = run_geocast(&t, &g, Protocol::Gfg, NodeId(0), &region).unwrap();
    let gfpg = run_geocast(&t, &g, Protocol::Gfpg, NodeId(0), &region).unwrap();
    assert_eq!(gfg.delivered_region_nodes, gfpg.delivered_region_nodes);
    assert!(gfpg.forwarding_nodes.len() >= gfg.forwarding_nodes.len());
}

/// Sender 0, relay 1, region {2,3,4,5}, three bystanders.
#[test]
fn gfg_nine_node_trace() {
    let t = topo(
        &[
            (0.0, 0.0),
            (0.9, 0.0),
            (1.8, 0.0),
            (2.3, 0.4),
            (2.3, -0.4),
            (2.8, 0.0),
            (0.0, 0.9),
            (0.0, -0.9),
            (-0.9, 0.0),
        ],
        5.0,
    );
    let region = rect(1.5, -0.6, 3.0, 0.6);
    let g = gabriel(&t);
    let r = run_geocast(&t, &g, Protocol::Gfg, NodeId(0), &region).unwrap();
    assert_eq!(r.delivered_region_nodes, ids(&[2, 3, 4, 5]));
    assert_eq!(r.forwarding_nodes, ids(&[0, 1, 2, 3, 4, 5]));
    assert_eq!(r.total_transmissions, 6);
    assert!(r.terminated_normally);
}

fn quadrant_node() -> (Topology, Rect) {
    let c = (5.0, 5.0);
    let t = topo(
        &[c, polar(c, 170.0, 0.8), polar(c, 200.0, 0.8), polar(c, 350.0, 0.8)],
        10.0,
    );
    (t, rect(4.9, 4.9, 5.1, 5.1))
}

#[test]
fn empty_quadrant_targets_first_ccw_neighbour() {
    let (t, region) = quadrant_node();
    let g = gabriel(&t);
    assert_eq!(g.neighbors(NodeId(0)), &[NodeId(1), NodeId(2), NodeId(3)]);
    let scene = Scene::new(&t, &g, region);
    let view = scene.view(NodeId(0));
    assert_eq!(view.empty_quadrants(), &[Quadrant::NE]);
    let emissions = quadrant_emissions(view);
    assert_eq!(emissions.len(), 1);
    assert_eq!(emissions[0].target, NodeId(1));
    assert_eq!(emissions[0].hand, Hand::Right);
    assert_eq!(emissions[0].ttl, None);
}

#[test]
fn border_enhancement_sends_both_hands_with_ttl() {
    let (t, region) = quadrant_node();
    let g = gabriel(&t);
    let scene = Scene::new(&t, &g, region);
    let view = scene.view(NodeId(0));
    let out = apply_border_enhancements(quadrant_emissions(view), view);
    assert_eq!(out.len(), 2);
    assert_eq!((out[0].target, out[0].hand), (NodeId(1), Hand::Right));
    // clockwise from the NE quadrant's clockwise edge (0°) the 350° neighbour comes first
    assert_eq!((out[1].target, out[1].hand), (NodeId(3), Hand::Left));
    assert!(out.iter().all(|e| e.ttl == Some(BORDER_PERIMETER_TTL)));
}

#[test]
fn corner_node_suppresses_outward_quadrants() {
    let t = topo(&[(0.2, 0.2), (0.7, 0.7), (1.4, 1.1)], 10.0);
    let region = rect(0.0, 0.0, 0.5, 0.5);
    let g = gabriel(&t);
    let scene = Scene::new(&t, &g, region);
    let view = scene.view(NodeId(0));
    assert_eq!(view.empty_quadrants(), &[Quadrant::NW, Quadrant::SW, Quadrant::SE]);
    assert_eq!(quadrant_emissions(view).len(), 3);
    assert!(apply_border_enhancements(quadrant_emissions(view), view).is_empty());
}

/// 40 nodes on a ring; the region holds one of them, so every perimeter
/// packet has to walk the ring.
fn ring() -> (Topology, Rect) {
    let n = 40;
    let radius = 0.9 * n as f64 / std::f64::consts::TAU;
    let c = (10.0, 10.0);
    let pts: Vec<(f64, f64)> = (0..n).map(|i| polar(c, 360.0 * i as f64 / n as f64, radius)).collect();
    let p0 = pts[0];
    (topo(&pts, 20.0), rect(p0.0 - 0.1, p0.1 - 0.1, p0.0 + 0.1, p0.1 + 0.1))
}

fn perimeter_sends(trace: &[TraceEntry]) -> usize {
    trace
        .iter()
        .filter(|e| e.kind.starts_with("perim") && e.action.starts_with("send"))
        .count()
}

#[test]
fn ttl_bounds_perimeter_walks() {
    let (t, region) = ring();
    let g = gabriel(&t);
    let scene = Scene::new(&t, &g, region);
    let sender = NodeId(20);

    let mut plain = Vec::new();
    let r = run_on_scene(
        &scene,
        Protocol::GfpgStar {
            border_enhancements: false,
        },
        sender,
        Some(&mut plain),
    )
    .unwrap();
    assert!(r.terminated_normally);
    let emitted = quadrant_emissions(scene.view(NodeId(0))).len();
    assert!(emitted > 0);
    // without a TTL each right-hand walk goes all the way round
    assert!(perimeter_sends(&plain) >= 39);

    let mut limited = Vec::new();
    let r = run_on_scene(
        &scene,
        Protocol::GfpgStar {
            border_enhancements: true,
        },
        sender,
        Some(&mut limited),
    )
    .unwrap();
    assert!(r.terminated_normally);
    assert_eq!(r.delivered_region_nodes, ids(&[0]));
    let bound = 2 * emitted * usize::from(BORDER_PERIMETER_TTL);
    let sends = perimeter_sends(&limited);
    assert!(sends > 0 && sends <= bound, "{sends} perimeter sends, bound {bound}");
}
