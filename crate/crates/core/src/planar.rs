//! Planar subgraphs of the unit-disk graph used for face traversal.
//!
//! Both constructions are local: a witness that removes edge `uv` must lie
//! within range of `u`, so only `u`'s neighbour list is scanned.

use std::collections::HashMap;

use crate::geometry::{distance_squared, right_hand_next, Point};
use crate::topology::{NodeId, Topology};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Planarization {
    Gabriel,
    RelativeNeighborhood,
}

/// Planar neighbour lists over a topology, sorted by node id.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarGraph {
    kind: Planarization,
    adjacency: Vec<Vec<NodeId>>,
}

impl PlanarGraph {
    pub fn kind(&self) -> Planarization {
        self.kind
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn neighbors(&self, n: NodeId) -> &[NodeId] {
        &self.adjacency[n.index()]
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.adjacency[u.index()].binary_search(&v).is_ok()
    }

    /// Undirected edges `[u, v]` with `u < v`.
    pub fn edges(&self) -> Vec<[NodeId; 2]> {
        let mut out = Vec::new();
        for (u, nbrs) in self.adjacency.iter().enumerate() {
            let u = NodeId::from(u);
            out.extend(nbrs.iter().filter(|&&v| u < v).map(|&v| [u, v]));
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn is_connected(&self) -> bool {
        let n = self.adjacency.len();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for v in &self.adjacency[u] {
                if !seen[v.index()] {
                    seen[v.index()] = true;
                    count += 1;
                    stack.push(v.index());
                }
            }
        }
        count == n
    }

    /// Right-hand successor of the directed edge `from → at`.
    pub fn right_hand_successor(&self, t: &Topology, from: NodeId, at: NodeId) -> NodeId {
        let nbrs = self.neighbors(at);
        let pts: Vec<Point> = nbrs.iter().map(|&v| t.position(v)).collect();
        nbrs[right_hand_next(t.position(at), t.position(from), &pts)]
    }
}

fn build(t: &Topology, kind: Planarization, eliminates: impl Fn(Point, Point, Point) -> bool) -> PlanarGraph {
    let mut adjacency = vec![Vec::new(); t.node_count()];
    for u in t.nodes() {
        let pu = t.position(u);
        for &v in t.neighbors(u) {
            if v <= u {
                continue;
            }
            let pv = t.position(v);
            let witnessed = t
                .neighbors(u)
                .iter()
                .any(|&w| w != v && eliminates(pu, pv, t.position(w)));
            if !witnessed {
                adjacency[u.index()].push(v);
                adjacency[v.index()].push(u);
            }
        }
    }
    for list in &mut adjacency {
        list.sort_unstable();
    }
    PlanarGraph { kind, adjacency }
}

/// Squared-distance slack below which a witness counts as lying on the
/// boundary (and therefore not removing the edge). Shared by both rules so
/// RNG stays a subgraph of GG.
const TIE_EPS: f64 = 1e-9;

/// Gabriel graph: `uv` survives unless some `w` lies strictly inside the
/// circle with diameter `uv`. Points on the circle do not remove the edge.
pub fn gabriel(t: &Topology) -> PlanarGraph {
    build(t, Planarization::Gabriel, |u, v, w| {
        let m = u.midpoint(v);
        distance_squared(w, m) < distance_squared(u, v) / 4.0 - TIE_EPS
    })
}

/// Relative neighbourhood graph: `uv` survives unless some `w` is strictly
/// closer to both endpoints than they are to each other.
pub fn rng(t: &Topology) -> PlanarGraph {
    build(t, Planarization::RelativeNeighborhood, |u, v, w| {
        let duv = distance_squared(u, v);
        distance_squared(w, u).max(distance_squared(w, v)) < duv - TIE_EPS
    })
}

/// Directed edge `from → to`.
pub type DirectedEdge = (NodeId, NodeId);

/// Partitions every directed planar edge into right-hand-rule cycles.
pub fn faces(t: &Topology, g: &PlanarGraph) -> Vec<Vec<DirectedEdge>> {
    let mut visited: HashMap<DirectedEdge, bool> = HashMap::new();
    let mut directed = Vec::new();
    for u in t.nodes() {
        for &v in g.neighbors(u) {
            directed.push((u, v));
            visited.insert((u, v), false);
        }
    }
    let mut out = Vec::new();
    for start in directed {
        if visited[&start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut edge = start;
        loop {
            *visited.get_mut(&edge).expect("successor is a planar edge") = true;
            cycle.push(edge);
            let (from, at) = edge;
            edge = (at, g.right_hand_successor(t, from, at));
            if edge == start {
                break;
            }
        }
        out.push(cycle);
    }
    out
}
