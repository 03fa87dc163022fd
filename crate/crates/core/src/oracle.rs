//! Brute-force ground truth for delivery checks.
//!
//! Adjacency is recomputed here from raw positions with an all-pairs scan and
//! traversed with its own BFS, so nothing is shared with the topology,
//! routing or protocol code paths under test.

use std::collections::{BTreeSet, VecDeque};
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::geometry::Rect;
use crate::simulator::GeocastResult;
use crate::topology::{NodeId, Topology, TopologyDocument};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleReport {
    /// Region nodes reachable from the sender over the full unit-disk graph.
    pub reachable_region_nodes: BTreeSet<NodeId>,
    /// Whether the region-induced subgraph is connected.
    pub region_subgraph_connected: bool,
    /// Region split into pieces that are only joined through outside nodes.
    pub gap_present: bool,
}

/// Independent adjacency over a topology's positions.
pub struct Oracle {
    positions: Vec<(f64, f64)>,
    adjacency: Vec<Vec<usize>>,
}

impl Oracle {
    pub fn new(t: &Topology) -> Self {
        let pts: Vec<(f64, f64)> = t.positions().iter().map(|p| (p.x, p.y)).collect();
        let r2 = t.radio_range() * t.radio_range();
        let n = pts.len();
        let mut adjacency = vec![Vec::new(); n];
        for i in 0..n {
            for j in (i + 1)..n {
                let dx = pts[i].0 - pts[j].0;
                let dy = pts[i].1 - pts[j].1;
                let d2 = dx * dx + dy * dy;
                if d2 > 0.0 && d2 <= r2 {
                    adjacency[i].push(j);
                    adjacency[j].push(i);
                }
            }
        }
        Self {
            positions: pts,
            adjacency,
        }
    }

    fn in_rect(&self, r: &Rect, i: usize) -> bool {
        let (x, y) = self.positions[i];
        r.min.x <= x && x <= r.max.x && r.min.y <= y && y <= r.max.y
    }

    fn bfs(&self, start: usize, allowed: impl Fn(usize) -> bool) -> Vec<bool> {
        let mut seen = vec![false; self.adjacency.len()];
        if !allowed(start) {
            return seen;
        }
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &v in &self.adjacency[u] {
                if !seen[v] && allowed(v) {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen
    }

    pub fn report(&self, sender: NodeId, region: &Rect) -> OracleReport {
        let n = self.adjacency.len();
        let in_region: Vec<bool> = (0..n).map(|i| self.in_rect(region, i)).collect();
        let reach = self.bfs(sender.index(), |_| true);
        let reachable_region_nodes: BTreeSet<NodeId> = (0..n)
            .filter(|&i| reach[i] && in_region[i])
            .map(NodeId::from)
            .collect();
        let members: Vec<usize> = (0..n).filter(|&i| in_region[i]).collect();
        let region_subgraph_connected = match members.first() {
            None => true,
            Some(&first) => {
                let inside = self.bfs(first, |v| in_region[v]);
                members.iter().all(|&i| inside[i])
            }
        };
        let all_reachable = reachable_region_nodes.len() == members.len();
        OracleReport {
            reachable_region_nodes,
            region_subgraph_connected,
            gap_present: !region_subgraph_connected && all_reachable,
        }
    }

    /// Whole-graph connectivity, for cross-checking `topology::is_connected`.
    pub fn connected(&self) -> bool {
        self.adjacency.is_empty() || self.bfs(0, |_| true).iter().all(|&s| s)
    }
}

/// Convenience single-shot form.
pub fn oracle_report(t: &Topology, sender: NodeId, region: &Rect) -> OracleReport {
    Oracle::new(t).report(sender, region)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Pass,
    Fail {
        missed: BTreeSet<NodeId>,
        topology_seed: Option<u64>,
    },
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }
}

/// PASS iff the protocol reached exactly the region nodes the sender can reach.
pub fn check_guarantee(result: &GeocastResult, report: &OracleReport, topology_seed: Option<u64>) -> Verdict {
    if result.delivered_region_nodes == report.reachable_region_nodes {
        Verdict::Pass
    } else {
        Verdict::Fail {
            missed: report
                .reachable_region_nodes
                .difference(&result.delivered_region_nodes)
                .copied()
                .collect(),
            topology_seed,
        }
    }
}

/// Everything needed to replay a failed delivery check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub protocol: String,
    pub density: f64,
    pub run: u64,
    pub sender: NodeId,
    pub region: Rect,
    pub missed: BTreeSet<NodeId>,
    pub topology: TopologyDocument,
}

impl Counterexample {
    pub fn file_name(&self) -> String {
        format!(
            "counterexample-{}-d{}-run{}-s{}.json",
            self.protocol, self.density, self.run, self.sender
        )
    }

    /// Writes the counterexample as pretty JSON into `dir`.
    pub fn write_to(&self, dir: &Path) -> io::Result<PathBuf> {
        fs::create_dir_all(dir)?;
        let path = dir.join(self.file_name());
        let json = serde_json::to_string_pretty(self).map_err(io::Error::other)?;
        fs::write(&path, json)?;
        Ok(path)
    }
}
