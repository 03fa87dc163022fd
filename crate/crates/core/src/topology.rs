//! Random unit-disk topologies in a square deployment area.

use std::collections::VecDeque;
use std::f64::consts::PI;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{distance_squared, rect_contains, Point, Rect};

/// Name of the position generator, recorded in every output file.
pub const GENERATOR_NAME: &str = "ChaCha8Rng (rand_chacha 0.3, stream = attempt index)";

pub const DEFAULT_MAX_REGEN_ATTEMPTS: u32 = 1000;

/// Relocation rounds allowed when repairing a disconnected placement.
const MAX_REPAIR_ROUNDS: u32 = 10_000;

/// What happens when every rejection attempt was disconnected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConnectivityFallback {
    /// Give up with `ConnectivityUnreachable`.
    Fail,
    /// Keep the last attempt's largest component and re-draw every other
    /// node uniformly, round after round, until the graph is connected.
    RelocateStragglers,
}

#[derive(Debug, Error, PartialEq)]
pub enum TopologyError {
    #[error("no connected topology after {attempts} attempts (n={node_count}, density={density})")]
    ConnectivityUnreachable {
        attempts: u32,
        node_count: usize,
        density: f64,
    },
    #[error("invalid topology config: {0}")]
    InvalidConfig(String),
    #[error("invalid topology document: {0}")]
    InvalidDocument(String),
}

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for NodeId {
    fn from(i: usize) -> Self {
        NodeId(u32::try_from(i).expect("node index fits in u32"))
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TopologyConfig {
    pub node_count: usize,
    /// Expected number of neighbours per radio range.
    pub target_density: f64,
    pub radio_range: f64,
    pub seed: u64,
    /// Rejection-sampling budget.
    pub max_regen_attempts: u32,
    pub fallback: ConnectivityFallback,
}

impl TopologyConfig {
    pub fn new(node_count: usize, target_density: f64, seed: u64) -> Self {
        Self {
            node_count,
            target_density,
            radio_range: 1.0,
            seed,
            max_regen_attempts: DEFAULT_MAX_REGEN_ATTEMPTS,
            fallback: ConnectivityFallback::Fail,
        }
    }

    fn validate(&self) -> Result<(), TopologyError> {
        if self.node_count < 2 {
            return Err(TopologyError::InvalidConfig("node_count must be at least 2".into()));
        }
        if !(self.target_density > 0.0 && self.target_density.is_finite()) {
            return Err(TopologyError::InvalidConfig("target_density must be positive".into()));
        }
        if !(self.radio_range > 0.0 && self.radio_range.is_finite()) {
            return Err(TopologyError::InvalidConfig("radio_range must be positive".into()));
        }
        if self.max_regen_attempts == 0 {
            return Err(TopologyError::InvalidConfig("max_regen_attempts must be positive".into()));
        }
        Ok(())
    }
}

/// Side of the square in which `node_count` uniform nodes see on average
/// `target_density` other nodes within `radio_range` (edge effects ignored).
pub fn side_length_for_density(node_count: usize, target_density: f64, radio_range: f64) -> f64 {
    ((node_count as f64 - 1.0) * PI * radio_range * radio_range / target_density).sqrt()
}

/// Static network: node positions plus unit-disk adjacency.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    positions: Vec<Point>,
    side_length: f64,
    radio_range: f64,
    seed: Option<u64>,
    adjacency: Vec<Vec<NodeId>>,
}

impl Topology {
    /// Builds the unit-disk graph over explicit positions. Used for hand-built
    /// fixtures and for reloading dumped topologies.
    pub fn from_positions(
        positions: Vec<Point>,
        radio_range: f64,
        side_length: f64,
    ) -> Result<Self, TopologyError> {
        if let Some(p) = positions.iter().find(|p| !p.is_finite()) {
            return Err(TopologyError::InvalidDocument(format!("non-finite position {p}")));
        }
        if radio_range.is_nan() || radio_range <= 0.0 {
            return Err(TopologyError::InvalidDocument("radio_range must be positive".into()));
        }
        let adjacency = unit_disk_adjacency(&positions, radio_range);
        Ok(Self {
            positions,
            side_length,
            radio_range,
            seed: None,
            adjacency,
        })
    }

    pub fn node_count(&self) -> usize {
        self.positions.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        (0..self.positions.len()).map(NodeId::from)
    }

    pub fn position(&self, n: NodeId) -> Point {
        self.positions[n.index()]
    }

    pub fn positions(&self) -> &[Point] {
        &self.positions
    }

    pub fn neighbors(&self, n: NodeId) -> &[NodeId] {
        &self.adjacency[n.index()]
    }

    pub fn side_length(&self) -> f64 {
        self.side_length
    }

    pub fn radio_range(&self) -> f64 {
        self.radio_range
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// The deployment square `[0, L] × [0, L]`.
    pub fn bounds(&self) -> Rect {
        Rect::from_corners(Point::new(0.0, 0.0), Point::new(self.side_length, self.side_length))
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn mean_degree(&self) -> f64 {
        2.0 * self.edge_count() as f64 / self.node_count() as f64
    }
}

/// Closed-threshold unit-disk adjacency, built with a uniform grid of cell
/// size `range` so only the 3×3 surrounding cells are scanned.
fn unit_disk_adjacency(positions: &[Point], range: f64) -> Vec<Vec<NodeId>> {
    let n = positions.len();
    let mut adjacency = vec![Vec::new(); n];
    if n == 0 {
        return adjacency;
    }
    let min_x = positions.iter().map(|p| p.x).fold(f64::INFINITY, f64::min);
    let min_y = positions.iter().map(|p| p.y).fold(f64::INFINITY, f64::min);
    let cell = |p: Point| {
        (
            ((p.x - min_x) / range).floor() as i64,
            ((p.y - min_y) / range).floor() as i64,
        )
    };
    let mut grid: std::collections::HashMap<(i64, i64), Vec<usize>> =
        std::collections::HashMap::new();
    for (i, &p) in positions.iter().enumerate() {
        grid.entry(cell(p)).or_default().push(i);
    }
    let range2 = range * range;
    for (i, &p) in positions.iter().enumerate() {
        let (cx, cy) = cell(p);
        for gx in cx - 1..=cx + 1 {
            for gy in cy - 1..=cy + 1 {
                let Some(bucket) = grid.get(&(gx, gy)) else {
                    continue;
                };
                for &j in bucket {
                    if j == i {
                        continue;
                    }
                    let d2 = distance_squared(p, positions[j]);
                    if d2 > 0.0 && d2 <= range2 {
                        adjacency[i].push(NodeId::from(j));
                    }
                }
            }
        }
        adjacency[i].sort_unstable();
    }
    adjacency
}

/// How a generated topology was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GenerationReport {
    /// Rejection attempts drawn, including the accepted one.
    pub attempts: u32,
    /// Node re-draws made by the straggler fallback; zero for a plain
    /// rejection-sampled topology.
    pub relocations: usize,
}

/// Draws uniform placements until one is connected.
///
/// Attempt `k` uses the ChaCha stream `k` of the configured seed, so any
/// attempt can be regenerated on its own.
pub fn generate(config: &TopologyConfig) -> Result<Topology, TopologyError> {
    generate_with_report(config).map(|(t, _)| t)
}

pub fn generate_with_report(config: &TopologyConfig) -> Result<(Topology, GenerationReport), TopologyError> {
    config.validate()?;
    let side = side_length_for_density(config.node_count, config.target_density, config.radio_range);
    let draw = |rng: &mut ChaCha8Rng| Point::new(rng.gen::<f64>() * side, rng.gen::<f64>() * side);
    let mut last = None;
    for attempt in 0..config.max_regen_attempts {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(u64::from(attempt));
        let positions: Vec<Point> = (0..config.node_count).map(|_| draw(&mut rng)).collect();
        let mut topology = Topology::from_positions(positions, config.radio_range, side)?;
        if is_connected(&topology) {
            topology.seed = Some(config.seed);
            let report = GenerationReport {
                attempts: attempt + 1,
                relocations: 0,
            };
            return Ok((topology, report));
        }
        last = Some((topology, rng));
    }
    let unreachable = TopologyError::ConnectivityUnreachable {
        attempts: config.max_regen_attempts,
        node_count: config.node_count,
        density: config.target_density,
    };
    let (Some((mut topology, mut rng)), ConnectivityFallback::RelocateStragglers) = (last, config.fallback) else {
        return Err(unreachable);
    };
    let mut relocations = 0;
    for _ in 0..MAX_REPAIR_ROUNDS {
        let labels = component_labels(&topology);
        let mut sizes = vec![0usize; labels.iter().max().map_or(0, |m| m + 1)];
        for &l in &labels {
            sizes[l] += 1;
        }
        if sizes.len() == 1 {
            topology.seed = Some(config.seed);
            let report = GenerationReport {
                attempts: config.max_regen_attempts,
                relocations,
            };
            return Ok((topology, report));
        }
        // first maximum, i.e. the component holding the lowest node id on ties
        let giant = (0..sizes.len()).fold(0, |best, l| if sizes[l] > sizes[best] { l } else { best });
        let mut positions = topology.positions;
        for (i, p) in positions.iter_mut().enumerate() {
            if labels[i] != giant {
                *p = draw(&mut rng);
                relocations += 1;
            }
        }
        topology = Topology::from_positions(positions, config.radio_range, side)?;
    }
    Err(unreachable)
}

/// Connected-component label per node; labels are numbered in order of each
/// component's lowest node id.
pub fn component_labels(t: &Topology) -> Vec<usize> {
    const UNSEEN: usize = usize::MAX;
    let mut labels = vec![UNSEEN; t.node_count()];
    let mut next = 0;
    for start in 0..t.node_count() {
        if labels[start] != UNSEEN {
            continue;
        }
        labels[start] = next;
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for v in t.neighbors(NodeId::from(u)) {
                if labels[v.index()] == UNSEEN {
                    labels[v.index()] = next;
                    queue.push_back(v.index());
                }
            }
        }
        next += 1;
    }
    labels
}

pub fn is_connected(t: &Topology) -> bool {
    let n = t.node_count();
    if n == 0 {
        return true;
    }
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([NodeId(0)]);
    seen[0] = true;
    let mut visited = 1;
    while let Some(u) = queue.pop_front() {
        for &v in t.neighbors(u) {
            if !seen[v.index()] {
                seen[v.index()] = true;
                visited += 1;
                queue.push_back(v);
            }
        }
    }
    visited == n
}

pub fn nodes_in_region(t: &Topology, r: &Rect) -> Vec<NodeId> {
    t.nodes().filter(|&n| rect_contains(r, t.position(n))).collect()
}

/// JSON fixture form of a topology.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopologyDocument {
    pub generator: String,
    pub seed: Option<u64>,
    pub side_length: f64,
    pub radio_range: f64,
    pub positions: Vec<[f64; 2]>,
    /// Gabriel-graph edges `(u, v)` with `u < v`, for cross-checking.
    #[serde(default)]
    pub planar_edges: Vec<[NodeId; 2]>,
}

impl TopologyDocument {
    pub fn new(t: &Topology, planar_edges: Vec<[NodeId; 2]>) -> Self {
        Self {
            generator: GENERATOR_NAME.to_string(),
            seed: t.seed,
            side_length: t.side_length,
            radio_range: t.radio_range,
            positions: t.positions.iter().map(|p| [p.x, p.y]).collect(),
            planar_edges,
        }
    }

    pub fn to_topology(&self) -> Result<Topology, TopologyError> {
        let positions = self.positions.iter().map(|&[x, y]| Point::new(x, y)).collect();
        let mut t = Topology::from_positions(positions, self.radio_range, self.side_length)?;
        t.seed = self.seed;
        Ok(t)
    }
}
