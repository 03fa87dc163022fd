//! Density sweeps over random topologies, paired across protocols.
//!
//! Every (density, run) pair gets one connected topology and one set of
//! senders, and every protocol in the sweep is executed on exactly those.
//! Runs are independent jobs; results are collected in job order so the
//! output does not depend on thread scheduling.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Point, Rect};
use crate::oracle::{check_guarantee, Counterexample, Oracle, Verdict};
use crate::planar::gabriel;
use crate::simulator::{overhead, run_on_scene, Protocol, Scene, SimError};
use crate::topology::{generate_with_report, ConnectivityFallback, GenerationReport, NodeId, Topology, TopologyConfig, TopologyDocument, TopologyError, GENERATOR_NAME};

/// Worker-count override for sweeps.
pub const WORKERS_ENV: &str = "GEOCAST_WORKERS";

/// Build identifier embedded in JSON output.
pub const BUILD_DESCRIBE: &str = env!("GEOCAST_BUILD_DESCRIBE");

/// Placement resamples allowed before a run is abandoned.
const MAX_EMPTY_REGION_RESAMPLES: u32 = 64;

pub const CSV_HEADER: &str =
    "protocol,density,delivery_rate,overhead,total_tx,normalized_overhead,runs,delivery_se,overhead_se";

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid experiment config: {0}")]
    Config(String),
    #[error("density {density}: {source}")]
    Topology {
        density: f64,
        #[source]
        source: TopologyError,
    },
    #[error("density {density}, run {run}: region stayed empty after {resamples} placements")]
    EmptyRegion { density: f64, run: u64, resamples: u32 },
    #[error("density {density}, run {run}, {protocol}: {source}")]
    Simulation {
        density: f64,
        run: u64,
        protocol: String,
        #[source]
        source: SimError,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("row {protocol}@{density}: normalized overhead {stored} does not match {recomputed}")]
    InconsistentRow {
        protocol: String,
        density: f64,
        stored: f64,
        recomputed: f64,
    },
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegionPlacement {
    Center,
    /// Flush against the midpoint of the west edge.
    Border,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    /// Picks JSON for `.json` paths and CSV otherwise.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => OutputFormat::Json,
            _ => OutputFormat::Csv,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub node_count: usize,
    pub densities: Vec<f64>,
    pub runs_per_density: u64,
    pub senders_per_run: usize,
    pub region_fraction: f64,
    pub region_placement: RegionPlacement,
    pub protocols: Vec<Protocol>,
    pub base_seed: u64,
    /// Rejection-sampling budget per topology.
    pub max_regen_attempts: u32,
    /// Applied once the budget is spent; sparse 1000-node placements are
    /// practically never connected, so sweeps default to relocation.
    pub connectivity_fallback: ConnectivityFallback,
    pub output_path: Option<PathBuf>,
    pub output_format: OutputFormat,
    /// Where failed delivery checks are dumped, if anywhere.
    pub counterexample_dir: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            node_count: 1000,
            densities: (6..=20).step_by(2).map(f64::from).collect(),
            runs_per_density: 100,
            senders_per_run: 10,
            region_fraction: 1.0 / 25.0,
            region_placement: RegionPlacement::Center,
            protocols: Protocol::NAMES.iter().filter_map(|n| Protocol::parse(n)).collect(),
            base_seed: 0,
            max_regen_attempts: 100,
            connectivity_fallback: ConnectivityFallback::RelocateStragglers,
            output_path: None,
            output_format: OutputFormat::Csv,
            counterexample_dir: None,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        let fail = |m: &str| Err(HarnessError::Config(m.to_string()));
        if self.node_count < 2 {
            return fail("node_count must be at least 2");
        }
        if self.densities.is_empty() {
            return fail("at least one density is required");
        }
        if self.densities.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
            return fail("densities must be positive");
        }
        if self.runs_per_density == 0 {
            return fail("runs_per_density must be positive");
        }
        if self.senders_per_run == 0 {
            return fail("senders_per_run must be positive");
        }
        if !(self.region_fraction > 0.0 && self.region_fraction < 1.0) {
            return fail("region_fraction must lie in (0, 1)");
        }
        if self.protocols.is_empty() {
            return fail("at least one protocol is required");
        }
        if self.max_regen_attempts == 0 {
            return fail("max_regen_attempts must be positive");
        }
        Ok(())
    }

    /// Protocol variant actually run: border sweeps turn on the GFPG*
    /// border enhancements, centre sweeps turn them off.
    pub fn effective_protocol(&self, p: Protocol) -> Protocol {
        p.with_border_enhancements(self.region_placement == RegionPlacement::Border)
    }
}

/// Square geocast region of area `fraction · side²`.
pub fn region_for(side: f64, fraction: f64, placement: RegionPlacement) -> Rect {
    let s = side * fraction.sqrt();
    let mid = side / 2.0;
    match placement {
        RegionPlacement::Center => Rect::from_corners(
            Point::new(mid - s / 2.0, mid - s / 2.0),
            Point::new(mid + s / 2.0, mid + s / 2.0),
        ),
        RegionPlacement::Border => {
            Rect::from_corners(Point::new(0.0, mid - s / 2.0), Point::new(s, mid + s / 2.0))
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Topology seed of one run: `base_seed ⊕ hash(density, run, resample)`.
pub fn run_seed(base_seed: u64, density: f64, run: u64, resample: u32) -> u64 {
    let h = splitmix64(density.to_bits());
    let h = splitmix64(h ^ run);
    let h = splitmix64(h ^ u64::from(resample));
    base_seed ^ h
}

/// Distinct senders drawn uniformly from the nodes outside `region`.
pub fn draw_senders(t: &Topology, region: &Rect, count: usize, seed: u64) -> Vec<NodeId> {
    let outside: Vec<NodeId> = t.nodes().filter(|&n| !region.contains(t.position(n))).collect();
    // Salted so the draw is not a replay of the position stream.
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(seed ^ 0x5E4D_E125));
    let k = count.min(outside.len());
    sample(&mut rng, outside.len(), k).into_iter().map(|i| outside[i]).collect()
}

/// One placed experiment instance.
pub struct Instance {
    pub topology: Topology,
    pub region: Rect,
    pub senders: Vec<NodeId>,
    pub seed: u64,
    pub empty_region_resamples: u32,
    pub generation: GenerationReport,
}

/// Builds the topology, region and senders of run `run` at `density`.
pub fn place_instance(config: &ExperimentConfig, density: f64, run: u64) -> Result<Instance, HarnessError> {
    for resample in 0..MAX_EMPTY_REGION_RESAMPLES {
        let seed = run_seed(config.base_seed, density, run, resample);
        let mut tc = TopologyConfig::new(config.node_count, density, seed);
        tc.max_regen_attempts = config.max_regen_attempts;
        tc.fallback = config.connectivity_fallback;
        let (topology, generation) = generate_with_report(&tc).map_err(|source| HarnessError::Topology { density, source })?;
        let region = region_for(topology.side_length(), config.region_fraction, config.region_placement);
        if !topology.nodes().any(|n| region.contains(topology.position(n))) {
            continue;
        }
        let senders = draw_senders(&topology, &region, config.senders_per_run, seed);
        return Ok(Instance {
            topology,
            region,
            senders,
            seed,
            empty_region_resamples: resample,
            generation,
        });
    }
    Err(HarnessError::EmptyRegion {
        density,
        run,
        resamples: MAX_EMPTY_REGION_RESAMPLES,
    })
}

/// Per-run means over that run's senders, for one protocol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSample {
    pub protocol: String,
    pub density: f64,
    pub run: u64,
    pub delivery_rate: f64,
    pub overhead: f64,
    pub total_transmissions: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub protocol: String,
    pub density: f64,
    pub mean_delivery_rate: f64,
    pub mean_overhead: f64,
    pub mean_total_transmissions: f64,
    pub normalized_overhead: f64,
    pub run_count: u64,
    pub delivery_se: f64,
    pub overhead_se: f64,
    pub total_transmissions_se: f64,
    /// Global flooding overhead used by the normalisation.
    pub node_count: usize,
}

/// Delivery-weighted overhead with global flooding covering the shortfall.
pub fn normalized_overhead(delivery_rate: f64, overhead: f64, flood_overhead: f64) -> f64 {
    delivery_rate * overhead + (1.0 - delivery_rate) * flood_overhead
}

impl MetricsRow {
    pub fn recomputed_normalized_overhead(&self) -> f64 {
        normalized_overhead(self.mean_delivery_rate, self.mean_overhead, self.node_count as f64)
    }

    pub fn check_consistency(&self) -> Result<(), HarnessError> {
        let recomputed = self.recomputed_normalized_overhead();
        if (recomputed - self.normalized_overhead).abs() > 1e-9 * recomputed.abs().max(1.0) {
            return Err(HarnessError::InconsistentRow {
                protocol: self.protocol.clone(),
                density: self.density,
                stored: self.normalized_overhead,
                recomputed,
            });
        }
        Ok(())
    }
}

/// Oracle tally for protocols that claim full delivery.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GuaranteeTally {
    pub protocol: String,
    pub checked: u64,
    pub failed: u64,
    /// Runs whose every sender passed.
    pub runs_checked: u64,
    pub runs_passed: u64,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub rows: Vec<MetricsRow>,
    pub samples: Vec<RunSample>,
    pub guarantees: Vec<GuaranteeTally>,
    pub counterexamples: Vec<Counterexample>,
    pub empty_region_resamples: u64,
    /// Topologies that needed straggler relocation to become connected.
    pub relocated_topologies: u64,
}

impl ExperimentOutcome {
    pub fn row(&self, protocol: &str, density: f64) -> Option<&MetricsRow> {
        self.rows.iter().find(|r| r.protocol == protocol && r.density == density)
    }

    /// Per-run samples of one protocol at one density, ordered by run.
    pub fn samples_for(&self, protocol: &str, density: f64) -> Vec<&RunSample> {
        self.samples
            .iter()
            .filter(|s| s.protocol == protocol && s.density == density)
            .collect()
    }

    pub fn tally(&self, protocol: &str) -> Option<&GuaranteeTally> {
        self.guarantees.iter().find(|g| g.protocol == protocol)
    }
}

struct RunOutput {
    samples: Vec<RunSample>,
    /// (protocol index, geocasts checked, geocasts failed)
    checks: Vec<(usize, u64, u64)>,
    counterexamples: Vec<Counterexample>,
    resamples: u32,
    relocated: bool,
}

fn execute_run(config: &ExperimentConfig, density: f64, run: u64) -> Result<RunOutput, HarnessError> {
    let inst = place_instance(config, density, run)?;
    let planar = gabriel(&inst.topology);
    let scene = Scene::new(&inst.topology, &planar, inst.region);
    let population = scene.region_nodes().len() as f64;
    let needs_oracle = config.protocols.iter().any(Protocol::claims_full_delivery);
    let oracle = needs_oracle.then(|| Oracle::new(&inst.topology));

    let mut out = RunOutput {
        samples: Vec::with_capacity(config.protocols.len()),
        checks: Vec::new(),
        counterexamples: Vec::new(),
        resamples: inst.empty_region_resamples,
        relocated: inst.generation.relocations > 0,
    };
    for (pi, &base) in config.protocols.iter().enumerate() {
        let protocol = config.effective_protocol(base);
        let (mut delivery, mut ovh, mut tx) = (0.0, 0.0, 0.0);
        let (mut checked, mut failed) = (0, 0);
        for &sender in &inst.senders {
            let result = run_on_scene(&scene, protocol, sender, None).map_err(|source| {
                HarnessError::Simulation {
                    density,
                    run,
                    protocol: protocol.name().to_string(),
                    source,
                }
            })?;
            delivery += result.delivered_region_nodes.len() as f64 / population;
            ovh += overhead(&result) as f64;
            tx += result.total_transmissions as f64;
            if let (true, Some(oracle)) = (protocol.claims_full_delivery(), &oracle) {
                let report = oracle.report(sender, &inst.region);
                checked += 1;
                if let Verdict::Fail { missed, .. } = check_guarantee(&result, &report, Some(inst.seed)) {
                    failed += 1;
                    out.counterexamples.push(Counterexample {
                        protocol: protocol.name().to_string(),
                        density,
                        run,
                        sender,
                        region: inst.region,
                        missed,
                        topology: TopologyDocument::new(&inst.topology, planar.edges()),
                    });
                }
            }
        }
        let k = inst.senders.len() as f64;
        out.samples.push(RunSample {
            protocol: protocol.name().to_string(),
            density,
            run,
            delivery_rate: delivery / k,
            overhead: ovh / k,
            total_transmissions: tx / k,
        });
        if protocol.claims_full_delivery() {
            out.checks.push((pi, checked, failed));
        }
    }
    Ok(out)
}

fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn worker_pool() -> Result<rayon::ThreadPool, HarnessError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(k) = std::env::var(WORKERS_ENV).ok().and_then(|v| v.parse::<usize>().ok()) {
        builder = builder.num_threads(k);
    }
    builder.build().map_err(|e| HarnessError::ThreadPool(e.to_string()))
}

/// Runs the sweep and keeps per-run samples and oracle results.
pub fn run_experiment_detailed(config: &ExperimentConfig) -> Result<ExperimentOutcome, HarnessError> {
    config.validate()?;
    let jobs: Vec<(f64, u64)> = config
        .densities
        .iter()
        .flat_map(|&d| (0..config.runs_per_density).map(move |r| (d, r)))
        .collect();
    let pool = worker_pool()?;
    let outputs: Vec<RunOutput> = pool.install(|| {
        jobs.par_iter()
            .map(|&(d, r)| execute_run(config, d, r))
            .collect::<Result<Vec<_>, _>>()
    })?;

    let names: Vec<String> = config
        .protocols
        .iter()
        .map(|&p| config.effective_protocol(p).name().to_string())
        .collect();
    let mut samples = Vec::new();
    let mut counterexamples = Vec::new();
    let mut guarantees: Vec<GuaranteeTally> = Vec::new();
    let mut empty_region_resamples = 0u64;
    let mut relocated_topologies = 0u64;
    for out in outputs {
        empty_region_resamples += u64::from(out.resamples);
        relocated_topologies += u64::from(out.relocated);
        for (pi, checked, failed) in out.checks {
            let name = &names[pi];
            let tally = match guarantees.iter().position(|g| &g.protocol == name) {
                Some(i) => &mut guarantees[i],
                None => {
                    guarantees.push(GuaranteeTally {
                        protocol: name.clone(),
                        ..Default::default()
                    });
                    guarantees.last_mut().unwrap()
                }
            };
            tally.checked += checked;
            tally.failed += failed;
            tally.runs_checked += 1;
            if failed == 0 {
                tally.runs_passed += 1;
            }
        }
        samples.extend(out.samples);
        counterexamples.extend(out.counterexamples);
    }

    if let Some(dir) = &config.counterexample_dir {
        for c in &counterexamples {
            c.write_to(dir).map_err(|source| HarnessError::Io {
                path: dir.join(c.file_name()),
                source,
            })?;
        }
    }

    let mut rows = Vec::new();
    for name in &names {
        for &density in &config.densities {
            let picked: Vec<&RunSample> = samples
                .iter()
                .filter(|s| &s.protocol == name && s.density == density)
                .collect();
            let col = |f: fn(&RunSample) -> f64| picked.iter().map(|s| f(s)).collect::<Vec<f64>>();
            let (delivery, delivery_se) = mean_and_se(&col(|s| s.delivery_rate));
            let (ovh, overhead_se) = mean_and_se(&col(|s| s.overhead));
            let (tx, total_transmissions_se) = mean_and_se(&col(|s| s.total_transmissions));
            rows.push(MetricsRow {
                protocol: name.clone(),
                density,
                mean_delivery_rate: delivery,
                mean_overhead: ovh,
                mean_total_transmissions: tx,
                normalized_overhead: normalized_overhead(delivery, ovh, config.node_count as f64),
                run_count: picked.len() as u64,
                delivery_se,
                overhead_se,
                total_transmissions_se,
                node_count: config.node_count,
            });
        }
    }

    Ok(ExperimentOutcome {
        rows,
        samples,
        guarantees,
        counterexamples,
        empty_region_resamples,
        relocated_topologies,
    })
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<MetricsRow>, HarnessError> {
    run_experiment_detailed(config).map(|o| o.rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputMetadata {
    pub base_seed: u64,
    pub generator: String,
    pub build: String,
    pub node_count: usize,
    pub runs_per_density: u64,
    pub senders_per_run: usize,
    pub region_fraction: f64,
    pub region_placement: RegionPlacement,
}

impl OutputMetadata {
    pub fn for_config(config: &ExperimentConfig) -> Self {
        Self {
            base_seed: config.base_seed,
            generator: GENERATOR_NAME.to_string(),
            build: BUILD_DESCRIBE.to_string(),
            node_count: config.node_count,
            runs_per_density: config.runs_per_density,
            senders_per_run: config.senders_per_run,
            region_fraction: config.region_fraction,
            region_placement: config.region_placement,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonReport {
    pub metadata: OutputMetadata,
    pub rows: Vec<MetricsRow>,
}

#[derive(Serialize)]
struct CsvRecord<'a> {
    protocol: &'a str,
    density: f64,
    delivery_rate: f64,
    overhead: f64,
    total_tx: f64,
    normalized_overhead: f64,
    runs: u64,
    delivery_se: f64,
    overhead_se: f64,
}

/// Writes the rows as CSV or JSON, checking each row's normalisation first.
pub fn emit(
    rows: &[MetricsRow],
    format: OutputFormat,
    path: &Path,
    metadata: &OutputMetadata,
) -> Result<(), HarnessError> {
    let bytes = render(rows, format, metadata).map_err(|e| e.at(path))?;
    fs::write(path, bytes).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })
}

impl HarnessError {
    fn at(self, path: &Path) -> Self {
        match self {
            HarnessError::Csv { source, .. } => HarnessError::Csv {
                path: path.to_path_buf(),
                source,
            },
            HarnessError::Json { source, .. } => HarnessError::Json {
                path: path.to_path_buf(),
                source,
            },
            other => other,
        }
    }
}

/// Serialises the rows in memory; the same bytes `emit` writes.
pub fn render(rows: &[MetricsRow], format: OutputFormat, metadata: &OutputMetadata) -> Result<Vec<u8>, HarnessError> {
    for row in rows {
        row.check_consistency()?;
    }
    let stdout = || PathBuf::from("-");
    match format {
        OutputFormat::Csv => {
            if rows.is_empty() {
                return Ok(format!("{CSV_HEADER}\n").into_bytes());
            }
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in rows {
                w.serialize(CsvRecord {
                    protocol: &r.protocol,
                    density: r.density,
                    delivery_rate: r.mean_delivery_rate,
                    overhead: r.mean_overhead,
                    total_tx: r.mean_total_transmissions,
                    normalized_overhead: r.normalized_overhead,
                    runs: r.run_count,
                    delivery_se: r.delivery_se,
                    overhead_se: r.overhead_se,
                })
                .map_err(|source| HarnessError::Csv { path: stdout(), source })?;
            }
            w.into_inner().map_err(|e| HarnessError::Io {
                path: stdout(),
                source: e.into_error(),
            })
        }
        OutputFormat::Json => {
            let report = JsonReport {
                metadata: metadata.clone(),
                rows: rows.to_vec(),
            };
            let mut out =
                serde_json::to_vec_pretty(&report).map_err(|source| HarnessError::Json { path: stdout(), source })?;
            out.push(b'\n');
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(protocol: &str, density: f64, rate: f64, overhead: f64) -> MetricsRow {
        MetricsRow {
            protocol: protocol.into(),
            density,
            mean_delivery_rate: rate,
            mean_overhead: overhead,
            mean_total_transmissions: overhead,
            normalized_overhead: normalized_overhead(rate, overhead, 1000.0),
            run_count: 3,
            delivery_se: 0.0,
            overhead_se: 0.0,
            total_transmissions_se: 0.0,
            node_count: 1000,
        }
    }

    #[test]
    fn normalized_overhead_example() {
        assert!((normalized_overhead(0.9, 50.0, 1000.0) - 145.0).abs() < 1e-9);
        assert_eq!(normalized_overhead(1.0, 1000.0, 1000.0), 1000.0);
    }

    #[test]
    fn inconsistent_rows_are_rejected() {
        let mut r = row("gfg", 6.0, 0.9, 50.0);
        assert!(r.check_consistency().is_ok());
        r.normalized_overhead = 100.0;
        assert!(matches!(r.check_consistency(), Err(HarnessError::InconsistentRow { .. })));
    }

    #[test]
    fn regions_have_the_requested_area() {
        let side = 20.0;
        for placement in [RegionPlacement::Center, RegionPlacement::Border] {
            let r = region_for(side, 1.0 / 25.0, placement);
            assert!((r.area() - side * side / 25.0).abs() < 1e-9);
            assert!((r.center().y - side / 2.0).abs() < 1e-12);
        }
        assert_eq!(region_for(side, 1.0 / 25.0, RegionPlacement::Border).min.x, 0.0);
        let c = region_for(side, 1.0 / 25.0, RegionPlacement::Center).center();
        assert!((c.x - 10.0).abs() < 1e-12);
    }

    #[test]
    fn seeds_differ_per_run_and_density() {
        let a = run_seed(0, 6.0, 0, 0);
        assert_ne!(a, run_seed(0, 6.0, 1, 0));
        assert_ne!(a, run_seed(0, 8.0, 0, 0));
        assert_ne!(a, run_seed(0, 6.0, 0, 1));
        assert_eq!(run_seed(5, 6.0, 0, 0), a ^ 5);
    }

    #[test]
    fn config_validation() {
        assert!(ExperimentConfig::default().validate().is_ok());
        let bad = ExperimentConfig {
            region_fraction: 1.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = ExperimentConfig {
            protocols: vec![],
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn border_sweeps_enable_enhancements() {
        let star = Protocol::GfpgStar {
            border_enhancements: false,
        };
        let mut cfg = ExperimentConfig::default();
        assert_eq!(cfg.effective_protocol(star), star);
        cfg.region_placement = RegionPlacement::Border;
        assert_eq!(
            cfg.effective_protocol(star),
            Protocol::GfpgStar {
                border_enhancements: true
            }
        );
        assert_eq!(cfg.effective_protocol(Protocol::Gfg), Protocol::Gfg);
    }

    #[test]
    fn csv_has_fixed_header() {
        let meta = OutputMetadata::for_config(&ExperimentConfig::default());
        let bytes = render(&[row("gfg", 6.0, 0.9, 50.0)], OutputFormat::Csv, &meta).unwrap();
        let text = String::from_utf8(bytes).unwrap();
        assert_eq!(text.lines().next(), Some(CSV_HEADER));
        assert_eq!(text.lines().count(), 2);
        let empty = render(&[], OutputFormat::Csv, &meta).unwrap();
        assert_eq!(String::from_utf8(empty).unwrap().trim_end(), CSV_HEADER);
    }
}
