use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use geocast::harness::{
    draw_senders, emit, region_for, render, run_experiment_detailed, ExperimentConfig, OutputFormat, OutputMetadata,
    RegionPlacement,
};
use geocast::oracle::{check_guarantee, oracle_report};
use geocast::planar::gabriel;
use geocast::simulator::{overhead, run_on_scene, Protocol, Scene};
use geocast::topology::{generate, ConnectivityFallback, NodeId, TopologyConfig, TopologyDocument};

#[derive(Parser)]
#[command(name = "geocast", version, about = "Geocast protocol simulator and sweep harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full density sweep; writes CSV or JSON metrics.
    Sweep(SweepArgs),
    /// One topology, one geocast.
    Single(SingleArgs),
    /// Oracle delivery check over a run matrix.
    Verify(VerifyArgs),
    /// Generate a topology and dump it as JSON.
    Topo(TopoArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Placement {
    Center,
    Border,
}

impl From<Placement> for RegionPlacement {
    fn from(p: Placement) -> Self {
        match p {
            Placement::Center => RegionPlacement::Center,
            Placement::Border => RegionPlacement::Border,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct MatrixArgs {
    #[arg(long, default_value_t = 1000)]
    nodes: usize,
    /// Comma-separated densities.
    #[arg(long, value_delimiter = ',', default_values_t = [6.0, 8.0, 10.0, 12.0, 14.0, 16.0, 18.0, 20.0])]
    densities: Vec<f64>,
    #[arg(long, default_value_t = 100)]
    runs: u64,
    #[arg(long, default_value_t = 10)]
    senders: usize,
    #[arg(long, default_value_t = 0.04)]
    region_fraction: f64,
    #[arg(long, value_enum, default_value_t = Placement::Center)]
    placement: Placement,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Rejection attempts before disconnected nodes are relocated.
    #[arg(long, default_value_t = 100)]
    max_regen_attempts: u32,
    /// Fail instead of relocating once the rejection budget is spent.
    #[arg(long)]
    strict_connectivity: bool,
    /// Directory for failed-delivery counterexamples.
    #[arg(long)]
    counterexamples: Option<PathBuf>,
}

impl MatrixArgs {
    fn config(&self, protocols: Vec<Protocol>) -> ExperimentConfig {
        ExperimentConfig {
            node_count: self.nodes,
            densities: self.densities.clone(),
            runs_per_density: self.runs,
            senders_per_run: self.senders,
            region_fraction: self.region_fraction,
            region_placement: self.placement.into(),
            protocols,
            base_seed: self.seed,
            max_regen_attempts: self.max_regen_attempts,
            connectivity_fallback: if self.strict_connectivity {
                ConnectivityFallback::Fail
            } else {
                ConnectivityFallback::RelocateStragglers
            },
            counterexample_dir: self.counterexamples.clone(),
            ..ExperimentConfig::default()
        }
    }
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    matrix: MatrixArgs,
    /// Comma-separated protocol names; all seven by default.
    #[arg(long, value_delimiter = ',')]
    protocols: Vec<String>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Defaults to the output file's extension, else CSV.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args)]
struct SingleArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10.0)]
    density: f64,
    #[arg(long, default_value = "gfpg-star")]
    protocol: String,
    /// Sender id; a random node outside the region when omitted.
    #[arg(long)]
    sender: Option<u32>,
    #[arg(long, default_value_t = 1000)]
    nodes: usize,
    #[arg(long, default_value_t = 0.04)]
    region_fraction: f64,
    #[arg(long, value_enum, default_value_t = Placement::Center)]
    placement: Placement,
    /// Print the event log.
    #[arg(long)]
    trace: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    matrix: MatrixArgs,
    #[arg(long, default_value = "gfpg")]
    protocol: String,
}

#[derive(Args)]
struct TopoArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10.0)]
    density: f64,
    #[arg(long, default_value_t = 1000)]
    nodes: usize,
    #[arg(long)]
    output: Option<PathBuf>,
}

/// Same generation policy as a sweep with default flags.
fn sweep_topology_config(nodes: usize, density: f64, seed: u64) -> TopologyConfig {
    let defaults = ExperimentConfig::default();
    let mut tc = TopologyConfig::new(nodes, density, seed);
    tc.max_regen_attempts = defaults.max_regen_attempts;
    tc.fallback = defaults.connectivity_fallback;
    tc
}

fn parse_protocol(name: &str) -> Result<Protocol, String> {
    Protocol::parse(name).ok_or_else(|| format!("unknown protocol `{name}` (expected one of {})", Protocol::NAMES.join(", ")))
}

fn write_out(output: Option<&PathBuf>, bytes: &[u8]) -> Result<(), String> {
    match output {
        Some(p) => std::fs::write(p, bytes).map_err(|e| format!("{}: {e}", p.display())),
        None => std::io::stdout().write_all(bytes).map_err(|e| e.to_string()),
    }
}

fn sweep(args: SweepArgs) -> Result<ExitCode, String> {
    let protocols = if args.protocols.is_empty() {
        Protocol::NAMES.iter().map(|n| parse_protocol(n)).collect::<Result<_, _>>()?
    } else {
        args.protocols.iter().map(|n| parse_protocol(n)).collect::<Result<_, _>>()?
    };
    let mut config = args.matrix.config(protocols);
    config.output_format = match (args.format, &args.output) {
        (Some(Format::Csv), _) => OutputFormat::Csv,
        (Some(Format::Json), _) => OutputFormat::Json,
        (None, Some(p)) => OutputFormat::from_path(p),
        (None, None) => OutputFormat::Csv,
    };
    config.output_path = args.output.clone();
    let outcome = run_experiment_detailed(&config).map_err(|e| e.to_string())?;
    let meta = OutputMetadata::for_config(&config);
    match &config.output_path {
        Some(p) => emit(&outcome.rows, config.output_format, p, &meta).map_err(|e| e.to_string())?,
        None => {
            let bytes = render(&outcome.rows, config.output_format, &meta).map_err(|e| e.to_string())?;
            write_out(None, &bytes)?;
        }
    }
    for t in &outcome.guarantees {
        eprintln!("{}: {}/{} geocasts matched the oracle", t.protocol, t.checked - t.failed, t.checked);
    }
    Ok(ExitCode::SUCCESS)
}

fn single(args: SingleArgs) -> Result<ExitCode, String> {
    let protocol = parse_protocol(&args.protocol)?;
    let placement: RegionPlacement = args.placement.into();
    let protocol = protocol.with_border_enhancements(placement == RegionPlacement::Border);
    let t = generate(&sweep_topology_config(args.nodes, args.density, args.seed)).map_err(|e| e.to_string())?;
    let region = region_for(t.side_length(), args.region_fraction, placement);
    let g = gabriel(&t);
    let scene = Scene::new(&t, &g, region);
    if scene.region_nodes().is_empty() {
        return Err(format!("seed {}: geocast region contains no nodes", args.seed));
    }
    let sender = match args.sender {
        Some(s) if (s as usize) < t.node_count() => NodeId(s),
        Some(s) => return Err(format!("sender {s} out of range (0..{})", t.node_count())),
        None => *draw_senders(&t, &region, 1, args.seed)
            .first()
            .ok_or("every node lies inside the region")?,
    };
    let mut trace = Vec::new();
    let result =
        run_on_scene(&scene, protocol, sender, args.trace.then_some(&mut trace)).map_err(|e| e.to_string())?;
    let mut out = String::new();
    for entry in &trace {
        out.push_str(&format!("{entry}\n"));
    }
    let population = scene.region_nodes().len();
    out.push_str(&format!(
        "protocol={} seed={} density={} sender={} region_nodes={} delivered={} delivery_rate={:.4} overhead={} total_tx={} path_len={}\n",
        protocol,
        args.seed,
        args.density,
        sender,
        population,
        result.delivered_region_nodes.len(),
        result.delivered_region_nodes.len() as f64 / population as f64,
        overhead(&result),
        result.total_transmissions,
        result.unicast_path_length,
    ));
    if protocol.claims_full_delivery() {
        let verdict = check_guarantee(&result, &oracle_report(&t, sender, &region), Some(args.seed));
        out.push_str(if verdict.is_pass() { "oracle: PASS\n" } else { "oracle: FAIL\n" });
    }
    write_out(None, out.as_bytes())?;
    Ok(ExitCode::SUCCESS)
}

fn verify(args: VerifyArgs) -> Result<ExitCode, String> {
    let protocol = parse_protocol(&args.protocol)?;
    if !protocol.claims_full_delivery() {
        return Err(format!("{protocol} makes no delivery guarantee to verify"));
    }
    let config = args.matrix.config(vec![protocol]);
    let outcome = run_experiment_detailed(&config).map_err(|e| e.to_string())?;
    let tally = outcome.guarantees.first().cloned().unwrap_or_default();
    for c in &outcome.counterexamples {
        eprintln!(
            "FAIL density={} run={} sender={} missed={}",
            c.density,
            c.run,
            c.sender,
            c.missed.len()
        );
    }
    if tally.runs_passed == tally.runs_checked {
        println!("{}/{} PASS", tally.runs_passed, tally.runs_checked);
        Ok(ExitCode::SUCCESS)
    } else {
        println!(
            "{}/{} PASS, {} FAIL",
            tally.runs_passed,
            tally.runs_checked,
            tally.runs_checked - tally.runs_passed
        );
        Ok(ExitCode::FAILURE)
    }
}

fn topo(args: TopoArgs) -> Result<ExitCode, String> {
    let t = generate(&sweep_topology_config(args.nodes, args.density, args.seed)).map_err(|e| e.to_string())?;
    let doc = TopologyDocument::new(&t, gabriel(&t).edges());
    let mut json = serde_json::to_vec_pretty(&doc).map_err(|e| e.to_string())?;
    json.push(b'\n');
    write_out(args.output.as_ref(), &json)?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Sweep(a) => sweep(a),
        Command::Single(a) => single(a),
        Command::Verify(a) => verify(a),
        Command::Topo(a) => topo(a),
    };
    outcome.unwrap_or_else(|msg| {
        eprintln!("geocast: {msg}");
        ExitCode::from(2)
    })
}
