//! Monte-Carlo checks on the generator and end-to-end harness invariants.

use geocast::harness::{
    emit, region_for, render, run_experiment_detailed, ExperimentConfig, JsonReport, OutputFormat, OutputMetadata,
    RegionPlacement, CSV_HEADER, WORKERS_ENV,
};
use geocast::oracle::Oracle;
use geocast::simulator::Protocol;
use geocast::topology::{
    generate, generate_with_report, is_connected, nodes_in_region, ConnectivityFallback, TopologyConfig,
};

fn sweep_policy(n: usize, density: f64, seed: u64) -> TopologyConfig {
    let mut tc = TopologyConfig::new(n, density, seed);
    tc.max_regen_attempts = 100;
    tc.fallback = ConnectivityFallback::RelocateStragglers;
    tc
}

#[test]
fn mean_degree_small_networks() {
    let mut total = 0.0;
    for seed in 0..1000 {
        let t = generate(&TopologyConfig::new(200, 10.0, seed)).unwrap();
        total += t.mean_degree();
    }
    let mean = total / 1000.0;
    assert!((mean - 10.0).abs() <= 1.5, "mean degree {mean}");
}

#[test]
fn mean_degree_full_size_all_densities() {
    for d in (6..=20).step_by(2) {
        let d = f64::from(d);
        let mean = (0..100)
            .map(|seed| generate(&sweep_policy(1000, d, seed)).unwrap().mean_degree())
            .sum::<f64>()
            / 100.0;
        assert!((mean - d).abs() <= 0.15 * d, "density {d}: mean degree {mean}");
    }
}

#[test]
fn region_population_near_forty() {
    let mut total = 0usize;
    for seed in 0..1000 {
        let t = generate(&sweep_policy(1000, 12.0, seed)).unwrap();
        let region = region_for(t.side_length(), 1.0 / 25.0, RegionPlacement::Center);
        total += nodes_in_region(&t, &region).len();
    }
    let mean = total as f64 / 1000.0;
    assert!((mean - 40.0).abs() <= 4.0, "mean region population {mean}");
}

#[test]
fn relocation_only_kicks_in_when_sparse() {
    let (_, dense) = generate_with_report(&sweep_policy(1000, 20.0, 3)).unwrap();
    assert_eq!(dense.relocations, 0);
    let (t, sparse) = generate_with_report(&sweep_policy(1000, 6.0, 3)).unwrap();
    assert!(sparse.relocations > 0);
    assert!(is_connected(&t));
    assert!(Oracle::new(&t).connected());
}

fn small_config() -> ExperimentConfig {
    ExperimentConfig {
        node_count: 200,
        densities: vec![8.0, 14.0],
        runs_per_density: 6,
        senders_per_run: 4,
        ..ExperimentConfig::default()
    }
}

#[test]
fn sweep_is_deterministic_and_worker_independent() {
    let cfg = small_config();
    std::env::set_var(WORKERS_ENV, "1");
    let a = run_experiment_detailed(&cfg).unwrap();
    std::env::set_var(WORKERS_ENV, "3");
    let b = run_experiment_detailed(&cfg).unwrap();
    std::env::remove_var(WORKERS_ENV);
    assert_eq!(a.rows, b.rows);
    assert_eq!(a.samples, b.samples);
    let meta = OutputMetadata::for_config(&cfg);
    assert_eq!(
        render(&a.rows, OutputFormat::Csv, &meta).unwrap(),
        render(&b.rows, OutputFormat::Csv, &meta).unwrap()
    );
}

#[test]
fn sweep_rows_are_consistent() {
    let cfg = small_config();
    let out = run_experiment_detailed(&cfg).unwrap();
    assert_eq!(out.rows.len(), cfg.protocols.len() * cfg.densities.len());
    for row in &out.rows {
        row.check_consistency().unwrap();
        assert_eq!(row.run_count, cfg.runs_per_density);
        assert!((0.0..=1.0).contains(&row.mean_delivery_rate));
        assert!(row.mean_total_transmissions >= row.mean_overhead);
    }
    for &d in &cfg.densities {
        let flood = out.row("flood", d).unwrap();
        assert_eq!(flood.mean_overhead, 200.0);
        assert_eq!(flood.mean_delivery_rate, 1.0);
        assert_eq!(flood.normalized_overhead, 200.0);
        assert_eq!(out.samples_for("gfg", d).len(), 6);
    }
    let gfpg = out.tally("gfpg").unwrap();
    assert_eq!(gfpg.failed, 0);
    assert_eq!(gfpg.checked, 2 * 6 * 4);
}

#[test]
fn paired_design_shares_topologies() {
    // dropping protocols from the sweep must not change the others' numbers
    let all = run_experiment_detailed(&small_config()).unwrap();
    let only = run_experiment_detailed(&ExperimentConfig {
        protocols: vec![Protocol::Pcn],
        ..small_config()
    })
    .unwrap();
    for &d in &small_config().densities {
        assert_eq!(all.row("pcn", d), only.row("pcn", d));
    }
}

#[test]
fn emitted_files_round_trip() {
    let cfg = small_config();
    let out = run_experiment_detailed(&cfg).unwrap();
    let meta = OutputMetadata::for_config(&cfg);
    let dir = tempfile::tempdir().unwrap();

    let json_path = dir.path().join("rows.json");
    emit(&out.rows, OutputFormat::Json, &json_path, &meta).unwrap();
    let back: JsonReport = serde_json::from_slice(&std::fs::read(&json_path).unwrap()).unwrap();
    assert_eq!(back.rows, out.rows);
    assert_eq!(back.metadata, meta);

    let csv_path = dir.path().join("rows.csv");
    emit(&out.rows, OutputFormat::Csv, &csv_path, &meta).unwrap();
    let first = std::fs::read(&csv_path).unwrap();
    emit(&out.rows, OutputFormat::Csv, &csv_path, &meta).unwrap();
    assert_eq!(first, std::fs::read(&csv_path).unwrap());
    let mut reader = csv::Reader::from_path(&csv_path).unwrap();
    assert_eq!(reader.headers().unwrap().iter().collect::<Vec<_>>().join(","), CSV_HEADER);
    assert_eq!(reader.records().count(), out.rows.len());

    let missing = dir.path().join("no/such/dir/rows.csv");
    let err = emit(&out.rows, OutputFormat::Csv, &missing, &meta).unwrap_err();
    assert!(err.to_string().contains("no/such/dir"));
}

#[test]
fn border_sweep_runs_enhanced_gfpg_star() {
    let cfg = ExperimentConfig {
        region_placement: RegionPlacement::Border,
        protocols: vec![Protocol::GfpgStar {
            border_enhancements: false,
        }],
        ..small_config()
    };
    let out = run_experiment_detailed(&cfg).unwrap();
    assert!(out.rows.iter().all(|r| r.protocol == "gfpg-star"));
    assert_eq!(out.tally("gfpg-star").unwrap().checked, 2 * 6 * 4);
}
