use std::process::{Command, Output};

fn geocast(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_geocast")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn verify_reports_all_runs_passing() {
    let o = geocast(&["verify", "--protocol", "gfpg", "--runs", "200", "--densities", "6", "--senders", "1", "--nodes", "300"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).trim(), "200/200 PASS");
}

#[test]
fn verify_rejects_protocols_without_a_guarantee() {
    let o = geocast(&["verify", "--protocol", "pcn", "--runs", "1"]);
    assert!(!o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    assert_eq!(err.lines().count(), 1, "{err}");
}

#[test]
fn single_prints_a_trace() {
    let o = geocast(&["single", "--protocol", "gfpg-star", "--density", "6", "--seed", "7", "--trace"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert!(out.lines().count() > 10);
    assert!(out.lines().any(|l| l.starts_with("t=0 ")));
    assert!(out.contains("protocol=gfpg-star"));
    assert!(out.trim_end().ends_with("oracle: PASS"));
}

#[test]
fn sweep_csv_is_reproducible() {
    let args = ["sweep", "--nodes", "200", "--runs", "3", "--densities", "8,12", "--senders", "2"];
    let a = geocast(&args);
    let b = geocast(&args);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let out = stdout(&a);
    assert!(out.starts_with("protocol,density,delivery_rate,overhead,total_tx,normalized_overhead,runs,delivery_se,overhead_se\n"));
    assert_eq!(out.lines().count(), 1 + 7 * 2);
}

#[test]
fn sweep_writes_json_by_extension() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let o = geocast(&[
        "sweep", "--nodes", "100", "--runs", "2", "--densities", "10", "--senders", "2", "--protocols", "gfg,flood",
        "--output", path.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);
    assert!(v["metadata"]["generator"].as_str().unwrap().contains("ChaCha8"));
    assert!(v["metadata"]["build"].is_string());
}

#[test]
fn config_errors_exit_nonzero_with_one_line() {
    for args in [
        vec!["sweep", "--protocols", "nope", "--runs", "1"],
        vec!["sweep", "--region-fraction", "2", "--runs", "1"],
        vec!["single", "--sender", "5000"],
    ] {
        let o = geocast(&args);
        assert!(!o.status.success(), "{args:?}");
        assert_eq!(String::from_utf8_lossy(&o.stderr).trim().lines().count(), 1, "{args:?}");
    }
}

#[test]
fn topo_dumps_gabriel_edges() {
    let o = geocast(&["topo", "--nodes", "50", "--density", "10", "--seed", "4"]);
    assert!(o.status.success());
    let doc: geocast::topology::TopologyDocument = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc.positions.len(), 50);
    assert_eq!(doc.seed, Some(4));
    let t = doc.to_topology().unwrap();
    assert_eq!(doc.planar_edges, geocast::planar::gabriel(&t).edges());
}
