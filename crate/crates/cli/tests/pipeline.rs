//! End-to-end pipeline checks: artifacts, formats, determinism, degenerate
//! inputs.

use reebmap::io::{self, DenoiseSpec};
use reebmap::pipeline::{run_on_cloud, run_pipeline, RunConfig};
use reebmap::synth::{synth_shape, Shape};
use reebmap_core::persistence::PointType;
use reebmap_core::seeds::rng_from_seed;
use std::fs;

fn circle_csv(dir: &std::path::Path, n: usize, seed: u64) -> std::path::PathBuf {
    let pc = synth_shape(Shape::Circle, n, 0.0, false, &mut rng_from_seed(seed)).unwrap();
    let path = dir.join("points.csv");
    io::save_points(&pc, &path).unwrap();
    path
}

fn quick_cfg() -> RunConfig {
    RunConfig {
        subsample_draws: 30,
        bootstrap: 30,
        ..RunConfig::default()
    }
}

#[test]
fn artifacts_and_dot_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let input = circle_csv(dir.path(), 200, 3);
    let out = dir.path().join("artifacts");
    let result = run_pipeline(&input, &quick_cfg(), &out).unwrap();
    for name in [
        "mapper.dot",
        "diagram.csv",
        "confidence.csv",
        "diagram.svg",
        "params.txt",
    ] {
        assert!(out.join(name).exists(), "missing {name}");
    }
    let dot = fs::read_to_string(out.join("mapper.dot")).unwrap();
    let (nodes, edges) = io::parse_dot(&dot).unwrap();
    assert_eq!(nodes, result.mapper.node_count());
    assert_eq!(edges, result.mapper.edges);

    let diagram = io::parse_diagram_csv(&fs::read_to_string(out.join("diagram.csv")).unwrap())
        .unwrap();
    assert_eq!(diagram, result.diagram);

    let svg = fs::read_to_string(out.join("diagram.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(svg.contains("crimson"), "loop square missing from svg");
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let input = circle_csv(dir.path(), 150, 9);
    let cfg = quick_cfg();
    let out1 = dir.path().join("a");
    let out2 = dir.path().join("b");
    run_pipeline(&input, &cfg, &out1).unwrap();
    run_pipeline(&input, &cfg, &out2).unwrap();
    for name in [
        "mapper.dot",
        "diagram.csv",
        "confidence.csv",
        "diagram.svg",
        "params.txt",
    ] {
        let a = fs::read(out1.join(name)).unwrap();
        let b = fs::read(out2.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }
}

#[test]
fn single_point_input() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("one.csv");
    fs::write(&input, "0.5,1.5\n").unwrap();
    let out = dir.path().join("out");
    let result = run_pipeline(&input, &quick_cfg(), &out).unwrap();
    assert_eq!(result.mapper.node_count(), 1);
    assert_eq!(result.mapper.edge_count(), 0);
    assert_eq!(result.diagram.len(), 1);
    let p = &result.diagram.points[0];
    assert_eq!(p.ptype, PointType::Ext0);
    assert_eq!(p.birth, p.death);
    let dot = fs::read_to_string(out.join("mapper.dot")).unwrap();
    assert_eq!(io::parse_dot(&dot).unwrap(), (1, vec![]));
}

#[test]
fn denoised_crater_runs() {
    let pc = synth_shape(Shape::Crater, 900, 0.03, false, &mut rng_from_seed(11)).unwrap();
    let cfg = RunConfig {
        denoise: Some(DenoiseSpec::parse("dtm:10:0.4").unwrap()),
        ..quick_cfg()
    };
    let result = run_on_cloud(&pc, &cfg).unwrap();
    assert!(result.kept.len() < 900, "denoising removed nothing");
    assert!(result.mapper.node_count() >= 2);
    // the removed points are the high-DTM ones
    assert!(result.cloud.len() == result.kept.len());
}

#[test]
fn missing_and_malformed_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.csv");
    assert!(run_pipeline(&missing, &quick_cfg(), &dir.path().join("o")).is_err());
    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "1,2\n3\n").unwrap();
    let err = run_pipeline(&bad, &quick_cfg(), &dir.path().join("o"))
        .unwrap_err()
        .to_string();
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn eccentricity_filter_pipeline() {
    let pc = synth_shape(Shape::Circle, 150, 0.0, false, &mut rng_from_seed(4)).unwrap();
    let cfg = RunConfig {
        filter: reebmap_core::FilterSpec::Eccentricity,
        ..quick_cfg()
    };
    let result = run_on_cloud(&pc, &cfg).unwrap();
    assert_eq!(
        result.diagram.count(PointType::Ext0),
        result.mapper.component_count()
    );
    assert_eq!(result.diagram.count(PointType::Ext1), result.mapper.betti_one());
}
