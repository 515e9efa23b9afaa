use std::path::{Path, PathBuf};

use popup_core::branching::SegmentTag;
use popup_core::config::{PipelineConfig, StlFormat};
use popup_core::export::DeploymentSchedule;
use popup_core::optimize::SliceError;
use popup_core::pipeline::{
    cmd_curvature_map, cmd_curvature_target, cmd_deploy, cmd_design, cmd_splay_study, load_network, run_design, DesignFormats,
    PipelineError,
};

fn config(name: &str) -> PipelineConfig {
    let path: PathBuf = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name);
    PipelineConfig::load(&path).unwrap()
}

#[test]
fn every_shipped_design_config_runs() {
    for name in [
        "single_unit",
        "cylinder_n3",
        "cylinder_n5",
        "three_region",
        "single_strip",
        "dome",
        "splay_transition",
    ] {
        let cfg = config(&format!("{name}.toml"));
        let out = run_design(&cfg).unwrap_or_else(|e| panic!("{name}: {e}"));
        let (_, spec) = cfg.design_inputs().unwrap();
        assert_eq!(out.designs.len(), spec.n_slices(), "{name}");
        assert!(out.designs.iter().all(|d| d.converged && d.residuals.max() < 1e-6), "{name}");
        assert!(out.network.is_branch_tree(), "{name}");
        assert!(out.pattern.is_valid(1e-9), "{name}");
        let deployed = out.network.panel_area(std::f64::consts::FRAC_PI_2);
        assert!((out.pattern.area() - deployed).abs() < 1e-9 * deployed.max(1.0), "{name}");
    }
}

#[test]
fn three_region_widths_reach_the_pattern() {
    let out = run_design(&config("three_region.toml")).unwrap();
    assert_eq!(out.designs.len(), 52);
    assert!((out.pattern.width - 35.6).abs() < 1e-9);
    let mut widths: Vec<f64> = out.network.widths.clone();
    widths.dedup();
    assert_eq!(widths, vec![1.2, 0.4, 0.8]);
    // wider region, bigger radius, longer strips
    assert!(out.designs[0].scale > out.designs[20].scale);
}

#[test]
fn design_writes_all_artifacts_and_the_network_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("cylinder_n3.toml");
    let (out, files) = cmd_design(&cfg, dir.path(), DesignFormats::default()).unwrap();
    let names: Vec<_> = files.iter().map(|f| f.file_name().unwrap().to_str().unwrap().to_owned()).collect();
    assert_eq!(names, ["pattern.svg", "segments.csv", "report.txt", "network.toml"]);

    let net = load_network(&dir.path().join("network.toml")).unwrap();
    assert_eq!(net.segments, out.network.segments);
    assert_eq!(net.records(1.0), out.network.records(1.0));

    let csv = std::fs::read_to_string(dir.path().join("segments.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), out.network.segments.len());
    assert!(rows.iter().all(|r| SegmentTag::parse(r.split(',').next().unwrap()).is_some()));

    let report = std::fs::read_to_string(dir.path().join("report.txt")).unwrap();
    assert_eq!(report.lines().filter(|l| l.starts_with("slice ")).count(), 10);
    assert_eq!(report.lines().filter(|l| l.starts_with("residual ")).count(), 10);
}

#[test]
fn svg_only_design_skips_the_csv() {
    let dir = tempfile::tempdir().unwrap();
    cmd_design(&config("single_unit.toml"), dir.path(), DesignFormats { svg: true, csv: false }).unwrap();
    assert!(dir.path().join("pattern.svg").exists());
    assert!(!dir.path().join("segments.csv").exists());
}

#[test]
fn invalid_config_fails_before_writing() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config("cylinder_n5.toml");
    cfg.slices.as_mut().unwrap().n = 0;
    assert!(matches!(
        cmd_design(&cfg, dir.path(), DesignFormats::default()),
        Err(PipelineError::Config(_))
    ));
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn solver_failure_names_the_slice() {
    let mut cfg = config("cylinder_n3.toml");
    cfg.solver.max_outer = 1;
    cfg.solver.max_inner = 2;
    match run_design(&cfg) {
        Err(PipelineError::Slice(SliceError::MaxIterations(d))) => assert!(d.slice < 10),
        Err(PipelineError::Slice(SliceError::Infeasible { slice, .. })) => assert!(slice < 10),
        other => panic!("expected a slice failure, got {:?}", other.map(|_| ())),
    }
}

#[test]
fn two_frame_deployment_is_flat_then_open() {
    let dir = tempfile::tempdir().unwrap();
    let net = run_design(&config("single_unit.toml")).unwrap().network;
    let meta = cmd_deploy(&net, &DeploymentSchedule::new(2).unwrap(), StlFormat::StlTxt, dir.path()).unwrap();
    assert_eq!(meta.files, ["frame_000.stl", "frame_001.stl"]);
    assert_eq!(meta.psi, [0.0, std::f64::consts::FRAC_PI_2]);
    let sidecar: toml::Table = std::fs::read_to_string(dir.path().join("frames.toml")).unwrap().parse().unwrap();
    assert_eq!(sidecar["unit"].as_str(), Some("cm"));
    assert_eq!(sidecar["connectivity_hash"].as_str(), Some(meta.connectivity_hash.as_str()));
    let flat = std::fs::read_to_string(dir.path().join("frame_000.stl")).unwrap();
    // folded flat: every vertex on z = 0
    for line in flat.lines().filter(|l| l.trim_start().starts_with("vertex")) {
        let z: f64 = line.split_whitespace().nth(3).unwrap().parse().unwrap();
        assert_eq!(z, 0.0);
    }
}

#[test]
fn curvature_map_and_targets_write_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("curvature_map.toml");
    let res = cmd_curvature_map(cfg.curvature_map.as_ref().unwrap(), dir.path()).unwrap();
    let grid = std::fs::read_to_string(&res.files[0]).unwrap();
    assert_eq!(grid.lines().count(), 1 + 81 * 21);

    let t = config("curvature_target.toml");
    let points = cmd_curvature_target(t.curvature_target.as_ref().unwrap(), dir.path()).unwrap();
    assert_eq!(points.len(), 3);
    let csv = std::fs::read_to_string(dir.path().join("curvature_design.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn uniform_splay_has_no_transition() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("splay_uniform.toml");
    let trace = cmd_splay_study(cfg.splay.as_ref().unwrap(), dir.path()).unwrap();
    assert!(trace.sign_changes.is_empty());
    let csv = std::fs::read_to_string(dir.path().join("splay_trace.csv")).unwrap();
    assert_eq!(csv.lines().count(), 101);
}
