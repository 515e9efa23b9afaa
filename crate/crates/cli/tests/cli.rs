use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn popup(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_popup")).args(args).output().expect("binary runs")
}

fn config(name: &str) -> String {
    let p: PathBuf = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name);
    p.to_str().unwrap().to_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn entries(dir: &Path) -> Vec<String> {
    let mut v: Vec<String> = match std::fs::read_dir(dir) {
        Ok(rd) => rd.map(|e| e.unwrap().file_name().into_string().unwrap()).collect(),
        Err(_) => Vec::new(),
    };
    v.sort();
    v
}

#[test]
fn design_is_byte_identical_across_runs() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        let o = popup(&[
            "design",
            "--config",
            &config("cylinder_n5.toml"),
            "--out",
            d.path().to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    assert_eq!(entries(a.path()), ["network.toml", "pattern.svg", "report.txt", "segments.csv"]);
    for f in entries(a.path()) {
        assert_eq!(
            std::fs::read(a.path().join(&f)).unwrap(),
            std::fs::read(b.path().join(&f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn zero_units_is_rejected_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(
        &cfg,
        "[target]\ntype = \"axisymmetric\"\nprofile = { kind = \"cylinder\", radius = 5.0, length = 10.0 }\n[slices]\nn = 0\nn_s = 10\nw = 1.0\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = popup(&["design", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("n must be >= 1"), "{}", stderr(&o));
    assert!(entries(&out).is_empty());
}

#[test]
fn missing_input_names_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("no_such_network.toml");
    let o = popup(&[
        "deploy",
        "--network",
        missing.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("no_such_network.toml"), "{}", stderr(&o));

    let o = popup(&["design", "--config", "/definitely/not/here.toml"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("/definitely/not/here.toml"), "{}", stderr(&o));
}

#[test]
fn two_frames_from_a_saved_network() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    assert!(popup(&["design", "--config", &config("cylinder_n3.toml"), "--out", d])
        .status
        .success());
    let frames = dir.path().join("frames");
    let net = dir.path().join("network.toml");
    let o = popup(&[
        "deploy",
        "--network",
        net.to_str().unwrap(),
        "--frames",
        "2",
        "--out",
        frames.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(entries(&frames), ["frame_000.stl", "frame_001.stl", "frames.toml"]);
    let report = String::from_utf8(o.stdout).unwrap();
    assert_eq!(report.lines().filter(|l| l.ends_with(" ok")).count(), 2);
}

#[test]
fn thirty_frames_share_one_connectivity_hash() {
    let dir = tempfile::tempdir().unwrap();
    let o = popup(&[
        "deploy",
        "--config",
        &config("cylinder_n5.toml"),
        "--frames",
        "30",
        "--format",
        "stl-bin",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(entries(dir.path()).iter().filter(|f| f.ends_with(".stl")).count(), 30);
    let sizes: Vec<u64> = (0..30)
        .map(|k| std::fs::metadata(dir.path().join(format!("frame_{k:03}.stl"))).unwrap().len())
        .collect();
    assert!(sizes.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn one_frame_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = popup(&[
        "deploy",
        "--config",
        &config("single_unit.toml"),
        "--frames",
        "1",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(!o.status.success());
    assert!(entries(dir.path()).is_empty());
}

#[test]
fn map_with_empty_bounds_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("map");
    let o = popup(&["map", "--grid", "2:1:10,0.5:1.5:5", "--out", out.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(entries(&out).is_empty());
}

type Segment = (String, (f64, f64), (f64, f64));

fn point_segment_distance(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let s = if len2 > 0.0 {
        (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (p.0 - a.0 - s * dx).hypot(p.1 - a.1 - s * dy)
}

#[test]
fn map_zero_contour_passes_the_fixed_locus() {
    let dir = tempfile::tempdir().unwrap();
    let o = popup(&[
        "map",
        "--grid",
        "0.5:4.5:4001,0.5:1.5:21",
        "--phi",
        "0.7853981633974483",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("zero_contours.csv")).unwrap();
    let header: Vec<&str> = csv.lines().next().unwrap().split(',').collect();
    assert_eq!(header, ["field", "r1", "lambda1", "r2", "lambda2"]);
    let segments: Vec<Segment> = csv
        .lines()
        .skip(1)
        .map(|l| {
            let c: Vec<&str> = l.split(',').collect();
            let v = |i: usize| c[i].parse::<f64>().unwrap();
            (c[0].to_owned(), (v(1), v(2)), (v(3), v(4)))
        })
        .collect();
    let nearest = |field: &str, p: (f64, f64)| {
        segments
            .iter()
            .filter(|s| s.0 == field)
            .map(|s| point_segment_distance(p, s.1, s.2))
            .fold(f64::INFINITY, f64::min)
    };
    // both K loci meet at lambda = 1, r = 3 / sqrt 2, where K only touches zero
    let meeting = (3.0 / 2f64.sqrt(), 1.0);
    assert!(
        nearest("K", meeting) < 1e-3,
        "K contour misses the meeting point by {}",
        nearest("K", meeting)
    );
    // the H contour follows r = (2 + lambda) / sqrt 2
    for lambda in [0.6, 0.85, 1.2, 1.45] {
        let d = nearest("H", ((2.0 + lambda) / 2f64.sqrt(), lambda));
        assert!(d < 1e-3, "H contour off its locus by {d} at lambda = {lambda}");
    }
}

#[test]
fn splay_reports_a_single_transition() {
    let dir = tempfile::tempdir().unwrap();
    let o = popup(&[
        "splay",
        "--config",
        &config("splay_transition.toml"),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("sign change")).count(), 1);
}

#[test]
fn design_rejects_frame_formats() {
    let dir = tempfile::tempdir().unwrap();
    let o = popup(&[
        "design",
        "--config",
        &config("single_unit.toml"),
        "--format",
        "stl-bin",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(!o.status.success());
    assert!(entries(dir.path()).is_empty());
}
