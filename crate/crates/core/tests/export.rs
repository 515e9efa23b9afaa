use std::path::Path;

use popup_core::branching::{build_network, NetworkOptions, SegmentTag};
use popup_core::export::io::write_atomic;
use popup_core::export::stl::{write_stl_binary, write_stl_text};
use popup_core::export::svg::{micro_cut_chain, write_svg, SvgOptions};
use popup_core::export::{deployment_frames, flat_pattern, mesh_area, DeploymentSchedule, ExportError};
use popup_core::optimize::{optimize_slice, SliceDesign, SolverConfig};
use popup_core::target::{CurveShape, SliceCurve, SliceSpec};

fn quarter_network(n: usize, n_s: usize, w: f64) -> popup_core::branching::BranchNetwork {
    let curve = SliceCurve::normalized(CurveShape::QuarterCircle);
    let designs: Vec<SliceDesign> = (0..n_s)
        .map(|j| {
            let mut d = optimize_slice(&curve, n, w, &SolverConfig::default()).unwrap();
            d.slice = j;
            d
        })
        .collect();
    build_network(designs, &SliceSpec::uniform(n, n_s, w), &NetworkOptions::default()).unwrap()
}

fn f32_at(b: &[u8], at: usize) -> f32 {
    f32::from_le_bytes(b[at..at + 4].try_into().unwrap())
}

#[test]
fn binary_stl_parses_back_to_the_mesh() {
    let net = quarter_network(3, 4, 0.5);
    let frames = deployment_frames(&net, &DeploymentSchedule::new(3).unwrap()).unwrap();
    let mesh = &frames[2].mesh;
    let mut buf = Vec::new();
    write_stl_binary(&mut buf, mesh).unwrap();
    let count = u32::from_le_bytes(buf[80..84].try_into().unwrap()) as usize;
    assert_eq!(count, mesh.faces.len());
    assert_eq!(buf.len(), 84 + 50 * count);

    let mut area = 0.0;
    for f in 0..count {
        let base = 84 + 50 * f + 12;
        let p: Vec<[f64; 3]> = (0..3)
            .map(|k| std::array::from_fn(|c| f32_at(&buf, base + 12 * k + 4 * c) as f64))
            .collect();
        let (u, v) = ([0, 1, 2].map(|c| p[1][c] - p[0][c]), [0, 1, 2].map(|c| p[2][c] - p[0][c]));
        let cross = [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]];
        area += 0.5 * cross.iter().map(|c| c * c).sum::<f64>().sqrt();
    }
    // single precision round trip
    assert!((area - mesh_area(mesh)).abs() < 1e-5 * mesh_area(mesh));
}

#[test]
fn text_stl_has_one_facet_per_face() {
    let net = quarter_network(2, 2, 1.0);
    let frames = deployment_frames(&net, &DeploymentSchedule::new(2).unwrap()).unwrap();
    let mut buf = Vec::new();
    write_stl_text(&mut buf, "deployed", &frames[1].mesh).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("solid deployed\n"));
    assert!(text.trim_end().ends_with("endsolid deployed"));
    assert_eq!(text.matches("facet normal").count(), frames[1].mesh.faces.len());
    assert_eq!(text.matches("vertex ").count(), 3 * frames[1].mesh.faces.len());
}

#[test]
fn svg_groups_and_micro_cuts() {
    let net = quarter_network(3, 4, 0.5);
    let pattern = flat_pattern(&net);
    let opts = SvgOptions {
        micro_cuts: true,
        ..SvgOptions::default()
    };
    let mut buf = Vec::new();
    write_svg(&mut buf, &pattern, &opts).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let doc = roxmltree::Document::parse(&text).unwrap();
    let root = doc.root_element();
    assert_eq!(root.attribute("data-unit"), Some("cm"));
    let group = |id: &str| {
        doc.descendants()
            .find(|n| n.attribute("id") == Some(id))
            .map(|g| g.children().filter(|c| c.is_element()).count())
    };
    assert_eq!(group("cuts"), Some(pattern.cuts().count()));
    let strips = pattern.lines.iter().filter(|l| l.tag == SegmentTag::SupportStrip).count();
    assert_eq!(group("support-strips"), Some(strips));
    assert_eq!(group("folds"), Some(pattern.folds().count() - strips));
    let expected: usize = pattern.folds().map(|f| micro_cut_chain(f, opts.dash, opts.gap).len()).sum();
    assert_eq!(group("micro-cuts"), Some(expected));
}

#[test]
fn micro_cuts_cover_the_fold_with_gaps() {
    let net = quarter_network(1, 1, 1.0);
    let pattern = flat_pattern(&net);
    let fold = pattern.folds().next().unwrap();
    let chain = micro_cut_chain(fold, 0.2, 0.1);
    // a 1 cm fold: dashes at 0, 0.3, 0.6, 0.9 with the last one clipped
    assert_eq!(chain.len(), 4);
    let cut: f64 = chain.iter().map(|(a, b)| (b[0] - a[0]).hypot(b[1] - a[1])).sum();
    assert!((cut - 0.7).abs() < 1e-12);
}

#[test]
fn failed_write_leaves_nothing_behind() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("out.csv");
    let err = write_atomic(&target, |w| {
        w.write_all(b"partial")?;
        Err(std::io::Error::other("boom"))
    });
    assert!(err.is_err());
    assert!(!target.exists());
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);

    write_atomic(&target, |w| w.write_all(b"ok")).unwrap();
    assert_eq!(std::fs::read(&target).unwrap(), b"ok");
    assert!(Path::new(&target).is_file());
}

#[test]
fn one_frame_is_not_a_schedule() {
    assert!(matches!(DeploymentSchedule::new(1), Err(ExportError::InvalidSchedule(1))));
    let two = DeploymentSchedule::new(2).unwrap().angles();
    assert_eq!(two, vec![0.0, std::f64::consts::FRAC_PI_2]);
}
