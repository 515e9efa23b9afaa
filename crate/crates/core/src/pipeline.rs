//! End-to-end commands. Each validates its inputs, computes everything in
//! memory and only then writes its files, each through an atomic rename.

use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::branching::{build_network, BranchNetwork, NetworkError};
use crate::config::{ConfigError, MapConfig, PipelineConfig, SplayConfig, StlFormat, TargetDesignConfig};
use crate::curvature::assembly::default_base;
use crate::curvature::map::{curvature_map, write_contours_csv, CurvatureMap, Field};
use crate::curvature::trace::{curvature_trace, psi_schedule, CurvatureTrace};
use crate::curvature::CurvatureError;
use crate::export::io::write_atomic;
use crate::export::stl::{write_stl_binary, write_stl_text};
use crate::export::svg::write_svg;
use crate::export::{connectivity_hash, deployment_frames, flat_pattern, fmt_num, CutFoldPattern, DeploymentSchedule, ExportError};
use crate::optimize::curvature_design::{optimize_assembly_curvature, DesignError, DesignPoint};
use crate::optimize::report::write_slice_report;
use crate::optimize::{optimize_slice, SliceDesign, SliceError};
use crate::target::TargetError;

#[derive(Error, Debug)]
pub enum PipelineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Target(#[from] TargetError),
    #[error(transparent)]
    Slice(#[from] SliceError),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Export(#[from] ExportError),
    #[error(transparent)]
    Curvature(#[from] CurvatureError),
    #[error(transparent)]
    Design(#[from] DesignError),
    #[error("{path}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Toml { path: PathBuf, message: String },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> PipelineError + '_ {
    move |source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn write_file<F>(path: &Path, fill: F) -> Result<(), PipelineError>
where
    F: FnOnce(&mut dyn Write) -> std::io::Result<()>,
{
    write_atomic(path, fill).map_err(io_err(path))
}

fn write_text(path: &Path, text: &str) -> Result<(), PipelineError> {
    write_file(path, |w| w.write_all(text.as_bytes()))
}

pub struct MapOutput {
    pub map: CurvatureMap,
    pub files: Vec<PathBuf>,
}

/// `K` and `H` over the `(r, lambda)` grid, plus their zero contours.
pub fn cmd_curvature_map(cfg: &MapConfig, out: &Path) -> Result<MapOutput, PipelineError> {
    cfg.validate()?;
    let map = curvature_map(&cfg.r, &cfg.lambda, cfg.phi, &default_base(), cfg.psi);
    let contours: Vec<_> = [Field::K, Field::H].into_iter().map(|f| (f, map.zero_contours(f))).collect();
    let (grid, lines) = (out.join("curvature_map.csv"), out.join("zero_contours.csv"));
    write_file(&grid, |w| map.write_csv(w))?;
    write_file(&lines, |w| write_contours_csv(w, &contours))?;
    Ok(MapOutput {
        map,
        files: vec![grid, lines],
    })
}

pub struct DesignOutput {
    pub designs: Vec<SliceDesign>,
    pub network: BranchNetwork,
    pub pattern: CutFoldPattern,
}

/// Slice, optimize every slice in parallel, and assemble the network.
pub fn run_design(cfg: &PipelineConfig) -> Result<DesignOutput, PipelineError> {
    let (target, spec) = cfg.design_inputs()?;
    let curves = target.slice(&spec)?;
    let designs: Vec<SliceDesign> = curves
        .par_iter()
        .zip(spec.widths.par_iter())
        .map(|(c, &w)| optimize_slice(c, spec.n, w, &cfg.solver))
        .collect::<Result<_, _>>()?;
    let network = build_network(designs.clone(), &spec, &cfg.network)?;
    network.validate_deployment()?;
    let pattern = flat_pattern(&network);
    Ok(DesignOutput { designs, network, pattern })
}

/// Which design artifacts to write.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DesignFormats {
    pub svg: bool,
    pub csv: bool,
}

impl Default for DesignFormats {
    fn default() -> Self {
        Self { svg: true, csv: true }
    }
}

/// Writes `pattern.svg`, `segments.csv`, `report.txt` and `network.toml`.
pub fn cmd_design(cfg: &PipelineConfig, out: &Path, formats: DesignFormats) -> Result<(DesignOutput, Vec<PathBuf>), PipelineError> {
    let result = run_design(cfg)?;
    let network_text = toml::to_string(&result.network).map_err(|e| PipelineError::Toml {
        path: out.to_path_buf(),
        message: e.to_string(),
    })?;
    let mut files = Vec::new();
    if formats.svg {
        let p = out.join("pattern.svg");
        write_file(&p, |w| write_svg(w, &result.pattern, &cfg.svg))?;
        files.push(p);
    }
    if formats.csv {
        let p = out.join("segments.csv");
        write_file(&p, |w| result.network.write_csv(w, std::f64::consts::FRAC_PI_2))?;
        files.push(p);
    }
    let report = out.join("report.txt");
    write_file(&report, |w| write_slice_report(w, &result.designs))?;
    let net = out.join("network.toml");
    write_text(&net, &network_text)?;
    files.extend([report, net]);
    Ok((result, files))
}

pub fn load_network(path: &Path) -> Result<BranchNetwork, PipelineError> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    toml::from_str(&text).map_err(|e| PipelineError::Toml {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FramesMeta {
    pub unit: String,
    pub format: StlFormat,
    pub n_psi: usize,
    pub psi: Vec<f64>,
    pub connectivity_hash: String,
    pub panel_area: f64,
    pub files: Vec<String>,
}

/// One STL per scheduled angle plus a `frames.toml` sidecar.
pub fn cmd_deploy(net: &BranchNetwork, schedule: &DeploymentSchedule, format: StlFormat, out: &Path) -> Result<FramesMeta, PipelineError> {
    let frames = deployment_frames(net, schedule)?;
    let hash = connectivity_hash(&frames[0].mesh);
    if let Some(f) = frames.iter().find(|f| connectivity_hash(&f.mesh) != hash) {
        return Err(ExportError::Mesh(format!("frame {} changes connectivity", f.index)).into());
    }
    let digits = (schedule.n_psi - 1).to_string().len().max(3);
    let mut names = Vec::new();
    for f in &frames {
        let name = format!("frame_{:0digits$}.stl", f.index);
        let path = out.join(&name);
        match format {
            StlFormat::StlBin => write_file(&path, |w| write_stl_binary(w, &f.mesh))?,
            StlFormat::StlTxt => write_file(&path, |w| write_stl_text(w, &format!("frame_{}", f.index), &f.mesh))?,
        }
        names.push(name);
    }
    let meta = FramesMeta {
        unit: "cm".into(),
        format,
        n_psi: schedule.n_psi,
        psi: frames.iter().map(|f| f.psi).collect(),
        connectivity_hash: hash,
        panel_area: net.panel_area(std::f64::consts::FRAC_PI_2),
        files: names,
    };
    let text = toml::to_string(&meta).map_err(|e| PipelineError::Toml {
        path: out.to_path_buf(),
        message: e.to_string(),
    })?;
    write_text(&out.join("frames.toml"), &text)?;
    Ok(meta)
}

/// `(psi, K)` trace of the splay field's centre unit.
pub fn cmd_splay_study(cfg: &SplayConfig, out: &Path) -> Result<CurvatureTrace, PipelineError> {
    if cfg.samples < 2 {
        return Err(ConfigError::Invalid {
            section: "splay",
            message: "samples must be >= 2".into(),
        }
        .into());
    }
    let trace = curvature_trace(&cfg.structure, &psi_schedule(cfg.samples, std::f64::consts::FRAC_PI_2))?;
    write_file(&out.join("splay_trace.csv"), |w| {
        writeln!(w, "psi,K")?;
        for (p, k) in &trace.samples {
            writeln!(w, "{},{}", fmt_num(*p), fmt_num(*k))?;
        }
        Ok(())
    })?;
    write_file(&out.join("sign_changes.csv"), |w| {
        writeln!(w, "psi_before,psi_after")?;
        for (a, b) in &trace.sign_changes {
            writeln!(w, "{},{}", fmt_num(*a), fmt_num(*b))?;
        }
        Ok(())
    })?;
    Ok(trace)
}

/// Assembly parameters for each Gaussian curvature target.
pub fn cmd_curvature_target(cfg: &TargetDesignConfig, out: &Path) -> Result<Vec<DesignPoint>, PipelineError> {
    let domain = cfg.domain();
    let points = cfg
        .targets()
        .iter()
        .map(|t| optimize_assembly_curvature(t, &domain))
        .collect::<Result<Vec<_>, _>>()?;
    write_file(&out.join("curvature_design.csv"), |w| {
        writeln!(w, "K_target,r,lambda,K,H,loss")?;
        for (k, p) in cfg.k.iter().zip(&points) {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                fmt_num(*k),
                fmt_num(p.r),
                fmt_num(p.lambda),
                fmt_num(p.k),
                fmt_num(p.h),
                fmt_num(p.loss)
            )?;
        }
        Ok(())
    })?;
    Ok(points)
}
