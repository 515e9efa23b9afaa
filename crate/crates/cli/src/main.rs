use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use log::info;

use popup_core::config::{MapConfig, PipelineConfig, StlFormat};
use popup_core::curvature::map::GridAxis;
use popup_core::export::DeploymentSchedule;
use popup_core::pipeline::{self, DesignFormats};

const DEFAULT_GRID: &str = "0.5:4.5:81,0.5:1.5:21";

#[derive(Parser, Debug)]
#[command(name = "popup", version, about = "Design and export pop-up kirigami strip structures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Svg,
    Csv,
    StlBin,
    StlTxt,
}

#[derive(clap::Args, Debug)]
struct Common {
    /// TOML pipeline configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (created if absent). Defaults to the config's `output`, then `.`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Gaussian and mean curvature over an (r, lambda) grid.
    Map {
        #[command(flatten)]
        common: Common,
        /// `r_min:r_max:n,lambda_min:lambda_max:n`
        #[arg(long)]
        grid: Option<String>,
        #[arg(long)]
        phi: Option<f64>,
    },
    /// Slice, optimize and assemble a target surface into a cut-fold pattern.
    Design {
        #[command(flatten)]
        common: Common,
        /// Restrict output to one of `svg` or `csv`.
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Thickened STL frames over the deployment schedule.
    Deploy {
        #[command(flatten)]
        common: Common,
        /// A `network.toml` from `design`; otherwise the design is rerun from `--config`.
        #[arg(long)]
        network: Option<PathBuf>,
        #[arg(long)]
        frames: Option<usize>,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Central-vertex curvature of a splayed structure along deployment.
    Splay {
        #[command(flatten)]
        common: Common,
        /// Number of deployment samples.
        #[arg(long)]
        frames: Option<usize>,
    },
    /// Assembly parameters realizing prescribed Gaussian curvatures.
    Target {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        phi: Option<f64>,
    },
}

fn load(common: &Common) -> Result<PipelineConfig> {
    match &common.config {
        Some(p) => Ok(PipelineConfig::load(p)?),
        None => Ok(PipelineConfig::default()),
    }
}

fn out_dir(common: &Common, cfg: &PipelineConfig) -> Result<PathBuf> {
    let dir = common
        .out
        .clone()
        .or_else(|| cfg.output.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir).with_context(|| format!("cannot create output directory {}", dir.display()))?;
    Ok(dir)
}

fn parse_grid(s: &str) -> Result<(GridAxis, GridAxis)> {
    let Some((r, l)) = s.split_once(',') else {
        bail!("--grid expects r_min:r_max:n,lambda_min:lambda_max:n, got {s:?}");
    };
    let axis = |a: &str| GridAxis::parse(a).map_err(|e| anyhow::anyhow!("--grid: {e}"));
    Ok((axis(r)?, axis(l)?))
}

fn need_config(common: &Common) -> Result<()> {
    if common.config.is_none() {
        bail!("--config is required for this command");
    }
    Ok(())
}

fn map(common: &Common, grid: Option<&str>, phi: Option<f64>) -> Result<()> {
    let cfg = load(common)?;
    let mut m = match cfg.curvature_map {
        Some(m) => m,
        None => {
            let (r, lambda) = parse_grid(DEFAULT_GRID)?;
            MapConfig {
                r,
                lambda,
                phi: std::f64::consts::FRAC_PI_4,
                psi: std::f64::consts::FRAC_PI_2,
            }
        }
    };
    if let Some(g) = grid {
        (m.r, m.lambda) = parse_grid(g)?;
    }
    if let Some(p) = phi {
        m.phi = p;
    }
    m.validate()?;
    let out = out_dir(common, &cfg)?;
    let res = pipeline::cmd_curvature_map(&m, &out)?;
    info!("{} grid points, {} masked", m.r.n * m.lambda.n, res.map.masked_count());
    for f in res.files {
        println!("{}", f.display());
    }
    Ok(())
}

fn design(common: &Common, format: Option<Format>) -> Result<()> {
    need_config(common)?;
    let cfg = load(common)?;
    let formats = match format {
        None => DesignFormats::default(),
        Some(Format::Svg) => DesignFormats { svg: true, csv: false },
        Some(Format::Csv) => DesignFormats { svg: false, csv: true },
        Some(f) => bail!("--format {f:?} is not a design format; use svg or csv"),
    };
    cfg.design_inputs()?;
    let out = out_dir(common, &cfg)?;
    let (res, files) = pipeline::cmd_design(&cfg, &out, formats)?;
    for d in &res.designs {
        info!("slice {} loss {:.6e} kkt {:.2e}", d.slice, d.loss, d.kkt);
    }
    info!(
        "{} segments, {} branches, pattern {:.3} x {:.3} cm",
        res.network.segments.len(),
        res.network.branches.len(),
        res.pattern.width,
        res.pattern.height
    );
    for f in files {
        println!("{}", f.display());
    }
    Ok(())
}

fn deploy(common: &Common, network: Option<&Path>, frames: Option<usize>, format: Option<Format>) -> Result<()> {
    let cfg = load(common)?;
    let n_psi = frames.unwrap_or(cfg.deployment.frames);
    let schedule = DeploymentSchedule::new(n_psi)?;
    let stl = match format {
        None => cfg.deployment.format,
        Some(Format::StlBin) => StlFormat::StlBin,
        Some(Format::StlTxt) => StlFormat::StlTxt,
        Some(f) => bail!("--format {f:?} is not a frame format; use stl-bin or stl-txt"),
    };
    let net = match network {
        Some(p) => pipeline::load_network(p)?,
        None => {
            need_config(common)?;
            pipeline::run_design(&cfg)?.network
        }
    };
    let out = out_dir(common, &cfg)?;
    let meta = pipeline::cmd_deploy(&net, &schedule, stl, &out)?;
    for (k, psi) in meta.psi.iter().enumerate() {
        let r = net.validate_topology(*psi)?;
        println!(
            "frame {k} psi {psi:.6} segments {} components {} pairs {} ok",
            r.segments, r.components, r.pairs_checked
        );
    }
    println!("connectivity {}", meta.connectivity_hash);
    Ok(())
}

fn splay(common: &Common, frames: Option<usize>) -> Result<()> {
    need_config(common)?;
    let cfg = load(common)?;
    let mut s = cfg.splay.clone().context("config has no [splay] section")?;
    if let Some(n) = frames {
        s.samples = n;
    }
    let out = out_dir(common, &cfg)?;
    let trace = pipeline::cmd_splay_study(&s, &out)?;
    if trace.sign_changes.is_empty() {
        println!("no sign change");
    }
    for (a, b) in &trace.sign_changes {
        println!(
            "sign change psi {:.6} .. {:.6} ({:.4} pi)",
            a,
            b,
            0.5 * (a + b) / std::f64::consts::PI
        );
    }
    Ok(())
}

fn target(common: &Common, phi: Option<f64>) -> Result<()> {
    need_config(common)?;
    let cfg = load(common)?;
    let mut t = cfg.curvature_target.clone().context("config has no [curvature_target] section")?;
    if let Some(p) = phi {
        t.phi = p;
    }
    let out = out_dir(common, &cfg)?;
    for (k, p) in t.k.iter().zip(pipeline::cmd_curvature_target(&t, &out)?) {
        println!("K {k} -> r {:.6} lambda {:.6} (K {:.3e}, H {:.3e})", p.r, p.lambda, p.k, p.h);
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Map { common, grid, phi } => map(common, grid.as_deref(), *phi),
        Command::Design { common, format } => design(common, *format),
        Command::Deploy {
            common,
            network,
            frames,
            format,
        } => deploy(common, network.as_deref(), *frames, *format),
        Command::Splay { common, frames } => splay(common, *frames),
        Command::Target { common, phi } => target(common, *phi),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e:#}");
            ExitCode::FAILURE
        }
    }
}
