//! TOML pipeline configuration.
//!
//! ```toml
//! [target]
//! type = "axisymmetric"
//! profile = { kind = "cylinder", radius = 5.0, length = 10.0 }
//!
//! [slices]
//! n = 5
//! n_s = 10
//! w = 1.0
//! ```
//!
//! Every section is optional; each command checks for the ones it needs.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Deserializer, Serialize};
use thiserror::Error;

use crate::branching::NetworkOptions;
use crate::curvature::map::GridAxis;
use crate::curvature::trace::SplayStructure;
use crate::export::svg::SvgOptions;
use crate::optimize::curvature_design::{CurvatureTarget, DesignDomain};
use crate::optimize::SolverConfig;
use crate::target::{region_widths, Profile, SliceSpec, TargetSurface};

#[derive(Error, Debug)]
pub enum ConfigError {
    #[error("cannot read {path}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot parse {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("missing [{0}] section")]
    Missing(&'static str),
    #[error("invalid [{section}]: {message}")]
    Invalid { section: &'static str, message: String },
}

fn invalid(section: &'static str, message: impl ToString) -> ConfigError {
    ConfigError::Invalid {
        section,
        message: message.to_string(),
    }
}

fn axis<'de, D: Deserializer<'de>>(d: D) -> Result<GridAxis, D::Error> {
    let s = String::deserialize(d)?;
    GridAxis::parse(&s).map_err(serde::de::Error::custom)
}

/// Slice layout: uniform `n_s x w`, explicit `widths`, region list
/// `[[count, w], ...]`, or `composite_regions` for the composite profile.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlicesConfig {
    pub n: usize,
    pub n_s: Option<usize>,
    pub w: Option<f64>,
    pub widths: Option<Vec<f64>>,
    pub regions: Option<Vec<(usize, f64)>>,
    #[serde(default)]
    pub composite_regions: bool,
}

impl SlicesConfig {
    pub fn to_spec(&self, target: Option<&TargetSurface>) -> Result<SliceSpec, ConfigError> {
        let bad = |m: &str| invalid("slices", m);
        if self.n == 0 {
            return Err(bad("n must be >= 1"));
        }
        let given = [
            self.w.is_some(),
            self.widths.is_some(),
            self.regions.is_some(),
            self.composite_regions,
        ];
        if given.iter().filter(|g| **g).count() != 1 {
            return Err(bad("give exactly one of w, widths, regions, composite_regions"));
        }
        let spec = if let Some(w) = self.w {
            let n_s = self.n_s.ok_or_else(|| bad("w needs n_s"))?;
            SliceSpec::uniform(self.n, n_s, w)
        } else if let Some(widths) = &self.widths {
            SliceSpec {
                n: self.n,
                widths: widths.clone(),
                length: 1.0,
            }
        } else if let Some(regions) = &self.regions {
            SliceSpec::from_regions(self.n, regions)
        } else {
            let Some(TargetSurface::Axisymmetric {
                profile: p @ Profile::Composite { .. },
            }) = target
            else {
                return Err(bad("composite_regions needs a composite target profile"));
            };
            SliceSpec {
                n: self.n,
                widths: region_widths(p, self.n).map_err(|e| bad(&e.to_string()))?,
                length: 1.0,
            }
        };
        if let (Some(n_s), false) = (self.n_s, self.w.is_some()) {
            if n_s != spec.n_slices() {
                return Err(bad(&format!("n_s = {n_s} but the widths give {} slices", spec.n_slices())));
            }
        }
        spec.validate().map_err(|e| bad(&e.to_string()))?;
        Ok(spec)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StlFormat {
    #[default]
    StlBin,
    StlTxt,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeploymentConfig {
    pub frames: usize,
    pub format: StlFormat,
}

impl Default for DeploymentConfig {
    fn default() -> Self {
        Self {
            frames: 30,
            format: StlFormat::StlBin,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapConfig {
    #[serde(deserialize_with = "axis")]
    pub r: GridAxis,
    #[serde(deserialize_with = "axis")]
    pub lambda: GridAxis,
    #[serde(default = "quarter_pi")]
    pub phi: f64,
    #[serde(default = "half_pi")]
    pub psi: f64,
}

fn quarter_pi() -> f64 {
    std::f64::consts::FRAC_PI_4
}

fn half_pi() -> f64 {
    std::f64::consts::FRAC_PI_2
}

impl MapConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        for (name, a) in [("r", self.r), ("lambda", self.lambda)] {
            if a.n < 2 || !(a.min < a.max) || !(a.min > 0.0) {
                return Err(invalid("curvature_map", format!("{name} axis needs 0 < min < max and n >= 2")));
            }
        }
        if !(self.phi > 0.0 && self.phi < std::f64::consts::FRAC_PI_2) {
            return Err(invalid("curvature_map", "phi must lie in (0, pi/2)"));
        }
        Ok(())
    }
}

/// Curvature-targeted assembly design over a list of Gaussian targets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetDesignConfig {
    pub k: Vec<f64>,
    #[serde(default)]
    pub h: f64,
    #[serde(default = "big")]
    pub lambda_k: f64,
    #[serde(default)]
    pub lambda_h: f64,
    #[serde(default = "quarter_pi")]
    pub phi: f64,
}

fn big() -> f64 {
    1e6
}

impl TargetDesignConfig {
    pub fn targets(&self) -> Vec<CurvatureTarget> {
        self.k
            .iter()
            .map(|&k| CurvatureTarget {
                k,
                h: self.h,
                lambda_k: self.lambda_k,
                lambda_h: self.lambda_h,
                forms: None,
            })
            .collect()
    }

    pub fn domain(&self) -> DesignDomain {
        DesignDomain {
            phi: self.phi,
            ..DesignDomain::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplayConfig {
    #[serde(flatten)]
    pub structure: SplayStructure,
    #[serde(default = "samples")]
    pub samples: usize,
}

fn samples() -> usize {
    200
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub target: Option<TargetSurface>,
    pub slices: Option<SlicesConfig>,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub network: NetworkOptions,
    #[serde(default)]
    pub deployment: DeploymentConfig,
    #[serde(default)]
    pub svg: SvgOptions,
    pub curvature_map: Option<MapConfig>,
    pub curvature_target: Option<TargetDesignConfig>,
    pub splay: Option<SplayConfig>,
    pub output: Option<PathBuf>,
}

impl PipelineConfig {
    pub fn from_toml(text: &str, path: &Path) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text, path)
    }

    /// Target, slice spec and solver settings for a design run.
    pub fn design_inputs(&self) -> Result<(TargetSurface, SliceSpec), ConfigError> {
        let target = self.target.clone().ok_or(ConfigError::Missing("target"))?;
        target.validate().map_err(|e| invalid("target", e))?;
        let spec = self.slices.as_ref().ok_or(ConfigError::Missing("slices"))?.to_spec(Some(&target))?;
        self.solver.validate().map_err(|e| invalid("solver", e))?;
        let n = &self.network;
        if !(n.support_width_factor > 0.0 && n.separation_width_factor > 0.0) {
            return Err(invalid("network", "width factors must be > 0"));
        }
        let s = &self.svg;
        if !(s.dash > 0.0 && s.gap > 0.0 && s.stroke > 0.0) {
            return Err(invalid("svg", "dash, gap and stroke must be > 0"));
        }
        Ok((target, spec))
    }
}
