//! Target surfaces and their slicing into per-slice target curves.
//!
//! Every slice curve is expressed in a normalized chain frame: it runs from
//! `(0, 1)` to `(1, 0)` and the chain built on it has total length `1`. The
//! physical slice length is kept in [`SliceCurve::length`] so that designs
//! can be scaled back after optimization.

use std::io::BufRead;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum TargetError {
    #[error("slice position {position} outside the surface domain [{min}, {max}]")]
    DomainExceeded { position: f64, min: f64, max: f64 },
    #[error("composite profile requires R1 > R3 > R2 > 0 (got R1 = {r1}, R2 = {r2}, R3 = {r3})")]
    OrderingViolation { r1: f64, r2: f64, r3: f64 },
    #[error("slice {slice} is not strictly monotone")]
    NonMonotone { slice: usize },
    #[error("invalid slice spec: {0}")]
    InvalidSpec(String),
    #[error("invalid surface: {0}")]
    InvalidSurface(String),
}

/// Radius profile of a surface of revolution, `r(z)` on `[z_min, z_max]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Profile {
    Cylinder {
        radius: f64,
        length: f64,
    },
    /// Hemisphere of radius `radius` over `z in [0, radius)`; the pole is excluded.
    Hemisphere {
        radius: f64,
    },
    /// Hyperboloid of one sheet, `r(z) = waist * sqrt(1 + (z / c)^2)` on `[-half, half]`.
    Hyperboloid {
        waist: f64,
        c: f64,
        half: f64,
    },
    /// Three-piece cosine/sine radius profile on `[-2L, 2L]`.
    Composite {
        r1: f64,
        r2: f64,
        r3: f64,
        l: f64,
    },
}

impl Profile {
    pub fn composite(r1: f64, r2: f64, r3: f64, l: f64) -> Result<Self, TargetError> {
        if !(r1 > r3 && r3 > r2 && r2 > 0.0) {
            return Err(TargetError::OrderingViolation { r1, r2, r3 });
        }
        if !(l > 0.0) {
            return Err(TargetError::InvalidSurface(format!("composite half-length l = {l} must be > 0")));
        }
        Ok(Profile::Composite { r1, r2, r3, l })
    }

    pub fn domain(&self) -> (f64, f64) {
        match *self {
            Profile::Cylinder { length, .. } => (0.0, length),
            Profile::Hemisphere { radius } => (0.0, radius),
            Profile::Hyperboloid { half, .. } => (-half, half),
            Profile::Composite { l, .. } => (-2.0 * l, 2.0 * l),
        }
    }

    pub fn radius(&self, z: f64) -> f64 {
        use std::f64::consts::PI;
        match *self {
            Profile::Cylinder { radius, .. } => radius,
            Profile::Hemisphere { radius } => (radius * radius - z * z).max(0.0).sqrt(),
            Profile::Hyperboloid { waist, c, .. } => waist * (1.0 + (z / c).powi(2)).sqrt(),
            Profile::Composite { r1, r2, r3, l } => {
                if z <= -l {
                    r1 + (r2 - r1) * 0.5 * (1.0 + (PI * (z + l) / l).cos())
                } else if z <= l {
                    r2 + (r3 - r2) * 0.5 * (1.0 + (PI * z / (2.0 * l)).sin())
                } else {
                    r3 + (r2 - r3) * 0.5 * (1.0 - (PI * (z - l) / l).cos())
                }
            }
        }
    }

    fn validate(&self) -> Result<(), TargetError> {
        let bad = |m: &str| Err(TargetError::InvalidSurface(m.into()));
        match *self {
            Profile::Cylinder { radius, length } if !(radius > 0.0 && length > 0.0) => bad("cylinder needs radius, length > 0"),
            Profile::Hemisphere { radius } if !(radius > 0.0) => bad("hemisphere needs radius > 0"),
            Profile::Hyperboloid { waist, c, half } if !(waist > 0.0 && c > 0.0 && half > 0.0) => {
                bad("hyperboloid needs waist, c, half > 0")
            }
            Profile::Composite { r1, r2, r3, l } => Profile::composite(r1, r2, r3, l).map(|_| ()),
            _ => Ok(()),
        }
    }
}

/// Regular sampled grid `z[j][i]` over `xs x ys`, bilinearly interpolated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledGrid {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub z: Vec<Vec<f64>>,
}

impl SampledGrid {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>, z: Vec<Vec<f64>>) -> Result<Self, TargetError> {
        let inc = |v: &[f64]| v.len() >= 2 && v.windows(2).all(|w| w[1] > w[0]);
        if !inc(&xs) || !inc(&ys) {
            return Err(TargetError::InvalidSurface("grid axes need >= 2 strictly increasing values".into()));
        }
        if z.len() != ys.len() || z.iter().any(|row| row.len() != xs.len()) {
            return Err(TargetError::InvalidSurface("grid values do not match the axes".into()));
        }
        if z.iter().flatten().any(|v| !v.is_finite()) {
            return Err(TargetError::InvalidSurface("grid values must be finite".into()));
        }
        Ok(Self { xs, ys, z })
    }

    /// Reads `x,y,z` rows (optional header) covering a full regular grid.
    pub fn from_csv<R: BufRead>(reader: R) -> Result<Self, TargetError> {
        let mut pts = Vec::new();
        for (n, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| TargetError::InvalidSurface(e.to_string()))?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let vals: Result<Vec<f64>, _> = line.split(',').map(|s| s.trim().parse::<f64>()).collect();
            match vals {
                Ok(v) if v.len() == 3 => pts.push((v[0], v[1], v[2])),
                _ if n == 0 => continue,
                _ => return Err(TargetError::InvalidSurface(format!("line {}: expected x,y,z", n + 1))),
            }
        }
        let axis = |f: fn(&(f64, f64, f64)) -> f64| {
            let mut v: Vec<f64> = pts.iter().map(f).collect();
            v.sort_by(f64::total_cmp);
            v.dedup();
            v
        };
        let xs = axis(|p| p.0);
        let ys = axis(|p| p.1);
        if xs.len() * ys.len() != pts.len() {
            return Err(TargetError::InvalidSurface("samples do not form a full regular grid".into()));
        }
        let mut z = vec![vec![f64::NAN; xs.len()]; ys.len()];
        for (x, y, v) in pts {
            let i = xs.partition_point(|&a| a < x);
            let j = ys.partition_point(|&a| a < y);
            z[j][i] = v;
        }
        Self::new(xs, ys, z)
    }

    fn cell(axis: &[f64], t: f64) -> (usize, f64) {
        let i = axis.partition_point(|&a| a <= t).clamp(1, axis.len() - 1) - 1;
        (i, (t - axis[i]) / (axis[i + 1] - axis[i]))
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let (i, u) = Self::cell(&self.xs, x);
        let (j, v) = Self::cell(&self.ys, y);
        let z = &self.z;
        (1.0 - v) * ((1.0 - u) * z[j][i] + u * z[j][i + 1]) + v * ((1.0 - u) * z[j + 1][i] + u * z[j + 1][i + 1])
    }
}

/// Height field `z = f(x, y)` over a rectangle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum HeightField {
    /// `z = slope * x`.
    Plane {
        slope: f64,
        x_max: f64,
        y_max: f64,
    },
    /// Cap of a sphere of radius `radius` centred at the origin, over `x in [0, a]`, `|y| <= a`.
    SphericalCap {
        radius: f64,
        a: f64,
    },
    /// `z = c (x^2 - y^2)` over `x in [0, a]`, `|y| <= a`.
    Saddle {
        c: f64,
        a: f64,
    },
    Sampled(SampledGrid),
}

impl HeightField {
    pub fn bounds(&self) -> ((f64, f64), (f64, f64)) {
        match self {
            HeightField::Plane { x_max, y_max, .. } => ((0.0, *x_max), (0.0, *y_max)),
            HeightField::SphericalCap { a, .. } | HeightField::Saddle { a, .. } => ((0.0, *a), (-*a, *a)),
            HeightField::Sampled(g) => ((g.xs[0], *g.xs.last().unwrap()), (g.ys[0], *g.ys.last().unwrap())),
        }
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match self {
            HeightField::Plane { slope, .. } => slope * x,
            HeightField::SphericalCap { radius, .. } => (radius * radius - x * x - y * y).max(0.0).sqrt(),
            HeightField::Saddle { c, .. } => c * (x * x - y * y),
            HeightField::Sampled(g) => g.eval(x, y),
        }
    }

    fn validate(&self) -> Result<(), TargetError> {
        let ok = match self {
            HeightField::Plane { slope, x_max, y_max } => slope.is_finite() && *x_max > 0.0 && *y_max > 0.0,
            HeightField::SphericalCap { radius, a } => *a > 0.0 && 2.0 * a * a < radius * radius,
            HeightField::Saddle { c, a } => c.is_finite() && *a > 0.0,
            HeightField::Sampled(_) => true,
        };
        if ok {
            Ok(())
        } else {
            Err(TargetError::InvalidSurface(format!("invalid height field parameters: {self:?}")))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum TargetSurface {
    Axisymmetric { profile: Profile },
    HeightField { field: HeightField },
}

impl TargetSurface {
    pub fn cylinder(radius: f64, length: f64) -> Self {
        TargetSurface::Axisymmetric {
            profile: Profile::Cylinder { radius, length },
        }
    }

    pub fn hemisphere(radius: f64) -> Self {
        TargetSurface::Axisymmetric {
            profile: Profile::Hemisphere { radius },
        }
    }

    pub fn validate(&self) -> Result<(), TargetError> {
        match self {
            TargetSurface::Axisymmetric { profile } => profile.validate(),
            TargetSurface::HeightField { field } => field.validate(),
        }
    }

    /// Domain of the slicing coordinate.
    pub fn slice_domain(&self) -> (f64, f64) {
        match self {
            TargetSurface::Axisymmetric { profile } => profile.domain(),
            TargetSurface::HeightField { field } => field.bounds().1,
        }
    }

    /// One target curve per slice of `spec`, in slice order.
    pub fn slice(&self, spec: &SliceSpec) -> Result<Vec<SliceCurve>, TargetError> {
        self.validate()?;
        spec.validate()?;
        let (lo, hi) = self.slice_domain();
        let tol = 1e-12 * (hi - lo).abs().max(1.0);
        spec.positions()
            .into_iter()
            .enumerate()
            .map(|(j, s)| {
                let position = lo + s;
                if position > hi + tol {
                    return Err(TargetError::DomainExceeded {
                        position,
                        min: lo,
                        max: hi,
                    });
                }
                self.slice_at(j, position)
            })
            .collect()
    }

    fn slice_at(&self, j: usize, position: f64) -> Result<SliceCurve, TargetError> {
        match self {
            TargetSurface::Axisymmetric { profile } => {
                let radius = profile.radius(position);
                if !(radius > 0.0) {
                    return Err(TargetError::InvalidSurface(format!("radius {radius} at z = {position}")));
                }
                Ok(SliceCurve {
                    j,
                    position,
                    length: radius,
                    height: radius,
                    shape: CurveShape::QuarterCircle,
                })
            }
            TargetSurface::HeightField { field } => {
                let ((x0, x1), _) = field.bounds();
                let n = SLICE_SAMPLES;
                let zs: Vec<f64> = (0..=n)
                    .map(|k| field.eval(x0 + (x1 - x0) * k as f64 / n as f64, position))
                    .collect();
                let (first, last) = (zs[0], zs[n]);
                let height = (first - last).abs();
                let dec = first > last;
                let monotone = zs.windows(2).all(|w| if dec { w[1] < w[0] } else { w[1] > w[0] });
                if !monotone || !(height > 0.0) {
                    return Err(TargetError::NonMonotone { slice: j });
                }
                // normalized graph: x in [0, 1], g(0) = 1, g(1) = 0
                let lo = first.min(last);
                let xs: Vec<f64> = (0..=n).map(|k| k as f64 / n as f64).collect();
                let gs: Vec<f64> = zs
                    .iter()
                    .map(|z| {
                        let u = (z - lo) / height;
                        if dec {
                            u
                        } else {
                            1.0 - u
                        }
                    })
                    .collect();
                Ok(SliceCurve {
                    j,
                    position,
                    length: x1 - x0,
                    height,
                    shape: CurveShape::Graph { xs, gs },
                })
            }
        }
    }
}

/// Samples taken along a height-field slice.
pub const SLICE_SAMPLES: usize = 256;

/// Shape of a slice curve in the normalized chain frame.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum CurveShape {
    /// `x^2 + z^2 = 1`.
    QuarterCircle,
    /// `x + z = 1`.
    Line,
    /// Piecewise-linear `z = g(x)`, extended linearly outside `[0, 1]`.
    Graph { xs: Vec<f64>, gs: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SliceCurve {
    pub j: usize,
    /// Position of the slice plane along the slicing axis.
    pub position: f64,
    /// Physical chain length (the quarter-circle radius for surfaces of revolution).
    pub length: f64,
    /// Physical height range of the slice.
    pub height: f64,
    pub shape: CurveShape,
}

impl SliceCurve {
    pub fn normalized(shape: CurveShape) -> Self {
        Self {
            j: 0,
            position: 0.0,
            length: 1.0,
            height: 1.0,
            shape,
        }
    }

    /// On-curve residual at a normalized point and its `(d/dx, d/dz)`.
    pub fn residual(&self, x: f64, z: f64) -> (f64, f64, f64) {
        match &self.shape {
            CurveShape::QuarterCircle => (0.5 * (x * x + z * z - 1.0), x, z),
            CurveShape::Line => (x + z - 1.0, 1.0, 1.0),
            CurveShape::Graph { xs, gs } => {
                let (g, dg) = graph_eval(xs, gs, x);
                (z - g, -dg, 1.0)
            }
        }
    }

    /// Normalized height of the curve at `x`.
    pub fn z_at(&self, x: f64) -> f64 {
        match &self.shape {
            CurveShape::QuarterCircle => (1.0 - x * x).max(0.0).sqrt(),
            CurveShape::Line => 1.0 - x,
            CurveShape::Graph { xs, gs } => graph_eval(xs, gs, x).0,
        }
    }
}

fn graph_eval(xs: &[f64], gs: &[f64], x: f64) -> (f64, f64) {
    let i = xs.partition_point(|&a| a <= x).clamp(1, xs.len() - 1) - 1;
    let slope = (gs[i + 1] - gs[i]) / (xs[i + 1] - xs[i]);
    (gs[i] + slope * (x - xs[i]), slope)
}

/// Units per slice and slice widths.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SliceSpec {
    pub n: usize,
    pub widths: Vec<f64>,
    /// Normalized slice length; `delta = length / n`.
    #[serde(default = "unit")]
    pub length: f64,
}

fn unit() -> f64 {
    1.0
}

impl SliceSpec {
    pub fn uniform(n: usize, n_s: usize, w: f64) -> Self {
        Self {
            n,
            widths: vec![w; n_s],
            length: 1.0,
        }
    }

    /// Widths given region by region as `(slice count, width)`.
    pub fn from_regions(n: usize, regions: &[(usize, f64)]) -> Self {
        Self {
            n,
            widths: regions.iter().flat_map(|&(k, w)| std::iter::repeat_n(w, k)).collect(),
            length: 1.0,
        }
    }

    pub fn validate(&self) -> Result<(), TargetError> {
        if self.n == 0 {
            return Err(TargetError::InvalidSpec("N must be >= 1".into()));
        }
        if self.widths.is_empty() {
            return Err(TargetError::InvalidSpec("at least one slice is required".into()));
        }
        if let Some(w) = self.widths.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
            return Err(TargetError::InvalidSpec(format!("slice width {w} must be > 0")));
        }
        if !(self.length > 0.0) {
            return Err(TargetError::InvalidSpec("length must be > 0".into()));
        }
        Ok(())
    }

    pub fn n_slices(&self) -> usize {
        self.widths.len()
    }

    pub fn delta(&self) -> f64 {
        self.length / self.n as f64
    }

    /// `s_j = sum_{k<j} w_k`.
    pub fn positions(&self) -> Vec<f64> {
        let mut s = 0.0;
        self.widths
            .iter()
            .map(|w| {
                let p = s;
                s += w;
                p
            })
            .collect()
    }

    pub fn total_width(&self) -> f64 {
        self.widths.iter().sum()
    }
}

/// Slice widths of the composite profile: `L/N`, `L/(3N)` and `L/(2N)` in
/// its three regions, stepping from `z = -2L` until the domain is covered.
pub fn region_widths(profile: &Profile, n: usize) -> Result<Vec<f64>, TargetError> {
    let Profile::Composite { l, .. } = *profile else {
        return Err(TargetError::InvalidSurface("region widths need a composite profile".into()));
    };
    if n == 0 {
        return Err(TargetError::InvalidSpec("N must be >= 1".into()));
    }
    let base = l / n as f64;
    let mut out = Vec::new();
    // integer stepping keeps region boundaries exact
    for (count, w) in [(n, base), (6 * n, base / 3.0), (2 * n, base / 2.0)] {
        out.extend(std::iter::repeat_n(w, count));
    }
    Ok(out)
}
