//! Per-slice design: cut lengths `l_x` and heights `l_z` of a chain of units
//! whose deployed fold vertices lie on a target curve.
//!
//! Everything is solved in the normalized frame (chain length 1, vertex 0 at
//! `(0, 1)`, vertex N at `(1, 0)`) and scaled by the slice length afterwards.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::auglag::{solve, AugLagOptions, ConstrainedProblem, OuterStep};
use crate::kinematics::{chain_pose, FoldVertex, UnitCell};
use crate::target::SliceCurve;

/// Lower bound on normalized cut dimensions.
pub const MIN_CELL: f64 = 1e-6;
/// Residual above which a solve is reported as infeasible rather than unconverged.
pub const INFEASIBLE_RESIDUAL: f64 = 1e-4;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum SliceError {
    #[error("N must be >= 1")]
    EmptyChain,
    #[error("slice {slice}: constraints cannot be met ({family} residual {residual:.3e})")]
    Infeasible { slice: usize, family: &'static str, residual: f64 },
    #[error("slice {}: no convergence within the iteration budget (max residual {:.3e})", .0.slice, .0.residuals.max())]
    MaxIterations(Box<SliceDesign>),
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub tol_eq: f64,
    pub tol_kkt: f64,
    pub max_outer: usize,
    pub max_inner: usize,
    pub penalty_init: f64,
    pub penalty_growth: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol_eq: 1e-8,
            tol_kkt: 1e-6,
            max_outer: 60,
            max_inner: 2000,
            penalty_init: 10.0,
            penalty_growth: 10.0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SliceError> {
        let ok = self.tol_eq > 0.0
            && self.tol_kkt > 0.0
            && self.max_outer > 0
            && self.max_inner > 0
            && self.penalty_init > 0.0
            && self.penalty_growth > 1.0;
        if ok {
            Ok(())
        } else {
            Err(SliceError::InvalidConfig(format!("{self:?}")))
        }
    }

    fn auglag(&self) -> AugLagOptions {
        AugLagOptions {
            tol_eq: self.tol_eq,
            tol_kkt: self.tol_kkt,
            max_outer: self.max_outer,
            max_inner: self.max_inner,
            rho0: self.penalty_init,
            rho_growth: self.penalty_growth,
            ..AugLagOptions::default()
        }
    }
}

/// Largest violation of each constraint family.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    pub isometry: f64,
    pub on_curve: f64,
    pub positivity: f64,
    pub ordering: f64,
    pub admissible: f64,
}

impl Residuals {
    pub fn max(&self) -> f64 {
        self.families().iter().fold(0.0, |m, f| m.max(f.1))
    }

    pub fn families(&self) -> [(&'static str, f64); 5] {
        [
            ("isometry", self.isometry),
            ("on-curve", self.on_curve),
            ("positivity", self.positivity),
            ("ordering", self.ordering),
            ("admissible", self.admissible),
        ]
    }

    fn worst(&self) -> (&'static str, f64) {
        self.families()
            .into_iter()
            .fold(("none", 0.0), |a, b| if b.1 > a.1 { b } else { a })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SliceDesign {
    pub slice: usize,
    /// Normalized cut lengths, summing to 1.
    pub l_x: Vec<f64>,
    /// Normalized cut heights, summing to 1.
    pub l_z: Vec<f64>,
    /// Physical chain length.
    pub scale: f64,
    /// Slice width (fold width of every unit).
    pub width: f64,
    pub loss: f64,
    pub residuals: Residuals,
    pub kkt: f64,
    pub converged: bool,
    pub history: Vec<OuterStep>,
}

impl SliceDesign {
    /// Design from given normalized cells, without optimization.
    pub fn from_cells(slice: usize, l_x: Vec<f64>, l_z: Vec<f64>, curve: &SliceCurve, width: f64) -> Self {
        let n = l_x.len();
        let loss = loss_eval(&l_x, &l_z, 1.0 / n as f64);
        let residuals = residuals(&l_x, &l_z, curve);
        Self {
            slice,
            l_x,
            l_z,
            scale: curve.length,
            width,
            loss,
            residuals,
            kkt: 0.0,
            converged: true,
            history: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.l_x.len()
    }

    /// Physical unit cells.
    pub fn cells(&self) -> Vec<UnitCell> {
        self.l_x
            .iter()
            .zip(&self.l_z)
            .map(|(&x, &z)| UnitCell {
                l_x: x * self.scale,
                l_z: z * self.scale,
                l_y: self.width,
                alpha: 0.0,
            })
            .collect()
    }

    /// Physical fold vertices `1..=N` at `psi`.
    pub fn vertices(&self, psi: f64) -> Vec<FoldVertex> {
        let pose = chain_pose(&self.cells(), psi, self.scale);
        pose.vertices[1..]
            .iter()
            .enumerate()
            .map(|(i, &position)| FoldVertex {
                position,
                unit_index: i + 1,
                slice_index: self.slice,
            })
            .collect()
    }

    /// Design traversed from the other end: unit `i` becomes `N + 1 - i`
    /// with cut length and height exchanged.
    pub fn mirrored(&self) -> Self {
        let mut m = self.clone();
        m.l_x = self.l_z.iter().rev().copied().collect();
        m.l_z = self.l_x.iter().rev().copied().collect();
        m
    }
}

/// `sum (l^{i+1} - l^i)^2 + sum (l^i - delta)^2` over both sequences.
pub fn loss_eval(l_x: &[f64], l_z: &[f64], delta: f64) -> f64 {
    let mut s = 0.0;
    for l in [l_x, l_z] {
        for w in l.windows(2) {
            s += (w[1] - w[0]).powi(2);
        }
        for v in l {
            s += (v - delta).powi(2);
        }
    }
    s
}

/// Gradient of [`loss_eval`] with respect to `[l_x, l_z]`.
pub fn loss_gradient(l_x: &[f64], l_z: &[f64], delta: f64) -> Vec<f64> {
    let n = l_x.len();
    let mut g = vec![0.0; 2 * n];
    for (off, l) in [(0, l_x), (n, l_z)] {
        for i in 0..n {
            let mut d = 2.0 * (l[i] - delta);
            if i > 0 {
                d += 2.0 * (l[i] - l[i - 1]);
            }
            if i + 1 < n {
                d -= 2.0 * (l[i + 1] - l[i]);
            }
            g[off + i] = d;
        }
    }
    g
}

/// Deployed normalized vertices `(X_i, Z_i)`, `i = 0..=N`.
fn deployed(l_x: &[f64], l_z: &[f64]) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(l_x.len() + 1);
    let (mut x, mut z) = (0.0, 1.0);
    out.push((x, z));
    for (a, b) in l_x.iter().zip(l_z) {
        x += a;
        z -= b;
        out.push((x, z));
    }
    out
}

pub fn residuals(l_x: &[f64], l_z: &[f64], curve: &SliceCurve) -> Residuals {
    let n = l_x.len();
    let v = deployed(l_x, l_z);
    let sx: f64 = l_x.iter().sum();
    let sz: f64 = l_z.iter().sum();
    let mut r = Residuals {
        isometry: (sx - 1.0).abs().max((sz - 1.0).abs()),
        ..Residuals::default()
    };
    for &(x, z) in &v[1..n] {
        r.on_curve = r.on_curve.max(curve.residual(x, z).0.abs());
        r.admissible = r.admissible.max(x * x + z * z - 2.0);
    }
    for i in 0..n {
        r.positivity = r.positivity.max(-l_x[i]).max(-l_z[i]);
        r.ordering = r.ordering.max(v[i].0 - v[i + 1].0);
    }
    r
}

struct SliceProblem<'a> {
    n: usize,
    delta: f64,
    curve: &'a SliceCurve,
}

impl SliceProblem<'_> {
    fn split<'x>(&self, x: &'x [f64]) -> (&'x [f64], &'x [f64]) {
        x.split_at(self.n)
    }

    /// Adds `sum_{i >= k} a_i` to `grad[k - 1]` and `-sum_{i >= k} b_i` to
    /// `grad[n + k - 1]`, for per-vertex partials `a_i`, `b_i` (`i = 1..N-1`)
    /// of a function of `(X_i, Z_i)`.
    fn scatter(&self, a: &[f64], b: &[f64], grad: &mut [f64]) {
        let (mut sa, mut sb) = (0.0, 0.0);
        for i in (1..self.n).rev() {
            sa += a[i - 1];
            sb += b[i - 1];
            grad[i - 1] += sa;
            grad[self.n + i - 1] -= sb;
        }
    }
}

// equality rows: [sum l_x - 1, sum l_z - 1, on-curve(1..N-1)]
// inequality rows: [l_x - MIN (N), l_z - MIN (N), ordering (N), admissible (N-1)]
impl ConstrainedProblem for SliceProblem<'_> {
    fn dim(&self) -> usize {
        2 * self.n
    }
    fn n_eq(&self) -> usize {
        self.n + 1
    }
    fn n_ineq(&self) -> usize {
        4 * self.n - 1
    }

    fn objective(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        let (lx, lz) = self.split(x);
        grad.copy_from_slice(&loss_gradient(lx, lz, self.delta));
        loss_eval(lx, lz, self.delta)
    }

    fn equalities(&self, x: &[f64], out: &mut [f64]) {
        let (lx, lz) = self.split(x);
        out[0] = lx.iter().sum::<f64>() - 1.0;
        out[1] = lz.iter().sum::<f64>() - 1.0;
        let v = deployed(lx, lz);
        for i in 1..self.n {
            out[1 + i] = self.curve.residual(v[i].0, v[i].1).0;
        }
    }

    fn inequalities(&self, x: &[f64], out: &mut [f64]) {
        let (lx, lz) = self.split(x);
        let n = self.n;
        let v = deployed(lx, lz);
        for i in 0..n {
            out[i] = lx[i] - MIN_CELL;
            out[n + i] = lz[i] - MIN_CELL;
            out[2 * n + i] = v[i + 1].0 - v[i].0;
        }
        for i in 1..n {
            let (a, b) = v[i];
            out[3 * n + i - 1] = 2.0 - a * a - b * b;
        }
    }

    fn eq_jtv(&self, x: &[f64], w: &[f64], grad: &mut [f64]) {
        let n = self.n;
        for i in 0..n {
            grad[i] += w[0];
            grad[n + i] += w[1];
        }
        let (lx, lz) = self.split(x);
        let v = deployed(lx, lz);
        let mut a = vec![0.0; n.saturating_sub(1)];
        let mut b = vec![0.0; n.saturating_sub(1)];
        for i in 1..n {
            let (_, dx, dz) = self.curve.residual(v[i].0, v[i].1);
            a[i - 1] = w[1 + i] * dx;
            b[i - 1] = w[1 + i] * dz;
        }
        self.scatter(&a, &b, grad);
    }

    fn ineq_jtv(&self, x: &[f64], w: &[f64], grad: &mut [f64]) {
        let n = self.n;
        for i in 0..n {
            grad[i] += w[i] + w[2 * n + i];
            grad[n + i] += w[n + i];
        }
        let (lx, lz) = self.split(x);
        let v = deployed(lx, lz);
        let mut a = vec![0.0; n.saturating_sub(1)];
        let mut b = vec![0.0; n.saturating_sub(1)];
        for i in 1..n {
            let wi = w[3 * n + i - 1];
            a[i - 1] = -2.0 * v[i].0 * wi;
            b[i - 1] = -2.0 * v[i].1 * wi;
        }
        self.scatter(&a, &b, grad);
    }
}

/// Solves the slice design problem for `n` units against `curve`.
pub fn optimize_slice(curve: &SliceCurve, n: usize, width: f64, config: &SolverConfig) -> Result<SliceDesign, SliceError> {
    if n == 0 {
        return Err(SliceError::EmptyChain);
    }
    config.validate()?;
    if n == 1 {
        // both endpoints are fixed, leaving nothing to optimize
        return Ok(SliceDesign::from_cells(curve.j, vec![1.0], vec![1.0], curve, width));
    }
    let delta = 1.0 / n as f64;
    let problem = SliceProblem { n, delta, curve };
    let x0 = vec![delta; 2 * n];
    let res = solve(&problem, &x0, &config.auglag());
    let (l_x, l_z) = res.x.split_at(n);
    let mut design = SliceDesign::from_cells(curve.j, l_x.to_vec(), l_z.to_vec(), curve, width);
    design.kkt = res.kkt;
    design.history = res.history;
    design.converged = res.converged;
    let (family, residual) = design.residuals.worst();
    if residual > INFEASIBLE_RESIDUAL {
        return Err(SliceError::Infeasible {
            slice: curve.j,
            family,
            residual,
        });
    }
    if !design.converged {
        return Err(SliceError::MaxIterations(Box::new(design)));
    }
    Ok(design)
}

/// Azimuthal error profile of a design against a quarter circle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AzimuthalError {
    /// `(phi^i - (i - 1/2) dphi)^2` per unit.
    pub values: Vec<f64>,
    /// `values / mean(values)`; all ones when the mean vanishes.
    pub normalized: Vec<f64>,
    pub degenerate: bool,
}

/// Error of the angular position of each unit's corner fold, measured about
/// the circle centre from the start of the arc, against the uniform
/// subdivision `(i - 1/2) pi / (2N)`.
pub fn azimuthal_error(design: &SliceDesign) -> AzimuthalError {
    let n = design.n();
    let dphi = std::f64::consts::FRAC_PI_2 / n as f64;
    let v = deployed(&design.l_x, &design.l_z);
    let values: Vec<f64> = (1..=n)
        .map(|i| {
            let (x, z) = (v[i].0, v[i - 1].1);
            let phi = std::f64::consts::FRAC_PI_2 - z.atan2(x);
            (phi - (i as f64 - 0.5) * dphi).powi(2)
        })
        .collect();
    let mean = values.iter().sum::<f64>() / n as f64;
    let degenerate = !(mean > 1e-300);
    let normalized = if degenerate {
        vec![1.0; n]
    } else {
        values.iter().map(|v| v / mean).collect()
    };
    AzimuthalError {
        values,
        normalized,
        degenerate,
    }
}

/// Optimized loss for each `N`, as `(delta = 1/N, loss)`.
pub fn convergence_study(curve: &SliceCurve, n_list: &[usize], config: &SolverConfig) -> Result<Vec<(f64, f64)>, SliceError> {
    n_list
        .iter()
        .map(|&n| optimize_slice(curve, n, 1.0, config).map(|d| (1.0 / n as f64, d.loss)))
        .collect()
}

/// Least-squares slope of `log(loss)` against `log(delta)`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = points.iter().map(|&(d, l)| (d.ln(), l.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
