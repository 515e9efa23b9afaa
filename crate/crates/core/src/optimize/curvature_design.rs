//! Choosing the five-cell assembly parameters `(r, lambda)` that realise a
//! prescribed local curvature.
//!
//! The assembly's slice loss is `8 (lambda - 1)^2`: two cross-slice units of
//! size `lambda` next to a unit of size 1 contribute one smoothness and one
//! uniformity term per cut dimension. Curvature is added as a penalty, either
//! on `(K, H)` directly or on the fundamental forms of the patch.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::bfgs::{minimize, BfgsOptions};
use crate::curvature::{
    assembly::{curvature_at, curvature_with_gradient, default_base, five_cell_assembly, AssemblyParams},
    forms::{estimate_fundamental_forms, FundamentalForms},
    map::GridAxis,
    CurvatureError,
};
use crate::kinematics::UnitCell;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum DesignError {
    #[error("target K = {target} lies outside the swept range [{min:.4}, {max:.4}]; nearest: r = {:.4}, lambda = {:.4}, K = {:.4}", .nearest.r, .nearest.lambda, .nearest.k)]
    Unattainable {
        target: f64,
        min: f64,
        max: f64,
        nearest: DesignPoint,
    },
    #[error("invalid curvature target: {0}")]
    InvalidTarget(String),
    #[error(transparent)]
    Curvature(#[from] CurvatureError),
}

/// Reference forms with their weights.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormsTarget {
    pub a: [[f64; 2]; 2],
    pub b: [[f64; 2]; 2],
    pub lambda_a: f64,
    pub lambda_b: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvatureTarget {
    pub k: f64,
    #[serde(default)]
    pub h: f64,
    #[serde(default = "default_lambda_k")]
    pub lambda_k: f64,
    #[serde(default)]
    pub lambda_h: f64,
    #[serde(default)]
    pub forms: Option<FormsTarget>,
}

fn default_lambda_k() -> f64 {
    1e6
}

impl CurvatureTarget {
    pub fn gaussian(k: f64) -> Self {
        Self {
            k,
            h: 0.0,
            lambda_k: default_lambda_k(),
            lambda_h: 0.0,
            forms: None,
        }
    }

    pub fn validate(&self) -> Result<(), DesignError> {
        let mut weights = vec![self.lambda_k, self.lambda_h];
        if let Some(f) = &self.forms {
            weights.extend([f.lambda_a, f.lambda_b]);
        }
        if !self.k.is_finite() || !self.h.is_finite() || weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(DesignError::InvalidTarget(format!("{self:?}")));
        }
        Ok(())
    }
}

/// Region of the `(r, lambda)` plane searched at fixed `phi` and `psi`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DesignDomain {
    pub r: GridAxis,
    pub lambda: GridAxis,
    pub phi: f64,
    pub psi: f64,
    pub base: UnitCell,
}

impl Default for DesignDomain {
    fn default() -> Self {
        Self {
            r: GridAxis::new(0.2, 6.0, 59),
            lambda: GridAxis::new(0.2, 3.0, 29),
            phi: std::f64::consts::FRAC_PI_4,
            psi: std::f64::consts::FRAC_PI_2,
            base: default_base(),
        }
    }
}

impl DesignDomain {
    fn contains(&self, r: f64, lambda: f64) -> bool {
        r >= self.r.min && r <= self.r.max && lambda >= self.lambda.min && lambda <= self.lambda.max
    }

    pub fn params(&self, r: f64, lambda: f64) -> AssemblyParams {
        AssemblyParams { r, lambda, phi: self.phi }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DesignPoint {
    pub r: f64,
    pub lambda: f64,
    pub k: f64,
    pub h: f64,
    pub loss: f64,
}

/// `8 (lambda - 1)^2`.
pub fn assembly_slice_loss(lambda: f64) -> f64 {
    8.0 * (lambda - 1.0).powi(2)
}

/// Curvature-augmented loss and its gradient in `(r, lambda)`.
pub fn curvature_loss(target: &CurvatureTarget, domain: &DesignDomain, r: f64, lambda: f64) -> (f64, [f64; 2]) {
    let (k, h) = curvature_with_gradient(&domain.params(r, lambda), &domain.base, domain.psi);
    let (dk, dh) = (k.value - target.k, h.value - target.h);
    let loss = assembly_slice_loss(lambda) + target.lambda_k * dk * dk + target.lambda_h * dh * dh;
    let mut g: [f64; 2] = std::array::from_fn(|i| 2.0 * target.lambda_k * dk * k.grad[i] + 2.0 * target.lambda_h * dh * h.grad[i]);
    g[1] += 16.0 * (lambda - 1.0);
    (loss, g)
}

fn forms_at(domain: &DesignDomain, r: f64, lambda: f64) -> Result<FundamentalForms, CurvatureError> {
    let (mesh, _) = five_cell_assembly(&domain.params(r, lambda), &domain.base, domain.psi)?;
    estimate_fundamental_forms(&mesh, 0)
}

/// Slice loss plus `lambda_a |a - a~|^2 + lambda_b |b - b~|^2` (Frobenius).
pub fn forms_loss(target: &FormsTarget, domain: &DesignDomain, r: f64, lambda: f64) -> Result<f64, CurvatureError> {
    let f = forms_at(domain, r, lambda)?;
    let dist = |m: [[f64; 2]; 2], t: [[f64; 2]; 2]| -> f64 { (0..2).flat_map(|i| (0..2).map(move |j| (m[i][j] - t[i][j]).powi(2))).sum() };
    Ok(assembly_slice_loss(lambda) + target.lambda_a * dist(f.a, target.a) + target.lambda_b * dist(f.b, target.b))
}

struct Sample {
    r: f64,
    lambda: f64,
    k: f64,
}

fn sweep(domain: &DesignDomain) -> Vec<Sample> {
    let mut out = Vec::new();
    for lambda in domain.lambda.values() {
        for r in domain.r.values() {
            let p = domain.params(r, lambda);
            if five_cell_assembly(&p, &domain.base, domain.psi).is_err() {
                continue;
            }
            let (k, _) = curvature_at(&p, &domain.base, domain.psi);
            out.push(Sample { r, lambda, k });
        }
    }
    out
}

fn point(domain: &DesignDomain, target: &CurvatureTarget, r: f64, lambda: f64) -> DesignPoint {
    let (k, h) = curvature_at(&domain.params(r, lambda), &domain.base, domain.psi);
    let loss = match &target.forms {
        Some(f) => forms_loss(f, domain, r, lambda).unwrap_or(f64::INFINITY),
        None => curvature_loss(target, domain, r, lambda).0,
    };
    DesignPoint { r, lambda, k, h, loss }
}

/// Minimizes the curvature-augmented loss over `domain`. A grid sweep gives
/// the attainable `K` range and the starting point; BFGS refines it.
pub fn optimize_assembly_curvature(target: &CurvatureTarget, domain: &DesignDomain) -> Result<DesignPoint, DesignError> {
    target.validate()?;
    AssemblyParams::new(domain.r.min.max(1e-9), domain.lambda.min.max(1e-9), domain.phi)?;
    let samples = sweep(domain);
    if samples.is_empty() {
        return Err(DesignError::InvalidTarget("no valid assembly in the design domain".into()));
    }
    let (kmin, kmax) = samples
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), s| (a.min(s.k), b.max(s.k)));
    let constrains_k = target.forms.is_none() && target.lambda_k > 0.0;
    if constrains_k && (target.k < kmin || target.k > kmax) {
        let s = samples
            .iter()
            .min_by(|a, b| (a.k - target.k).abs().total_cmp(&(b.k - target.k).abs()))
            .expect("non-empty");
        return Err(DesignError::Unattainable {
            target: target.k,
            min: kmin,
            max: kmax,
            nearest: point(domain, target, s.r, s.lambda),
        });
    }

    let start = samples
        .iter()
        .map(|s| (s, point(domain, target, s.r, s.lambda).loss))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(s, _)| (s.r, s.lambda))
        .expect("non-empty");

    let x = match &target.forms {
        None => {
            let res = minimize(
                |x, g| {
                    if !domain.contains(x[0], x[1]) {
                        return f64::INFINITY;
                    }
                    let (f, grad) = curvature_loss(target, domain, x[0], x[1]);
                    g.copy_from_slice(&grad);
                    f
                },
                &[start.0, start.1],
                &BfgsOptions {
                    grad_tol: 1e-9,
                    max_iter: 500,
                },
            );
            res.x
        }
        Some(forms) => {
            let h = 1e-6;
            let res = minimize(
                |x, g| {
                    let eval = |r: f64, l: f64| {
                        if domain.contains(r, l) {
                            forms_loss(forms, domain, r, l).unwrap_or(f64::INFINITY)
                        } else {
                            f64::INFINITY
                        }
                    };
                    let f = eval(x[0], x[1]);
                    g[0] = (eval(x[0] + h, x[1]) - eval(x[0] - h, x[1])) / (2.0 * h);
                    g[1] = (eval(x[0], x[1] + h) - eval(x[0], x[1] - h)) / (2.0 * h);
                    f
                },
                &[start.0, start.1],
                &BfgsOptions {
                    grad_tol: 1e-7,
                    max_iter: 300,
                },
            );
            res.x
        }
    };
    Ok(point(domain, target, x[0], x[1]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::assembly::k_zero_loci;

    #[test]
    fn signed_targets_land_in_three_regimes() {
        let d = DesignDomain::default();
        for k in [-1.0, 0.0, 1.0] {
            let p = optimize_assembly_curvature(&CurvatureTarget::gaussian(k), &d).unwrap();
            assert!((p.k - k).abs() < 1e-3, "K = {k}: {p:?}");
        }
    }

    #[test]
    fn flat_target_sits_on_a_zero_locus() {
        let p = optimize_assembly_curvature(&CurvatureTarget::gaussian(0.0), &DesignDomain::default()).unwrap();
        let (a, b) = k_zero_loci(p.lambda);
        assert!((p.r - a).abs().min((p.r - b).abs()) < 1e-3, "{p:?}");
    }

    #[test]
    fn zero_weights_recover_the_uniform_assembly() {
        let t = CurvatureTarget {
            lambda_k: 0.0,
            ..CurvatureTarget::gaussian(0.3)
        };
        let p = optimize_assembly_curvature(&t, &DesignDomain::default()).unwrap();
        assert!((p.lambda - 1.0).abs() < 1e-6 && p.loss < 1e-12);
    }

    #[test]
    fn out_of_range_target_reports_the_nearest_point() {
        let err = optimize_assembly_curvature(&CurvatureTarget::gaussian(-50.0), &DesignDomain::default()).unwrap_err();
        match err {
            DesignError::Unattainable { min, nearest, .. } => assert!((nearest.k - min).abs() < 1e-12),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn loss_gradient_matches_differences() {
        let d = DesignDomain::default();
        let t = CurvatureTarget {
            h: 0.2,
            lambda_h: 3.0,
            ..CurvatureTarget::gaussian(-0.4)
        };
        let (r, l) = (2.3, 1.3);
        let (_, g) = curvature_loss(&t, &d, r, l);
        let h = 1e-6;
        let fd_r = (curvature_loss(&t, &d, r + h, l).0 - curvature_loss(&t, &d, r - h, l).0) / (2.0 * h);
        let fd_l = (curvature_loss(&t, &d, r, l + h).0 - curvature_loss(&t, &d, r, l - h).0) / (2.0 * h);
        assert!((g[0] - fd_r).abs() < 1e-5 * fd_r.abs().max(1.0));
        assert!((g[1] - fd_l).abs() < 1e-5 * fd_l.abs().max(1.0));
    }

    #[test]
    fn forms_target_recovers_its_source() {
        let d = DesignDomain::default();
        let src = forms_at(&d, 1.9, 1.1).unwrap();
        let t = CurvatureTarget {
            forms: Some(FormsTarget {
                a: src.a,
                b: src.b,
                lambda_a: 1e3,
                lambda_b: 1e3,
            }),
            ..CurvatureTarget::gaussian(0.0)
        };
        let p = optimize_assembly_curvature(&t, &d).unwrap();
        let f = forms_at(&d, p.r, p.lambda).unwrap();
        assert!(
            (f.gaussian() - src.gaussian()).abs() < 0.05 * src.gaussian().abs().max(0.1),
            "{p:?}"
        );
    }
}
