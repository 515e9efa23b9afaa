//! Closed-form kinematics of popup units.
//!
//! A rectangular unit is a four-bar linkage driven by the deployment angle
//! `psi`. In a slice the units form a staircase chain: vertex `i` of a chain of
//! total length `L` sits at
//!
//! ```text
//! x_i = sum_{k<=i} l_x^k + (L - sum_{k<=i} l_z^k) cos(psi)
//! z_i =                    (L - sum_{k<=i} l_z^k) sin(psi)
//! ```
//!
//! so `psi = 0` is the flat, closed state, `psi = pi/2` the deployed state and
//! `psi = pi` the fully opened sheet. Vertex `0` is the anchor `(L cos psi, L sin psi)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::vec3::Vec3;

/// Relative tolerance on the isometric constraint accepted by the chain builders.
pub const ISOMETRY_TOL: f64 = 1e-6;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum KinematicsError {
    #[error("invalid unit cell: {0}")]
    InvalidCell(String),
    #[error("deployment angle {0} outside [0, pi]")]
    InvalidAngle(f64),
    #[error("unit vertex formula requires a rectangular unit (alpha = {0})")]
    NotRectangular(f64),
    #[error("isometric constraint violated: sum of {which} = {sum}, expected {expected}")]
    IsometryViolation { which: &'static str, sum: f64, expected: f64 },
    #[error("degenerate connector points: {0}")]
    DegenerateConnector(&'static str),
    #[error("connector system is singular (condition number {condition:.3e})")]
    SingularSystem { condition: f64 },
}

/// Cut and fold dimensions of one popup unit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnitCell {
    /// Cut length along the sheet.
    pub l_x: f64,
    /// Cut height.
    pub l_z: f64,
    /// Fold width, equal to the local slice width.
    pub l_y: f64,
    /// Splay slope `tan(gamma)`; zero for rectangular units.
    #[serde(default)]
    pub alpha: f64,
}

impl UnitCell {
    pub fn new(l_x: f64, l_z: f64, l_y: f64) -> Result<Self, KinematicsError> {
        Self::splayed(l_x, l_z, l_y, 0.0)
    }

    pub fn splayed(l_x: f64, l_z: f64, l_y: f64, alpha: f64) -> Result<Self, KinematicsError> {
        let cell = Self { l_x, l_z, l_y, alpha };
        cell.validate()?;
        Ok(cell)
    }

    pub fn validate(&self) -> Result<(), KinematicsError> {
        for (name, v) in [("l_x", self.l_x), ("l_z", self.l_z), ("l_y", self.l_y)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(KinematicsError::InvalidCell(format!("{name} = {v} must be > 0")));
            }
        }
        if !self.alpha.is_finite() {
            return Err(KinematicsError::InvalidCell(format!("alpha = {} must be finite", self.alpha)));
        }
        Ok(())
    }

    pub fn is_rectangular(&self) -> bool {
        self.alpha == 0.0
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self {
            l_x: self.l_x * k,
            l_z: self.l_z * k,
            ..*self
        }
    }
}

/// Deployment angle in `[0, pi]`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct DeploymentAngle(f64);

impl DeploymentAngle {
    pub const FLAT: Self = Self(0.0);
    pub const DEPLOYED: Self = Self(std::f64::consts::FRAC_PI_2);
    pub const OPEN: Self = Self(std::f64::consts::PI);

    pub fn new(psi: f64) -> Result<Self, KinematicsError> {
        if (0.0..=std::f64::consts::PI).contains(&psi) {
            Ok(Self(psi))
        } else {
            Err(KinematicsError::InvalidAngle(psi))
        }
    }

    pub fn radians(self) -> f64 {
        self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoldVertex {
    pub position: Vec3,
    pub unit_index: usize,
    pub slice_index: usize,
}

/// Fold vertex of a single rectangular unit, `(l_x + l_z cos psi, 0, l_z sin psi)`.
pub fn unit_vertex(cell: &UnitCell, psi: DeploymentAngle) -> Result<Vec3, KinematicsError> {
    if !cell.is_rectangular() {
        return Err(KinematicsError::NotRectangular(cell.alpha));
    }
    let p = psi.radians();
    Ok(Vec3::new(cell.l_x + cell.l_z * p.cos(), 0.0, cell.l_z * p.sin()))
}

fn check_isometry(cells: &[UnitCell], length: f64) -> Result<(), KinematicsError> {
    let tol = ISOMETRY_TOL * length.abs().max(1.0);
    let sx: f64 = cells.iter().map(|c| c.l_x).sum();
    let sz: f64 = cells.iter().map(|c| c.l_z).sum();
    for (which, sum) in [("l_x", sx), ("l_z", sz)] {
        if (sum - length).abs() > tol {
            return Err(KinematicsError::IsometryViolation {
                which,
                sum,
                expected: length,
            });
        }
    }
    Ok(())
}

/// Staircase geometry of one slice: anchor, fold vertices and the corner
/// fold of every unit, all in the slice frame `(x, 0, z)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainPose {
    /// `vertices[0]` is the anchor, `vertices[i]` the fold vertex of unit `i`.
    pub vertices: Vec<Vec3>,
    /// `corners[i - 1]` joins the x-panel and the z-panel of unit `i`.
    pub corners: Vec<Vec3>,
}

/// Pose of a chain at `psi` without the isometry check; callers that build
/// chains from validated designs use this directly.
pub fn chain_pose(cells: &[UnitCell], psi: f64, length: f64) -> ChainPose {
    let (c, s) = (psi.cos(), psi.sin());
    let mut vertices = Vec::with_capacity(cells.len() + 1);
    let mut corners = Vec::with_capacity(cells.len());
    let mut sx = 0.0;
    let mut rem = length;
    vertices.push(Vec3::new(rem * c, 0.0, rem * s));
    for cell in cells {
        sx += cell.l_x;
        corners.push(Vec3::new(sx + rem * c, 0.0, rem * s));
        rem -= cell.l_z;
        vertices.push(Vec3::new(sx + rem * c, 0.0, rem * s));
    }
    ChainPose { vertices, corners }
}

/// Fold vertices `1..=N` of a chain of units with `sum l_x = sum l_z = length`.
pub fn chain_vertices(cells: &[UnitCell], psi: DeploymentAngle, length: f64) -> Result<Vec<FoldVertex>, KinematicsError> {
    for c in cells {
        c.validate()?;
    }
    check_isometry(cells, length)?;
    let pose = chain_pose(cells, psi.radians(), length);
    Ok(pose.vertices[1..]
        .iter()
        .enumerate()
        .map(|(i, &position)| FoldVertex {
            position,
            unit_index: i + 1,
            slice_index: 0,
        })
        .collect())
}

/// Corner points of the x-panel and z-panel of every unit, thickened by
/// `width` along y around `y_center`. Each panel is `[a-, a+, b+, b-]`.
pub fn unit_panels(cells: &[UnitCell], psi: f64, length: f64, y_center: f64, width: f64) -> Vec<[Vec3; 4]> {
    let pose = chain_pose(cells, psi, length);
    let h = 0.5 * width;
    let quad = |a: Vec3, b: Vec3| {
        [
            Vec3::new(a.x, y_center - h, a.z),
            Vec3::new(a.x, y_center + h, a.z),
            Vec3::new(b.x, y_center + h, b.z),
            Vec3::new(b.x, y_center - h, b.z),
        ]
    };
    let mut out = Vec::with_capacity(2 * cells.len());
    for i in 0..cells.len() {
        out.push(quad(pose.vertices[i], pose.corners[i]));
        out.push(quad(pose.corners[i], pose.vertices[i + 1]));
    }
    out
}

/// Splay parameter `t = alpha cos(psi / 2)`.
pub fn splay_t(alpha: f64, psi: f64) -> f64 {
    alpha * (0.5 * psi).cos()
}

/// Fold orientation of a splayed unit, `2 atan(t)` written with the
/// two-argument arctangent so that `t = 1` gives exactly `pi / 2`.
pub fn splay_theta(alpha: f64, psi: f64) -> f64 {
    let t = splay_t(alpha, psi);
    (2.0 * t).atan2(1.0 - t * t)
}

/// Fold vertex of a splayed unit: `(w (1 - t^2)/(1 + t^2), w 2t/(1 + t^2), 0)`.
/// The second component is the out-of-plane height.
pub fn splayed_vertex(cell: &UnitCell, psi: DeploymentAngle) -> Vec3 {
    let w = cell.l_y;
    let t = splay_t(cell.alpha, psi.radians());
    let q = 1.0 + t * t;
    Vec3::new(w * (1.0 - t * t) / q, w * 2.0 * t / q, 0.0)
}

/// Offset between consecutive splayed cells of opposite slope.
///
/// Evaluated as `2 (b1 - b3) s c^2 / (1 + s^2 c^2)` with `c = cos(psi/2)`,
/// which is the bracketed closed form with the `1/s` prefactor cancelled, so
/// `s = 0` yields `0`.
pub fn strip_offset(b1: f64, b3: f64, slope: f64, psi: f64) -> f64 {
    let c = (0.5 * psi).cos();
    let u = slope * c;
    2.0 * (b1 - b3) * slope * c * c / (1.0 + u * u)
}

/// Solution of the connecting-strip construction between two splayed units.
#[derive(Clone, Debug, PartialEq)]
pub struct ConnectorSolve {
    pub p: [Vec3; 4],
    pub o1: Vec3,
    pub o2: Vec3,
    /// Offset applied to `O1` (`O1.y = g1 - d`).
    pub d: f64,
    /// Offset applied to `O2` (`O2.y = g2 + d2`).
    pub d2: f64,
    /// Residuals of (alignment, inclination) for `O1` then `O2`.
    pub residuals: [f64; 4],
    pub condition: f64,
}

const SINGULAR_CONDITION: f64 = 1e12;

/// Solves the two linear fold conditions for the `(x, z)` of a point `O` whose
/// y-coordinate is fixed:
///
/// * alignment `(A - O).(B - A) = (C - O).(D - C)`
/// * inclination `(A - O).(B - A) / |B - A|^2 = cos(gamma)`
fn solve_fold_point(a: Vec3, b: Vec3, c: Vec3, d: Vec3, y: f64, cos_gamma: f64) -> Result<(Vec3, f64), KinematicsError> {
    let dab = b - a;
    let dcd = d - c;
    let nab = dab.norm_sq();
    // row 1: x (dab.x - dcd.x) + z (dab.z - dcd.z) = a.dab - c.dcd - y (dab.y - dcd.y)
    // row 2: x dab.x + z dab.z = a.dab - y dab.y - cos_gamma |dab|^2
    let m = [[dab.x - dcd.x, dab.z - dcd.z], [dab.x, dab.z]];
    let rhs = [
        a.dot(dab) - c.dot(dcd) - y * (dab.y - dcd.y),
        a.dot(dab) - y * dab.y - cos_gamma * nab,
    ];
    let condition = condition_2x2(m);
    if !condition.is_finite() || condition > SINGULAR_CONDITION {
        return Err(KinematicsError::SingularSystem { condition });
    }
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let x = (rhs[0] * m[1][1] - m[0][1] * rhs[1]) / det;
    let z = (m[0][0] * rhs[1] - rhs[0] * m[1][0]) / det;
    Ok((Vec3::new(x, y, z), condition))
}

fn condition_2x2(m: [[f64; 2]; 2]) -> f64 {
    let (a, b, c, d) = (m[0][0], m[0][1], m[1][0], m[1][1]);
    let fro2 = a * a + b * b + c * c + d * d;
    let det = (a * d - b * c).abs();
    if det == 0.0 {
        return f64::INFINITY;
    }
    // sigma_max / sigma_min from the 2x2 singular values
    let disc = (fro2 * fro2 - 4.0 * det * det).max(0.0).sqrt();
    let smax = ((fro2 + disc) / 2.0).sqrt();
    let smin = det / smax;
    smax / smin
}

/// Residuals `(alignment, inclination)` of a fold point.
pub fn fold_point_residuals(a: Vec3, b: Vec3, c: Vec3, d: Vec3, o: Vec3, cos_gamma: f64) -> [f64; 2] {
    let dab = b - a;
    let lhs = (a - o).dot(dab);
    [lhs - (c - o).dot(d - c), lhs / dab.norm_sq() - cos_gamma]
}

/// Fold-intersection points `O1`, `O2` of the strip connecting two splayed
/// cells with fixed edge points `P1..P4` and splay slope `slope`.
pub fn solve_connector(p: [Vec3; 4], slope: f64, psi: DeploymentAngle) -> Result<ConnectorSolve, KinematicsError> {
    let [p1, p2, p3, p4] = p;
    if p1.distance(p2) < 1e-12 {
        return Err(KinematicsError::DegenerateConnector("P1 coincides with P2"));
    }
    if p3.distance(p4) < 1e-12 {
        return Err(KinematicsError::DegenerateConnector("P3 coincides with P4"));
    }
    let psi = psi.radians();
    let cos_gamma = slope.atan().cos();
    let d = strip_offset(p1.z, p3.z, slope, psi);
    let d2 = strip_offset(p2.z, p4.z, slope, psi);
    let (o1, c1) = solve_fold_point(p1, p2, p3, p4, p1.y - d, cos_gamma)?;
    let (o2, c2) = solve_fold_point(p2, p1, p4, p3, p2.y + d2, cos_gamma)?;
    let r1 = fold_point_residuals(p1, p2, p3, p4, o1, cos_gamma);
    let r2 = fold_point_residuals(p2, p1, p4, p3, o2, cos_gamma);
    Ok(ConnectorSolve {
        p,
        o1,
        o2,
        d,
        d2,
        residuals: [r1[0], r1[1], r2[0], r2[1]],
        condition: c1.max(c2),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_8, PI};

    fn psi(v: f64) -> DeploymentAngle {
        DeploymentAngle::new(v).unwrap()
    }

    fn close(a: Vec3, b: Vec3, tol: f64) -> bool {
        a.max_abs_diff(b) < tol
    }

    #[test]
    fn unit_vertex_flat_deployed_folded() {
        let c = UnitCell::new(1.0, 1.0, 1.0).unwrap();
        assert!(close(unit_vertex(&c, psi(0.0)).unwrap(), Vec3::new(2.0, 0.0, 0.0), 1e-15));
        assert!(close(unit_vertex(&c, psi(FRAC_PI_2)).unwrap(), Vec3::new(1.0, 0.0, 1.0), 1e-15));
        assert!(close(unit_vertex(&c, psi(PI)).unwrap(), Vec3::new(0.0, 0.0, 0.0), 1e-15));
    }

    #[test]
    fn unit_vertex_rejects_splayed_cells() {
        let c = UnitCell::splayed(1.0, 1.0, 1.0, 0.3).unwrap();
        assert!(matches!(unit_vertex(&c, psi(0.1)), Err(KinematicsError::NotRectangular(_))));
    }

    #[test]
    fn invalid_cells_and_angles_are_rejected() {
        assert!(UnitCell::new(0.0, 1.0, 1.0).is_err());
        assert!(UnitCell::new(1.0, -1.0, 1.0).is_err());
        assert!(UnitCell::splayed(1.0, 1.0, 1.0, f64::NAN).is_err());
        assert!(DeploymentAngle::new(-0.1).is_err());
        assert!(DeploymentAngle::new(3.2).is_err());
    }

    #[test]
    fn chain_single_unit() {
        let cells = [UnitCell::new(1.0, 1.0, 1.0).unwrap()];
        let v = chain_vertices(&cells, psi(FRAC_PI_2), 1.0).unwrap();
        assert_eq!(v.len(), 1);
        assert!(close(v[0].position, Vec3::new(1.0, 0.0, 0.0), 1e-15));
    }

    #[test]
    fn uniform_chain_traces_the_diagonal() {
        let cells = vec![UnitCell::new(0.25, 0.25, 0.25).unwrap(); 4];
        let v = chain_vertices(&cells, psi(FRAC_PI_2), 1.0).unwrap();
        for (k, fv) in v.iter().enumerate() {
            let i = (k + 1) as f64;
            assert!(close(fv.position, Vec3::new(i / 4.0, 0.0, 1.0 - i / 4.0), 1e-15));
            assert!((fv.position.x + fv.position.z - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn two_unit_chain_at_sixty_degrees() {
        // hand evaluation: cos(pi/3) = 1/2, sin(pi/3) = sqrt(3)/2
        // vertex 1: x = 0.3 + 0.5 * 0.5 = 0.55, z = 0.5 * sqrt(3)/2
        // vertex 2: x = 1.0 + 0, z = 0
        let cells = [UnitCell::new(0.3, 0.5, 0.1).unwrap(), UnitCell::new(0.7, 0.5, 0.1).unwrap()];
        let v = chain_vertices(&cells, psi(FRAC_PI_3), 1.0).unwrap();
        assert!(close(v[0].position, Vec3::new(0.55, 0.0, 0.25 * 3f64.sqrt()), 1e-15));
        assert!(close(v[1].position, Vec3::new(1.0, 0.0, 0.0), 1e-15));
    }

    #[test]
    fn chain_rejects_non_isometric_cells() {
        let cells = [UnitCell::new(0.6, 0.5, 0.1).unwrap(), UnitCell::new(0.7, 0.5, 0.1).unwrap()];
        let err = chain_vertices(&cells, psi(FRAC_PI_2), 1.0).unwrap_err();
        assert!(matches!(err, KinematicsError::IsometryViolation { which: "l_x", .. }));
    }

    #[test]
    fn splay_theta_examples() {
        assert_eq!(splay_theta(0.0, 1.3), 0.0);
        assert_eq!(splay_theta(1.0, 0.0), FRAC_PI_2);
        assert!((splay_theta(FRAC_PI_8.tan(), 0.0) - FRAC_PI_4).abs() < 1e-15);
    }

    #[test]
    fn splayed_vertex_examples() {
        let flat = UnitCell::splayed(1.0, 1.0, 2.0, 0.0).unwrap();
        assert_eq!(splayed_vertex(&flat, psi(0.7)), Vec3::new(2.0, 0.0, 0.0));
        let peak = UnitCell::splayed(1.0, 1.0, 2.0, 1.0).unwrap();
        assert!(close(splayed_vertex(&peak, psi(0.0)), Vec3::new(0.0, 2.0, 0.0), 1e-15));
        // t^2 = 1/2: x = w (1/2)/(3/2) = w/3, y = w sqrt(2)/(3/2) = 2 sqrt(2) w / 3
        let w = 1.5;
        let c = UnitCell::splayed(1.0, 1.0, w, 1.0).unwrap();
        let v = splayed_vertex(&c, psi(FRAC_PI_2));
        assert!(close(v, Vec3::new(w / 3.0, 2.0 * 2f64.sqrt() * w / 3.0, 0.0), 1e-15));
    }

    #[test]
    fn strip_offset_examples() {
        assert!(strip_offset(2.0, 0.5, 0.7, PI).abs() < 1e-15);
        assert_eq!(strip_offset(0.4, 0.4, 0.7, 0.3), 0.0);
        assert!((strip_offset(1.0, 0.0, 1.0, 0.0) - 1.0).abs() < 1e-15);
        assert_eq!(strip_offset(1.0, 0.0, 0.0, 0.5), 0.0);
    }

    #[test]
    fn strip_offset_matches_bracketed_form() {
        for &(b1, b3, s, p) in &[(1.3, 0.2, 0.4, 0.9), (0.1, 0.8, 2.5, 2.0), (2.0, -1.0, -0.7, 0.1)] {
            let u: f64 = s * (0.5f64 * p).cos();
            let direct = (b1 - b3) / s * (1.0 - (1.0 - u * u) / (1.0 + u * u));
            assert!((strip_offset(b1, b3, s, p) - direct).abs() < 1e-13);
        }
    }

    fn generic_points() -> [Vec3; 4] {
        [
            Vec3::new(0.2, 0.0, 0.9),
            Vec3::new(1.1, 0.7, 1.6),
            Vec3::new(-0.3, 0.1, 0.2),
            Vec3::new(0.4, 0.9, -0.5),
        ]
    }

    #[test]
    fn connector_generic_residuals_vanish() {
        let sol = solve_connector(generic_points(), 0.6, psi(1.1)).unwrap();
        for r in sol.residuals {
            assert!(r.abs() < 1e-10, "residual {r}");
        }
        assert!((sol.o1.y - (0.0 - sol.d)).abs() < 1e-15);
        assert!((sol.o2.y - (0.7 + sol.d2)).abs() < 1e-15);
    }

    #[test]
    fn connector_flat_limit_has_no_offset() {
        let p = generic_points();
        let sol = solve_connector(p, 0.6, DeploymentAngle::OPEN).unwrap();
        assert!(sol.d.abs() < 1e-15);
        assert!((sol.o1.y - p[0].y).abs() < 1e-15);
        assert!(sol.residuals.iter().all(|r| r.abs() < 1e-10));
    }

    #[test]
    fn connector_mirror_symmetric_points_give_point_on_symmetry_plane() {
        // reflection z -> -z swaps P1 <-> P3 and P2 <-> P4
        let p = [
            Vec3::new(1.0, 0.0, 0.5),
            Vec3::new(2.0, 1.0, 0.8),
            Vec3::new(1.0, 0.0, -0.5),
            Vec3::new(2.0, 1.0, -0.8),
        ];
        // equal heights b1 = -b3 give a nonzero offset, still symmetric
        let sol = solve_connector(p, 0.5, psi(0.8)).unwrap();
        assert!(sol.o1.z.abs() < 1e-12, "O1 = {:?}", sol.o1);
    }

    #[test]
    fn connector_reports_singular_systems() {
        // all fold directions parallel to y: x and z drop out of both equations
        let p = [
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(1.0, 1.0, 0.0),
        ];
        assert!(matches!(
            solve_connector(p, 0.5, psi(0.8)),
            Err(KinematicsError::SingularSystem { .. })
        ));
        let mut q = generic_points();
        q[1] = q[0];
        assert!(matches!(
            solve_connector(q, 0.5, psi(0.8)),
            Err(KinematicsError::DegenerateConnector(_))
        ));
    }

    proptest! {
        #[test]
        fn unit_vertex_moves_on_circle(lx in 0.01f64..5.0, lz in 0.01f64..5.0, p in 0.0f64..PI) {
            let c = UnitCell::new(lx, lz, 1.0).unwrap();
            let v = unit_vertex(&c, psi(p)).unwrap();
            prop_assert!(((v - Vec3::new(lx, 0.0, 0.0)).norm() - lz).abs() < 1e-12);
        }

        #[test]
        fn splayed_vertex_stays_on_circle(w in 0.01f64..4.0, a in 0.0f64..20.0, p in 0.0f64..PI) {
            let c = UnitCell::splayed(1.0, 1.0, w, a).unwrap();
            let v = splayed_vertex(&c, psi(p));
            prop_assert!((v.norm() - w).abs() < 1e-12 * w.max(1.0));
            let theta = splay_theta(a, p);
            prop_assert!((0.0..PI).contains(&theta));
            // the vertex direction is the fold orientation
            prop_assert!((v.y.atan2(v.x) - theta).abs() < 1e-12);
        }

        #[test]
        fn panels_are_rigid_under_deployment(
            lx in proptest::collection::vec(0.05f64..1.0, 1..6),
            lz_raw in proptest::collection::vec(0.05f64..1.0, 6),
            p in 0.0f64..PI,
        ) {
            let n = lx.len();
            let length: f64 = lx.iter().sum();
            let sz: f64 = lz_raw[..n].iter().sum();
            let cells: Vec<UnitCell> = (0..n)
                .map(|i| UnitCell::new(lx[i], lz_raw[i] * length / sz, 0.3).unwrap())
                .collect();
            let a = unit_panels(&cells, p, length, 0.5, 0.3);
            let b = unit_panels(&cells, 0.2, length, 0.5, 0.3);
            for (qa, qb) in a.iter().zip(&b) {
                for i in 0..4 {
                    for j in i + 1..4 {
                        prop_assert!((qa[i].distance(qa[j]) - qb[i].distance(qb[j])).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn splay_height_peaks_on_unit_level_set() {
        let w = 1.0;
        let psi0 = 0.9;
        let a_star = 1.0 / (0.5f64 * psi0).cos();
        let h = |a: f64| splayed_vertex(&UnitCell::splayed(1.0, 1.0, w, a).unwrap(), psi(psi0)).y;
        assert!((h(a_star) - w).abs() < 1e-15);
        let mut prev = h(0.0);
        for k in 1..=100 {
            let a = a_star * k as f64 / 100.0;
            assert!(h(a) >= prev);
            prev = h(a);
        }
        for k in 1..=100 {
            let a = a_star * (1.0 + k as f64 / 20.0);
            assert!(h(a) <= prev);
            prev = h(a);
        }
    }
}
