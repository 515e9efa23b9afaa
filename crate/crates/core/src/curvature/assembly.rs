//! The plus-shaped patch of five deployed fold vertices.
//!
//! The centre sits at `(r cos phi, 0, r sin phi)`. Its in-slice neighbours are
//! vertices 1 and 2 of a chain of three square units of side `l`; its
//! cross-slice neighbours sit at `y = -/+ l_y` and are the vertex of a unit
//! scaled by `lambda`, shifted by `(l/2, 0, l/2)`. With `l = 1` and
//! `l_y = 1/sqrt(2)`, at `psi = pi/2` and `phi = pi/4`:
//!
//! * `K = 0` on `r = 3/sqrt(2)` (centre on the in-slice chord) and on
//!   `r = (1 + 2 lambda)/sqrt(2)` (centre on the cross-slice chord);
//! * `H = 0` on `r = (2 + lambda)/sqrt(2)`, midway between the two.

use serde::{Deserialize, Serialize};

use super::mesh::TriMesh;
use super::operators::{star_angle_defect, star_mean_curvature, VertexStar};
use super::CurvatureError;
use crate::kinematics::UnitCell;
use crate::scalar::{Dual, Scalar};
use crate::vec3::Vec3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssemblyParams {
    pub r: f64,
    pub phi: f64,
    pub lambda: f64,
}

impl AssemblyParams {
    pub fn new(r: f64, lambda: f64, phi: f64) -> Result<Self, CurvatureError> {
        let p = Self { r, phi, lambda };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), CurvatureError> {
        let ok = self.r > 0.0 && self.lambda > 0.0 && self.phi > 0.0 && self.phi < std::f64::consts::FRAC_PI_2;
        if ok {
            Ok(())
        } else {
            Err(CurvatureError::InvalidParams(format!(
                "need r > 0, lambda > 0, 0 < phi < pi/2; got {self:?}"
            )))
        }
    }
}

/// The calibrated base unit: square `1 x 1` cut, fold width `1/sqrt(2)`.
pub fn default_base() -> UnitCell {
    UnitCell {
        l_x: 1.0,
        l_z: 1.0,
        l_y: std::f64::consts::FRAC_1_SQRT_2,
        alpha: 0.0,
    }
}

/// Centre and ring `(v1, v4, v3, v2)`; this order makes the area-weighted
/// normal point away from the origin.
pub fn assembly_points<T: Scalar>(r: T, lambda: T, phi: T, base: &UnitCell, psi: f64) -> (Vec3<T>, [Vec3<T>; 4]) {
    let l = base.l_x;
    let (c, s) = (psi.cos(), psi.sin());
    let k = T::cst;
    let center = Vec3::new(r * phi.cos(), k(0.0), r * phi.sin());
    let v2 = Vec3::new(k(l + 2.0 * l * c), k(0.0), k(2.0 * l * s));
    let v4 = Vec3::new(k(2.0 * l + l * c), k(0.0), k(l * s));
    let cross = |y: f64| Vec3::new(k(0.5 * l) + lambda.scale(l * (1.0 + c)), k(y), k(0.5 * l) + lambda.scale(l * s));
    let v1 = cross(-base.l_y);
    let v3 = cross(base.l_y);
    (center, [v1, v4, v3, v2])
}

/// Checks that the ring projected onto the plane normal to the star normal
/// winds exactly once, counterclockwise.
fn check_embedding(center: Vec3, ring: &[Vec3]) -> Result<(), CurvatureError> {
    let n = star_mean_curvature(center, ring).normal;
    let proj = |p: Vec3| {
        let d = p - center;
        d - d.dot(n) * n
    };
    let mut total = 0.0;
    for i in 0..ring.len() {
        let a = proj(ring[i]);
        let b = proj(ring[(i + 1) % ring.len()]);
        let ang = a.cross(b).dot(n).atan2(a.dot(b));
        if ang <= 0.0 {
            return Err(CurvatureError::InvalidAssembly(format!("triangle {i} folds over")));
        }
        total += ang;
    }
    if (total - std::f64::consts::TAU).abs() > 1e-9 {
        return Err(CurvatureError::InvalidAssembly(format!("ring winds {total} rad")));
    }
    Ok(())
}

/// Five-vertex patch and its central star.
pub fn five_cell_assembly(params: &AssemblyParams, base: &UnitCell, psi: f64) -> Result<(TriMesh, VertexStar), CurvatureError> {
    params.validate()?;
    base.validate()?;
    if (base.l_x - base.l_z).abs() > 1e-12 {
        return Err(CurvatureError::InvalidParams("base unit must be square (l_x = l_z)".into()));
    }
    let (center, ring) = assembly_points(params.r, params.lambda, params.phi, base, psi);
    check_embedding(center, &ring)?;
    let mut vertices = vec![center];
    vertices.extend(ring);
    let faces = (0..4).map(|i| [0, i + 1, (i + 1) % 4 + 1]).collect();
    let mesh = TriMesh::new(vertices, faces)?;
    Ok((mesh, VertexStar::closed(center, ring.to_vec())))
}

/// Value and `(d/dr, d/dlambda)` of a curvature.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Graded {
    pub value: f64,
    pub grad: [f64; 2],
}

impl From<Dual<2>> for Graded {
    fn from(d: Dual<2>) -> Self {
        Self { value: d.re, grad: d.eps }
    }
}

/// `K` and `H` of the assembly with exact derivatives in `(r, lambda)`.
pub fn curvature_with_gradient(params: &AssemblyParams, base: &UnitCell, psi: f64) -> (Graded, Graded) {
    let r = Dual::<2>::var(params.r, 0);
    let l = Dual::<2>::var(params.lambda, 1);
    let (c, ring) = assembly_points(r, l, Dual::cst(params.phi), base, psi);
    let k = star_angle_defect(c, &ring);
    let h = star_mean_curvature(c, &ring).h;
    (k.into(), h.into())
}

/// `K` and `H` at a point, without building the mesh.
pub fn curvature_at(params: &AssemblyParams, base: &UnitCell, psi: f64) -> (f64, f64) {
    let (c, ring) = assembly_points(params.r, params.lambda, params.phi, base, psi);
    (star_angle_defect(c, &ring), star_mean_curvature(c, &ring).h)
}

pub const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Radii of the two `K = 0` loci at `phi = pi/4, psi = pi/2`.
pub fn k_zero_loci(lambda: f64) -> (f64, f64) {
    ((1.0 + 2.0 * lambda) / SQRT_2, 3.0 / SQRT_2)
}

/// Radius of the `H = 0` locus at `phi = pi/4, psi = pi/2`.
pub fn h_zero_locus(lambda: f64) -> f64 {
    (2.0 + lambda) / SQRT_2
}
