//! First and second fundamental forms at a mesh vertex.
//!
//! The surface is written as a height field `h(u, v)` over the tangent plane
//! of the vertex normal. A quadratic `h` is fitted to the one-ring positions
//! together with the slopes implied by each incident face normal; the slope
//! rows keep the fit well-posed on four-vertex stars,
//! where the positions alone cannot separate the three second derivatives.

use nalgebra::{DMatrix, DVector, Matrix2};
use serde::{Deserialize, Serialize};

use super::mesh::TriMesh;
use super::CurvatureError;
use crate::vec3::Vec3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FundamentalForms {
    pub a: [[f64; 2]; 2],
    pub b: [[f64; 2]; 2],
}

impl FundamentalForms {
    fn mat(m: [[f64; 2]; 2]) -> Matrix2<f64> {
        Matrix2::new(m[0][0], m[0][1], m[1][0], m[1][1])
    }

    pub fn det_a(&self) -> f64 {
        Self::mat(self.a).determinant()
    }

    pub fn gaussian(&self) -> f64 {
        Self::mat(self.b).determinant() / self.det_a()
    }

    pub fn mean(&self) -> f64 {
        let a = Self::mat(self.a);
        let inv = a.try_inverse().unwrap_or_else(Matrix2::zeros);
        0.5 * (inv * Self::mat(self.b)).trace()
    }
}

const RANK_TOL: f64 = 1e-9;

/// Minimum corner-angle cosine for a face to count as clearly acute.
const ACUTE_COS: f64 = 0.05;

/// Where a face normal is taken to sample the surface slope. On a sphere the
/// chord-plane normal points at the circumcentre, so clearly acute faces use
/// it; other faces fall back to the centroid, which stays inside the face.
fn slope_site([p, q, r]: [Vec3; 3]) -> Vec3 {
    let (a, b) = (q - p, r - p);
    let cos = |u: Vec3, v: Vec3| u.dot(v) / (u.norm() * v.norm());
    let acute = cos(a, b) > ACUTE_COS && cos(p - q, r - q) > ACUTE_COS && cos(p - r, q - r) > ACUTE_COS;
    if !acute {
        return (1.0 / 3.0) * (p + q + r);
    }
    let n = a.cross(b);
    let offset = (a.norm_sq() * b.cross(n) + b.norm_sq() * n.cross(a)).scaled(0.5 / n.norm_sq());
    p + offset
}

pub fn estimate_fundamental_forms(mesh: &TriMesh, vertex: usize) -> Result<FundamentalForms, CurvatureError> {
    let ring = mesh.one_ring(vertex).ok_or(CurvatureError::BoundaryVertex(vertex))?;
    let c = mesh.vertices[vertex];
    let n = mesh.vertex_normals[vertex];
    let first = mesh.vertices[ring[0]] - c;
    let t1 = first - first.dot(n) * n;
    if t1.norm() < 1e-12 {
        return Err(CurvatureError::RankDeficientFit { rank: 0 });
    }
    let t1 = t1.normalized();
    let t2 = n.cross(t1);
    let local = |p: Vec3| {
        let d = p - c;
        (d.dot(t1), d.dot(t2), d.dot(n))
    };

    let mut rows: Vec<[f64; 5]> = Vec::new();
    let mut rhs = Vec::new();
    for &i in &ring {
        let (u, v, h) = local(mesh.vertices[i]);
        rows.push([u, v, 0.5 * u * u, u * v, 0.5 * v * v]);
        rhs.push(h);
    }
    for f in mesh.incident_faces(vertex) {
        let tri = mesh.faces[f].map(|i| mesh.vertices[i]);
        let (u, v, _) = local(slope_site(tri));
        let nf = mesh.face_normal(f);
        let nn = nf.dot(n);
        if nn.abs() < 1e-12 {
            continue;
        }
        rows.push([1.0, 0.0, u, v, 0.0]);
        rhs.push(-nf.dot(t1) / nn);
        rows.push([0.0, 1.0, 0.0, u, v]);
        rhs.push(-nf.dot(t2) / nn);
    }

    let m = DMatrix::from_fn(rows.len(), 5, |i, j| rows[i][j]);
    let svd = m.svd(true, true);
    let smax = svd.singular_values.max();
    let rank = svd.singular_values.iter().filter(|&&s| s > RANK_TOL * smax).count();
    if rank < 5 {
        return Err(CurvatureError::RankDeficientFit { rank });
    }
    let x = svd
        .solve(&DVector::from_vec(rhs), RANK_TOL * smax)
        .map_err(|_| CurvatureError::RankDeficientFit { rank })?;
    let (hu, hv, huu, huv, hvv) = (x[0], x[1], x[2], x[3], x[4]);
    let w = (1.0 + hu * hu + hv * hv).sqrt();
    Ok(FundamentalForms {
        a: [[1.0 + hu * hu, hu * hv], [hu * hv, 1.0 + hv * hv]],
        // sign chosen so that a surface bending away from +n has positive b
        b: [[-huu / w, -huv / w], [-huv / w, -hvv / w]],
    })
}
