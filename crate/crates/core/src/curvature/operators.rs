use serde::{Deserialize, Serialize};

use super::mesh::TriMesh;
use super::CurvatureError;
use crate::scalar::Scalar;
use crate::vec3::Vec3;

/// Edges shorter than this make a star degenerate.
pub const EDGE_TOL: f64 = 1e-12;

/// A vertex and its ordered one-ring.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VertexStar {
    pub center: Vec3,
    pub ring: Vec<Vec3>,
    pub closed: bool,
}

impl VertexStar {
    pub fn closed(center: Vec3, ring: Vec<Vec3>) -> Self {
        Self {
            center,
            ring,
            closed: true,
        }
    }

    fn check(&self) -> Result<(), CurvatureError> {
        if !self.closed {
            return Err(CurvatureError::DegenerateStar("star is not closed".into()));
        }
        if self.ring.len() < 3 {
            return Err(CurvatureError::DegenerateStar(format!("ring has {} vertices", self.ring.len())));
        }
        let k = self.ring.len();
        for i in 0..k {
            let a = self.ring[i];
            let b = self.ring[(i + 1) % k];
            if a.distance(self.center) < EDGE_TOL || a.distance(b) < EDGE_TOL {
                return Err(CurvatureError::DegenerateStar(format!("edge at ring index {i} has zero length")));
            }
            if (a - self.center).cross(b - self.center).norm() < EDGE_TOL {
                return Err(CurvatureError::DegenerateStar(format!("triangle {i} is collinear")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvatureSample {
    /// Angle defect at the centre (radians).
    #[serde(rename = "K")]
    pub k: f64,
    /// Signed mean curvature, positive where convex toward the normal.
    #[serde(rename = "H")]
    pub h: f64,
    pub a_mixed: f64,
    pub interior_angles: Vec<f64>,
    /// `(cot gamma, cot epsilon)` for each spoke edge.
    pub cot_weights: Vec<(f64, f64)>,
    pub normal: Vec3,
    /// Set when obtuse-triangle clamping replaced a Voronoi area.
    pub obtuse_fallback: bool,
}

fn cot<T: Scalar>(u: Vec3<T>, v: Vec3<T>) -> T {
    u.dot(v) / u.cross(v).norm()
}

/// Interior angle at the centre of triangle `i` by the law of cosines.
fn corner_angle<T: Scalar>(c: Vec3<T>, a: Vec3<T>, b: Vec3<T>) -> T {
    let la2 = (a - c).norm_sq();
    let lb2 = (b - c).norm_sq();
    let lc2 = (b - a).norm_sq();
    ((la2 + lb2 - lc2) / (T::cst(2.0) * la2.sqrt() * lb2.sqrt())).acos()
}

pub fn interior_angles<T: Scalar>(center: Vec3<T>, ring: &[Vec3<T>]) -> Vec<T> {
    let k = ring.len();
    (0..k).map(|i| corner_angle(center, ring[i], ring[(i + 1) % k])).collect()
}

/// `2 pi - sum of interior angles` of a closed star.
pub fn star_angle_defect<T: Scalar>(center: Vec3<T>, ring: &[Vec3<T>]) -> T {
    let mut s = T::cst(0.0);
    for a in interior_angles(center, ring) {
        s += a;
    }
    T::cst(std::f64::consts::TAU) - s
}

/// Mixed area contribution of triangle `(p, q, r)` to vertex `p`.
fn mixed_area<T: Scalar>(p: Vec3<T>, q: Vec3<T>, r: Vec3<T>) -> (T, bool) {
    let area = (q - p).cross(r - p).norm().scale(0.5);
    if (q - p).dot(r - p).re() < 0.0 {
        return (area.scale(0.5), true);
    }
    if (p - q).dot(r - q).re() < 0.0 || (p - r).dot(q - r).re() < 0.0 {
        return (area.scale(0.25), true);
    }
    let v = (p - r).norm_sq() * cot(p - q, r - q) + (p - q).norm_sq() * cot(p - r, q - r);
    (v.scale(0.125), false)
}

pub struct StarMean<T> {
    pub h: T,
    pub area: T,
    pub normal: Vec3<T>,
    pub cot_weights: Vec<(T, T)>,
    pub obtuse_fallback: bool,
}

/// Cotangent mean curvature of a closed star:
/// `H_vec = 1/(2A) sum (cot gamma + cot eps)(r0 - ri)`, `H = (H_vec . n) / 2`
/// with `A` the mixed area and `n` the area-weighted normal.
pub fn star_mean_curvature<T: Scalar>(center: Vec3<T>, ring: &[Vec3<T>]) -> StarMean<T> {
    let k = ring.len();
    let mut area = T::cst(0.0);
    let mut nsum = Vec3::<T>::zero();
    let mut fallback = false;
    for i in 0..k {
        let (a, b) = (ring[i], ring[(i + 1) % k]);
        let (ai, f) = mixed_area(center, a, b);
        area += ai;
        fallback |= f;
        nsum = nsum + (a - center).cross(b - center);
    }
    let normal = nsum.normalized();
    let mut hv = Vec3::<T>::zero();
    let mut cot_weights = Vec::with_capacity(k);
    for i in 0..k {
        let vi = ring[i];
        let vp = ring[(i + k - 1) % k];
        let vn = ring[(i + 1) % k];
        let g = cot(center - vp, vi - vp);
        let e = cot(center - vn, vi - vn);
        cot_weights.push((g, e));
        hv = hv + (center - vi).scaled(g + e);
    }
    let h = hv.dot(normal) / (area * T::cst(4.0));
    StarMean {
        h,
        area,
        normal,
        cot_weights,
        obtuse_fallback: fallback,
    }
}

pub fn angle_defect_k(star: &VertexStar) -> Result<f64, CurvatureError> {
    star.check()?;
    Ok(star_angle_defect(star.center, &star.ring))
}

/// Both curvatures and the per-edge data of a star.
pub fn star_sample(star: &VertexStar) -> Result<CurvatureSample, CurvatureError> {
    star.check()?;
    let m = star_mean_curvature(star.center, &star.ring);
    Ok(CurvatureSample {
        k: star_angle_defect(star.center, &star.ring),
        h: m.h,
        a_mixed: m.area,
        interior_angles: interior_angles(star.center, &star.ring),
        cot_weights: m.cot_weights,
        normal: m.normal,
        obtuse_fallback: m.obtuse_fallback,
    })
}

/// Star of an interior mesh vertex.
pub fn mesh_star(mesh: &TriMesh, vertex: usize) -> Result<VertexStar, CurvatureError> {
    let ring = mesh.one_ring(vertex).ok_or(CurvatureError::BoundaryVertex(vertex))?;
    Ok(VertexStar::closed(
        mesh.vertices[vertex],
        ring.into_iter().map(|i| mesh.vertices[i]).collect(),
    ))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeanCurvature {
    pub h: f64,
    pub a_mixed: f64,
    pub obtuse_fallback: bool,
}

pub fn cotan_mean_curvature(mesh: &TriMesh, vertex: usize) -> Result<MeanCurvature, CurvatureError> {
    let star = mesh_star(mesh, vertex)?;
    star.check()?;
    let m = star_mean_curvature(star.center, &star.ring);
    if !(m.area > 0.0) {
        return Err(CurvatureError::DegenerateStar(format!("mixed area {} at vertex {vertex}", m.area)));
    }
    Ok(MeanCurvature {
        h: m.h,
        a_mixed: m.area,
        obtuse_fallback: m.obtuse_fallback,
    })
}

pub fn vertex_angle_defect(mesh: &TriMesh, vertex: usize) -> Result<f64, CurvatureError> {
    angle_defect_k(&mesh_star(mesh, vertex)?)
}

/// Sum of angle defects over all vertices of a closed mesh.
pub fn total_angle_defect(mesh: &TriMesh) -> Result<f64, CurvatureError> {
    (0..mesh.vertices.len()).map(|v| vertex_angle_defect(mesh, v)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, TAU};

    fn v(x: f64, y: f64, z: f64) -> Vec3 {
        Vec3::new(x, y, z)
    }

    fn square_ring() -> Vec<Vec3> {
        vec![v(1.0, 0.0, 0.0), v(0.0, 1.0, 0.0), v(-1.0, 0.0, 0.0), v(0.0, -1.0, 0.0)]
    }

    #[test]
    fn planar_fan_has_no_defect() {
        let s = VertexStar::closed(v(0.1, -0.2, 0.0), square_ring());
        assert!(angle_defect_k(&s).unwrap().abs() < 1e-12);
        assert!(star_sample(&s).unwrap().h.abs() < 1e-12);
    }

    #[test]
    fn octahedron_vertex() {
        let s = VertexStar::closed(v(0.0, 0.0, 1.0), square_ring());
        assert!((angle_defect_k(&s).unwrap() - 2.0 * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn square_pyramid_vertex() {
        let s = VertexStar::closed(v(0.0, 0.0, 0.5f64.sqrt()), square_ring());
        let expected = TAU - 4.0 * (1.0f64 / 3.0).acos();
        assert!((angle_defect_k(&s).unwrap() - expected).abs() < 1e-12);
        assert!((expected - 1.35935).abs() < 1e-5);
    }

    #[test]
    fn degenerate_stars_are_rejected() {
        let mut ring = square_ring();
        ring[1] = ring[0];
        assert!(matches!(
            angle_defect_k(&VertexStar::closed(v(0.0, 0.0, 1.0), ring)),
            Err(CurvatureError::DegenerateStar(_))
        ));
        let open = VertexStar {
            center: v(0.0, 0.0, 1.0),
            ring: square_ring(),
            closed: false,
        };
        assert!(angle_defect_k(&open).is_err());
        let short = VertexStar::closed(v(0.0, 0.0, 1.0), square_ring()[..2].to_vec());
        assert!(angle_defect_k(&short).is_err());
    }

    #[test]
    fn discrete_gauss_bonnet_on_closed_polyhedra() {
        let octa = TriMesh::new(
            vec![
                v(1.0, 0.0, 0.0),
                v(-1.0, 0.0, 0.0),
                v(0.0, 1.0, 0.0),
                v(0.0, -1.0, 0.0),
                v(0.0, 0.0, 1.0),
                v(0.0, 0.0, -1.0),
            ],
            vec![
                [0, 2, 4],
                [2, 1, 4],
                [1, 3, 4],
                [3, 0, 4],
                [2, 0, 5],
                [1, 2, 5],
                [3, 1, 5],
                [0, 3, 5],
            ],
        )
        .unwrap();
        assert!((total_angle_defect(&octa).unwrap() - 4.0 * PI).abs() < 1e-12);
        for level in 0..3 {
            let ico = TriMesh::icosphere(1.3, level).unwrap();
            assert!((total_angle_defect(&ico).unwrap() - 4.0 * PI).abs() < 1e-10);
        }
    }

    #[test]
    fn flat_grid_has_zero_curvature_everywhere_inside() {
        let m = TriMesh::grid(6, 5, 0.3).unwrap();
        for i in 0..m.vertices.len() {
            if m.is_interior(i) {
                assert!(vertex_angle_defect(&m, i).unwrap().abs() < 1e-12);
                assert!(cotan_mean_curvature(&m, i).unwrap().h.abs() < 1e-12);
            }
        }
        assert!(matches!(cotan_mean_curvature(&m, 0), Err(CurvatureError::BoundaryVertex(0))));
    }

    /// Mean error of H against `exact` over interior vertices near `probe`.
    fn sphere_error(level: usize, radius: f64) -> (f64, f64) {
        let m = TriMesh::icosphere(radius, level).unwrap();
        let mut err = 0.0;
        for i in 0..m.vertices.len() {
            let h = cotan_mean_curvature(&m, i).unwrap().h;
            err = f64::max(err, (h - 1.0 / radius).abs());
        }
        (m.mean_edge_length(), err)
    }

    #[test]
    fn sphere_mean_curvature_converges_with_order_at_least_one() {
        let r = 2.0;
        let (h1, e1) = sphere_error(2, r);
        let (h2, e2) = sphere_error(4, r);
        assert!(e2 < 1e-2 / r, "error {e2}");
        let order = (e1 / e2).ln() / (h1 / h2).ln();
        assert!(order >= 1.0, "observed order {order}");
    }

    #[test]
    fn cylinder_mean_curvature_is_half_inverse_radius() {
        let r = 1.5;
        for (n_around, tol) in [(24, 5e-2), (96, 5e-3)] {
            let h = std::f64::consts::TAU * r / n_around as f64 * 3f64.sqrt() / 2.0;
            let n_along = (3.0 / h).round() as usize;
            let m = TriMesh::cylinder(r, n_along as f64 * h, n_around, n_along).unwrap();
            let c = m.nearest_vertex(v(r, 0.0, 1.5));
            let got = cotan_mean_curvature(&m, c).unwrap().h;
            assert!((got - 0.5 / r).abs() < tol * 0.5 / r, "n = {n_around}: {got}");
            assert!(vertex_angle_defect(&m, c).unwrap().abs() < 1e-10);
        }
    }

    #[test]
    fn sample_reports_area_and_angles() {
        let s = VertexStar::closed(v(0.0, 0.0, 1.0), square_ring());
        let c = star_sample(&s).unwrap();
        assert_eq!(c.interior_angles.len(), 4);
        assert!(c.interior_angles.iter().all(|a| (a - PI / 3.0).abs() < 1e-12));
        assert!(c.a_mixed > 0.0);
        assert!(c.h > 0.0, "apex is convex toward +z");
        assert!(!c.obtuse_fallback);
        let sum: f64 = c.interior_angles.iter().sum();
        assert!(sum > 0.0 && sum < 4.0 * PI);
    }
}
