use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::CurvatureError;
use crate::vec3::Vec3;

/// Faces with an area below this are treated as degenerate.
pub const DEGENERATE_AREA: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TriMesh {
    pub vertices: Vec<Vec3>,
    pub faces: Vec<[usize; 3]>,
    /// Area-weighted average of incident face normals, unit length.
    pub vertex_normals: Vec<Vec3>,
}

impl TriMesh {
    pub fn new(vertices: Vec<Vec3>, faces: Vec<[usize; 3]>) -> Result<Self, CurvatureError> {
        let n = vertices.len();
        for (fi, f) in faces.iter().enumerate() {
            if f.iter().any(|&i| i >= n) {
                return Err(CurvatureError::InvalidMesh(format!("face {fi} has an index out of range")));
            }
            let area = 0.5 * face_cross(&vertices, f).norm();
            if !(area > DEGENERATE_AREA) {
                return Err(CurvatureError::InvalidMesh(format!("face {fi} is degenerate (area {area:e})")));
            }
        }
        let mut acc = vec![Vec3::zero(); n];
        for f in &faces {
            let c = face_cross(&vertices, f);
            for &i in f {
                acc[i] = acc[i] + c;
            }
        }
        let vertex_normals = acc.into_iter().map(|v| if v.norm() > 0.0 { v.normalized() } else { v }).collect();
        Ok(Self {
            vertices,
            faces,
            vertex_normals,
        })
    }

    pub fn face_normal(&self, f: usize) -> Vec3 {
        face_cross(&self.vertices, &self.faces[f]).normalized()
    }

    pub fn face_area(&self, f: usize) -> f64 {
        0.5 * face_cross(&self.vertices, &self.faces[f]).norm()
    }

    /// Indices of faces incident to `v`.
    pub fn incident_faces(&self, v: usize) -> Vec<usize> {
        (0..self.faces.len()).filter(|&f| self.faces[f].contains(&v)).collect()
    }

    /// Ordered one-ring of an interior vertex, counterclockwise about the
    /// face orientation. `None` for boundary or non-manifold vertices.
    pub fn one_ring(&self, v: usize) -> Option<Vec<usize>> {
        // map "next" neighbour: for each incident face (v, a, b) in cyclic order, a -> b
        let mut next = HashMap::new();
        for f in self.incident_faces(v) {
            let t = self.faces[f];
            let k = t.iter().position(|&i| i == v)?;
            let a = t[(k + 1) % 3];
            let b = t[(k + 2) % 3];
            if next.insert(a, b).is_some() {
                return None;
            }
        }
        let &start = next.keys().min()?;
        let mut ring = vec![start];
        let mut cur = start;
        loop {
            cur = *next.get(&cur)?;
            if cur == start {
                break;
            }
            if ring.len() > next.len() {
                return None;
            }
            ring.push(cur);
        }
        (ring.len() == next.len()).then_some(ring)
    }

    pub fn is_interior(&self, v: usize) -> bool {
        self.one_ring(v).is_some()
    }

    /// Copy with `x` and `z` swapped; face index order is kept, so the
    /// orientation, and with it the vertex normals' handedness, flips.
    pub fn mirrored_xz(&self) -> Result<Self, CurvatureError> {
        let v = self.vertices.iter().map(|p| Vec3::new(p.z, p.y, p.x)).collect();
        Self::new(v, self.faces.clone())
    }

    pub fn mean_edge_length(&self) -> f64 {
        let mut sum = 0.0;
        let mut n = 0usize;
        for f in &self.faces {
            for k in 0..3 {
                sum += self.vertices[f[k]].distance(self.vertices[f[(k + 1) % 3]]);
                n += 1;
            }
        }
        sum / n.max(1) as f64
    }

    /// Icosahedron refined `level` times by edge midpoint subdivision and
    /// projected onto the sphere of radius `radius`.
    pub fn icosphere(radius: f64, level: usize) -> Result<Self, CurvatureError> {
        let t = (1.0 + 5f64.sqrt()) / 2.0;
        let mut verts: Vec<Vec3> = [
            (-1.0, t, 0.0),
            (1.0, t, 0.0),
            (-1.0, -t, 0.0),
            (1.0, -t, 0.0),
            (0.0, -1.0, t),
            (0.0, 1.0, t),
            (0.0, -1.0, -t),
            (0.0, 1.0, -t),
            (t, 0.0, -1.0),
            (t, 0.0, 1.0),
            (-t, 0.0, -1.0),
            (-t, 0.0, 1.0),
        ]
        .iter()
        .map(|&(x, y, z)| Vec3::new(x, y, z).normalized())
        .collect();
        let mut faces: Vec<[usize; 3]> = vec![
            [0, 11, 5],
            [0, 5, 1],
            [0, 1, 7],
            [0, 7, 10],
            [0, 10, 11],
            [1, 5, 9],
            [5, 11, 4],
            [11, 10, 2],
            [10, 7, 6],
            [7, 1, 8],
            [3, 9, 4],
            [3, 4, 2],
            [3, 2, 6],
            [3, 6, 8],
            [3, 8, 9],
            [4, 9, 5],
            [2, 4, 11],
            [6, 2, 10],
            [8, 6, 7],
            [9, 8, 1],
        ];
        for _ in 0..level {
            let mut mid = HashMap::new();
            let mut midpoint = |a: usize, b: usize, verts: &mut Vec<Vec3>| {
                *mid.entry((a.min(b), a.max(b))).or_insert_with(|| {
                    verts.push((0.5 * (verts[a] + verts[b])).normalized());
                    verts.len() - 1
                })
            };
            let mut out = Vec::with_capacity(faces.len() * 4);
            for [a, b, c] in faces {
                let ab = midpoint(a, b, &mut verts);
                let bc = midpoint(b, c, &mut verts);
                let ca = midpoint(c, a, &mut verts);
                out.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
            }
            faces = out;
        }
        let verts = verts.into_iter().map(|v| radius * v).collect();
        Self::new(verts, faces)
    }

    /// Open cylinder of radius `radius` around the z axis, `n_around` columns
    /// and `n_along` rows of quads over `[0, height]`, each split in two.
    pub fn cylinder(radius: f64, height: f64, n_around: usize, n_along: usize) -> Result<Self, CurvatureError> {
        if n_around < 3 || n_along < 1 {
            return Err(CurvatureError::InvalidMesh("cylinder needs n_around >= 3, n_along >= 1".into()));
        }
        let mut verts = Vec::with_capacity(n_around * (n_along + 1));
        for j in 0..=n_along {
            // alternate rows are rotated half a step so that triangles are near-equilateral
            let shift = if j % 2 == 1 { 0.5 } else { 0.0 };
            for i in 0..n_around {
                let th = std::f64::consts::TAU * (i as f64 + shift) / n_around as f64;
                verts.push(Vec3::new(radius * th.cos(), radius * th.sin(), height * j as f64 / n_along as f64));
            }
        }
        let id = |i: usize, j: usize| j * n_around + i % n_around;
        let mut faces = Vec::with_capacity(2 * n_around * n_along);
        for j in 0..n_along {
            for i in 0..n_around {
                if j % 2 == 0 {
                    faces.push([id(i, j), id(i + 1, j), id(i, j + 1)]);
                    faces.push([id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]);
                } else {
                    faces.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
                    faces.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
                }
            }
        }
        Self::new(verts, faces)
    }

    /// Regular grid in the plane `z = 0` with `nx * ny` vertices and spacing `h`.
    pub fn grid(nx: usize, ny: usize, h: f64) -> Result<Self, CurvatureError> {
        Self::height_grid(nx, ny, h, |_, _| 0.0)
    }

    /// Grid triangulation of the graph `z = f(x, y)` centred on the origin.
    pub fn height_grid(nx: usize, ny: usize, h: f64, f: impl Fn(f64, f64) -> f64) -> Result<Self, CurvatureError> {
        if nx < 2 || ny < 2 {
            return Err(CurvatureError::InvalidMesh("grid needs at least 2x2 vertices".into()));
        }
        let ox = 0.5 * (nx - 1) as f64 * h;
        let oy = 0.5 * (ny - 1) as f64 * h;
        let mut verts = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                let (x, y) = (i as f64 * h - ox, j as f64 * h - oy);
                verts.push(Vec3::new(x, y, f(x, y)));
            }
        }
        let mut faces = Vec::new();
        for j in 0..ny - 1 {
            for i in 0..nx - 1 {
                let a = j * nx + i;
                faces.push([a, a + 1, a + nx + 1]);
                faces.push([a, a + nx + 1, a + nx]);
            }
        }
        Self::new(verts, faces)
    }

    /// Index of the vertex nearest to `p`.
    pub fn nearest_vertex(&self, p: Vec3) -> usize {
        let mut best = (f64::INFINITY, 0);
        for (i, v) in self.vertices.iter().enumerate() {
            let d = v.distance(p);
            if d < best.0 {
                best = (d, i);
            }
        }
        best.1
    }

    /// Euler characteristic `V - E + F`.
    pub fn euler_characteristic(&self) -> i64 {
        let mut edges = std::collections::HashSet::new();
        for f in &self.faces {
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                edges.insert((a.min(b), a.max(b)));
            }
        }
        self.vertices.len() as i64 - edges.len() as i64 + self.faces.len() as i64
    }
}

fn face_cross(v: &[Vec3], f: &[usize; 3]) -> Vec3 {
    (v[f[1]] - v[f[0]]).cross(v[f[2]] - v[f[0]])
}
