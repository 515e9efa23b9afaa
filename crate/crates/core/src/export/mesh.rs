//! Thickened panel meshes and deployment frame sequences.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::ExportError;
use crate::branching::{BranchNetwork, SegmentRecord, SegmentTag};
use crate::curvature::mesh::TriMesh;
use crate::vec3::Vec3;

/// `n_psi` angles evenly spaced over `[0, pi/2]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeploymentSchedule {
    pub n_psi: usize,
}

impl DeploymentSchedule {
    pub fn new(n_psi: usize) -> Result<Self, ExportError> {
        if n_psi < 2 {
            return Err(ExportError::InvalidSchedule(n_psi));
        }
        Ok(Self { n_psi })
    }

    pub fn angles(&self) -> Vec<f64> {
        let last = (self.n_psi - 1) as f64;
        (0..self.n_psi)
            .map(|k| {
                if k + 1 == self.n_psi {
                    std::f64::consts::FRAC_PI_2
                } else {
                    k as f64 / last * std::f64::consts::FRAC_PI_2
                }
            })
            .collect()
    }
}

/// Unit vector across the panel: along `y` for slice panels, otherwise the
/// part of `x` orthogonal to the segment.
fn across(r: &SegmentRecord) -> Vec3 {
    let d = (r.end - r.start).normalized();
    match r.tag {
        SegmentTag::XPanel | SegmentTag::ZPanel => Vec3::new(0.0, 1.0, 0.0),
        _ => {
            let x = Vec3::new(1.0, 0.0, 0.0);
            (x - x.dot(d) * d).normalized()
        }
    }
}

/// Each segment becomes a `length x width` rectangle split into two
/// triangles; vertices are not shared between panels.
pub fn thicken_to_mesh(records: &[SegmentRecord]) -> Result<TriMesh, ExportError> {
    let mut vertices = Vec::with_capacity(4 * records.len());
    let mut faces = Vec::with_capacity(2 * records.len());
    for (k, r) in records.iter().enumerate() {
        if !(r.length > 1e-12) || !(r.width > 0.0) {
            return Err(ExportError::DegeneratePanel { index: k });
        }
        let h = across(r).scaled(0.5 * r.width);
        let base = vertices.len();
        vertices.extend([r.start - h, r.end - h, r.end + h, r.start + h]);
        faces.push([base, base + 1, base + 2]);
        faces.push([base, base + 2, base + 3]);
    }
    TriMesh::new(vertices, faces).map_err(|e| ExportError::Mesh(e.to_string()))
}

pub fn mesh_area(mesh: &TriMesh) -> f64 {
    (0..mesh.faces.len()).map(|f| mesh.face_area(f)).sum()
}

/// SHA-256 of the vertex count and face index lists.
pub fn connectivity_hash(mesh: &TriMesh) -> String {
    let mut h = Sha256::new();
    h.update((mesh.vertices.len() as u64).to_le_bytes());
    for f in &mesh.faces {
        for &i in f {
            h.update((i as u64).to_le_bytes());
        }
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Clone, Debug)]
pub struct Frame {
    pub index: usize,
    pub psi: f64,
    pub mesh: TriMesh,
}

/// One thickened mesh per scheduled angle, each checked for topology.
pub fn deployment_frames(net: &BranchNetwork, schedule: &DeploymentSchedule) -> Result<Vec<Frame>, ExportError> {
    schedule
        .angles()
        .into_par_iter()
        .enumerate()
        .map(|(index, psi)| {
            net.validate_topology(psi)
                .map_err(|source| ExportError::Topology { frame: index, source })?;
            let mesh = thicken_to_mesh(&net.records(psi))?;
            Ok(Frame { index, psi, mesh })
        })
        .collect()
}
