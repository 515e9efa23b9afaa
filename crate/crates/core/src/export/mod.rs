//! Fabrication outputs: segment tables, thickened meshes and deployment
//! frames, cut-fold patterns as SVG, STL files.

pub mod csv;
pub mod io;
pub mod mesh;
pub mod pattern;
pub mod stl;
pub mod svg;

use thiserror::Error;

use crate::branching::NetworkError;

pub use csv::fmt_num;
pub use mesh::{connectivity_hash, deployment_frames, mesh_area, thicken_to_mesh, DeploymentSchedule, Frame};
pub use pattern::{flat_pattern, CutFoldPattern, LineKind, PatternLine};

#[derive(Error, Debug)]
pub enum ExportError {
    #[error("segment {index} has zero length or width")]
    DegeneratePanel { index: usize },
    #[error("frame count must be at least 2, got {0}")]
    InvalidSchedule(usize),
    #[error("frame {frame}: {source}")]
    Topology { frame: usize, source: NetworkError },
    #[error("mesh: {0}")]
    Mesh(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
