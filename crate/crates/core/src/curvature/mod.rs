//! Discrete curvature of triangulated patches and of the five-unit assembly.

pub mod assembly;
pub mod forms;
pub mod map;
pub mod mesh;
pub mod operators;
pub mod trace;

use thiserror::Error;

use crate::kinematics::KinematicsError;

pub use assembly::{five_cell_assembly, AssemblyParams};
pub use forms::{estimate_fundamental_forms, FundamentalForms};
pub use map::{curvature_map, CurvatureMap, Field, GridAxis};
pub use mesh::TriMesh;
pub use operators::{angle_defect_k, cotan_mean_curvature, star_sample, CurvatureSample, VertexStar};

#[derive(Error, Debug, Clone, PartialEq)]
pub enum CurvatureError {
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("degenerate star: {0}")]
    DegenerateStar(String),
    #[error("vertex {0} is on the boundary")]
    BoundaryVertex(usize),
    #[error("fundamental form fit is rank deficient (rank {rank} of 5)")]
    RankDeficientFit { rank: usize },
    #[error("invalid assembly: {0}")]
    InvalidAssembly(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Kinematics(#[from] KinematicsError),
}
