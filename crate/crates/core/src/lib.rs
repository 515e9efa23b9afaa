//! Inverse design of popup kirigami: unit kinematics, discrete curvature of
//! unit assemblies, slice optimization against target surfaces, branching
//! assembly of the cut network and fabrication exporters.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod branching;
pub mod config;
pub mod curvature;
pub mod export;
pub mod kinematics;
pub mod optimize;
pub mod pipeline;
pub mod scalar;
pub mod target;
pub mod vec3;

pub use kinematics::{DeploymentAngle, FoldVertex, UnitCell};
pub use vec3::Vec3;
