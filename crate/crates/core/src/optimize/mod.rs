//! Numerical optimization: a BFGS minimizer, an augmented Lagrangian driver
//! and the per-slice design problem built on them.

pub mod auglag;
pub mod bfgs;
pub mod curvature_design;
pub mod report;
pub mod slice;

pub use curvature_design::{optimize_assembly_curvature, CurvatureTarget, DesignDomain, DesignError, DesignPoint};
pub use slice::{
    azimuthal_error, convergence_study, loss_eval, loss_gradient, optimize_slice, AzimuthalError, Residuals, SliceDesign, SliceError,
    SolverConfig,
};
