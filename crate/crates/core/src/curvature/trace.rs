//! Gaussian curvature of a splayed structure along its deployment path.
//!
//! Units sit on a lattice with pitch `p` along the slice and `q` across
//! slices. The fold vertex of the unit at lattice site `(X, Y)` with splay
//! slope `alpha` is `(X + x_s, Y, h)` where `(x_s, h)` is the splayed vertex.
//! The trace evaluates the angle defect of the plus-shaped star around the
//! centre unit of a 3 x 3 alpha field.

use serde::{Deserialize, Serialize};

use super::operators::star_angle_defect;
use super::CurvatureError;
use crate::kinematics::{splay_t, KinematicsError};
use crate::vec3::Vec3;

/// Samples with `|K|` below this do not count toward sign changes.
pub const SIGN_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplayStructure {
    /// Rows are slices `j-1, j, j+1`; columns units `i-1, i, i+1`. Corners are unused.
    pub alpha: [[f64; 3]; 3],
    #[serde(default = "one")]
    pub pitch_x: f64,
    #[serde(default = "one")]
    pub pitch_y: f64,
    #[serde(default = "one")]
    pub width: f64,
}

fn one() -> f64 {
    1.0
}

impl SplayStructure {
    pub fn new(alpha: [[f64; 3]; 3]) -> Self {
        Self {
            alpha,
            pitch_x: 1.0,
            pitch_y: 1.0,
            width: 1.0,
        }
    }

    /// A field whose centre changes curvature sign once during deployment:
    /// `K > 0` early, `K = 0` near `0.28 pi`, `K < 0` near full deployment.
    pub fn designed() -> Self {
        Self::new([[0.0, 0.2, 0.0], [1.0, 2.3, 1.0], [0.0, 0.2, 0.0]])
    }

    pub fn uniform(alpha: f64) -> Self {
        Self::new([[alpha; 3]; 3])
    }

    pub fn validate(&self) -> Result<(), CurvatureError> {
        let finite = self.alpha.iter().flatten().all(|a| a.is_finite());
        if !finite || !(self.pitch_x > 0.0 && self.pitch_y > 0.0 && self.width > 0.0) {
            return Err(CurvatureError::Kinematics(KinematicsError::InvalidCell(
                "splay field needs finite alpha and positive pitch and width".into(),
            )));
        }
        Ok(())
    }

    fn vertex(&self, di: i32, dj: i32, psi: f64) -> Vec3 {
        let a = self.alpha[(dj + 1) as usize][(di + 1) as usize];
        let t = splay_t(a, psi);
        let q = 1.0 + t * t;
        Vec3::new(
            di as f64 * self.pitch_x + self.width * (1.0 - t * t) / q,
            dj as f64 * self.pitch_y,
            self.width * 2.0 * t / q,
        )
    }

    /// Angle defect at the centre vertex.
    pub fn central_k(&self, psi: f64) -> f64 {
        let c = self.vertex(0, 0, psi);
        let ring = [
            self.vertex(1, 0, psi),
            self.vertex(0, 1, psi),
            self.vertex(-1, 0, psi),
            self.vertex(0, -1, psi),
        ];
        star_angle_defect(c, &ring)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvatureTrace {
    pub samples: Vec<(f64, f64)>,
    /// Bracketing `psi` intervals of each sign change.
    pub sign_changes: Vec<(f64, f64)>,
}

pub fn curvature_trace(structure: &SplayStructure, psi_schedule: &[f64]) -> Result<CurvatureTrace, CurvatureError> {
    structure.validate()?;
    let samples: Vec<(f64, f64)> = psi_schedule.iter().map(|&p| (p, structure.central_k(p))).collect();
    let mut sign_changes = Vec::new();
    let mut last: Option<(f64, bool)> = None;
    for &(p, k) in &samples {
        if k.abs() <= SIGN_TOL {
            continue;
        }
        let pos = k > 0.0;
        if let Some((lp, lpos)) = last {
            if lpos != pos {
                sign_changes.push((lp, p));
            }
        }
        last = Some((p, pos));
    }
    Ok(CurvatureTrace { samples, sign_changes })
}

/// `n` angles evenly spaced in `(0, max]`.
pub fn psi_schedule(n: usize, max: f64) -> Vec<f64> {
    (1..=n).map(|i| max * i as f64 / n as f64).collect()
}
