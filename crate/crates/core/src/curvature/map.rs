//! Dense `(r, lambda)` curvature maps of the five-unit assembly and their
//! zero-level contours.

use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::assembly::{curvature_at, five_cell_assembly, AssemblyParams};
use super::operators::{star_sample, CurvatureSample};
use super::CurvatureError;
use crate::export::csv::fmt_num;
use crate::kinematics::UnitCell;

/// Bracket width at which contour bisection stops.
pub const BISECTION_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridAxis {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl GridAxis {
    pub fn new(min: f64, max: f64, n: usize) -> Self {
        Self { min, max, n }
    }

    /// Evenly spaced values; a single-point axis yields `min`.
    pub fn values(&self) -> Vec<f64> {
        if self.n <= 1 {
            return vec![self.min];
        }
        let step = (self.max - self.min) / (self.n - 1) as f64;
        (0..self.n)
            .map(|i| if i + 1 == self.n { self.max } else { self.min + step * i as f64 })
            .collect()
    }

    /// Parses `min:max:n`.
    pub fn parse(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("expected min:max:n, got {s:?}"));
        }
        let min = parts[0].trim().parse::<f64>().map_err(|e| format!("{s:?}: {e}"))?;
        let max = parts[1].trim().parse::<f64>().map_err(|e| format!("{s:?}: {e}"))?;
        let n = parts[2].trim().parse::<usize>().map_err(|e| format!("{s:?}: {e}"))?;
        if n == 0 || !(min <= max) {
            return Err(format!("{s:?}: need n >= 1 and min <= max"));
        }
        Ok(Self { min, max, n })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Field {
    K,
    H,
}

impl Field {
    pub fn of(self, s: &CurvatureSample) -> f64 {
        match self {
            Field::K => s.k,
            Field::H => s.h,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Field::K => "K",
            Field::H => "H",
        }
    }
}

/// Samples stored row-major: `samples[i_lambda * r.len() + i_r]`. Entries that
/// failed to evaluate are `None`.
#[derive(Clone, Debug)]
pub struct CurvatureMap {
    pub r: Vec<f64>,
    pub lambda: Vec<f64>,
    pub phi: f64,
    pub psi: f64,
    pub base: UnitCell,
    pub samples: Vec<Option<CurvatureSample>>,
}

pub fn evaluate(r: f64, lambda: f64, phi: f64, base: &UnitCell, psi: f64) -> Result<CurvatureSample, CurvatureError> {
    let p = AssemblyParams::new(r, lambda, phi)?;
    let (_, star) = five_cell_assembly(&p, base, psi)?;
    star_sample(&star)
}

pub fn curvature_map(r: &GridAxis, lambda: &GridAxis, phi: f64, base: &UnitCell, psi: f64) -> CurvatureMap {
    let rs = r.values();
    let ls = lambda.values();
    let samples = (0..rs.len() * ls.len())
        .into_par_iter()
        .map(|idx| evaluate(rs[idx % rs.len()], ls[idx / rs.len()], phi, base, psi).ok())
        .collect();
    CurvatureMap {
        r: rs,
        lambda: ls,
        phi,
        psi,
        base: *base,
        samples,
    }
}

/// Maps over `(r, lambda, phi)`, one slab per `phi` value.
pub fn curvature_map_3d(r: &GridAxis, lambda: &GridAxis, phi: &GridAxis, base: &UnitCell, psi: f64) -> Vec<CurvatureMap> {
    phi.values().into_iter().map(|p| curvature_map(r, lambda, p, base, psi)).collect()
}

/// One segment of a zero-level contour in the `(r, lambda)` plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContourSegment {
    pub a: (f64, f64),
    pub b: (f64, f64),
}

impl CurvatureMap {
    pub fn get(&self, i_r: usize, i_l: usize) -> Option<&CurvatureSample> {
        self.samples[i_l * self.r.len() + i_r].as_ref()
    }

    pub fn value(&self, field: Field, i_r: usize, i_l: usize) -> Option<f64> {
        self.get(i_r, i_l).map(|s| field.of(s))
    }

    pub fn masked_count(&self) -> usize {
        self.samples.iter().filter(|s| s.is_none()).count()
    }

    fn eval(&self, field: Field, r: f64, lambda: f64) -> f64 {
        let p = AssemblyParams { r, phi: self.phi, lambda };
        let (k, h) = curvature_at(&p, &self.base, self.psi);
        match field {
            Field::K => k,
            Field::H => h,
        }
    }

    /// Bisection on the segment from `a` to `b`, whose end values have opposite signs.
    fn refine(&self, field: Field, a: (f64, f64), b: (f64, f64), fa: f64) -> (f64, f64) {
        let (mut lo, mut hi) = (0.0, 1.0);
        let at = |t: f64| (a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1));
        let span = ((b.0 - a.0).powi(2) + (b.1 - a.1).powi(2)).sqrt().max(f64::MIN_POSITIVE);
        let pos = fa >= 0.0;
        while (hi - lo) * span > BISECTION_TOL {
            let mid = 0.5 * (lo + hi);
            let (r, l) = at(mid);
            if (self.eval(field, r, l) >= 0.0) == pos {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        at(0.5 * (lo + hi))
    }

    /// Zero crossings of `field` along lambda row `i_l`, refined by bisection.
    pub fn row_crossings(&self, field: Field, i_l: usize) -> Vec<f64> {
        let l = self.lambda[i_l];
        let mut out = Vec::new();
        for i in 0..self.r.len().saturating_sub(1) {
            let (Some(f0), Some(f1)) = (self.value(field, i, i_l), self.value(field, i + 1, i_l)) else {
                continue;
            };
            if (f0 >= 0.0) != (f1 >= 0.0) {
                out.push(self.refine(field, (self.r[i], l), (self.r[i + 1], l), f0).0);
            }
        }
        out
    }

    /// Marching-squares zero contour of `field`, crossing points refined by bisection.
    pub fn zero_contours(&self, field: Field) -> Vec<ContourSegment> {
        let (nr, nl) = (self.r.len(), self.lambda.len());
        let mut segs = Vec::new();
        for j in 0..nl.saturating_sub(1) {
            for i in 0..nr.saturating_sub(1) {
                let corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
                let vals: Option<Vec<f64>> = corners.iter().map(|&(a, b)| self.value(field, a, b)).collect();
                let Some(vals) = vals else { continue };
                let mut pts = Vec::new();
                for e in 0..4 {
                    let (f0, f1) = (vals[e], vals[(e + 1) % 4]);
                    if (f0 >= 0.0) != (f1 >= 0.0) {
                        let (a, b) = (corners[e], corners[(e + 1) % 4]);
                        pts.push(self.refine(field, (self.r[a.0], self.lambda[a.1]), (self.r[b.0], self.lambda[b.1]), f0));
                    }
                }
                match pts.len() {
                    2 => segs.push(ContourSegment { a: pts[0], b: pts[1] }),
                    4 => {
                        // saddle cell: pair edges according to the sign at the cell centre
                        let c = self.eval(
                            field,
                            0.5 * (self.r[i] + self.r[i + 1]),
                            0.5 * (self.lambda[j] + self.lambda[j + 1]),
                        );
                        if (c >= 0.0) == (vals[0] >= 0.0) {
                            segs.push(ContourSegment { a: pts[0], b: pts[1] });
                            segs.push(ContourSegment { a: pts[2], b: pts[3] });
                        } else {
                            segs.push(ContourSegment { a: pts[0], b: pts[3] });
                            segs.push(ContourSegment { a: pts[1], b: pts[2] });
                        }
                    }
                    _ => {}
                }
            }
        }
        segs
    }

    /// CSV with header `r,lambda,phi,K,H`; masked samples have empty fields.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "r,lambda,phi,K,H")?;
        for (j, &l) in self.lambda.iter().enumerate() {
            for (i, &r) in self.r.iter().enumerate() {
                let (k, h) = match self.get(i, j) {
                    Some(s) => (fmt_num(s.k), fmt_num(s.h)),
                    None => (String::new(), String::new()),
                };
                writeln!(w, "{},{},{},{k},{h}", fmt_num(r), fmt_num(l), fmt_num(self.phi))?;
            }
        }
        Ok(())
    }
}

/// CSV with header `field,r1,lambda1,r2,lambda2`, one line per segment.
pub fn write_contours_csv<W: Write>(mut w: W, contours: &[(Field, Vec<ContourSegment>)]) -> io::Result<()> {
    writeln!(w, "field,r1,lambda1,r2,lambda2")?;
    for (field, segs) in contours {
        for s in segs {
            writeln!(
                w,
                "{},{},{},{},{}",
                field.name(),
                fmt_num(s.a.0),
                fmt_num(s.a.1),
                fmt_num(s.b.0),
                fmt_num(s.b.1)
            )?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::assembly::{default_base, h_zero_locus, k_zero_loci};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    #[test]
    fn axis_parsing_and_values() {
        let a = GridAxis::parse("0.5:1.5:5").unwrap();
        assert_eq!(a.values(), vec![0.5, 0.75, 1.0, 1.25, 1.5]);
        assert!(GridAxis::parse("1:0:3").is_err());
        assert!(GridAxis::parse("1:2").is_err());
        assert_eq!(GridAxis::new(2.0, 2.0, 1).values(), vec![2.0]);
    }

    #[test]
    fn row_crossings_hit_the_k_loci() {
        let m = curvature_map(
            &GridAxis::new(0.6, 3.5, 40),
            &GridAxis::new(0.7, 0.7, 1),
            FRAC_PI_4,
            &default_base(),
            FRAC_PI_2,
        );
        let xs = m.row_crossings(Field::K, 0);
        let (ra, rb) = k_zero_loci(0.7);
        assert_eq!(xs.len(), 2);
        assert!((xs[0] - ra).abs() < 1e-9 && (xs[1] - rb).abs() < 1e-9);
        let hs = m.row_crossings(Field::H, 0);
        assert_eq!(hs.len(), 1);
        assert!((hs[0] - h_zero_locus(0.7)).abs() < 1e-9);
    }

    #[test]
    fn single_point_grid_on_h_locus() {
        let r = h_zero_locus(1.2);
        let m = curvature_map(
            &GridAxis::new(r, r, 1),
            &GridAxis::new(1.2, 1.2, 1),
            FRAC_PI_4,
            &default_base(),
            FRAC_PI_2,
        );
        assert!(m.get(0, 0).unwrap().h.abs() < 1e-12);
    }

    #[test]
    fn contours_lie_on_the_loci() {
        let m = curvature_map(
            &GridAxis::new(0.6, 3.5, 30),
            &GridAxis::new(0.5, 1.5, 20),
            FRAC_PI_4,
            &default_base(),
            FRAC_PI_2,
        );
        assert_eq!(m.masked_count(), 0);
        let h = m.zero_contours(Field::H);
        assert!(!h.is_empty());
        for s in &h {
            for p in [s.a, s.b] {
                assert!((p.0 - h_zero_locus(p.1)).abs() < 1e-8);
            }
        }
        for s in m.zero_contours(Field::K) {
            for p in [s.a, s.b] {
                let (ra, rb) = k_zero_loci(p.1);
                assert!((p.0 - ra).abs().min((p.0 - rb).abs()) < 1e-8);
            }
        }
    }

    #[test]
    fn csv_has_one_line_per_sample() {
        let m = curvature_map(
            &GridAxis::new(1.0, 2.0, 3),
            &GridAxis::new(0.5, 1.0, 2),
            0.6,
            &default_base(),
            FRAC_PI_2,
        );
        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(s.lines().count(), 7);
        assert!(s.starts_with("r,lambda,phi,K,H\n"));
    }
}
