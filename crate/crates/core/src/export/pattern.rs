//! The flat cut-fold layout of a strip network.
//!
//! Slice `j` occupies the sheet column `[y_j - w_j/2, y_j + w_j/2]`; its units
//! are unrolled down the column, x-panel then z-panel. Panel ends are folds,
//! column boundaries are cuts, interrupted where a support strip crosses.
//! Support strips carry a single fold along their centre line.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::branching::{BranchNetwork, Node, SegmentTag};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LineKind {
    Cut,
    Fold,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PatternLine {
    pub kind: LineKind,
    pub tag: SegmentTag,
    pub a: [f64; 2],
    pub b: [f64; 2],
    pub slice: usize,
    pub unit: usize,
}

impl PatternLine {
    pub fn length(&self) -> f64 {
        (self.b[0] - self.a[0]).hypot(self.b[1] - self.a[1])
    }
}

/// Axis-aligned piece of retained material.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PatternRect {
    pub tag: SegmentTag,
    pub min: [f64; 2],
    pub max: [f64; 2],
}

impl PatternRect {
    pub fn area(&self) -> f64 {
        (self.max[0] - self.min[0]) * (self.max[1] - self.min[1])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutFoldPattern {
    pub lines: Vec<PatternLine>,
    pub rects: Vec<PatternRect>,
    pub width: f64,
    pub height: f64,
}

impl CutFoldPattern {
    pub fn cuts(&self) -> impl Iterator<Item = &PatternLine> {
        self.lines.iter().filter(|l| l.kind == LineKind::Cut)
    }

    pub fn folds(&self) -> impl Iterator<Item = &PatternLine> {
        self.lines.iter().filter(|l| l.kind == LineKind::Fold)
    }

    pub fn area(&self) -> f64 {
        self.rects.iter().map(PatternRect::area).sum()
    }

    /// Every line inside the sheet and no line both cut and fold.
    pub fn is_valid(&self, tol: f64) -> bool {
        let inside = |p: [f64; 2]| p[0] >= -tol && p[0] <= self.width + tol && p[1] >= -tol && p[1] <= self.height + tol;
        let bounded = self.lines.iter().all(|l| inside(l.a) && inside(l.b));
        let disjoint = self.cuts().all(|c| !self.folds().any(|f| f.a == c.a && f.b == c.b));
        bounded && disjoint
    }
}

/// Merges overlapping or touching intervals.
fn merge(mut v: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (a, b) in v {
        match out.last_mut() {
            Some(last) if a <= last.1 + 1e-12 => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

fn subtract(v: Vec<(f64, f64)>, holes: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut cur = v;
    for &(h0, h1) in holes {
        cur = cur
            .into_iter()
            .flat_map(|(a, b)| {
                let mut parts = Vec::new();
                if h0 > a {
                    parts.push((a, b.min(h0)));
                }
                if h1 < b {
                    parts.push((a.max(h1), b));
                }
                parts.into_iter().filter(|(a, b)| b - a > 1e-12)
            })
            .collect();
    }
    cur
}

pub fn flat_pattern(net: &BranchNetwork) -> CutFoldPattern {
    let ns = net.designs.len();
    let left: Vec<f64> = (0..ns).map(|j| net.y[j] - 0.5 * net.widths[j]).collect();
    // offset of fold vertex i down column j
    let offsets: Vec<Vec<f64>> = net
        .designs
        .iter()
        .map(|d| {
            let mut t = vec![0.0];
            for (x, z) in d.l_x.iter().zip(&d.l_z) {
                t.push(t.last().unwrap() + (x + z) * d.scale);
            }
            t
        })
        .collect();
    let corner = |j: usize, i: usize| offsets[j][i - 1] + net.designs[j].l_x[i - 1] * net.designs[j].scale;

    let mut rects = Vec::new();
    let mut folds: BTreeMap<(usize, usize, u8), PatternLine> = BTreeMap::new();
    let mut spans: Vec<Vec<(f64, f64)>> = vec![Vec::new(); ns];
    let mut holes: Vec<Vec<(f64, f64)>> = vec![Vec::new(); ns + 1];
    let mut strip_lines = Vec::new();

    for s in &net.segments {
        match (s.tag, s.a, s.b) {
            (SegmentTag::XPanel | SegmentTag::ZPanel, _, _) => {
                let (j, i) = (s.slice, s.level);
                let (t0, t1) = if s.tag == SegmentTag::XPanel {
                    (offsets[j][i - 1], corner(j, i))
                } else {
                    (corner(j, i), offsets[j][i])
                };
                let (x0, x1) = (left[j], left[j] + net.widths[j]);
                rects.push(PatternRect {
                    tag: s.tag,
                    min: [x0, t0],
                    max: [x1, t1],
                });
                spans[j].push((t0, t1));
                // fold keys: (slice, unit, 0 start | 1 junction | 2 end)
                let ends = if s.tag == SegmentTag::XPanel {
                    [(i, 0, t0), (i, 1, t1)]
                } else {
                    [(i, 1, t0), (i, 2, t1)]
                };
                for (unit, pos, t) in ends {
                    let key = if pos == 2 { (j, unit + 1, 0) } else { (j, unit, pos) };
                    folds.entry(key).or_insert(PatternLine {
                        kind: LineKind::Fold,
                        tag: s.tag,
                        a: [x0, t],
                        b: [x1, t],
                        slice: j,
                        unit,
                    });
                }
            }
            (SegmentTag::SupportStrip, Node::Corner { slice, i }, Node::Offset { toward, .. }) => {
                let t = corner(slice, i);
                let half = 0.5 * s.width;
                let (xa, xb) = (net.y[slice], net.y[toward]);
                rects.push(PatternRect {
                    tag: s.tag,
                    min: [xa.min(xb), t - half],
                    max: [xa.max(xb), t + half],
                });
                strip_lines.push(PatternLine {
                    kind: LineKind::Fold,
                    tag: s.tag,
                    a: [xa, t],
                    b: [xb, t],
                    slice,
                    unit: i,
                });
                // the strip crosses the boundary between the two columns
                holes[slice.max(toward)].push((t - half, t + half));
            }
            _ => {}
        }
    }

    let mut lines: Vec<PatternLine> = Vec::new();
    for b in 0..=ns {
        let mut v = Vec::new();
        if b > 0 {
            v.extend(&spans[b - 1]);
        }
        if b < ns {
            v.extend(&spans[b]);
        }
        let x = if b < ns { left[b] } else { left[ns - 1] + net.widths[ns - 1] };
        let owner = b.min(ns - 1);
        for (t0, t1) in subtract(merge(v), &holes[b]) {
            let unit = offsets[owner].iter().rposition(|&t| t <= t0 + 1e-12).unwrap_or(0) + 1;
            lines.push(PatternLine {
                kind: LineKind::Cut,
                tag: SegmentTag::XPanel,
                a: [x, t0],
                b: [x, t1],
                slice: owner,
                unit,
            });
        }
    }
    lines.extend(folds.into_values());
    lines.extend(strip_lines);
    let height = offsets.iter().map(|t| *t.last().unwrap()).fold(0.0, f64::max);
    CutFoldPattern {
        lines,
        rects,
        width: left[ns - 1] + net.widths[ns - 1] - left[0],
        height,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::branching::{build_network, NetworkOptions};
    use crate::optimize::SliceDesign;
    use crate::target::{CurveShape, SliceCurve, SliceSpec};

    #[test]
    fn single_unit_has_two_cuts_and_three_folds() {
        let line = SliceCurve::normalized(CurveShape::Line);
        let d = SliceDesign::from_cells(0, vec![1.0], vec![1.0], &line, 0.4);
        let net = build_network(vec![d], &SliceSpec::uniform(1, 1, 0.4), &NetworkOptions::default()).unwrap();
        let p = flat_pattern(&net);
        assert_eq!(p.cuts().count(), 2);
        assert_eq!(p.folds().count(), 3);
        assert!(p.cuts().all(|c| (c.length() - 2.0).abs() < 1e-15));
        assert!(p.is_valid(1e-12));
        assert!((p.area() - 0.8).abs() < 1e-15);
    }

    #[test]
    fn strips_interrupt_the_shared_cut() {
        let line = SliceCurve::normalized(CurveShape::Line);
        let designs = (0..2)
            .map(|j| SliceDesign::from_cells(j, vec![0.5; 2], vec![0.5; 2], &line, 1.0))
            .collect();
        let net = build_network(designs, &SliceSpec::uniform(2, 2, 1.0), &NetworkOptions::default()).unwrap();
        let p = flat_pattern(&net);
        // outer boundaries uncut, middle boundary split by one strip
        assert_eq!(p.cuts().count(), 4);
        assert_eq!(p.lines.iter().filter(|l| l.tag == SegmentTag::SupportStrip).count(), 1);
        assert!((p.area() - net.panel_area(0.7)).abs() < 1e-12);
        assert!(p.is_valid(1e-12));
    }
}
