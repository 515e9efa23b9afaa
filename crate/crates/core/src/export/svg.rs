//! SVG output of a cut-fold pattern. One user unit is one centimetre.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use super::fmt_num;
use super::pattern::{CutFoldPattern, LineKind, PatternLine};
use crate::branching::SegmentTag;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SvgOptions {
    /// Also emit every fold as an explicit chain of short cuts.
    pub micro_cuts: bool,
    /// Micro-cut length, cm.
    pub dash: f64,
    /// Gap between micro-cuts, cm.
    pub gap: f64,
    pub stroke: f64,
}

impl Default for SvgOptions {
    fn default() -> Self {
        Self {
            micro_cuts: false,
            dash: 0.2,
            gap: 0.1,
            stroke: 0.02,
        }
    }
}

/// `(id, colour, membership)` of an SVG group.
type Group = (&'static str, &'static str, fn(&PatternLine) -> bool);

fn line<W: Write>(w: &mut W, l: &PatternLine) -> io::Result<()> {
    writeln!(
        w,
        r#"<line x1="{}" y1="{}" x2="{}" y2="{}" data-tag="{}" data-slice="{}" data-unit="{}"/>"#,
        fmt_num(l.a[0]),
        fmt_num(l.a[1]),
        fmt_num(l.b[0]),
        fmt_num(l.b[1]),
        l.tag.as_str(),
        l.slice,
        l.unit
    )
}

/// Dash segments `(start, end)` along a fold.
pub fn micro_cut_chain(l: &PatternLine, dash: f64, gap: f64) -> Vec<([f64; 2], [f64; 2])> {
    let len = l.length();
    let dir = [(l.b[0] - l.a[0]) / len, (l.b[1] - l.a[1]) / len];
    let at = |s: f64| [l.a[0] + s * dir[0], l.a[1] + s * dir[1]];
    let mut out = Vec::new();
    let mut s = 0.0;
    while s < len - 1e-12 {
        let e = (s + dash).min(len);
        out.push((at(s), at(e)));
        s = e + gap;
    }
    out
}

pub fn write_svg<W: Write>(mut w: W, p: &CutFoldPattern, opts: &SvgOptions) -> io::Result<()> {
    let (wd, ht) = (fmt_num(p.width), fmt_num(p.height));
    let stroke = fmt_num(opts.stroke);
    let dashes = format!("{} {}", fmt_num(opts.dash), fmt_num(opts.gap));
    writeln!(w, r#"<?xml version="1.0" encoding="UTF-8"?>"#)?;
    writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{wd}cm" height="{ht}cm" viewBox="0 0 {wd} {ht}" data-unit="cm">"#
    )?;
    let groups: [Group; 3] = [
        ("cuts", "#000000", |l| l.kind == LineKind::Cut),
        ("folds", "#0000ff", |l| {
            l.kind == LineKind::Fold && l.tag != SegmentTag::SupportStrip
        }),
        ("support-strips", "#c8a000", |l| l.tag == SegmentTag::SupportStrip),
    ];
    for (id, colour, pick) in &groups {
        let dash = if *id == "cuts" {
            String::new()
        } else {
            format!(r#" stroke-dasharray="{dashes}""#)
        };
        writeln!(w, r#"<g id="{id}" stroke="{colour}" stroke-width="{stroke}" fill="none"{dash}>"#)?;
        for l in p.lines.iter().filter(|l| pick(l)) {
            line(&mut w, l)?;
        }
        writeln!(w, "</g>")?;
    }
    if opts.micro_cuts {
        writeln!(w, r##"<g id="micro-cuts" stroke="#ff0000" stroke-width="{stroke}" fill="none">"##)?;
        for l in p.folds() {
            for (a, b) in micro_cut_chain(l, opts.dash, opts.gap) {
                writeln!(
                    w,
                    r#"<line x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
                    fmt_num(a[0]),
                    fmt_num(a[1]),
                    fmt_num(b[0]),
                    fmt_num(b[1])
                )?;
            }
        }
        writeln!(w, "</g>")?;
    }
    writeln!(w, "</svg>")
}
