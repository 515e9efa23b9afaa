//! Assembly of optimized slices into a connected strip network.
//!
//! Slices are paired `(0, 1), (2, 3), ...`; each pair carries one branch
//! rooted at the anchor vertex of its first slice. Level `i` of a branch adds
//! unit `i` of both slices, a separation segment joining the pair at fold
//! vertex `i - 1` (first slice to second on odd levels, back on even ones),
//! and, between consecutive levels, a support strip across the pair at the
//! corner of the previous unit. Branch roots are chained by level-0
//! separations, so the branches form a path.
//!
//! Segment endpoints are symbolic [`Node`]s, so the network can be posed at
//! any deployment angle with the same connectivity.

use std::collections::BTreeMap;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::export::fmt_num;
use crate::kinematics::{chain_pose, ChainPose};
use crate::optimize::SliceDesign;
use crate::target::SliceSpec;
use crate::vec3::Vec3;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum NetworkError {
    #[error("every branch terminated before its first level")]
    EmptyNetwork,
    #[error("segments {a} and {b} intersect at psi = {psi}")]
    SelfIntersection { psi: f64, a: usize, b: usize },
    #[error("topology broken at psi = {psi} (segments {a}, {b}): {reason}")]
    TopologyBroken { psi: f64, a: usize, b: usize, reason: String },
    #[error("patch boundaries differ by {gap:.3e}")]
    StitchMismatch { gap: f64 },
    #[error("designs do not match the slice spec: {0}")]
    Inconsistent(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SegmentTag {
    XPanel,
    ZPanel,
    Separation,
    SupportStrip,
}

impl SegmentTag {
    pub const ALL: [SegmentTag; 4] = [Self::XPanel, Self::ZPanel, Self::Separation, Self::SupportStrip];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::XPanel => "x-panel",
            Self::ZPanel => "z-panel",
            Self::Separation => "separation",
            Self::SupportStrip => "support-strip",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.as_str() == s)
    }

    /// Rigid panels whose area counts as sheet material.
    pub fn is_panel(self) -> bool {
        self != Self::Separation
    }
}

/// Segment endpoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Node {
    /// Fold vertex `i` (0 = anchor) of a slice.
    Vertex { slice: usize, i: usize },
    /// Corner between the x- and z-panel of unit `i` of a slice.
    Corner { slice: usize, i: usize },
    /// Corner `i` of `slice` carried across to the plane of slice `toward`.
    Offset { slice: usize, i: usize, toward: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub tag: SegmentTag,
    pub a: Node,
    pub b: Node,
    pub slice: usize,
    pub level: usize,
    pub width: f64,
}

/// A segment posed at some deployment angle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SegmentRecord {
    pub start: Vec3,
    pub end: Vec3,
    pub length: f64,
    pub tag: SegmentTag,
    pub slice: usize,
    pub level: usize,
    pub width: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NetworkOptions {
    /// Support-strip width as a fraction of the local slice width.
    pub support_width_factor: f64,
    /// Separation width as a fraction of the narrower slice of the pair.
    pub separation_width_factor: f64,
}

impl Default for NetworkOptions {
    fn default() -> Self {
        Self {
            support_width_factor: 0.5,
            separation_width_factor: 0.5,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub start: usize,
    pub partner: Option<usize>,
    /// Levels built before termination.
    pub levels: usize,
    pub terminated: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchNetwork {
    pub designs: Vec<SliceDesign>,
    /// Centre-line `y` of every slice.
    pub y: Vec<f64>,
    pub widths: Vec<f64>,
    pub segments: Vec<Segment>,
    pub branches: Vec<Branch>,
    /// Level-0 links between branch roots, as branch index pairs.
    pub links: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TopologyReport {
    pub psi: f64,
    pub segments: usize,
    pub components: usize,
    pub pairs_checked: usize,
}

const INCREMENT_TOL: f64 = 1e-12;

/// Deployed `x` of fold vertex `i`.
fn deployed_x(d: &SliceDesign, i: usize) -> f64 {
    d.scale * d.l_x[..i].iter().sum::<f64>()
}

pub fn build_network(designs: Vec<SliceDesign>, spec: &SliceSpec, options: &NetworkOptions) -> Result<BranchNetwork, NetworkError> {
    if designs.len() != spec.n_slices() {
        return Err(NetworkError::Inconsistent(format!(
            "{} designs for {} slices",
            designs.len(),
            spec.n_slices()
        )));
    }
    for (j, d) in designs.iter().enumerate() {
        if d.n() != spec.n || d.slice != j || (d.width - spec.widths[j]).abs() > 1e-12 {
            return Err(NetworkError::Inconsistent(format!("slice {j}")));
        }
    }
    let mut y = Vec::with_capacity(designs.len());
    let mut s = 0.0;
    for w in &spec.widths {
        y.push(s + 0.5 * w);
        s += w;
    }
    let n = spec.n;
    let widths = spec.widths.clone();
    let mut segments = Vec::new();
    let mut branches = Vec::new();

    for start in (0..designs.len()).step_by(2) {
        let partner = (start + 1 < designs.len()).then_some(start + 1);
        let mut cur = start;
        let mut levels = 0;
        let mut terminated = false;
        for i in 1..=n {
            let target = match partner {
                Some(p) if i % 2 == 1 => p,
                _ => start,
            };
            if deployed_x(&designs[target], i) - deployed_x(&designs[cur], i - 1) < -INCREMENT_TOL {
                terminated = true;
                break;
            }
            if target != cur {
                segments.push(Segment {
                    tag: SegmentTag::Separation,
                    a: Node::Vertex { slice: cur, i: i - 1 },
                    b: Node::Vertex { slice: target, i: i - 1 },
                    slice: cur,
                    level: i,
                    width: options.separation_width_factor * widths[cur].min(widths[target]),
                });
            }
            for j in std::iter::once(start).chain(partner) {
                segments.push(Segment {
                    tag: SegmentTag::XPanel,
                    a: Node::Vertex { slice: j, i: i - 1 },
                    b: Node::Corner { slice: j, i },
                    slice: j,
                    level: i,
                    width: widths[j],
                });
                segments.push(Segment {
                    tag: SegmentTag::ZPanel,
                    a: Node::Corner { slice: j, i },
                    b: Node::Vertex { slice: j, i },
                    slice: j,
                    level: i,
                    width: widths[j],
                });
            }
            if let (Some(p), true) = (partner, i >= 2) {
                // strip across the pair at the corner of the previous level's unit
                let (from, to) = if cur == start { (start, p) } else { (p, start) };
                segments.push(Segment {
                    tag: SegmentTag::SupportStrip,
                    a: Node::Corner { slice: from, i: i - 1 },
                    b: Node::Offset {
                        slice: from,
                        i: i - 1,
                        toward: to,
                    },
                    slice: from,
                    level: i - 1,
                    width: options.support_width_factor * widths[from],
                });
            }
            cur = target;
            levels = i;
        }
        branches.push(Branch {
            start,
            partner,
            levels,
            terminated,
        });
    }
    if branches.iter().all(|b| b.levels == 0) {
        return Err(NetworkError::EmptyNetwork);
    }
    let mut links = Vec::new();
    for b in 1..branches.len() {
        let (s0, s1) = (branches[b - 1].start, branches[b].start);
        segments.push(Segment {
            tag: SegmentTag::Separation,
            a: Node::Vertex { slice: s0, i: 0 },
            b: Node::Vertex { slice: s1, i: 0 },
            slice: s0,
            level: 0,
            width: options.separation_width_factor * widths[s0].min(widths[s1]),
        });
        links.push((b - 1, b));
    }
    // slice-major, level-minor, otherwise generation order
    segments.sort_by_key(|s| (s.slice, s.level));

    let net = BranchNetwork {
        designs,
        y,
        widths,
        segments,
        branches,
        links,
    };
    let deployed = std::f64::consts::FRAC_PI_2;
    if let Err(e) = net.validate_topology(deployed) {
        return Err(match e {
            NetworkError::TopologyBroken { a, b, .. } => NetworkError::SelfIntersection { psi: deployed, a, b },
            e => e,
        });
    }
    Ok(net)
}

impl BranchNetwork {
    fn poses(&self, psi: f64) -> Vec<ChainPose> {
        self.designs.iter().map(|d| chain_pose(&d.cells(), psi, d.scale)).collect()
    }

    fn position(&self, poses: &[ChainPose], node: Node) -> Vec3 {
        let at = |slice: usize, p: Vec3| Vec3::new(p.x, self.y[slice], p.z);
        match node {
            Node::Vertex { slice, i } => at(slice, poses[slice].vertices[i]),
            Node::Corner { slice, i } => at(slice, poses[slice].corners[i - 1]),
            Node::Offset { slice, i, toward } => at(toward, poses[slice].corners[i - 1]),
        }
    }

    /// Segments posed at `psi`, in table order.
    pub fn records(&self, psi: f64) -> Vec<SegmentRecord> {
        let poses = self.poses(psi);
        self.segments
            .iter()
            .map(|s| {
                let (start, end) = (self.position(&poses, s.a), self.position(&poses, s.b));
                SegmentRecord {
                    start,
                    end,
                    length: start.distance(end),
                    tag: s.tag,
                    slice: s.slice,
                    level: s.level,
                    width: s.width,
                }
            })
            .collect()
    }

    /// Segments sharing an endpoint with each segment.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut by_node: BTreeMap<Node, Vec<usize>> = BTreeMap::new();
        for (k, s) in self.segments.iter().enumerate() {
            by_node.entry(s.a).or_default().push(k);
            by_node.entry(s.b).or_default().push(k);
        }
        let mut adj = vec![Vec::new(); self.segments.len()];
        for list in by_node.values() {
            for &a in list {
                for &b in list {
                    if a != b && !adj[a].contains(&b) {
                        adj[a].push(b);
                    }
                }
            }
        }
        adj
    }

    /// Connected components of the shared-endpoint graph.
    pub fn components(&self) -> usize {
        let adj = self.adjacency();
        let mut seen = vec![false; adj.len()];
        let mut count = 0;
        for s in 0..adj.len() {
            if seen[s] {
                continue;
            }
            count += 1;
            let mut stack = vec![s];
            seen[s] = true;
            while let Some(k) = stack.pop() {
                for &m in &adj[k] {
                    if !seen[m] {
                        seen[m] = true;
                        stack.push(m);
                    }
                }
            }
        }
        count
    }

    /// Branches joined by root links form a tree.
    pub fn is_branch_tree(&self) -> bool {
        let n = self.branches.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        for &(a, b) in &self.links {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra == rb {
                return false;
            }
            parent[ra] = rb;
        }
        self.links.len() + 1 == n
    }

    /// Total length of segments with `tag` belonging to `slice`.
    pub fn tag_length(&self, slice: usize, tag: SegmentTag) -> f64 {
        self.records(std::f64::consts::FRAC_PI_2)
            .iter()
            .filter(|r| r.slice == slice && r.tag == tag)
            .map(|r| r.length)
            .sum()
    }

    /// Sum of `length * width` over rigid panels at `psi`.
    pub fn panel_area(&self, psi: f64) -> f64 {
        self.records(psi)
            .iter()
            .filter(|r| r.tag.is_panel())
            .map(|r| r.length * r.width)
            .sum()
    }

    /// Connectivity, panel ordering and in-plane crossings at `psi`.
    pub fn validate_topology(&self, psi: f64) -> Result<TopologyReport, NetworkError> {
        let broken = |a: usize, b: usize, reason: String| NetworkError::TopologyBroken { psi, a, b, reason };
        let components = self.components();
        if components != 1 {
            return Err(broken(0, 0, format!("{components} connected components")));
        }
        let recs = self.records(psi);
        let down = Vec3::new(-psi.cos(), 0.0, -psi.sin());
        for (k, r) in recs.iter().enumerate() {
            let d = r.end - r.start;
            let ok = match r.tag {
                SegmentTag::XPanel => d.x > 0.0,
                SegmentTag::ZPanel => d.dot(down) > 0.0,
                _ => true,
            };
            if !ok {
                return Err(broken(k, k, format!("{} runs against the chain order", r.tag.as_str())));
            }
        }
        let mut pairs_checked = 0;
        for j in 0..self.designs.len() {
            let in_plane: Vec<usize> = (0..recs.len())
                .filter(|&k| recs[k].slice == j && matches!(recs[k].tag, SegmentTag::XPanel | SegmentTag::ZPanel))
                .collect();
            for (u, &a) in in_plane.iter().enumerate() {
                for &b in &in_plane[u + 1..] {
                    let (sa, sb) = (&self.segments[a], &self.segments[b]);
                    if sa.a == sb.a || sa.a == sb.b || sa.b == sb.a || sa.b == sb.b {
                        continue;
                    }
                    pairs_checked += 1;
                    if crosses(&recs[a], &recs[b]) {
                        return Err(broken(a, b, "panels cross".into()));
                    }
                }
            }
        }
        Ok(TopologyReport {
            psi,
            segments: recs.len(),
            components,
            pairs_checked,
        })
    }

    /// [`Self::validate_topology`] at `psi = 0, pi/4, pi/2`.
    pub fn validate_deployment(&self) -> Result<Vec<TopologyReport>, NetworkError> {
        [0.0, std::f64::consts::FRAC_PI_4, std::f64::consts::FRAC_PI_2]
            .into_iter()
            .map(|p| self.validate_topology(p))
            .collect()
    }

    /// Appends `other` beside this network. The facing slices must share
    /// both chain endpoints to within `1e-6`.
    pub fn stitch(mut self, other: BranchNetwork) -> Result<BranchNetwork, NetworkError> {
        let (Some(a), Some(b)) = (self.designs.last(), other.designs.first()) else {
            return Err(NetworkError::EmptyNetwork);
        };
        let deployed = std::f64::consts::FRAC_PI_2;
        let pa = chain_pose(&a.cells(), deployed, a.scale);
        let pb = chain_pose(&b.cells(), deployed, b.scale);
        let gap = pa.vertices[0]
            .max_abs_diff(pb.vertices[0])
            .max(pa.vertices.last().unwrap().max_abs_diff(*pb.vertices.last().unwrap()));
        if gap > 1e-6 {
            return Err(NetworkError::StitchMismatch { gap });
        }
        let (ns, nb) = (self.designs.len(), self.branches.len());
        let shift = self.widths.iter().sum::<f64>() - other.y[0] + 0.5 * other.widths[0];
        let remap = |node: Node| match node {
            Node::Vertex { slice, i } => Node::Vertex { slice: slice + ns, i },
            Node::Corner { slice, i } => Node::Corner { slice: slice + ns, i },
            Node::Offset { slice, i, toward } => Node::Offset {
                slice: slice + ns,
                i,
                toward: toward + ns,
            },
        };
        let last_root = self.branches[nb - 1].start;
        let width = other
            .segments
            .iter()
            .chain(&self.segments)
            .find(|s| s.tag == SegmentTag::Separation)
            .map_or(0.5 * self.widths[ns - 1].min(other.widths[0]), |s| s.width);
        for mut d in other.designs {
            d.slice += ns;
            self.designs.push(d);
        }
        self.y.extend(other.y.iter().map(|y| y + shift));
        self.widths.extend(other.widths);
        self.segments.extend(other.segments.into_iter().map(|s| Segment {
            a: remap(s.a),
            b: remap(s.b),
            slice: s.slice + ns,
            ..s
        }));
        self.segments.push(Segment {
            tag: SegmentTag::Separation,
            a: Node::Vertex { slice: last_root, i: 0 },
            b: Node::Vertex { slice: ns, i: 0 },
            slice: last_root,
            level: 0,
            width,
        });
        self.links.push((nb - 1, nb));
        self.links.extend(other.links.iter().map(|&(a, b)| (a + nb, b + nb)));
        self.branches.extend(other.branches.into_iter().map(|b| Branch {
            start: b.start + ns,
            partner: b.partner.map(|p| p + ns),
            ..b
        }));
        self.segments.sort_by_key(|s| (s.slice, s.level));
        Ok(self)
    }

    /// Segment table at `psi`: `tag,x1,y1,z1,x2,y2,z2,length,slice,level`.
    pub fn write_csv<W: Write>(&self, mut w: W, psi: f64) -> io::Result<()> {
        writeln!(w, "tag,x1,y1,z1,x2,y2,z2,length,slice,level")?;
        for r in self.records(psi) {
            let nums = [r.start.x, r.start.y, r.start.z, r.end.x, r.end.y, r.end.z, r.length].map(fmt_num);
            writeln!(w, "{},{},{},{}", r.tag.as_str(), nums.join(","), r.slice, r.level)?;
        }
        Ok(())
    }
}

/// Proper crossing of two segments in the `(x, z)` plane; touching and
/// collinear overlap (the folded-flat state) do not count.
fn crosses(a: &SegmentRecord, b: &SegmentRecord) -> bool {
    let p = |v: Vec3| (v.x, v.z);
    let (p1, p2, q1, q2) = (p(a.start), p(a.end), p(b.start), p(b.end));
    let orient = |o: (f64, f64), s: (f64, f64), t: (f64, f64)| {
        let v = (s.0 - o.0) * (t.1 - o.1) - (s.1 - o.1) * (t.0 - o.0);
        let scale = 1e-12 * (1.0 + o.0.abs() + o.1.abs() + s.0.abs() + s.1.abs() + t.0.abs() + t.1.abs()).powi(2);
        if v > scale {
            1
        } else if v < -scale {
            -1
        } else {
            0
        }
    };
    let (d1, d2) = (orient(q1, q2, p1), orient(q1, q2, p2));
    let (d3, d4) = (orient(p1, p2, q1), orient(p1, p2, q2));
    d1 * d2 < 0 && d3 * d4 < 0
}
