//! T-mesh data model: parsing, validation, l-edge extraction, vertex
//! taxonomy, T-connected components, and a seeded random mesh generator.
//!
//! A T-mesh here is an axis-aligned rectangular partition of a rectangular
//! domain: horizontal and vertical interior segments whose endpoints always
//! land on a perpendicular segment or on the boundary, inducing cells that
//! are all rectangles (hanging T-junction vertices allowed).
//!
//! Terminology used throughout the crate:
//!
//! * An **l-edge** is a maximal interior segment, or one of the four
//!   boundary sides. Interior l-edges are classified by their endpoints:
//!   a **cross-cut** meets the boundary at both ends, a **ray** at exactly
//!   one end, and a **t-edge** at neither.
//! * A **multi-vertex** is the crossing of two t-edges; every other vertex
//!   on a t-edge is a **mono-vertex** of that edge.
//! * The **T-connected component** is the set of all t-edges, split into
//!   blocks connected via shared vertices; the **integral component** adds
//!   the cross-cuts and rays that touch it.
//! * A **generalized T-connected component** forgets the ambient mesh and
//!   keeps only per-edge line coordinates and ordered vertex coordinates —
//!   the exact input the conformality matrix is built from.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::exact::{point_cmp, Rational};

/// Orientation of a segment or l-edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Orient {
    Horizontal,
    Vertical,
}

impl Orient {
    pub fn flipped(self) -> Orient {
        match self {
            Orient::Horizontal => Orient::Vertical,
            Orient::Vertical => Orient::Horizontal,
        }
    }

    fn letter(self) -> &'static str {
        match self {
            Orient::Horizontal => "h",
            Orient::Vertical => "v",
        }
    }
}

impl fmt::Display for Orient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Orient::Horizontal => "horizontal",
            Orient::Vertical => "vertical",
        })
    }
}

impl Serialize for Orient {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(self.letter())
    }
}

impl<'de> Deserialize<'de> for Orient {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Orient, D::Error> {
        let s = String::deserialize(de)?;
        match s.as_str() {
            "h" => Ok(Orient::Horizontal),
            "v" => Ok(Orient::Vertical),
            other => Err(serde::de::Error::custom(format!(
                "orient must be \"h\" or \"v\", got {other:?}"
            ))),
        }
    }
}

/// Errors raised while loading or constructing meshes and generalized
/// components.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MeshError {
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("invalid domain: require x0 < x1 and y0 < y1")]
    BadDomain,
    #[error("mesh failed validation:\n{0}")]
    Invalid(ValidationReport),
    #[error("invalid generalized component: {0}")]
    GtInvalid(String),
}

/// The rectangular domain of a T-mesh.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: Rational,
    pub y0: Rational,
    pub x1: Rational,
    pub y1: Rational,
}

/// An axis-aligned segment: `line` is the fixed coordinate, `lo..hi` the
/// varying one (so a horizontal segment is `y = line, x ∈ [lo, hi]`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub line: Rational,
    pub lo: Rational,
    pub hi: Rational,
}

/// A single violated T-mesh axiom.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ValidationIssue {
    #[error("{orient} segment at {line} has malformed span [{lo}, {hi}]")]
    MalformedSpan { orient: Orient, line: Rational, lo: Rational, hi: Rational },
    #[error("{orient} segment at {line} spanning [{lo}, {hi}] lies outside the domain")]
    OutsideDomain { orient: Orient, line: Rational, lo: Rational, hi: Rational },
    #[error("{orient} segment at {line} lies on the domain boundary")]
    OnBoundaryLine { orient: Orient, line: Rational },
    #[error(
        "overlapping parallel {orient} segments at {line}: [{a_lo}, {a_hi}] and [{b_lo}, {b_hi}]"
    )]
    OverlappingParallel {
        orient: Orient,
        line: Rational,
        a_lo: Rational,
        a_hi: Rational,
        b_lo: Rational,
        b_hi: Rational,
    },
    #[error("dangling endpoint at ({x}, {y}): not on any perpendicular segment or the boundary")]
    DanglingEndpoint { x: Rational, y: Rational },
    #[error("non-rectangular cell inside [{x0}, {x1}] x [{y0}, {y1}]")]
    NonRectangularCell { x0: Rational, y0: Rational, x1: Rational, y1: Rational },
}

/// Every axiom violation found in a mesh; empty means the mesh is a valid
/// regular T-mesh.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub issues: Vec<ValidationIssue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn messages(&self) -> Vec<String> {
        self.issues.iter().map(|i| i.to_string()).collect()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.issues.is_empty() {
            return f.write_str("valid");
        }
        for (i, issue) in self.issues.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "- {issue}")?;
        }
        Ok(())
    }
}

// JSON wire format, kept separate from the internal representation so
// normalization cannot be bypassed.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MeshDoc {
    domain: Rect,
    #[serde(default)]
    hsegments: Vec<HSegDoc>,
    #[serde(default)]
    vsegments: Vec<VSegDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HSegDoc {
    y: Rational,
    x0: Rational,
    x1: Rational,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VSegDoc {
    x: Rational,
    y0: Rational,
    y1: Rational,
}

/// A T-mesh over a rectangular domain. Always normalized: segments sorted
/// by `(line, lo)` with touching collinear segments merged.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TMesh {
    domain: Rect,
    hsegments: Vec<Segment>,
    vsegments: Vec<Segment>,
}

impl TMesh {
    /// Parses a mesh document and rejects it unless it is a valid regular
    /// T-mesh (every violation is listed in the error).
    pub fn parse(json: &str) -> Result<TMesh, MeshError> {
        let (mesh, report) = TMesh::parse_with_report(json)?;
        if report.is_valid() {
            Ok(mesh)
        } else {
            Err(MeshError::Invalid(report))
        }
    }

    /// Parses a mesh document, returning the mesh together with the full
    /// validation report instead of failing on axiom violations. Only
    /// schema-level problems (malformed JSON, malformed domain) are errors.
    /// Segments that cannot be placed geometrically (bad span, outside the
    /// domain, on a boundary line) are reported and excluded from the mesh.
    pub fn parse_with_report(json: &str) -> Result<(TMesh, ValidationReport), MeshError> {
        let doc: MeshDoc =
            serde_json::from_str(json).map_err(|e| MeshError::Json(e.to_string()))?;
        TMesh::from_segments_with_report(
            doc.domain,
            doc.hsegments.into_iter().map(|s| Segment { line: s.y, lo: s.x0, hi: s.x1 }).collect(),
            doc.vsegments.into_iter().map(|s| Segment { line: s.x, lo: s.y0, hi: s.y1 }).collect(),
        )
    }

    /// Builds a mesh directly from segment lists, with the same
    /// normalization and reporting as [`TMesh::parse_with_report`].
    pub fn from_segments_with_report(
        domain: Rect,
        hsegments: Vec<Segment>,
        vsegments: Vec<Segment>,
    ) -> Result<(TMesh, ValidationReport), MeshError> {
        if domain.x0 >= domain.x1 || domain.y0 >= domain.y1 {
            return Err(MeshError::BadDomain);
        }
        let mut issues = Vec::new();
        let hsegments = normalize(
            Orient::Horizontal,
            hsegments,
            (&domain.y0, &domain.y1),
            (&domain.x0, &domain.x1),
            &mut issues,
        );
        let vsegments = normalize(
            Orient::Vertical,
            vsegments,
            (&domain.x0, &domain.x1),
            (&domain.y0, &domain.y1),
            &mut issues,
        );
        let mesh = TMesh { domain, hsegments, vsegments };
        issues.extend(mesh.validate().issues);
        Ok((mesh, ValidationReport { issues }))
    }

    /// Builds a mesh from segment lists, rejecting axiom violations.
    pub fn from_segments(
        domain: Rect,
        hsegments: Vec<Segment>,
        vsegments: Vec<Segment>,
    ) -> Result<TMesh, MeshError> {
        let (mesh, report) = TMesh::from_segments_with_report(domain, hsegments, vsegments)?;
        if report.is_valid() {
            Ok(mesh)
        } else {
            Err(MeshError::Invalid(report))
        }
    }

    pub fn domain(&self) -> &Rect {
        &self.domain
    }

    pub fn hsegments(&self) -> &[Segment] {
        &self.hsegments
    }

    pub fn vsegments(&self) -> &[Segment] {
        &self.vsegments
    }

    /// Serializes back to the JSON wire format (deterministic: segments are
    /// in normalized order).
    pub fn to_json(&self) -> String {
        let doc = MeshDoc {
            domain: self.domain.clone(),
            hsegments: self
                .hsegments
                .iter()
                .map(|s| HSegDoc { y: s.line.clone(), x0: s.lo.clone(), x1: s.hi.clone() })
                .collect(),
            vsegments: self
                .vsegments
                .iter()
                .map(|s| VSegDoc { x: s.line.clone(), y0: s.lo.clone(), y1: s.hi.clone() })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("mesh serialization cannot fail")
    }

    /// Checks the T-mesh axioms: every interior segment endpoint must lie on
    /// a perpendicular segment or the boundary, and the induced cells must
    /// all be rectangles (checked by reconstructing the cell complex from
    /// the coordinate sweep grid).
    pub fn validate(&self) -> ValidationReport {
        let mut issues = Vec::new();
        self.check_dangling(&mut issues);
        self.check_cells(&mut issues);
        ValidationReport { issues }
    }

    fn check_dangling(&self, issues: &mut Vec<ValidationIssue>) {
        for seg in &self.hsegments {
            for x in [&seg.lo, &seg.hi] {
                let on_boundary = *x == self.domain.x0 || *x == self.domain.x1;
                let supported = on_boundary
                    || self
                        .vsegments
                        .iter()
                        .any(|v| v.line == *x && v.lo <= seg.line && seg.line <= v.hi);
                if !supported {
                    issues.push(ValidationIssue::DanglingEndpoint {
                        x: x.clone(),
                        y: seg.line.clone(),
                    });
                }
            }
        }
        for seg in &self.vsegments {
            for y in [&seg.lo, &seg.hi] {
                let on_boundary = *y == self.domain.y0 || *y == self.domain.y1;
                let supported = on_boundary
                    || self
                        .hsegments
                        .iter()
                        .any(|h| h.line == *y && h.lo <= seg.line && seg.line <= h.hi);
                if !supported {
                    issues.push(ValidationIssue::DanglingEndpoint {
                        x: seg.line.clone(),
                        y: y.clone(),
                    });
                }
            }
        }
    }

    /// Reconstructs the cell complex on the sweep grid of all coordinates:
    /// grid pixels are glued across pixel borders not covered by a segment,
    /// and every glued region must be a full rectangle of pixels.
    fn check_cells(&self, issues: &mut Vec<ValidationIssue>) {
        let mut xs: BTreeSet<Rational> = BTreeSet::new();
        let mut ys: BTreeSet<Rational> = BTreeSet::new();
        xs.insert(self.domain.x0.clone());
        xs.insert(self.domain.x1.clone());
        ys.insert(self.domain.y0.clone());
        ys.insert(self.domain.y1.clone());
        for s in &self.hsegments {
            ys.insert(s.line.clone());
            xs.insert(s.lo.clone());
            xs.insert(s.hi.clone());
        }
        for s in &self.vsegments {
            xs.insert(s.line.clone());
            ys.insert(s.lo.clone());
            ys.insert(s.hi.clone());
        }
        let xs: Vec<Rational> = xs.into_iter().collect();
        let ys: Vec<Rational> = ys.into_iter().collect();
        let nx = xs.len() - 1;
        let ny = ys.len() - 1;
        if nx == 0 || ny == 0 {
            return;
        }

        let covers_h = |y: &Rational, xa: &Rational, xb: &Rational| {
            self.hsegments.iter().any(|s| s.line == *y && s.lo <= *xa && *xb <= s.hi)
        };
        let covers_v = |x: &Rational, ya: &Rational, yb: &Rational| {
            self.vsegments.iter().any(|s| s.line == *x && s.lo <= *ya && *yb <= s.hi)
        };

        let mut uf = UnionFind::new(nx * ny);
        let pixel = |i: usize, j: usize| j * nx + i;
        for j in 0..ny {
            for i in 0..nx {
                if i + 1 < nx && !covers_v(&xs[i + 1], &ys[j], &ys[j + 1]) {
                    uf.union(pixel(i, j), pixel(i + 1, j));
                }
                if j + 1 < ny && !covers_h(&ys[j + 1], &xs[i], &xs[i + 1]) {
                    uf.union(pixel(i, j), pixel(i, j + 1));
                }
            }
        }

        let mut regions: BTreeMap<usize, (usize, usize, usize, usize, usize)> = BTreeMap::new();
        for j in 0..ny {
            for i in 0..nx {
                let root = uf.find(pixel(i, j));
                let entry = regions.entry(root).or_insert((i, j, i, j, 0));
                entry.0 = entry.0.min(i);
                entry.1 = entry.1.min(j);
                entry.2 = entry.2.max(i);
                entry.3 = entry.3.max(j);
                entry.4 += 1;
            }
        }
        for (_, (i0, j0, i1, j1, count)) in regions {
            let w = i1 - i0 + 1;
            let h = j1 - j0 + 1;
            if count != w * h {
                issues.push(ValidationIssue::NonRectangularCell {
                    x0: xs[i0].clone(),
                    y0: ys[j0].clone(),
                    x1: xs[i1 + 1].clone(),
                    y1: ys[j1 + 1].clone(),
                });
            }
        }
    }

    /// The mesh rotated a quarter turn counterclockwise, mapping each point
    /// `(x, y)` to `(-y, x)`. Exact; used by the isomorphism search.
    pub fn rotated_quarter_turn(&self) -> TMesh {
        let domain = Rect {
            x0: -&self.domain.y1,
            y0: self.domain.x0.clone(),
            x1: -&self.domain.y0,
            y1: self.domain.x1.clone(),
        };
        let hsegments: Vec<Segment> = self
            .vsegments
            .iter()
            .map(|v| Segment { line: v.line.clone(), lo: -&v.hi, hi: -&v.lo })
            .collect();
        let vsegments: Vec<Segment> = self
            .hsegments
            .iter()
            .map(|h| Segment { line: -&h.line, lo: h.lo.clone(), hi: h.hi.clone() })
            .collect();
        TMesh::from_segments(domain, hsegments, vsegments)
            .expect("rotation of a valid mesh stays valid")
    }
}

fn normalize(
    orient: Orient,
    mut segs: Vec<Segment>,
    line_bounds: (&Rational, &Rational),
    span_bounds: (&Rational, &Rational),
    issues: &mut Vec<ValidationIssue>,
) -> Vec<Segment> {
    segs.retain(|s| {
        if s.lo >= s.hi {
            issues.push(ValidationIssue::MalformedSpan {
                orient,
                line: s.line.clone(),
                lo: s.lo.clone(),
                hi: s.hi.clone(),
            });
            return false;
        }
        if s.line < *line_bounds.0
            || s.line > *line_bounds.1
            || s.lo < *span_bounds.0
            || s.hi > *span_bounds.1
        {
            issues.push(ValidationIssue::OutsideDomain {
                orient,
                line: s.line.clone(),
                lo: s.lo.clone(),
                hi: s.hi.clone(),
            });
            return false;
        }
        if s.line == *line_bounds.0 || s.line == *line_bounds.1 {
            issues.push(ValidationIssue::OnBoundaryLine { orient, line: s.line.clone() });
            return false;
        }
        true
    });
    segs.sort_by(|a, b| a.line.cmp(&b.line).then_with(|| a.lo.cmp(&b.lo)));
    let mut out: Vec<Segment> = Vec::with_capacity(segs.len());
    for seg in segs {
        match out.last_mut() {
            Some(prev) if prev.line == seg.line && seg.lo <= prev.hi => {
                if seg.lo < prev.hi {
                    issues.push(ValidationIssue::OverlappingParallel {
                        orient,
                        line: seg.line.clone(),
                        a_lo: prev.lo.clone(),
                        a_hi: prev.hi.clone(),
                        b_lo: seg.lo.clone(),
                        b_hi: seg.hi.clone(),
                    });
                }
                // Merge touching (and, to keep downstream checks running,
                // overlapping) collinear segments into one maximal segment.
                if seg.hi > prev.hi {
                    prev.hi = seg.hi;
                }
            }
            _ => out.push(seg),
        }
    }
    out
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut a: usize) -> usize {
        while self.parent[a] != a {
            self.parent[a] = self.parent[self.parent[a]];
            a = self.parent[a];
        }
        a
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

/// Classification of an l-edge by how its endpoints meet the boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EdgeKind {
    CrossCut,
    Ray,
    TEdge,
    Boundary,
}

impl fmt::Display for EdgeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EdgeKind::CrossCut => "cross-cut",
            EdgeKind::Ray => "ray",
            EdgeKind::TEdge => "t-edge",
            EdgeKind::Boundary => "boundary",
        })
    }
}

/// Vertex taxonomy relative to the T-connected component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VertexClass {
    /// On exactly one t-edge.
    Mono,
    /// Crossing of two t-edges.
    Multi,
    /// On no t-edge.
    OffComponent,
}

/// A vertex of the mesh arrangement as seen from an l-edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    pub position: (Rational, Rational),
    pub interior: bool,
    pub class: VertexClass,
}

/// A maximal interior segment or boundary side, with its classification and
/// the ordered vertices along it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LEdge {
    pub orient: Orient,
    /// The fixed coordinate of the edge's supporting line (y for horizontal
    /// edges, x for vertical ones).
    pub line: Rational,
    pub span: (Rational, Rational),
    pub kind: EdgeKind,
    /// Vertices in increasing order of the along-edge coordinate.
    pub vertices: Vec<Vertex>,
}

impl LEdge {
    /// The along-edge coordinates of all vertices (x for horizontal edges,
    /// y for vertical ones).
    pub fn vertex_coords(&self) -> Vec<Rational> {
        self.vertices
            .iter()
            .map(|v| match self.orient {
                Orient::Horizontal => v.position.0.clone(),
                Orient::Vertical => v.position.1.clone(),
            })
            .collect()
    }

    /// n(l): the number of vertices on the edge.
    pub fn n(&self) -> usize {
        self.vertices.len()
    }

    /// m(l): the number of mono-vertices on the edge (about the full
    /// T-connected component).
    pub fn m(&self) -> usize {
        self.vertices.iter().filter(|v| v.class == VertexClass::Mono).count()
    }
}

/// Extracts every l-edge of the mesh: maximal interior segments classified
/// as cross-cut, ray, or t-edge, followed by the four boundary sides.
/// Deterministic order: horizontals by `(line, span)`, then verticals, then
/// bottom/top/left/right boundary sides.
pub fn extract_l_edges(mesh: &TMesh) -> Vec<LEdge> {
    let d = mesh.domain();
    // Boundary sides participate as crossing partners and as edges.
    let h_all: Vec<(Segment, bool)> = mesh
        .hsegments()
        .iter()
        .map(|s| (s.clone(), false))
        .chain([
            (Segment { line: d.y0.clone(), lo: d.x0.clone(), hi: d.x1.clone() }, true),
            (Segment { line: d.y1.clone(), lo: d.x0.clone(), hi: d.x1.clone() }, true),
        ])
        .collect();
    let v_all: Vec<(Segment, bool)> = mesh
        .vsegments()
        .iter()
        .map(|s| (s.clone(), false))
        .chain([
            (Segment { line: d.x0.clone(), lo: d.y0.clone(), hi: d.y1.clone() }, true),
            (Segment { line: d.x1.clone(), lo: d.y0.clone(), hi: d.y1.clone() }, true),
        ])
        .collect();

    let cross = |seg: &Segment, others: &[(Segment, bool)]| -> Vec<Rational> {
        let mut coords: Vec<Rational> = others
            .iter()
            .filter(|(o, _)| {
                seg.lo <= o.line && o.line <= seg.hi && o.lo <= seg.line && seg.line <= o.hi
            })
            .map(|(o, _)| o.line.clone())
            .collect();
        coords.sort();
        coords.dedup();
        coords
    };

    let interior = |x: &Rational, y: &Rational| d.x0 < *x && *x < d.x1 && d.y0 < *y && *y < d.y1;

    let mut edges = Vec::new();
    for (seg, is_boundary) in &h_all {
        if *is_boundary {
            continue;
        }
        let coords = cross(seg, &v_all);
        let endpoints_on_boundary = usize::from(seg.lo == d.x0) + usize::from(seg.hi == d.x1);
        let kind = match endpoints_on_boundary {
            2 => EdgeKind::CrossCut,
            1 => EdgeKind::Ray,
            _ => EdgeKind::TEdge,
        };
        let vertices = coords
            .into_iter()
            .map(|x| Vertex {
                interior: interior(&x, &seg.line),
                position: (x, seg.line.clone()),
                class: VertexClass::OffComponent,
            })
            .collect();
        edges.push(LEdge {
            orient: Orient::Horizontal,
            line: seg.line.clone(),
            span: (seg.lo.clone(), seg.hi.clone()),
            kind,
            vertices,
        });
    }
    for (seg, is_boundary) in &v_all {
        if *is_boundary {
            continue;
        }
        let coords = cross(seg, &h_all);
        let endpoints_on_boundary = usize::from(seg.lo == d.y0) + usize::from(seg.hi == d.y1);
        let kind = match endpoints_on_boundary {
            2 => EdgeKind::CrossCut,
            1 => EdgeKind::Ray,
            _ => EdgeKind::TEdge,
        };
        let vertices = coords
            .into_iter()
            .map(|y| Vertex {
                interior: interior(&seg.line, &y),
                position: (seg.line.clone(), y),
                class: VertexClass::OffComponent,
            })
            .collect();
        edges.push(LEdge {
            orient: Orient::Vertical,
            line: seg.line.clone(),
            span: (seg.lo.clone(), seg.hi.clone()),
            kind,
            vertices,
        });
    }
    for (seg, orient) in [
        (&h_all[h_all.len() - 2].0, Orient::Horizontal),
        (&h_all[h_all.len() - 1].0, Orient::Horizontal),
        (&v_all[v_all.len() - 2].0, Orient::Vertical),
        (&v_all[v_all.len() - 1].0, Orient::Vertical),
    ] {
        type MakePos = fn(Rational, Rational) -> (Rational, Rational);
        let (coords, make_pos): (Vec<Rational>, MakePos) = match orient {
            Orient::Horizontal => (cross(seg, &v_all), |c, line| (c, line)),
            Orient::Vertical => (cross(seg, &h_all), |c, line| (line, c)),
        };
        let vertices = coords
            .into_iter()
            .map(|c| Vertex {
                position: make_pos(c, seg.line.clone()),
                interior: false,
                class: VertexClass::OffComponent,
            })
            .collect();
        edges.push(LEdge {
            orient,
            line: seg.line.clone(),
            span: (seg.lo.clone(), seg.hi.clone()),
            kind: EdgeKind::Boundary,
            vertices,
        });
    }

    // Classify vertices against the t-edges: a crossing of two t-edges is a
    // multi-vertex, any other vertex on a t-edge is mono for that edge.
    let mut t_count: BTreeMap<(Rational, Rational), usize> = BTreeMap::new();
    for e in edges.iter().filter(|e| e.kind == EdgeKind::TEdge) {
        for v in &e.vertices {
            *t_count.entry(v.position.clone()).or_insert(0) += 1;
        }
    }
    for e in &mut edges {
        for v in &mut e.vertices {
            v.class = match t_count.get(&v.position).copied().unwrap_or(0) {
                0 => VertexClass::OffComponent,
                1 => VertexClass::Mono,
                2 => VertexClass::Multi,
                n => unreachable!(
                    "vertex on {n} t-edges: same-orientation edges cannot share a point"
                ),
            };
        }
    }
    edges
}

/// Summary counts entering the dimension formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MeshStats {
    /// Number of cross-cuts.
    pub c: usize,
    /// Number of t-edges.
    pub t: usize,
    /// Number of interior vertices (on every kind of interior l-edge).
    pub n_v: usize,
    /// Number of rays.
    pub rays: usize,
}

/// Counts cross-cuts, t-edges, rays, and interior vertices.
pub fn mesh_stats(mesh: &TMesh) -> MeshStats {
    let edges = extract_l_edges(mesh);
    let mut stats = MeshStats { c: 0, t: 0, n_v: 0, rays: 0 };
    let mut interior_vertices: BTreeSet<(Rational, Rational)> = BTreeSet::new();
    for e in &edges {
        match e.kind {
            EdgeKind::CrossCut => stats.c += 1,
            EdgeKind::Ray => stats.rays += 1,
            EdgeKind::TEdge => stats.t += 1,
            EdgeKind::Boundary => continue,
        }
        for v in &e.vertices {
            if v.interior {
                interior_vertices.insert(v.position.clone());
            }
        }
    }
    stats.n_v = interior_vertices.len();
    stats
}

/// The T-connected component: all t-edges, partitioned into blocks that are
/// connected via shared vertices.
#[derive(Debug, Clone)]
pub struct TComponent {
    pub edges: Vec<LEdge>,
    /// Indices into `edges`, one sorted list per connected block.
    pub blocks: Vec<Vec<usize>>,
}

/// Extracts the T-connected component of the mesh.
pub fn t_component(mesh: &TMesh) -> TComponent {
    let edges: Vec<LEdge> =
        extract_l_edges(mesh).into_iter().filter(|e| e.kind == EdgeKind::TEdge).collect();
    let mut by_vertex: BTreeMap<(Rational, Rational), Vec<usize>> = BTreeMap::new();
    for (i, e) in edges.iter().enumerate() {
        for v in &e.vertices {
            by_vertex.entry(v.position.clone()).or_default().push(i);
        }
    }
    let mut uf = UnionFind::new(edges.len());
    for ids in by_vertex.values() {
        for w in ids.windows(2) {
            uf.union(w[0], w[1]);
        }
    }
    let mut blocks: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..edges.len() {
        let root = uf.find(i);
        blocks.entry(root).or_default().push(i);
    }
    let mut blocks: Vec<Vec<usize>> = blocks.into_values().collect();
    blocks.sort_by_key(|b| b[0]);
    TComponent { edges, blocks }
}

/// The integral T-connected component: the t-edges plus exactly the
/// cross-cuts and rays that intersect them.
#[derive(Debug, Clone)]
pub struct IntegralTComponent {
    pub t_edges: Vec<LEdge>,
    pub associated: Vec<LEdge>,
}

/// Extracts the integral T-connected component.
pub fn integral_component(mesh: &TMesh) -> IntegralTComponent {
    let edges = extract_l_edges(mesh);
    let t_edges: Vec<LEdge> = edges.iter().filter(|e| e.kind == EdgeKind::TEdge).cloned().collect();
    let t_vertices: BTreeSet<(Rational, Rational)> =
        t_edges.iter().flat_map(|e| e.vertices.iter().map(|v| v.position.clone())).collect();
    let associated = edges
        .into_iter()
        .filter(|e| {
            matches!(e.kind, EdgeKind::CrossCut | EdgeKind::Ray)
                && e.vertices.iter().any(|v| t_vertices.contains(&v.position))
        })
        .collect();
    IntegralTComponent { t_edges, associated }
}

/// One edge of a generalized T-connected component: orientation, supporting
/// line coordinate, and the ordered vertex coordinates along the edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GtEdge {
    pub orient: Orient,
    pub line: Rational,
    pub vertices: Vec<Rational>,
}

impl GtEdge {
    /// n(l): number of vertices.
    pub fn n(&self) -> usize {
        self.vertices.len()
    }

    pub fn span(&self) -> (&Rational, &Rational) {
        (
            self.vertices.first().expect("GT edges have vertices"),
            self.vertices.last().expect("GT edges have vertices"),
        )
    }

    /// The plane position of the vertex with along-edge coordinate `coord`.
    pub fn position(&self, coord: &Rational) -> (Rational, Rational) {
        match self.orient {
            Orient::Horizontal => (coord.clone(), self.line.clone()),
            Orient::Vertical => (self.line.clone(), coord.clone()),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GtDoc {
    edges: Vec<GtEdgeDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GtEdgeDoc {
    orient: Orient,
    line: Rational,
    vertices: Vec<Rational>,
}

/// A generalized T-connected component: edges with designated vertices,
/// detached from any ambient mesh. Construction validates that vertex lists
/// are strictly increasing, that same-line edges do not overlap, and that
/// every geometric crossing of two edges is designated as a vertex on both.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneralizedTComponent {
    edges: Vec<GtEdge>,
    /// Pairs `(i, j)` with `i < j` of edges that cross, in lexicographic order.
    crossings: Vec<(usize, usize)>,
}

impl GeneralizedTComponent {
    pub fn new(edges: Vec<GtEdge>) -> Result<Self, MeshError> {
        for (idx, e) in edges.iter().enumerate() {
            if e.vertices.len() < 2 {
                return Err(MeshError::GtInvalid(format!(
                    "edge {idx} has {} vertices; every edge needs at least 2",
                    e.vertices.len()
                )));
            }
            if e.vertices.windows(2).any(|w| w[0] >= w[1]) {
                return Err(MeshError::GtInvalid(format!(
                    "edge {idx} vertices are not strictly increasing"
                )));
            }
        }
        for i in 0..edges.len() {
            for j in i + 1..edges.len() {
                let (a, b) = (&edges[i], &edges[j]);
                if a.orient == b.orient {
                    if a.line == b.line {
                        let (alo, ahi) = a.span();
                        let (blo, bhi) = b.span();
                        if alo <= bhi && blo <= ahi {
                            return Err(MeshError::GtInvalid(format!(
                                "edges {i} and {j} are collinear and overlap"
                            )));
                        }
                    }
                    continue;
                }
                let (h, v) = if a.orient == Orient::Horizontal { (a, b) } else { (b, a) };
                let (hlo, hhi) = h.span();
                let (vlo, vhi) = v.span();
                let geometric =
                    *hlo <= v.line && v.line <= *hhi && *vlo <= h.line && h.line <= *vhi;
                if geometric {
                    let designated = h.vertices.contains(&v.line) && v.vertices.contains(&h.line);
                    if !designated {
                        return Err(MeshError::GtInvalid(format!(
                            "edges {i} and {j} cross at ({}, {}) but the crossing is not a designated vertex on both",
                            v.line, h.line
                        )));
                    }
                }
            }
        }
        let mut crossings = Vec::new();
        for i in 0..edges.len() {
            for j in i + 1..edges.len() {
                if Self::cross_raw(&edges[i], &edges[j]) {
                    crossings.push((i, j));
                }
            }
        }
        Ok(GeneralizedTComponent { edges, crossings })
    }

    fn cross_raw(a: &GtEdge, b: &GtEdge) -> bool {
        if a.orient == b.orient {
            return false;
        }
        let (h, v) = if a.orient == Orient::Horizontal { (a, b) } else { (b, a) };
        let (hlo, hhi) = h.span();
        let (vlo, vhi) = v.span();
        *hlo <= v.line && v.line <= *hhi && *vlo <= h.line && h.line <= *vhi
    }

    pub fn empty() -> Self {
        GeneralizedTComponent { edges: Vec::new(), crossings: Vec::new() }
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edges(&self) -> &[GtEdge] {
        &self.edges
    }

    pub fn crossings(&self) -> &[(usize, usize)] {
        &self.crossings
    }

    /// Whether edges `i` and `j` cross.
    pub fn cross(&self, i: usize, j: usize) -> bool {
        let (i, j) = (i.min(j), i.max(j));
        self.crossings.binary_search(&(i, j)).is_ok()
    }

    /// The crossing point of edges `i` and `j`, if any.
    pub fn crossing_point(&self, i: usize, j: usize) -> Option<(Rational, Rational)> {
        if !self.cross(i, j) {
            return None;
        }
        let (h, v) = if self.edges[i].orient == Orient::Horizontal {
            (&self.edges[i], &self.edges[j])
        } else {
            (&self.edges[j], &self.edges[i])
        };
        Some((v.line.clone(), h.line.clone()))
    }

    /// All distinct vertex positions of the component, in lexicographic
    /// order — the column order of the conformality matrix.
    pub fn vertex_positions(&self) -> Vec<(Rational, Rational)> {
        let mut points: Vec<(Rational, Rational)> =
            self.edges.iter().flat_map(|e| e.vertices.iter().map(|c| e.position(c))).collect();
        points.sort_by(point_cmp);
        points.dedup();
        points
    }

    /// The along-edge coordinates of edge `i`'s mono-vertices about the
    /// sub-component selected by `active`: vertices not shared with any
    /// active crossing partner. `active` must have one entry per edge and
    /// `active[i]` is ignored (an edge never shares a vertex with itself).
    pub fn mono_coords(&self, i: usize, active: &[bool]) -> Vec<Rational> {
        let e = &self.edges[i];
        let partners: BTreeSet<&Rational> = self
            .crossings
            .iter()
            .filter_map(|&(a, b)| {
                if a == i && active[b] {
                    Some(&self.edges[b].line)
                } else if b == i && active[a] {
                    Some(&self.edges[a].line)
                } else {
                    None
                }
            })
            .collect();
        e.vertices.iter().filter(|c| !partners.contains(c)).cloned().collect()
    }

    /// m(l) about the sub-component selected by `active`.
    pub fn mono_count(&self, i: usize, active: &[bool]) -> usize {
        self.mono_coords(i, active).len()
    }

    /// Connected blocks of edges under the crossing relation, each sorted,
    /// ordered by smallest member.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut uf = UnionFind::new(self.edges.len());
        for &(i, j) in &self.crossings {
            uf.union(i, j);
        }
        let mut blocks: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for i in 0..self.edges.len() {
            blocks.entry(uf.find(i)).or_default().push(i);
        }
        let mut blocks: Vec<Vec<usize>> = blocks.into_values().collect();
        blocks.sort_by_key(|b| b[0]);
        blocks
    }

    /// The sub-component on the given edges (vertex lists kept in full).
    pub fn restricted(&self, keep: &[usize]) -> GeneralizedTComponent {
        let edges = keep.iter().map(|&i| self.edges[i].clone()).collect();
        GeneralizedTComponent::new(edges)
            .expect("restriction of a consistent component stays consistent")
    }

    /// Replaces the vertex at `vertex_idx` on edge `edge_idx` with a new
    /// along-edge coordinate, revalidating the whole component.
    pub fn with_vertex_moved(
        &self,
        edge_idx: usize,
        vertex_idx: usize,
        new_coord: Rational,
    ) -> Result<GeneralizedTComponent, MeshError> {
        let mut edges = self.edges.clone();
        edges[edge_idx].vertices[vertex_idx] = new_coord;
        edges[edge_idx].vertices.sort();
        if edges[edge_idx].vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(MeshError::GtInvalid(format!(
                "moved vertex duplicates another coordinate on edge {edge_idx}"
            )));
        }
        GeneralizedTComponent::new(edges)
    }

    pub fn from_json(json: &str) -> Result<Self, MeshError> {
        let doc: GtDoc = serde_json::from_str(json).map_err(|e| MeshError::Json(e.to_string()))?;
        GeneralizedTComponent::new(
            doc.edges
                .into_iter()
                .map(|e| GtEdge { orient: e.orient, line: e.line, vertices: e.vertices })
                .collect(),
        )
    }

    pub fn to_json(&self) -> String {
        let doc = GtDoc {
            edges: self
                .edges
                .iter()
                .map(|e| GtEdgeDoc {
                    orient: e.orient,
                    line: e.line.clone(),
                    vertices: e.vertices.clone(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("component serialization cannot fail")
    }
}

/// Forgets the ambient mesh of a T-connected component, keeping per-edge
/// orientation, line coordinate, and ordered vertex coordinates.
pub fn to_generalized(tc: &TComponent) -> GeneralizedTComponent {
    let edges = tc
        .edges
        .iter()
        .map(|e| GtEdge { orient: e.orient, line: e.line.clone(), vertices: e.vertex_coords() })
        .collect();
    GeneralizedTComponent::new(edges)
        .expect("the T-connected component of a valid mesh is a consistent generalized component")
}

/// Parameters for [`random_mesh`].
#[derive(Debug, Clone, Copy)]
pub struct RandomMeshParams {
    /// Number of refinement insertions attempted after the initial grid.
    pub refine_steps: usize,
    /// Degree floor: inserted t-edges are guaranteed `n(l) >= degree_floor + 2`
    /// (insertions that would violate it are redrawn and finally dropped).
    pub degree_floor: usize,
}

/// Generates a valid T-mesh by seeded recursive cell splitting: an initial
/// cross-cut grid, then `refine_steps` random chord insertions, each
/// spanning between two existing perpendicular walls at a fresh midpoint
/// coordinate. Insertions never reduce any existing edge's vertex count, so
/// the degree floor holds for every t-edge of the result. Deterministic for
/// a given seed.
pub fn random_mesh(seed: u64, params: &RandomMeshParams) -> TMesh {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // An interior chord needs `degree_floor + 2` walls strictly inside the
    // domain, so size the initial grid to make such chords reachable early.
    let base = (params.degree_floor as i64 + 2).max(3);
    let m: i64 = rng.gen_range(base - 1..=base);
    let n: i64 = rng.gen_range(base - 1..=base);
    let domain = Rect {
        x0: Rational::from(0),
        y0: Rational::from(0),
        x1: Rational::from(m + 1),
        y1: Rational::from(n + 1),
    };
    let mut hsegments: Vec<Segment> = (1..=n)
        .map(|j| Segment { line: Rational::from(j), lo: domain.x0.clone(), hi: domain.x1.clone() })
        .collect();
    let mut vsegments: Vec<Segment> = (1..=m)
        .map(|i| Segment { line: Rational::from(i), lo: domain.y0.clone(), hi: domain.y1.clone() })
        .collect();

    // One insertion: pick a fresh line coordinate (the midpoint of two
    // adjacent existing parallel lines), then span between two perpendicular
    // walls whose spans strictly cover it. Endpoints land on the walls,
    // interior walls in between become crossing vertices, so validity is
    // preserved by construction. Most attempts aim for an interior chord
    // (a t-edge) drawn uniformly from the wall pairs wide enough for the
    // degree floor; the rest anchor on the boundary, which grows the wall
    // inventory for later interior attempts.
    let try_insert = |rng: &mut ChaCha8Rng,
                      horizontal: bool,
                      hsegs: &mut Vec<Segment>,
                      vsegs: &mut Vec<Segment>|
     -> bool {
        let (parallel, perpendicular, line_min, line_max, perp_min, perp_max) = if horizontal {
            (&*hsegs, &*vsegs, &domain.y0, &domain.y1, &domain.x0, &domain.x1)
        } else {
            (&*vsegs, &*hsegs, &domain.x0, &domain.x1, &domain.y0, &domain.y1)
        };
        let mut lines: BTreeSet<Rational> = parallel.iter().map(|s| s.line.clone()).collect();
        lines.insert(line_min.clone());
        lines.insert(line_max.clone());
        let lines: Vec<Rational> = lines.into_iter().collect();
        let gap = rng.gen_range(0..lines.len() - 1);
        let new_line = Rational::midpoint(&lines[gap], &lines[gap + 1]);

        let mut walls: BTreeSet<Rational> = perpendicular
            .iter()
            .filter(|w| w.lo < new_line && new_line < w.hi)
            .map(|w| w.line.clone())
            .collect();
        walls.insert(perp_min.clone());
        walls.insert(perp_max.clone());
        let walls: Vec<Rational> = walls.into_iter().collect();
        let (a, b) = if rng.gen_bool(0.6) {
            let min_span = params.degree_floor + 2;
            let interior_pairs: Vec<(usize, usize)> = (1..walls.len().saturating_sub(1))
                .flat_map(|a| (a + min_span - 1..walls.len() - 1).map(move |b| (a, b)))
                .collect();
            if interior_pairs.is_empty() {
                return false;
            }
            interior_pairs[rng.gen_range(0..interior_pairs.len())]
        } else {
            let a = rng.gen_range(0..walls.len() - 1);
            let b = rng.gen_range(a + 1..walls.len());
            let is_t_edge = walls[a] != *perp_min && walls[b] != *perp_max;
            if is_t_edge && b - a + 1 < params.degree_floor + 2 {
                return false;
            }
            (a, b)
        };
        let seg = Segment { line: new_line, lo: walls[a].clone(), hi: walls[b].clone() };
        if horizontal {
            hsegs.push(seg);
        } else {
            vsegs.push(seg);
        }
        true
    };

    for _ in 0..params.refine_steps {
        for _attempt in 0..24 {
            let horizontal = rng.gen_bool(0.5);
            if try_insert(&mut rng, horizontal, &mut hsegments, &mut vsegments) {
                break;
            }
        }
    }

    let mesh = TMesh::from_segments(domain, hsegments, vsegments)
        .expect("generated insertions preserve validity");
    debug_assert!(mesh.validate().is_valid());
    mesh
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn q(n: i64) -> Rational {
        Rational::from(n)
    }

    fn grid(m: i64, n: i64) -> TMesh {
        let domain = Rect { x0: q(0), y0: q(0), x1: q(m + 1), y1: q(n + 1) };
        let hs = (1..=n).map(|j| Segment { line: q(j), lo: q(0), hi: q(m + 1) }).collect();
        let vs = (1..=m).map(|i| Segment { line: q(i), lo: q(0), hi: q(n + 1) }).collect();
        TMesh::from_segments(domain, hs, vs).unwrap()
    }

    #[test]
    fn parse_simple_grid_document() {
        let mesh = TMesh::parse(
            r#"{"domain": {"x0": 0, "y0": 0, "x1": 2, "y1": 2},
                "hsegments": [{"y": 1, "x0": 0, "x1": 2}],
                "vsegments": [{"x": 1, "y0": 0, "y1": 2}]}"#,
        )
        .unwrap();
        assert_eq!(mesh.hsegments().len(), 1);
        assert_eq!(mesh.vsegments().len(), 1);
        assert!(mesh.validate().is_valid());
    }

    #[test]
    fn parse_merges_touching_collinear_segments() {
        let mesh = TMesh::parse(
            r#"{"domain": {"x0": 0, "y0": 0, "x1": 4, "y1": 2},
                "hsegments": [{"y": 1, "x0": 0, "x1": 2}, {"y": 1, "x0": 2, "x1": 4}],
                "vsegments": []}"#,
        )
        .unwrap();
        assert_eq!(mesh.hsegments().len(), 1);
        assert_eq!(mesh.hsegments()[0].lo, q(0));
        assert_eq!(mesh.hsegments()[0].hi, q(4));
    }

    #[test]
    fn parse_rejects_overlapping_parallel_segments() {
        let err = TMesh::parse(
            r#"{"domain": {"x0": 0, "y0": 0, "x1": 4, "y1": 2},
                "hsegments": [{"y": 1, "x0": 0, "x1": 3}, {"y": 1, "x0": 2, "x1": 4}],
                "vsegments": []}"#,
        )
        .unwrap_err();
        let MeshError::Invalid(report) = err else { panic!("expected validation error") };
        assert!(report
            .issues
            .iter()
            .any(|i| matches!(i, ValidationIssue::OverlappingParallel { .. })));
    }

    #[test]
    fn parse_rejects_dangling_endpoint() {
        let err = TMesh::parse(
            r#"{"domain": {"x0": 0, "y0": 0, "x1": 2, "y1": 2},
                "hsegments": [{"y": 1, "x0": 0, "x1": 1}],
                "vsegments": []}"#,
        )
        .unwrap_err();
        let MeshError::Invalid(report) = err else { panic!("expected validation error") };
        assert!(report
            .issues
            .iter()
            .any(|i| matches!(i, ValidationIssue::DanglingEndpoint { .. })));
    }

    #[test]
    fn parse_rejects_segment_outside_domain() {
        let err = TMesh::parse(
            r#"{"domain": {"x0": 0, "y0": 0, "x1": 2, "y1": 2},
                "hsegments": [{"y": 1, "x0": 0, "x1": 3}],
                "vsegments": []}"#,
        )
        .unwrap_err();
        let MeshError::Invalid(report) = err else { panic!("expected validation error") };
        assert!(report.issues.iter().any(|i| matches!(i, ValidationIssue::OutsideDomain { .. })));
    }

    #[test]
    fn parse_rejects_float_coordinates() {
        let err = TMesh::parse(
            r#"{"domain": {"x0": 0, "y0": 0, "x1": 2, "y1": 2},
                "hsegments": [{"y": 1.5, "x0": 0, "x1": 2}],
                "vsegments": []}"#,
        )
        .unwrap_err();
        assert!(matches!(err, MeshError::Json(_)));
    }

    #[test]
    fn validation_flags_l_shaped_cell() {
        // Two segments meeting in an interior corner: every endpoint is
        // supported, but the merged region is an L, not a rectangle.
        let (_, report) = TMesh::parse_with_report(
            r#"{"domain": {"x0": 0, "y0": 0, "x1": 2, "y1": 2},
                "hsegments": [{"y": 1, "x0": 0, "x1": 1}],
                "vsegments": [{"x": 1, "y0": 0, "y1": 1}]}"#,
        )
        .unwrap();
        assert!(report
            .issues
            .iter()
            .any(|i| matches!(i, ValidationIssue::NonRectangularCell { .. })));
    }

    #[test]
    fn pinwheel_l_edge_census() {
        let edges = extract_l_edges(&fixtures::pinwheel());
        let count = |k: EdgeKind| edges.iter().filter(|e| e.kind == k).count();
        assert_eq!(count(EdgeKind::CrossCut), 7);
        assert_eq!(count(EdgeKind::Ray), 0);
        assert_eq!(count(EdgeKind::TEdge), 4);
        assert_eq!(count(EdgeKind::Boundary), 4);
        let stats = mesh_stats(&fixtures::pinwheel());
        assert_eq!((stats.c, stats.t, stats.n_v, stats.rays), (7, 4, 28, 0));
    }

    #[test]
    fn double_cycle_l_edge_census() {
        let edges = extract_l_edges(&fixtures::double_cycle());
        let count = |k: EdgeKind| edges.iter().filter(|e| e.kind == k).count();
        assert_eq!(count(EdgeKind::CrossCut), 4);
        assert_eq!(count(EdgeKind::Ray), 0);
        assert_eq!(count(EdgeKind::TEdge), 6);
        let stats = mesh_stats(&fixtures::double_cycle());
        assert_eq!((stats.c, stats.t, stats.n_v, stats.rays), (4, 6, 22, 0));
    }

    #[test]
    fn grid_stats() {
        let stats = mesh_stats(&grid(2, 2));
        assert_eq!((stats.c, stats.t, stats.n_v, stats.rays), (4, 0, 4, 0));
        let edges = extract_l_edges(&grid(2, 2));
        assert!(edges.iter().all(|e| matches!(e.kind, EdgeKind::CrossCut | EdgeKind::Boundary)));
    }

    #[test]
    fn mono_plus_multi_accounts_for_all_t_edge_vertices() {
        for mesh in [fixtures::pinwheel(), fixtures::double_cycle(), fixtures::ladder()] {
            for e in extract_l_edges(&mesh) {
                if e.kind == EdgeKind::TEdge {
                    let multi = e.vertices.iter().filter(|v| v.class == VertexClass::Multi).count();
                    assert_eq!(e.n(), e.m() + multi);
                    assert!(e.vertices.iter().all(|v| v.interior));
                }
            }
        }
    }

    #[test]
    fn t_component_blocks() {
        assert!(t_component(&grid(2, 2)).edges.is_empty());
        let tc = t_component(&fixtures::pinwheel());
        assert_eq!(tc.edges.len(), 4);
        assert_eq!(tc.blocks.len(), 1);
        let tc = t_component(&fixtures::double_cycle());
        assert_eq!(tc.edges.len(), 6);
        assert_eq!(tc.blocks.len(), 1);
    }

    #[test]
    fn integral_component_contents() {
        let ic = integral_component(&grid(2, 2));
        assert!(ic.t_edges.is_empty());
        assert!(ic.associated.is_empty());
        let ic = integral_component(&fixtures::pinwheel());
        assert_eq!(ic.t_edges.len(), 4);
        assert_eq!(ic.associated.len(), 7);

        // A cross-cut that never touches the component stays out.
        let mesh = TMesh::parse(
            r#"{"domain": {"x0": 0, "y0": 0, "x1": 6, "y1": 4},
                "hsegments": [{"y": 1, "x0": 0, "x1": 6}, {"y": 3, "x0": 0, "x1": 6},
                              {"y": 2, "x0": 1, "x1": 2}],
                "vsegments": [{"x": 1, "y0": 0, "y1": 4}, {"x": 2, "y0": 0, "y1": 4},
                              {"x": 5, "y0": 0, "y1": 4}]}"#,
        )
        .unwrap();
        let ic = integral_component(&mesh);
        assert_eq!(ic.t_edges.len(), 1);
        assert!(ic.associated.iter().all(|e| e.line != q(5)));
        // Only the two vertical cross-cuts carrying the t-edge's endpoints
        // touch the component; the parallel cross-cuts and x=5 stay out.
        assert_eq!(ic.associated.len(), 2);
    }

    #[test]
    fn generalized_component_census() {
        let gt = to_generalized(&t_component(&fixtures::pinwheel()));
        assert_eq!(gt.edges().len(), 4);
        let mut counts: Vec<usize> = gt.edges().iter().map(GtEdge::n).collect();
        counts.sort_unstable();
        assert_eq!(counts, vec![5, 5, 5, 5]);

        let gt = to_generalized(&t_component(&fixtures::double_cycle()));
        assert_eq!(gt.edges().len(), 6);
        let mut counts: Vec<usize> = gt.edges().iter().map(GtEdge::n).collect();
        counts.sort_unstable();
        assert_eq!(counts, vec![4, 4, 4, 4, 5, 5]);

        assert!(to_generalized(&t_component(&grid(2, 2))).is_empty());
    }

    #[test]
    fn generalized_component_preserves_counts_and_crossings() {
        let tc = t_component(&fixtures::double_cycle());
        let gt = to_generalized(&tc);
        for (e, g) in tc.edges.iter().zip(gt.edges()) {
            assert_eq!(e.n(), g.n());
        }
        for i in 0..tc.edges.len() {
            for j in i + 1..tc.edges.len() {
                let share = tc.edges[i]
                    .vertices
                    .iter()
                    .any(|v| tc.edges[j].vertices.iter().any(|w| w.position == v.position));
                assert_eq!(share, gt.cross(i, j));
            }
        }
    }

    #[test]
    fn generalized_component_json_round_trip() {
        let gt = to_generalized(&t_component(&fixtures::pinwheel()));
        let back = GeneralizedTComponent::from_json(&gt.to_json()).unwrap();
        assert_eq!(gt, back);
    }

    #[test]
    fn generalized_component_rejects_undesignated_crossing() {
        let err = GeneralizedTComponent::from_json(
            r#"{"edges": [
                {"orient": "h", "line": 0, "vertices": [-1, 1]},
                {"orient": "v", "line": 0, "vertices": [-1, 1]}]}"#,
        )
        .unwrap_err();
        assert!(matches!(err, MeshError::GtInvalid(_)));
    }

    #[test]
    fn mono_coords_respect_active_set() {
        let gt = to_generalized(&t_component(&fixtures::pinwheel()));
        let all = vec![true; 4];
        for i in 0..4 {
            // Every pinwheel edge has 5 vertices, 2 of them shared.
            assert_eq!(gt.mono_count(i, &all), 3);
            let none = vec![false; 4];
            assert_eq!(gt.mono_count(i, &none), 5);
        }
    }

    #[test]
    fn rotation_is_exact_and_invertible() {
        let mesh = fixtures::quarter_turn_a();
        let r4 = mesh
            .rotated_quarter_turn()
            .rotated_quarter_turn()
            .rotated_quarter_turn()
            .rotated_quarter_turn();
        assert_eq!(mesh, r4);
        let stats = mesh_stats(&mesh);
        let rstats = mesh_stats(&mesh.rotated_quarter_turn());
        assert_eq!(stats.c, rstats.c);
        assert_eq!(stats.t, rstats.t);
        assert_eq!(stats.n_v, rstats.n_v);
        assert_eq!(stats.rays, rstats.rays);
    }

    #[test]
    fn random_mesh_is_deterministic_and_valid() {
        let params = RandomMeshParams { refine_steps: 6, degree_floor: 2 };
        let a = random_mesh(11, &params);
        let b = random_mesh(11, &params);
        assert_eq!(a, b);
        assert_ne!(a, random_mesh(12, &params));
        for seed in 0..40 {
            let mesh = random_mesh(seed, &params);
            let report = mesh.validate();
            assert!(report.is_valid(), "seed {seed} invalid:\n{report}");
            for e in extract_l_edges(&mesh) {
                if e.kind == EdgeKind::TEdge {
                    assert!(e.n() >= params.degree_floor + 2, "seed {seed} floor violated");
                }
            }
        }
    }

    #[test]
    fn random_mesh_without_refinement_is_a_grid() {
        let mesh = random_mesh(5, &RandomMeshParams { refine_steps: 0, degree_floor: 1 });
        let stats = mesh_stats(&mesh);
        assert_eq!(stats.t, 0);
        assert_eq!(stats.rays, 0);
        assert_eq!(stats.n_v, mesh.hsegments().len() * mesh.vsegments().len());
    }
}
