//! Deterministic SVG rendering of a mesh: interior l-edges solid, the
//! T-connected component highlighted, its associated cross-cuts and rays
//! dashed, and the component's mono- and multi-vertices marked.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use tmesh_spline::exact::Rational;
use tmesh_spline::mesh::{
    extract_l_edges, integral_component, EdgeKind, LEdge, Orient, TMesh, VertexClass,
};

const WIDTH: f64 = 480.0;
const MARGIN: f64 = 28.0;

const BASE_STROKE: &str = "#555555";
const BOUNDARY_STROKE: &str = "#000000";
const T_EDGE_STROKE: &str = "#c2185b";
const MULTI_FILL: &str = "#1a237e";

fn endpoints(e: &LEdge) -> ((&Rational, &Rational), (&Rational, &Rational)) {
    match e.orient {
        Orient::Horizontal => ((&e.span.0, &e.line), (&e.span.1, &e.line)),
        Orient::Vertical => ((&e.line, &e.span.0), (&e.line, &e.span.1)),
    }
}

/// Renders the mesh to a standalone SVG document. Purely a function of the
/// mesh: same input, same bytes.
pub fn render_svg(mesh: &TMesh) -> String {
    let d = mesh.domain();
    let (x0, x1) = (d.x0.to_f64_lossy(), d.x1.to_f64_lossy());
    let (y0, y1) = (d.y0.to_f64_lossy(), d.y1.to_f64_lossy());
    let scale = (WIDTH - 2.0 * MARGIN) / (x1 - x0).max(f64::EPSILON);
    let height = (y1 - y0) * scale + 2.0 * MARGIN;
    let px = |x: &Rational| MARGIN + (x.to_f64_lossy() - x0) * scale;
    // SVG y grows downward; flip so the drawing reads like the plane.
    let py = |y: &Rational| height - MARGIN - (y.to_f64_lossy() - y0) * scale;

    let edges = extract_l_edges(mesh);
    let integral = integral_component(mesh);
    let associated: BTreeSet<(Orient, &Rational, &Rational, &Rational)> =
        integral.associated.iter().map(|e| (e.orient, &e.line, &e.span.0, &e.span.1)).collect();

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH:.0} {height:.2}" width="{WIDTH:.0}" height="{height:.2}">"#
    );
    let _ = writeln!(
        svg,
        r##"<rect x="0" y="0" width="{WIDTH:.0}" height="{height:.2}" fill="#ffffff"/>"##
    );

    let line = |svg: &mut String, e: &LEdge, stroke: &str, width: f64, dash: Option<&str>| {
        let ((ax, ay), (bx, by)) = endpoints(e);
        let dash = dash.map(|p| format!(r#" stroke-dasharray="{p}""#)).unwrap_or_default();
        let _ = writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{stroke}" stroke-width="{width}" stroke-linecap="square"{dash}/>"#,
            px(ax),
            py(ay),
            px(bx),
            py(by),
        );
    };

    // Base layers first, the highlighted component on top.
    for e in &edges {
        match e.kind {
            EdgeKind::Boundary => line(&mut svg, e, BOUNDARY_STROKE, 1.6, None),
            EdgeKind::CrossCut | EdgeKind::Ray => {
                let key = (e.orient, &e.line, &e.span.0, &e.span.1);
                let dash = associated.contains(&key).then_some("7 5");
                line(&mut svg, e, BASE_STROKE, 1.3, dash);
            }
            EdgeKind::TEdge => {}
        }
    }
    for e in &edges {
        if e.kind == EdgeKind::TEdge {
            line(&mut svg, e, T_EDGE_STROKE, 2.6, None);
        }
    }

    // Component vertices: a position is a multi-vertex if any t-edge sees
    // it as one; deduplicate across the edges that share it.
    let mut classes: BTreeMap<(Rational, Rational), VertexClass> = BTreeMap::new();
    for e in &integral.t_edges {
        for v in &e.vertices {
            let entry = classes.entry(v.position.clone()).or_insert(VertexClass::Mono);
            if v.class == VertexClass::Multi {
                *entry = VertexClass::Multi;
            }
        }
    }
    for ((x, y), class) in &classes {
        let (cx, cy) = (px(x), py(y));
        match class {
            VertexClass::Multi => {
                let _ = writeln!(
                    svg,
                    r#"<circle cx="{cx:.2}" cy="{cy:.2}" r="4" fill="{MULTI_FILL}"/>"#
                );
            }
            _ => {
                let _ = writeln!(
                    svg,
                    r##"<circle cx="{cx:.2}" cy="{cy:.2}" r="4" fill="#ffffff" stroke="{T_EDGE_STROKE}" stroke-width="1.6"/>"##
                );
            }
        }
    }

    svg.push_str("</svg>\n");
    svg
}
