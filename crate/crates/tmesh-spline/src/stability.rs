//! Structural equivalence of T-meshes and rank-stability probes.
//!
//! Two views of "the same mesh up to placement" are implemented here. The
//! coarse one compares whole meshes: a *structural isomorphism* pairs the
//! l-edges of two meshes preserving their kinds, intersections, and the
//! per-orientation order of their supporting lines, with the orientation
//! classes either both kept or both swapped; concretely, the second mesh is
//! matched after 0..3 exact quarter turns. The finer one compares
//! generalized T-connected components only: a *structural similarity* keeps
//! per-edge vertex counts and the crossing relation but forgets order. A
//! component whose conformality-matrix rank varies inside its similar class
//! has coordinate-dependent spline dimension.
//!
//! The rank-instability machinery lives at the component level: a minimal
//! *key cycle* of the completely non-diagonalizable core couples an even
//! ring of edges through their shared crossings, and the determinant of the
//! cycle's square conformality matrix collapses, after per-edge elimination,
//! to `|1 - P|` where `P` multiplies one node-ratio per edge. Solving
//! `P = 1` for a single vertex coordinate yields an explicit witness
//! placement; [`witness_search`] validates every witness by recomputing the
//! full component's rank exactly and falls back to seeded sampling when the
//! closed form does not apply.

// `StabilityError` carries exact coordinates for reporting, which makes it
// large; every `Err` path here is cold, so the copies never matter.
#![allow(clippy::result_large_err)]

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::conformality::build_matrix;
use crate::exact::{lagrange_ratio, ExactMatrix, Rational};
use crate::mesh::{extract_l_edges, EdgeKind, GeneralizedTComponent, LEdge, Orient, TMesh};
use crate::partition::complete_partition;

/// Node budget for [`structurally_similar`] used by the CLI when no
/// explicit budget is given.
pub const DEFAULT_SIMILARITY_BUDGET: u64 = 1_000_000;

/// Resampling attempts for [`witness_search`]'s fallback used by the CLI
/// when no explicit budget is given.
pub const DEFAULT_WITNESS_SAMPLES: u32 = 200;

/// Errors raised by the stability analyses.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StabilityError {
    #[error("spline degree must be at least 1, got {0}")]
    InvalidDegree(usize),
    #[error("similarity search exceeded its node budget of {budget}")]
    SearchBudgetExceeded { budget: u64 },
    #[error(
        "multi-vertex graph degree violation at ({x}, {y}): {degree} \
         neighbor(s); key-cycle analysis needs at least two shared vertices \
         on every core edge"
    )]
    DegenerateCore { x: Rational, y: Rational, degree: usize },
    #[error(
        "key-cycle closed form needs exactly {expected} vertices on every \
         cycle edge; cycle position {position} has {found}"
    )]
    KeyCycleNotApplicable { position: usize, expected: usize, found: usize },
    #[error("a key cycle alternates orientations over an even count of at least 4 edges, got {0}")]
    DegenerateCycle(usize),
}

// ---------------------------------------------------------------------------
// Structural isomorphism of whole meshes
// ---------------------------------------------------------------------------

/// One l-edge's slot in a [`StructuralSignature`]: its kind, the dense rank
/// of its line coordinate within its orientation, and its crossing partners
/// as positions in the perpendicular orientation's canonical order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeSignature {
    pub kind: EdgeKind,
    pub cor_rank: usize,
    pub crossings: Vec<usize>,
}

/// Order-invariant fingerprint of a mesh: per orientation, the l-edges
/// (boundary sides included) in canonical `(line, span start)` order, each
/// reduced to kind, line rank, and crossing pattern. Two meshes have equal
/// signatures exactly when an orientation-preserving, order-preserving
/// l-edge bijection exists; coordinates themselves never enter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructuralSignature {
    pub horizontal: Vec<EdgeSignature>,
    pub vertical: Vec<EdgeSignature>,
}

/// A successful structural isomorphism between two meshes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StructuralMap {
    /// Exact counterclockwise quarter turns applied to the second mesh
    /// before the direct, order-preserving comparison succeeded. Odd values
    /// are the orientation-swapping branch.
    pub quarter_turns: u8,
    /// `edge_map[i]` is the second mesh's l-edge matched with l-edge `i` of
    /// the first; indices follow [`extract_l_edges`] order on each mesh.
    pub edge_map: Vec<usize>,
}

fn crosses(h: &LEdge, v: &LEdge) -> bool {
    h.span.0 <= v.line && v.line <= h.span.1 && v.span.0 <= h.line && h.line <= v.span.1
}

/// Canonical per-orientation edge order: indices into `edges` sorted by
/// `(line, span start)`. Edges sharing a line have disjoint spans, so the
/// span tiebreak is forced for any order-preserving map.
fn canonical_orders(edges: &[LEdge]) -> (Vec<usize>, Vec<usize>) {
    let mut h: Vec<usize> = Vec::new();
    let mut v: Vec<usize> = Vec::new();
    for (i, e) in edges.iter().enumerate() {
        match e.orient {
            Orient::Horizontal => h.push(i),
            Orient::Vertical => v.push(i),
        }
    }
    let by_line = |list: &mut Vec<usize>| {
        list.sort_by(|&a, &b| {
            (&edges[a].line, &edges[a].span.0).cmp(&(&edges[b].line, &edges[b].span.0))
        });
    };
    by_line(&mut h);
    by_line(&mut v);
    (h, v)
}

fn dense_ranks(edges: &[LEdge], order: &[usize]) -> Vec<usize> {
    let mut ranks = Vec::with_capacity(order.len());
    let mut rank = 0usize;
    for (pos, &i) in order.iter().enumerate() {
        if pos > 0 && edges[order[pos - 1]].line != edges[i].line {
            rank += 1;
        }
        ranks.push(rank);
    }
    ranks
}

fn signature_with_orders(
    mesh: &TMesh,
) -> (StructuralSignature, Vec<usize>, Vec<usize>, Vec<LEdge>) {
    let edges = extract_l_edges(mesh);
    let (h_order, v_order) = canonical_orders(&edges);
    let h_ranks = dense_ranks(&edges, &h_order);
    let v_ranks = dense_ranks(&edges, &v_order);
    let mut horizontal: Vec<EdgeSignature> = h_order
        .iter()
        .zip(&h_ranks)
        .map(|(&i, &cor_rank)| EdgeSignature {
            kind: edges[i].kind,
            cor_rank,
            crossings: Vec::new(),
        })
        .collect();
    let mut vertical: Vec<EdgeSignature> = v_order
        .iter()
        .zip(&v_ranks)
        .map(|(&i, &cor_rank)| EdgeSignature {
            kind: edges[i].kind,
            cor_rank,
            crossings: Vec::new(),
        })
        .collect();
    for (hp, &hi) in h_order.iter().enumerate() {
        for (vp, &vi) in v_order.iter().enumerate() {
            if crosses(&edges[hi], &edges[vi]) {
                horizontal[hp].crossings.push(vp);
                vertical[vp].crossings.push(hp);
            }
        }
    }
    (StructuralSignature { horizontal, vertical }, h_order, v_order, edges)
}

/// The structural signature of a mesh; equal signatures certify a direct
/// (no-rotation) structural isomorphism.
pub fn structural_signature(mesh: &TMesh) -> StructuralSignature {
    signature_with_orders(mesh).0
}

/// Geometry key identifying an l-edge within its mesh, and its image under
/// one exact counterclockwise quarter turn.
type EdgeKey = (Orient, Rational, Rational, Rational);

fn edge_key(e: &LEdge) -> EdgeKey {
    (e.orient, e.line.clone(), e.span.0.clone(), e.span.1.clone())
}

fn rotate_key(key: EdgeKey) -> EdgeKey {
    let (orient, line, lo, hi) = key;
    match orient {
        Orient::Horizontal => (Orient::Vertical, -&line, lo, hi),
        Orient::Vertical => (Orient::Horizontal, line, -&hi, -&lo),
    }
}

/// Searches for a structural isomorphism between two meshes: an l-edge
/// bijection preserving kinds, intersections, and per-orientation line
/// order. The direct branch and the orientation-swapping branch are both
/// tried, each together with its half-turn composite, by comparing the
/// first mesh's signature against the second mesh rotated 0..3 quarter
/// turns. Reflections are never matched.
pub fn structurally_isomorphic(a: &TMesh, b: &TMesh) -> Option<StructuralMap> {
    let (sig_a, h_a, v_a, edges_a) = signature_with_orders(a);
    let edges_b = extract_l_edges(b);
    let b_index: BTreeMap<EdgeKey, usize> =
        edges_b.iter().enumerate().map(|(i, e)| (edge_key(e), i)).collect();

    let mut candidate = b.clone();
    for quarter_turns in 0u8..4 {
        if quarter_turns > 0 {
            candidate = candidate.rotated_quarter_turn();
        }
        let (sig_c, h_c, v_c, edges_c) = signature_with_orders(&candidate);
        if sig_c != sig_a {
            continue;
        }
        // Positional pairing of the canonical orders, translated back to
        // the original second mesh by undoing the rotation on each edge's
        // geometry key.
        let mut edge_map = vec![usize::MAX; edges_a.len()];
        let pairs = h_a.iter().zip(&h_c).chain(v_a.iter().zip(&v_c));
        for (&ia, &ic) in pairs {
            let mut key = edge_key(&edges_c[ic]);
            for _ in 0..(4 - quarter_turns) % 4 {
                key = rotate_key(key);
            }
            let ib = *b_index
                .get(&key)
                .expect("rotating an l-edge of a rotated mesh back yields an l-edge");
            edge_map[ia] = ib;
        }
        return Some(StructuralMap { quarter_turns, edge_map });
    }
    None
}

// ---------------------------------------------------------------------------
// Structural similarity of generalized components
// ---------------------------------------------------------------------------

/// Searches for a structural similarity between two generalized components:
/// an edge bijection preserving per-edge vertex counts and the crossing
/// relation, with no order or orientation requirement. Plain backtracking;
/// every search-tree node costs one unit of `budget`, and exhausting the
/// budget is reported as an error distinct from a proven mismatch.
/// `map[i]` pairs edge `i` of `a` with that edge of `b`.
pub fn structurally_similar(
    a: &GeneralizedTComponent,
    b: &GeneralizedTComponent,
    budget: u64,
) -> Result<Option<Vec<usize>>, StabilityError> {
    let n = a.edges().len();
    if n != b.edges().len() {
        return Ok(None);
    }
    if n == 0 {
        return Ok(Some(Vec::new()));
    }
    let degree = |gt: &GeneralizedTComponent, i: usize| {
        gt.crossings().iter().filter(|&&(x, y)| x == i || y == i).count()
    };
    let profile_a: Vec<(usize, usize)> = (0..n).map(|i| (a.edges()[i].n(), degree(a, i))).collect();
    let profile_b: Vec<(usize, usize)> = (0..n).map(|i| (b.edges()[i].n(), degree(b, i))).collect();
    {
        let mut pa = profile_a.clone();
        let mut pb = profile_b.clone();
        pa.sort_unstable();
        pb.sort_unstable();
        if pa != pb {
            return Ok(None);
        }
    }

    // Assign the most constrained edges first; try candidates in index
    // order so the returned map is deterministic.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (usize::MAX - profile_a[i].1, usize::MAX - profile_a[i].0, i));

    struct Search<'s> {
        a: &'s GeneralizedTComponent,
        b: &'s GeneralizedTComponent,
        profile_a: &'s [(usize, usize)],
        profile_b: &'s [(usize, usize)],
        order: &'s [usize],
        assigned: Vec<Option<usize>>,
        used: Vec<bool>,
        nodes: u64,
        budget: u64,
    }

    impl Search<'_> {
        fn solve(&mut self, depth: usize) -> Result<bool, StabilityError> {
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(StabilityError::SearchBudgetExceeded { budget: self.budget });
            }
            let Some(&i) = self.order.get(depth) else {
                return Ok(true);
            };
            for j in 0..self.used.len() {
                if self.used[j] || self.profile_a[i] != self.profile_b[j] {
                    continue;
                }
                let consistent = self.assigned.iter().enumerate().all(|(k, slot)| {
                    slot.is_none_or(|jk| self.a.cross(i, k) == self.b.cross(j, jk))
                });
                if !consistent {
                    continue;
                }
                self.assigned[i] = Some(j);
                self.used[j] = true;
                if self.solve(depth + 1)? {
                    return Ok(true);
                }
                self.assigned[i] = None;
                self.used[j] = false;
            }
            Ok(false)
        }
    }

    let mut search = Search {
        a,
        b,
        profile_a: &profile_a,
        profile_b: &profile_b,
        order: &order,
        assigned: vec![None; n],
        used: vec![false; n],
        nodes: 0,
        budget,
    };
    if search.solve(0)? {
        Ok(Some(search.assigned.into_iter().map(|s| s.unwrap()).collect()))
    } else {
        Ok(None)
    }
}

// ---------------------------------------------------------------------------
// Multi-vertex graph and minimal key cycles
// ---------------------------------------------------------------------------

/// A shared vertex of two core edges, as a graph node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MultiVertexNode {
    pub position: (Rational, Rational),
    /// Core edge indices crossing here.
    pub h_edge: usize,
    pub v_edge: usize,
}

/// The multi-vertex graph of a completely non-diagonalizable core: nodes
/// are the designated crossings, arcs join crossings adjacent along the
/// same edge, labeled by that edge.
#[derive(Debug, Clone)]
pub struct MultiVertexGraph {
    core: GeneralizedTComponent,
    nodes: Vec<MultiVertexNode>,
    /// `(i, j, edge)` with `i < j`: nodes adjacent along `edge`.
    arcs: Vec<(usize, usize, usize)>,
}

impl MultiVertexGraph {
    pub fn nodes(&self) -> &[MultiVertexNode] {
        &self.nodes
    }

    pub fn arcs(&self) -> &[(usize, usize, usize)] {
        &self.arcs
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn degree(&self, node: usize) -> usize {
        self.arcs.iter().filter(|&&(i, j, _)| i == node || j == node).count()
    }

    /// The core component the graph was built from.
    pub fn core(&self) -> &GeneralizedTComponent {
        &self.core
    }
}

/// Builds the multi-vertex graph of a core component. Every node must end
/// up with degree at least two — equivalently, every core edge carrying a
/// crossing keeps at least two shared vertices — or the core cannot carry
/// the key-cycle analysis and an error is returned.
pub fn multi_vertex_graph(
    core: &GeneralizedTComponent,
) -> Result<MultiVertexGraph, StabilityError> {
    let mut nodes: Vec<MultiVertexNode> = core
        .crossings()
        .iter()
        .map(|&(i, j)| {
            let (h_edge, v_edge) =
                if core.edges()[i].orient == Orient::Horizontal { (i, j) } else { (j, i) };
            let position =
                core.crossing_point(i, j).expect("listed crossings have a crossing point");
            MultiVertexNode { position, h_edge, v_edge }
        })
        .collect();
    nodes.sort_by(|a, b| crate::exact::point_cmp(&a.position, &b.position));

    let mut arcs: Vec<(usize, usize, usize)> = Vec::new();
    for (e, edge) in core.edges().iter().enumerate() {
        let mut on_edge: Vec<usize> = nodes
            .iter()
            .enumerate()
            .filter(|(_, v)| v.h_edge == e || v.v_edge == e)
            .map(|(i, _)| i)
            .collect();
        on_edge.sort_by_key(|&i| match edge.orient {
            Orient::Horizontal => nodes[i].position.0.clone(),
            Orient::Vertical => nodes[i].position.1.clone(),
        });
        for pair in on_edge.windows(2) {
            let (i, j) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            arcs.push((i, j, e));
        }
    }
    arcs.sort();

    let graph = MultiVertexGraph { core: core.clone(), nodes, arcs };
    for (i, node) in graph.nodes.iter().enumerate() {
        let degree = graph.degree(i);
        if degree < 2 {
            return Err(StabilityError::DegenerateCore {
                x: node.position.0.clone(),
                y: node.position.1.clone(),
                degree,
            });
        }
    }
    Ok(graph)
}

/// A minimal cycle of core edges coupled through shared crossings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KeyCycle {
    /// Core edge indices in cyclic order; consecutive edges cross,
    /// non-consecutive ones do not.
    pub edges: Vec<usize>,
    /// Orientation of each cycle edge; alternates around the cycle.
    pub orients: Vec<Orient>,
    /// Supporting line coordinate of each cycle edge.
    pub lines: Vec<Rational>,
    /// `corners[i]` is the crossing of `edges[i]` and the next cycle edge.
    pub corners: Vec<(Rational, Rational)>,
    /// Per cycle edge: the along-edge coordinates of its non-corner
    /// vertices.
    pub mono_coords: Vec<Vec<Rational>>,
}

impl KeyCycle {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Along-edge coordinate of a plane point on cycle edge `i`.
    fn along(&self, i: usize, point: &(Rational, Rational)) -> Rational {
        match self.orients[i] {
            Orient::Horizontal => point.0.clone(),
            Orient::Vertical => point.1.clone(),
        }
    }

    /// The along-edge coordinates of edge `i`'s two corners, in cycle
    /// order: the corner shared with the previous edge, then with the next.
    pub fn corner_coords(&self, i: usize) -> (Rational, Rational) {
        let e = self.edges.len();
        let from = self.along(i, &self.corners[(i + e - 1) % e]);
        let to = self.along(i, &self.corners[i]);
        (from, to)
    }
}

/// Finds a cycle through the multi-vertex graph minimizing the number of
/// distinct edges: a girth cycle of the edge-crossing graph, found by
/// iterative deepening over even lengths with the lexicographically
/// smallest edge-index sequence as tiebreak. Verifies the required
/// intersection pattern (consecutive edges cross, non-consecutive do not)
/// before returning. `None` when the graph has no cycle.
pub fn minimal_key_cycle(graph: &MultiVertexGraph) -> Option<KeyCycle> {
    let core = &graph.core;
    let n = core.edges().len();
    if graph.is_empty() {
        return None;
    }
    let neighbors: Vec<Vec<usize>> =
        (0..n).map(|i| (0..n).filter(|&j| core.cross(i, j)).collect()).collect();

    fn extend(neighbors: &[Vec<usize>], path: &mut Vec<usize>, target: usize) -> bool {
        if path.len() == target {
            let first = path[0];
            let last = *path.last().unwrap();
            return neighbors[last].contains(&first);
        }
        let last = *path.last().unwrap();
        let start = path[0];
        for &next in &neighbors[last] {
            // Only visit indices above the anchor so each cycle is found
            // once, at its smallest member, in lexicographic order.
            if next <= start || path.contains(&next) {
                continue;
            }
            path.push(next);
            if extend(neighbors, path, target) {
                return true;
            }
            path.pop();
        }
        false
    }

    let mut target = 4;
    while target <= n {
        for start in 0..n {
            let mut path = vec![start];
            if extend(&neighbors, &mut path, target) {
                let cycle = build_key_cycle(core, &path);
                debug_assert!(cycle.is_some(), "girth cycles satisfy the key pattern");
                if cycle.is_some() {
                    return cycle;
                }
            }
        }
        target += 2;
    }
    None
}

/// Materializes a [`KeyCycle`] from an edge-index ring, checking the
/// intersection pattern.
fn build_key_cycle(core: &GeneralizedTComponent, ring: &[usize]) -> Option<KeyCycle> {
    let e = ring.len();
    for i in 0..e {
        for j in i + 1..e {
            let adjacent = j == i + 1 || (i == 0 && j == e - 1);
            if core.cross(ring[i], ring[j]) != adjacent {
                return None;
            }
        }
    }
    let corners: Vec<(Rational, Rational)> = (0..e)
        .map(|i| {
            core.crossing_point(ring[i], ring[(i + 1) % e]).expect("consecutive cycle edges cross")
        })
        .collect();
    let orients: Vec<Orient> = ring.iter().map(|&i| core.edges()[i].orient).collect();
    let lines: Vec<Rational> = ring.iter().map(|&i| core.edges()[i].line.clone()).collect();
    let mono_coords: Vec<Vec<Rational>> = (0..e)
        .map(|i| {
            let edge = &core.edges()[ring[i]];
            let prev = &corners[(i + e - 1) % e];
            let next = &corners[i];
            let (c_prev, c_next) = match orients[i] {
                Orient::Horizontal => (&prev.0, &next.0),
                Orient::Vertical => (&prev.1, &next.1),
            };
            edge.vertices.iter().filter(|v| *v != c_prev && *v != c_next).cloned().collect()
        })
        .collect();
    Some(KeyCycle { edges: ring.to_vec(), orients, lines, corners, mono_coords })
}

fn check_cycle_applicable(kc: &KeyCycle, d: usize) -> Result<(), StabilityError> {
    if d == 0 {
        return Err(StabilityError::InvalidDegree(0));
    }
    if kc.len() < 4 || !kc.len().is_multiple_of(2) {
        return Err(StabilityError::DegenerateCycle(kc.len()));
    }
    for (i, monos) in kc.mono_coords.iter().enumerate() {
        let found = monos.len() + 2;
        if found != d + 2 {
            return Err(StabilityError::KeyCycleNotApplicable {
                position: i,
                expected: d + 2,
                found,
            });
        }
    }
    Ok(())
}

/// The per-edge node ratios of the cycle: for edge `i` with corners
/// `(from, to)` and non-corner coordinates `S`, the value
/// `prod_{s in S} (to - s) / (from - s)`; their product `P` drives the
/// closed-form determinant `|1 - P|`.
fn cycle_ratios(kc: &KeyCycle) -> Vec<Rational> {
    (0..kc.len())
        .map(|i| {
            let (from, to) = kc.corner_coords(i);
            lagrange_ratio(&kc.mono_coords[i], &from, &to)
                .expect("corner coordinates differ from vertex coordinates")
        })
        .collect()
}

/// Closed form for the absolute determinant of the cycle's square
/// conformality matrix after per-edge elimination: `|1 - P|` with `P` the
/// product of all per-edge node ratios. Requires every cycle edge to carry
/// exactly `d + 2` vertices.
pub fn key_cycle_det(kc: &KeyCycle, d: usize) -> Result<Rational, StabilityError> {
    check_cycle_applicable(kc, d)?;
    let p: Rational = cycle_ratios(kc).into_iter().product();
    Ok((Rational::one() - p).abs())
}

/// The conformality matrix of the cycle edges alone: `e(d+1)` rows in cycle
/// order and one column per cycle vertex, square because each edge carries
/// `d + 2` vertices of which the two corners are shared.
pub fn assemble_key_matrix(kc: &KeyCycle, d: usize) -> Result<ExactMatrix, StabilityError> {
    check_cycle_applicable(kc, d)?;
    Ok(build_matrix(&cycle_component(kc), d).expect("degree checked above").matrix)
}

/// The cycle edges as a standalone generalized component, rows/edges in
/// cycle order.
fn cycle_component(kc: &KeyCycle) -> GeneralizedTComponent {
    let edges: Vec<crate::mesh::GtEdge> = (0..kc.len())
        .map(|i| {
            let (from, to) = kc.corner_coords(i);
            let mut vertices = kc.mono_coords[i].clone();
            vertices.push(from);
            vertices.push(to);
            vertices.sort();
            crate::mesh::GtEdge { orient: kc.orients[i], line: kc.lines[i].clone(), vertices }
        })
        .collect();
    GeneralizedTComponent::new(edges).expect("a verified key cycle is a consistent component")
}

// ---------------------------------------------------------------------------
// Witness search
// ---------------------------------------------------------------------------

/// How a [`WitnessReport`] was settled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessMethod {
    /// Empty core: the conformality matrix has full row rank at every
    /// placement, so no witness can exist.
    StableByDiagonalizability,
    /// A root of the key-cycle determinant, confirmed on the full matrix.
    ClosedForm,
    /// Found by seeded resampling, confirmed on the full matrix.
    Sampled,
    /// Neither the closed form nor sampling produced a confirmed witness.
    Inconclusive,
}

/// The vertex a witness moves.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessTarget {
    /// Component edge index.
    pub edge: usize,
    /// Index into that edge's vertex coordinate list (at the original
    /// placement).
    pub vertex: usize,
    pub original: Rational,
}

/// Outcome of [`witness_search`]. A witness asserts that moving `target`'s
/// coordinate to `witness_coord` — staying inside the structurally similar
/// class — strictly lowers the full conformality-matrix rank; this is
/// always verified by exact recomputation before being reported. Key-cycle
/// submatrix ranks are reported separately: a submatrix drop alone is never
/// presented as a dimension change.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessReport {
    pub method: WitnessMethod,
    pub degree: usize,
    pub target: Option<WitnessTarget>,
    pub witness_coord: Option<Rational>,
    pub rank_before: usize,
    pub rank_after: Option<usize>,
    pub key_rank_before: Option<usize>,
    pub key_rank_after: Option<usize>,
    pub note: String,
}

/// The coordinate making the cycle product equal one when vertex `s` on
/// the edge with corners `(from, to)` moves there, or `None` when the
/// equation degenerates (`K = 1`).
fn witness_root(p: &Rational, from: &Rational, to: &Rational, s: &Rational) -> Option<Rational> {
    let k = p * &((from - s) / (to - s));
    if k == Rational::one() {
        return None;
    }
    Some((from - &(&k * to)) / (Rational::one() - &k))
}

/// Draws an exact rational in `[lo, hi]` with denominator at most 4.
fn random_rational(rng: &mut ChaCha8Rng, lo: &Rational, hi: &Rational) -> Rational {
    let q: i64 = rng.gen_range(1..=4);
    let scale = Rational::from(q);
    let low = (lo * &scale).ceil_to_i64();
    let high = (hi * &scale).floor_to_i64();
    let pick = if low >= high { low } else { rng.gen_range(low..=high) };
    Rational::new(pick, q)
}

/// Moves the vertex with coordinate `old` on `edge` to `coord`, provided
/// the result is still a consistent component with the same crossing
/// relation — i.e. stays structurally similar to the input.
fn try_move(
    gt: &GeneralizedTComponent,
    edge: usize,
    old: &Rational,
    coord: &Rational,
) -> Option<GeneralizedTComponent> {
    let vertices = &gt.edges()[edge].vertices;
    if vertices.contains(coord) {
        return None;
    }
    let vertex = vertices.iter().position(|v| v == old)?;
    let moved = gt.with_vertex_moved(edge, vertex, coord.clone()).ok()?;
    if moved.crossings() != gt.crossings() {
        return None;
    }
    Some(moved)
}

fn full_rank(gt: &GeneralizedTComponent, d: usize) -> usize {
    build_matrix(gt, d).expect("degree validated by the caller").matrix.rank()
}

/// Searches for a placement witnessing rank instability of the component's
/// conformality matrix within its structurally similar class.
///
/// Pipeline: if the complete partition has an empty core the component is
/// reported stable outright. Otherwise the minimal key cycle of the core is
/// analyzed; when every cycle edge carries exactly `d + 2` vertices and the
/// cycle determinant is currently nonzero, each movable vertex's
/// determinant root is tried in order of increasing magnitude. Every
/// candidate — closed-form or sampled — counts only if the exactly
/// recomputed full-matrix rank strictly drops. When the closed form is
/// inapplicable or exhausted, up to `samples` seeded random single-vertex
/// moves are tried. Only vertices not shared with any other component edge
/// are ever moved, so every tried placement stays in the similar class.
pub fn witness_search(
    gt: &GeneralizedTComponent,
    d: usize,
    seed: u64,
    samples: u32,
) -> Result<WitnessReport, StabilityError> {
    if d == 0 {
        return Err(StabilityError::InvalidDegree(0));
    }
    let rank_before = full_rank(gt, d);
    let cp = complete_partition(gt, d);
    if cp.is_diagonalizable() {
        return Ok(WitnessReport {
            method: WitnessMethod::StableByDiagonalizability,
            degree: d,
            target: None,
            witness_coord: None,
            rank_before,
            rank_after: None,
            key_rank_before: None,
            key_rank_after: None,
            note: "the component is diagonalizable: its conformality matrix keeps \
                   full row rank at every placement in the similar class"
                .into(),
        });
    }

    let core = gt.restricted(&cp.cndc);
    let all_active = vec![true; gt.edges().len()];
    let mut key_rank_before = None;

    // Closed form over the minimal key cycle.
    let closed_form_note: String = match multi_vertex_graph(&core).map(|g| minimal_key_cycle(&g)) {
        Ok(Some(kc)) => match key_cycle_det(&kc, d) {
            Ok(det) => {
                let key_matrix = assemble_key_matrix(&kc, d)?;
                key_rank_before = Some(key_matrix.rank());
                if det.is_zero() {
                    "key-cycle determinant already zero at this placement; ".into()
                } else {
                    let p: Rational = cycle_ratios(&kc).into_iter().product();
                    let mut candidates: Vec<(Rational, usize, Rational, Rational)> = Vec::new();
                    for (i, monos) in kc.mono_coords.iter().enumerate() {
                        let gt_edge = cp.cndc[kc.edges[i]];
                        let movable = gt.mono_coords(gt_edge, &all_active);
                        let (from, to) = kc.corner_coords(i);
                        for s in monos {
                            if !movable.contains(s) {
                                continue;
                            }
                            if let Some(root) = witness_root(&p, &from, &to, s) {
                                candidates.push((root.abs(), gt_edge, s.clone(), root));
                            }
                        }
                    }
                    candidates.sort_by(|a, b| (&a.0, a.1, &a.2).cmp(&(&b.0, b.1, &b.2)));
                    for (_, gt_edge, s, root) in candidates {
                        let Some(moved) = try_move(gt, gt_edge, &s, &root) else {
                            continue;
                        };
                        let rank_after = full_rank(&moved, d);
                        if rank_after < rank_before {
                            let moved_cycle = moved.restricted(&cp.cndc).restricted(&kc.edges);
                            let key_rank_after = Some(full_rank(&moved_cycle, d));
                            let vertex = gt.edges()[gt_edge]
                                .vertices
                                .iter()
                                .position(|v| *v == s)
                                .expect("target coordinate is on the edge");
                            return Ok(WitnessReport {
                                method: WitnessMethod::ClosedForm,
                                degree: d,
                                target: Some(WitnessTarget { edge: gt_edge, vertex, original: s }),
                                witness_coord: Some(root),
                                rank_before,
                                rank_after: Some(rank_after),
                                key_rank_before,
                                key_rank_after,
                                note: "determinant root of the minimal key cycle, \
                                       confirmed on the full conformality matrix"
                                    .into(),
                            });
                        }
                    }
                    "no key-cycle determinant root lowered the full-matrix rank; ".into()
                }
            }
            Err(StabilityError::KeyCycleNotApplicable { expected, found, .. }) => format!(
                "closed form inapplicable: a cycle edge has {found} vertices \
                 instead of {expected}; "
            ),
            Err(other) => return Err(other),
        },
        Ok(None) => "the core has no edge cycle; ".into(),
        Err(StabilityError::DegenerateCore { .. }) => {
            "a core edge keeps fewer than two shared vertices, so no key cycle \
             exists; "
                .into()
        }
        Err(other) => return Err(other),
    };

    // Seeded sampling fallback over single movable vertices of the core.
    let mut targets: Vec<(usize, Rational)> = Vec::new();
    for &e in &cp.cndc {
        for coord in gt.mono_coords(e, &all_active) {
            targets.push((e, coord));
        }
    }
    if !targets.is_empty() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..samples {
            let (edge, old) = targets[rng.gen_range(0..targets.len())].clone();
            let (lo, hi) = {
                let vs = &gt.edges()[edge].vertices;
                (vs.first().unwrap() - &Rational::one(), vs.last().unwrap() + &Rational::one())
            };
            let coord = random_rational(&mut rng, &lo, &hi);
            let Some(moved) = try_move(gt, edge, &old, &coord) else {
                continue;
            };
            let rank_after = full_rank(&moved, d);
            if rank_after < rank_before {
                let vertex = gt.edges()[edge]
                    .vertices
                    .iter()
                    .position(|v| *v == old)
                    .expect("target coordinate is on the edge");
                return Ok(WitnessReport {
                    method: WitnessMethod::Sampled,
                    degree: d,
                    target: Some(WitnessTarget { edge, vertex, original: old }),
                    witness_coord: Some(coord),
                    rank_before,
                    rank_after: Some(rank_after),
                    key_rank_before,
                    key_rank_after: None,
                    note: format!(
                        "{closed_form_note}found by seeded resampling, confirmed on \
                         the full conformality matrix"
                    ),
                });
            }
        }
    }

    Ok(WitnessReport {
        method: WitnessMethod::Inconclusive,
        degree: d,
        target: None,
        witness_coord: None,
        rank_before,
        rank_after: None,
        key_rank_before,
        key_rank_after: None,
        note: format!(
            "{closed_form_note}{samples} seeded resampling attempts found no \
             placement with lower full-matrix rank"
        ),
    })
}

// ---------------------------------------------------------------------------
// Similar-class sampling
// ---------------------------------------------------------------------------

/// Draws `n` random members of the component's structurally similar class
/// and returns the multiset of their conformality-matrix ranks.
///
/// Each draw uses an independent substream of a ChaCha8 generator seeded
/// with `seed`, so results are reproducible and draws could be evaluated in
/// parallel. A draw re-places either one random movable vertex or every
/// movable vertex (an even split) with rationals of denominator at most 4
/// near the edge's current extent; placements colliding with existing
/// vertices or breaking the crossing structure are rejected and redrawn a
/// bounded number of times. Edge lines and shared vertices never move, so
/// every draw is structurally similar to the input by construction.
pub fn sample_similar(
    gt: &GeneralizedTComponent,
    d: usize,
    n: u32,
    seed: u64,
) -> Result<BTreeMap<usize, u64>, StabilityError> {
    if d == 0 {
        return Err(StabilityError::InvalidDegree(0));
    }
    let all_active = vec![true; gt.edges().len()];
    let mut movable: Vec<(usize, Rational)> = Vec::new();
    for e in 0..gt.edges().len() {
        for coord in gt.mono_coords(e, &all_active) {
            movable.push((e, coord));
        }
    }

    let mut histogram: BTreeMap<usize, u64> = BTreeMap::new();
    for k in 0..n {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(u64::from(k) + 1);
        let draw = if movable.is_empty() {
            gt.clone()
        } else if rng.gen_bool(0.5) {
            let target = movable[rng.gen_range(0..movable.len())].clone();
            resample_vertices(gt, &[target], &mut rng)
        } else {
            resample_vertices(gt, &movable, &mut rng)
        };
        *histogram.entry(full_rank(&draw, d)).or_insert(0) += 1;
    }
    Ok(histogram)
}

/// Re-places each listed `(edge, coordinate)` vertex with a fresh random
/// coordinate, keeping the component consistent; a vertex that cannot be
/// re-placed within the retry bound keeps its current coordinate.
fn resample_vertices(
    gt: &GeneralizedTComponent,
    targets: &[(usize, Rational)],
    rng: &mut ChaCha8Rng,
) -> GeneralizedTComponent {
    let mut current = gt.clone();
    for (edge, old) in targets {
        let (lo, hi) = {
            let vs = &current.edges()[*edge].vertices;
            (vs.first().unwrap() - &Rational::one(), vs.last().unwrap() + &Rational::one())
        };
        for _ in 0..32 {
            let coord = random_rational(rng, &lo, &hi);
            if let Some(moved) = try_move(&current, *edge, old, &coord) {
                current = moved;
                break;
            }
        }
    }
    current
}
