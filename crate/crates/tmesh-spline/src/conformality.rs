//! Assembly of the conformality matrix of a generalized T-connected
//! component, and the spline-space dimension formulas built on its rank.
//!
//! For the spline space of bidegree `d` with maximal-order smoothness
//! `d - 1`, each t-edge `l` imposes a vertex-cofactor conformality
//! condition: a degree-`d` polynomial identity along the edge, which is
//! `d + 1` linear equations over the cofactors of `l`'s vertices with
//! Vandermonde structure in the along-edge vertex coordinates. Stacking one
//! block per t-edge, with columns shared wherever two t-edges share a
//! vertex, yields the conformality matrix `M`; its null space is the
//! conformality vector space (CVS), and
//!
//! ```text
//! dim = (d+1)^2 + c(d+1) + n_v - rank(M)
//! ```
//!
//! where `c` counts cross-cuts and `n_v` interior vertices. Cross-cuts and
//! rays never enter `M`: their conformality conditions are always solvable
//! independently of coordinate placement, so only the T-connected component
//! can make the dimension unstable.

use std::ops::Range;

use serde::Serialize;

use crate::exact::{vandermonde, ExactError, ExactMatrix, Rational};
use crate::mesh::{mesh_stats, t_component, to_generalized, GeneralizedTComponent, TMesh};
use crate::partition::{complete_partition, is_diagonalizable};

/// Errors raised by matrix assembly and the dimension formulas.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConformalityError {
    #[error("spline degree must be at least 1, got {0}")]
    InvalidDegree(usize),
    #[error("invalid edge geometry: {0}")]
    Geometry(#[from] ExactError),
    #[error(
        "the T-connected component is not diagonalizable for degree {degree}: \
         its completely non-diagonalizable core has {core_edges} edges"
    )]
    NotDiagonalizable { degree: usize, core_edges: usize },
}

/// The conformality matrix of a generalized T-connected component, with the
/// maps needed to interpret rows and columns.
#[derive(Debug, Clone)]
pub struct ConformalityMatrix {
    pub matrix: ExactMatrix,
    /// One `(edge index, row range)` per component edge, in input edge
    /// order; every range has height `degree + 1`.
    pub row_blocks: Vec<(usize, Range<usize>)>,
    /// The vertex of each column, in lexicographic position order.
    pub columns: Vec<(Rational, Rational)>,
    pub degree: usize,
}

impl ConformalityMatrix {
    /// The column holding the cofactor of the vertex at `position`.
    pub fn column_of(&self, position: &(Rational, Rational)) -> Option<usize> {
        self.columns.binary_search_by(|c| crate::exact::point_cmp(c, position)).ok()
    }
}

/// Builds the conformality matrix: one `(d+1)`-row Vandermonde block per
/// edge over the along-edge vertex coordinates, columns shared at
/// multi-vertices. Row blocks follow the input edge order and columns are
/// vertices in lexicographic order, so the assembled matrix is
/// deterministic.
pub fn build_matrix(
    gt: &GeneralizedTComponent,
    d: usize,
) -> Result<ConformalityMatrix, ConformalityError> {
    if d == 0 {
        return Err(ConformalityError::InvalidDegree(0));
    }
    let columns = gt.vertex_positions();
    let mut matrix = ExactMatrix::zeros(gt.edges().len() * (d + 1), columns.len());
    let mut row_blocks = Vec::with_capacity(gt.edges().len());
    for (e, edge) in gt.edges().iter().enumerate() {
        let block = vandermonde(&edge.vertices, d)?;
        let base = e * (d + 1);
        for (j, coord) in edge.vertices.iter().enumerate() {
            let position = edge.position(coord);
            let col = columns
                .binary_search_by(|c| crate::exact::point_cmp(c, &position))
                .expect("every edge vertex appears in the column list");
            for r in 0..=d {
                matrix.set(base + r, col, block.get(r, j).clone());
            }
        }
        row_blocks.push((e, base..base + d + 1));
    }
    Ok(ConformalityMatrix { matrix, row_blocks, columns, degree: d })
}

/// Dimension of the conformality vector space: the null space of the
/// conformality matrix, i.e. `#vertices - rank`.
pub fn cvs_dim(gt: &GeneralizedTComponent, d: usize) -> Result<usize, ConformalityError> {
    let m = build_matrix(gt, d)?;
    Ok(m.columns.len() - m.matrix.rank())
}

fn checked_dim(value: i64) -> usize {
    usize::try_from(value).expect("spline dimension formulas are nonnegative")
}

/// Dimension of the spline space of bidegree `d`, smoothness `d - 1`, over
/// the mesh: `(d+1)^2 + c(d+1) + n_v - rank(M)` with `M` the conformality
/// matrix of the T-connected component.
pub fn spline_dim(mesh: &TMesh, d: usize) -> Result<usize, ConformalityError> {
    let stats = mesh_stats(mesh);
    let gt = to_generalized(&t_component(mesh));
    let rank = build_matrix(&gt, d)?.matrix.rank();
    Ok(checked_dim(
        (d as i64 + 1) * (d as i64 + 1) + stats.c as i64 * (d as i64 + 1) + stats.n_v as i64
            - rank as i64,
    ))
}

/// Dimension via the closed formula for diagonalizable meshes:
/// `(d+1)^2 + (c - t)(d+1) + n_v`. Errors when the mesh is not
/// diagonalizable for `d` (the formula does not apply).
pub fn diag_dim(mesh: &TMesh, d: usize) -> Result<usize, ConformalityError> {
    if d == 0 {
        return Err(ConformalityError::InvalidDegree(0));
    }
    let gt = to_generalized(&t_component(mesh));
    if is_diagonalizable(&gt, d).is_none() {
        let core_edges = complete_partition(&gt, d).cndc.len();
        return Err(ConformalityError::NotDiagonalizable { degree: d, core_edges });
    }
    let stats = mesh_stats(mesh);
    Ok(checked_dim(
        (d as i64 + 1) * (d as i64 + 1)
            + (stats.c as i64 - stats.t as i64) * (d as i64 + 1)
            + stats.n_v as i64,
    ))
}

/// Dimension via the complete partition:
/// `(d+1)^2 + (c + s - t)(d+1) + n_v - rank(M1)` where `s` is the size of
/// the completely non-diagonalizable core and `M1` its conformality matrix.
/// Agrees with [`spline_dim`] on every mesh, but isolates the only part of
/// the computation that can be coordinate-sensitive.
pub fn dim_via_cndc(mesh: &TMesh, d: usize) -> Result<usize, ConformalityError> {
    let stats = mesh_stats(mesh);
    let gt = to_generalized(&t_component(mesh));
    let cp = complete_partition(&gt, d);
    let core = gt.restricted(&cp.cndc);
    let rank1 = build_matrix(&core, d)?.matrix.rank();
    Ok(checked_dim(
        (d as i64 + 1) * (d as i64 + 1)
            + (stats.c as i64 + cp.s() as i64 - stats.t as i64) * (d as i64 + 1)
            + stats.n_v as i64
            - rank1 as i64,
    ))
}

/// Both sides of the rank identity
/// `rank(M) = (t - s)(d+1) + rank(M1)` relating the full conformality
/// matrix to the completely non-diagonalizable core; holds for every
/// component, so it doubles as a self-test of the partition machinery.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RankIdentity {
    pub lhs: usize,
    pub rhs: usize,
    pub holds: bool,
}

/// Computes both sides of the rank identity from scratch.
pub fn rank_identity_check(
    gt: &GeneralizedTComponent,
    d: usize,
) -> Result<RankIdentity, ConformalityError> {
    let lhs = build_matrix(gt, d)?.matrix.rank();
    let cp = complete_partition(gt, d);
    let core = gt.restricted(&cp.cndc);
    let rank1 = build_matrix(&core, d)?.matrix.rank();
    let rhs = (gt.edges().len() - cp.s()) * (d + 1) + rank1;
    Ok(RankIdentity { lhs, rhs, holds: lhs == rhs })
}
