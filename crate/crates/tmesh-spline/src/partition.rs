//! Ordered partitions of a generalized T-connected component and the
//! complete partition into a completely non-diagonalizable core plus a
//! diagonalizable part.
//!
//! A *t-partition* splits the component's edges into ordered parts; the
//! conformality matrix then becomes block lower triangular when columns are
//! grouped by the parts' *reduced* vertices (each part keeps only the
//! vertices not shared with earlier parts). If an ordering exists in which
//! every part is a single edge keeping at least `d + 1` of its own
//! vertices, every diagonal block is a full-row-rank Vandermonde block and
//! the whole matrix has full row rank regardless of coordinates: the
//! component is *diagonalizable*.
//!
//! Greedily peeling off such edges until none remains is confluent: the
//! remainder — the *completely non-diagonalizable core* — is the same edge
//! set whatever the peeling order, so the split is canonical. Only the
//! core's (typically tiny) conformality matrix can have coordinate-
//! dependent rank.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::exact::{vandermonde, ExactError, ExactMatrix, Rational};
use crate::mesh::GeneralizedTComponent;

/// Errors raised when constructing partitions or their matrix blocks.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PartitionError {
    #[error("edge sets do not form a partition of the component: {0}")]
    NotAPartition(String),
    #[error("spline degree must be at least 1, got {0}")]
    InvalidDegree(usize),
    #[error("invalid edge geometry: {0}")]
    Geometry(#[from] ExactError),
}

/// An ordered partition of a component's edges, with each part's reduced
/// vertex set: the positions on the part's edges that are not shared with
/// any earlier part.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KPartition {
    /// Edge indices of each part, in the given order.
    pub parts: Vec<Vec<usize>>,
    /// Reduced vertices of each part, sorted lexicographically.
    pub reduced_vertices: Vec<Vec<(Rational, Rational)>>,
}

/// The canonical split of a component for degree `d`: the completely
/// non-diagonalizable core and a witnessing order for the rest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CompletePartition {
    /// Edges of the completely non-diagonalizable core, sorted by index.
    /// Empty exactly when the component is diagonalizable.
    pub cndc: Vec<usize>,
    /// The remaining edges in a witnessing order: taking the core as the
    /// first part and then these edges one at a time, every one of them
    /// keeps at least `d + 1` vertices not shared with earlier parts.
    pub diagonalizable_order: Vec<usize>,
    /// Degree the partition was computed for.
    pub degree: usize,
}

impl CompletePartition {
    /// Number of edges in the completely non-diagonalizable core.
    pub fn s(&self) -> usize {
        self.cndc.len()
    }

    /// Whether the whole component is diagonalizable (empty core).
    pub fn is_diagonalizable(&self) -> bool {
        self.cndc.is_empty()
    }

    /// The witnessing t-partition: core first (when nonempty), then each
    /// remaining edge as its own part in the witnessing order.
    pub fn witnessing_parts(&self) -> Vec<Vec<usize>> {
        let mut parts = Vec::new();
        if !self.cndc.is_empty() {
            parts.push(self.cndc.clone());
        }
        parts.extend(self.diagonalizable_order.iter().map(|&e| vec![e]));
        parts
    }
}

/// Computes the complete partition for degree `d` (`d >= 1`).
///
/// Sweeps the edges in input order, removing any edge that currently keeps
/// at least `d + 1` vertices not shared with the remaining edges, until a
/// sweep removes nothing. The remainder is the completely
/// non-diagonalizable core; removals in reverse order witness the
/// diagonalizability of the rest. The core is independent of the sweep
/// order even though the removal sequence is not.
pub fn complete_partition(gt: &GeneralizedTComponent, d: usize) -> CompletePartition {
    let n = gt.edges().len();
    let mut active = vec![true; n];
    let mut removal = Vec::new();
    loop {
        let mut changed = false;
        for i in 0..n {
            if active[i] && gt.mono_count(i, &active) > d {
                active[i] = false;
                removal.push(i);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let cndc: Vec<usize> = (0..n).filter(|&i| active[i]).collect();
    removal.reverse();
    CompletePartition { cndc, diagonalizable_order: removal, degree: d }
}

/// Whether the component is diagonalizable for degree `d`; on success
/// returns a witnessing order in which each edge, taken as its own part,
/// keeps at least `d + 1` vertices not shared with earlier parts.
pub fn is_diagonalizable(gt: &GeneralizedTComponent, d: usize) -> Option<Vec<usize>> {
    let cp = complete_partition(gt, d);
    if cp.is_diagonalizable() {
        Some(cp.diagonalizable_order)
    } else {
        None
    }
}

/// Builds the ordered partition given by `parts` (edge indices into `gt`),
/// computing each part's reduced vertices. Errors unless every edge
/// appears in exactly one part.
pub fn k_partition(
    gt: &GeneralizedTComponent,
    parts: &[Vec<usize>],
) -> Result<KPartition, PartitionError> {
    let n = gt.edges().len();
    let mut seen = vec![false; n];
    for part in parts {
        for &e in part {
            if e >= n {
                return Err(PartitionError::NotAPartition(format!(
                    "edge index {e} out of range for {n} edges"
                )));
            }
            if seen[e] {
                return Err(PartitionError::NotAPartition(format!(
                    "edge {e} appears in more than one part"
                )));
            }
            seen[e] = true;
        }
    }
    if let Some(missing) = seen.iter().position(|&s| !s) {
        return Err(PartitionError::NotAPartition(format!("edge {missing} appears in no part")));
    }

    let mut earlier: BTreeSet<(Rational, Rational)> = BTreeSet::new();
    let mut reduced_vertices = Vec::with_capacity(parts.len());
    for part in parts {
        let mut own: BTreeSet<(Rational, Rational)> = BTreeSet::new();
        for &e in part {
            let edge = &gt.edges()[e];
            for coord in &edge.vertices {
                own.insert(edge.position(coord));
            }
        }
        let reduced: Vec<(Rational, Rational)> =
            own.iter().filter(|p| !earlier.contains(*p)).cloned().collect();
        earlier.extend(own);
        reduced_vertices.push(reduced);
    }
    Ok(KPartition { parts: parts.to_vec(), reduced_vertices })
}

/// The diagonal blocks of the conformality matrix under `kp`: for part `i`,
/// the rows of its edges' Vandermonde blocks restricted to the columns of
/// the part's reduced vertices. Entries outside these blocks couple only to
/// earlier parts, so the full matrix is block lower triangular in this
/// ordering; in particular, if every block here has full row rank, so does
/// the full matrix.
pub fn phi_matrices(
    gt: &GeneralizedTComponent,
    kp: &KPartition,
    d: usize,
) -> Result<Vec<ExactMatrix>, PartitionError> {
    if d == 0 {
        return Err(PartitionError::InvalidDegree(0));
    }
    let mut blocks = Vec::with_capacity(kp.parts.len());
    for (part, reduced) in kp.parts.iter().zip(&kp.reduced_vertices) {
        let mut block = ExactMatrix::zeros(part.len() * (d + 1), reduced.len());
        for (k, &e) in part.iter().enumerate() {
            let edge = &gt.edges()[e];
            let rows = vandermonde(&edge.vertices, d)?;
            for (j, coord) in edge.vertices.iter().enumerate() {
                let position = edge.position(coord);
                let Ok(col) = reduced.binary_search_by(|c| crate::exact::point_cmp(c, &position))
                else {
                    continue; // vertex shared with an earlier part
                };
                for r in 0..=d {
                    block.set(k * (d + 1) + r, col, rows.get(r, j).clone());
                }
            }
        }
        blocks.push(block);
    }
    Ok(blocks)
}
