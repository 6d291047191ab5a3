//! Whole-mesh analysis: the counts, ranks, dimensions, partition, and
//! key-cycle results a user typically wants for one mesh and degree,
//! aggregated into a single serializable report.
//!
//! Everything here is a thin orchestration of the other modules; no
//! quantity is computed twice by different methods without the report
//! exposing both (the three dimension formulas deliberately overlap so
//! their agreement can be checked downstream).

use serde::Serialize;

use crate::conformality::{build_matrix, diag_dim, dim_via_cndc, spline_dim, ConformalityError};
use crate::exact::Rational;
use crate::mesh::{
    mesh_stats, t_component, to_generalized, GeneralizedTComponent, MeshStats, Orient, TMesh,
};
use crate::partition::complete_partition;
use crate::stability::{minimal_key_cycle, multi_vertex_graph, KeyCycle};

/// A component edge as presented in reports: its index within the
/// T-connected component plus enough geometry to locate it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EdgeSummary {
    pub index: usize,
    pub orient: Orient,
    pub line: Rational,
    pub vertex_count: usize,
}

/// Analysis of one connected block of the T-connected component. All edge
/// indices refer to the whole component's edge list.
#[derive(Debug, Clone, Serialize)]
pub struct BlockReport {
    pub edges: Vec<usize>,
    /// Rank of the block's own conformality matrix.
    pub rank: usize,
    /// Nullity of the block's own conformality matrix.
    pub cvs_dimension: usize,
    /// The block's completely non-diagonalizable core; empty exactly when
    /// `diagonalizable` holds.
    pub core_edges: Vec<usize>,
    pub diagonalizable: bool,
    /// Removal order witnessing diagonalizability of the non-core edges:
    /// each listed edge keeps at least `degree + 1` unshared vertices about
    /// the core and the edges after it.
    pub elimination_order: Vec<usize>,
    /// Minimal key cycle of the core, when the core is nonempty and its
    /// multi-vertex graph carries one.
    pub key_cycle: Option<KeyCycle>,
}

/// Full report of [`analyze`]: mesh statistics, the conformality rank, the
/// spline-space dimension by every applicable formula, and per-block
/// partition and key-cycle results.
#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub degree: usize,
    pub stats: MeshStats,
    /// The t-edges forming the T-connected component, in component order.
    pub component_edges: Vec<EdgeSummary>,
    /// Rank of the full conformality matrix.
    pub rank: usize,
    /// Nullity of the full conformality matrix.
    pub cvs_dimension: usize,
    pub diagonalizable: bool,
    /// Spline-space dimension by the general rank formula; always valid.
    pub dimension: usize,
    /// Dimension by the diagonalizable closed formula; `None` when the mesh
    /// is not diagonalizable at this degree (the formula does not apply).
    pub dimension_diagonalizable: Option<usize>,
    /// Dimension by the core-isolating formula; always valid and always
    /// equal to `dimension`.
    pub dimension_via_core: usize,
    pub blocks: Vec<BlockReport>,
    pub warnings: Vec<String>,
}

/// Runs the full pipeline on a mesh at degree `d`.
///
/// Vanishable t-edges (`n(l) <= d + 1`, whose edge cofactor can vanish
/// identically) are reported as warnings, not errors: the rank machinery
/// stays valid linear algebra on them, but dimension results should be read
/// with care.
pub fn analyze(mesh: &TMesh, d: usize) -> Result<AnalysisReport, ConformalityError> {
    if d == 0 {
        return Err(ConformalityError::InvalidDegree(0));
    }
    let stats = mesh_stats(mesh);
    let gt = to_generalized(&t_component(mesh));

    let full = build_matrix(&gt, d)?;
    let rank = full.matrix.rank();
    let cvs_dimension = full.columns.len() - rank;

    let cp = complete_partition(&gt, d);
    let mut warnings = Vec::new();
    let blocks = block_reports(&gt, &cp.cndc, &cp.diagonalizable_order, d, &mut warnings)?;

    let dimension = spline_dim(mesh, d)?;
    let dimension_via_core = dim_via_cndc(mesh, d)?;
    let dimension_diagonalizable = match diag_dim(mesh, d) {
        Ok(v) => Some(v),
        Err(ConformalityError::NotDiagonalizable { .. }) => None,
        Err(other) => return Err(other),
    };

    let component_edges = gt
        .edges()
        .iter()
        .enumerate()
        .map(|(index, e)| EdgeSummary {
            index,
            orient: e.orient,
            line: e.line.clone(),
            vertex_count: e.n(),
        })
        .collect();
    for e in gt.edges() {
        if e.n() <= d + 1 {
            warnings.push(format!(
                "vanishable t-edge: the {} edge at {} carries {} vertices \
                 (at most degree + 1 = {}), so its edge cofactor can vanish \
                 identically and the blanket assumption behind the dimension \
                 formulas does not hold",
                e.orient,
                e.line,
                e.n(),
                d + 1,
            ));
        }
    }

    Ok(AnalysisReport {
        degree: d,
        stats,
        component_edges,
        rank,
        cvs_dimension,
        diagonalizable: cp.is_diagonalizable(),
        dimension,
        dimension_diagonalizable,
        dimension_via_core,
        blocks,
        warnings,
    })
}

fn block_reports(
    gt: &GeneralizedTComponent,
    cndc: &[usize],
    elimination: &[usize],
    d: usize,
    warnings: &mut Vec<String>,
) -> Result<Vec<BlockReport>, ConformalityError> {
    let mut reports = Vec::new();
    for block in gt.blocks() {
        let sub = gt.restricted(&block);
        let m = build_matrix(&sub, d)?;
        let rank = m.matrix.rank();
        // Blocks never share vertices, so the global partition restricts to
        // each block without change.
        let core_edges: Vec<usize> = cndc.iter().copied().filter(|i| block.contains(i)).collect();
        let elimination_order: Vec<usize> =
            elimination.iter().copied().filter(|i| block.contains(i)).collect();
        let diagonalizable = core_edges.is_empty();
        let key_cycle = if diagonalizable {
            None
        } else {
            let core = gt.restricted(&core_edges);
            match multi_vertex_graph(&core) {
                Ok(graph) => minimal_key_cycle(&graph).map(|kc| KeyCycle {
                    edges: kc.edges.iter().map(|&i| core_edges[i]).collect(),
                    ..kc
                }),
                Err(err) => {
                    warnings.push(format!(
                        "block starting at edge {}: no key-cycle analysis ({err})",
                        block[0]
                    ));
                    None
                }
            }
        };
        reports.push(BlockReport {
            edges: block,
            rank,
            cvs_dimension: m.columns.len() - rank,
            core_edges,
            diagonalizable,
            elimination_order,
            key_cycle,
        });
    }
    Ok(reports)
}
