//! Exact analysis of polynomial spline spaces of highest-order smoothness
//! over T-meshes.
//!
//! A T-mesh is an axis-aligned rectangular partition of a rectangular domain
//! in which hanging (T-junction) vertices are allowed. The spline space
//! `S(d, d, d-1, d-1, T)` of degree-`d` piecewise polynomials that join with
//! maximal smoothness across edges is governed by a linear system: each
//! interior l-edge contributes a block of smoothing-cofactor conformality
//! constraints, and the dimension of the space is determined by the rank of
//! the assembled conformality matrix.
//!
//! This crate computes that rank (and everything downstream of it) in exact
//! rational arithmetic:
//!
//! * [`exact`] — arbitrary-precision rationals and dense exact linear
//!   algebra (rank, determinant, RREF, Vandermonde blocks).
//! * [`mesh`] — the T-mesh data model: parsing, validation, l-edge
//!   extraction and classification, vertex taxonomy, T-connected and
//!   integral components, and a seeded random mesh generator.
//! * [`conformality`] — assembly of the conformality matrix over a
//!   generalized T-connected component and the dimension formulas built on
//!   its rank.
//! * [`partition`] — ordered partitions of the T l-edge set, the reduction
//!   that produces the unique complete partition, the completely
//!   non-diagonalizable core (CNDC), and diagonalizability.
//! * [`stability`] — structural isomorphism and similarity of T-meshes, key
//!   l-edge cycles in the CNDC, and search for coordinate assignments that
//!   witness rank instability.
//! * [`analysis`] — one-call summary reports combining the above.
//! * [`fixtures`] — built-in example meshes used by tests and the CLI.

pub mod analysis;
pub mod conformality;
pub mod exact;
pub mod fixtures;
pub mod mesh;
pub mod partition;
pub mod stability;

pub use analysis::{analyze, AnalysisReport};
pub use exact::{ExactError, ExactMatrix, Rational};
pub use mesh::{MeshError, TMesh};
