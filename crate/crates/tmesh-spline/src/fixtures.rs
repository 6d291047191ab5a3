//! Built-in example meshes used by tests, benchmarks, and the CLI.
//!
//! Each fixture is shipped as JSON under `fixtures/` in the repository root
//! and embedded into the library so tests and the CLI's `fixture:<name>`
//! inputs work without any filesystem layout assumptions.

use crate::mesh::TMesh;

/// Four t-edges arranged as a pinwheel inside a frame of seven cross-cuts.
/// Its T-connected component is its own completely non-diagonalizable core
/// for degree 3, the smallest rank-unstable configuration: the four edges
/// form one key cycle and a single mono-vertex move drops the conformality
/// rank from 16 to 15.
pub const PINWHEEL_JSON: &str = include_str!("../../../fixtures/pinwheel.json");

/// Six t-edges whose multi-vertex graph has eight nodes and two fused
/// 4-edge cycles; completely non-diagonalizable for degree 2. Every key
/// cycle contains an edge with five vertices, so the closed-form witness
/// (which needs exactly `d + 2 = 4` per edge) is never applicable.
pub const DOUBLE_CYCLE_JSON: &str = include_str!("../../../fixtures/double_cycle.json");

/// Three t-edges forming a ladder (two rungs and one rail); diagonalizable
/// for degree 2, so its spline dimension is stable.
pub const LADDER_JSON: &str = include_str!("../../../fixtures/ladder.json");

/// First mesh of a structurally isomorphic pair. Matches
/// [`QUARTER_TURN_B_JSON`] only under the axis-swapping branch of the
/// isomorphism search (a quarter-turn pattern).
pub const QUARTER_TURN_A_JSON: &str = include_str!("../../../fixtures/quarter_turn_a.json");

/// Second mesh of the structurally isomorphic pair; see
/// [`QUARTER_TURN_A_JSON`].
pub const QUARTER_TURN_B_JSON: &str = include_str!("../../../fixtures/quarter_turn_b.json");

/// First mesh of a structurally similar (but not isomorphic) pair: the
/// T-connected components have matching vertex counts and intersection
/// structure while the ambient meshes order their l-edges differently.
pub const SIMILAR_A_JSON: &str = include_str!("../../../fixtures/similar_a.json");

/// Second mesh of the structurally similar pair; see [`SIMILAR_A_JSON`].
pub const SIMILAR_B_JSON: &str = include_str!("../../../fixtures/similar_b.json");

fn parse(name: &str, json: &str) -> TMesh {
    TMesh::parse(json).unwrap_or_else(|e| panic!("built-in fixture `{name}` must parse: {e}"))
}

pub fn pinwheel() -> TMesh {
    parse("pinwheel", PINWHEEL_JSON)
}

pub fn double_cycle() -> TMesh {
    parse("double_cycle", DOUBLE_CYCLE_JSON)
}

pub fn ladder() -> TMesh {
    parse("ladder", LADDER_JSON)
}

pub fn quarter_turn_a() -> TMesh {
    parse("quarter_turn_a", QUARTER_TURN_A_JSON)
}

pub fn quarter_turn_b() -> TMesh {
    parse("quarter_turn_b", QUARTER_TURN_B_JSON)
}

pub fn similar_a() -> TMesh {
    parse("similar_a", SIMILAR_A_JSON)
}

pub fn similar_b() -> TMesh {
    parse("similar_b", SIMILAR_B_JSON)
}

/// All named fixtures, for CLI listing and corpus construction.
pub fn all() -> Vec<(&'static str, TMesh)> {
    vec![
        ("pinwheel", pinwheel()),
        ("double_cycle", double_cycle()),
        ("ladder", ladder()),
        ("quarter_turn_a", quarter_turn_a()),
        ("quarter_turn_b", quarter_turn_b()),
        ("similar_a", similar_a()),
        ("similar_b", similar_b()),
    ]
}

/// Look up a fixture mesh by name.
pub fn by_name(name: &str) -> Option<TMesh> {
    match name {
        "pinwheel" => Some(pinwheel()),
        "double_cycle" => Some(double_cycle()),
        "ladder" => Some(ladder()),
        "quarter_turn_a" => Some(quarter_turn_a()),
        "quarter_turn_b" => Some(quarter_turn_b()),
        "similar_a" => Some(similar_a()),
        "similar_b" => Some(similar_b()),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_fixtures_parse_and_validate() {
        for (name, mesh) in all() {
            let report = mesh.validate();
            assert!(report.is_valid(), "fixture {name} invalid:\n{report}");
        }
    }
}
