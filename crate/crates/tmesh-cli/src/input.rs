//! Input loading: file paths or `fixture:<name>` built-ins, with document
//! sniffing so component-level commands accept either a full mesh (its
//! T-connected component is extracted) or a free-standing component.

use std::fs;

use tmesh_spline::fixtures;
use tmesh_spline::mesh::{t_component, to_generalized, GeneralizedTComponent, TMesh};

pub enum Input {
    Mesh(Box<TMesh>),
    Component(GeneralizedTComponent),
}

/// Reads a JSON document from a path or resolves a `fixture:<name>`
/// built-in, deciding by schema whether it is a mesh (`domain` key) or a
/// generalized component (`edges` key).
pub fn load(path: &str) -> Result<Input, String> {
    if let Some(name) = path.strip_prefix("fixture:") {
        return fixtures::by_name(name).map(|m| Input::Mesh(Box::new(m))).ok_or_else(|| {
            let names: Vec<&str> = fixtures::all().iter().map(|(n, _)| *n).collect();
            format!("unknown fixture `{name}`; available: {}", names.join(", "))
        });
    }
    let text = fs::read_to_string(path).map_err(|e| format!("cannot read `{path}`: {e}"))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| format!("`{path}` is not JSON: {e}"))?;
    if value.get("domain").is_some() {
        TMesh::parse(&text).map(|m| Input::Mesh(Box::new(m))).map_err(|e| format!("`{path}`: {e}"))
    } else if value.get("edges").is_some() {
        GeneralizedTComponent::from_json(&text)
            .map(Input::Component)
            .map_err(|e| format!("`{path}`: {e}"))
    } else {
        Err(format!(
            "`{path}` is neither a mesh document (`domain`, `hsegments`, \
             `vsegments`) nor a component document (`edges`)"
        ))
    }
}

/// A full mesh; component documents are rejected.
pub fn load_mesh(path: &str) -> Result<TMesh, String> {
    match load(path)? {
        Input::Mesh(mesh) => Ok(*mesh),
        Input::Component(_) => {
            Err(format!("`{path}` holds a generalized component; this command needs a full mesh"))
        }
    }
}

/// A generalized component: given directly, or extracted from a mesh.
pub fn load_component(path: &str) -> Result<GeneralizedTComponent, String> {
    Ok(match load(path)? {
        Input::Component(gt) => gt,
        Input::Mesh(mesh) => to_generalized(&t_component(&mesh)),
    })
}

/// The raw text of a path or fixture, for `validate` (which wants to show
/// the validation report rather than fail on the first issue).
pub fn load_text(path: &str) -> Result<String, String> {
    if let Some(name) = path.strip_prefix("fixture:") {
        return fixtures::by_name(name)
            .map(|m| m.to_json())
            .ok_or_else(|| format!("unknown fixture `{name}`"));
    }
    fs::read_to_string(path).map_err(|e| format!("cannot read `{path}`: {e}"))
}
