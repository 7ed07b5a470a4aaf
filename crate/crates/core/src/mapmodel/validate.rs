use std::collections::{HashMap, HashSet};

use serde::Serialize;

use super::{ElementKind, Geometry, MapDocument, MapElement};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub severity: Severity,
    /// `None` for document-level problems such as a missing frame.
    pub element_id: Option<String>,
    pub message: String,
}

impl Violation {
    fn error(element_id: Option<&str>, message: impl Into<String>) -> Self {
        Self { severity: Severity::Error, element_id: element_id.map(str::to_owned), message: message.into() }
    }

    fn warning(element_id: &str, message: impl Into<String>) -> Self {
        Self { severity: Severity::Warning, element_id: Some(element_id.to_owned()), message: message.into() }
    }
}

/// Check every document and element invariant. An empty list means the
/// document is fully valid; duplicate names only produce warnings.
pub fn validate_map(doc: &MapDocument) -> Vec<Violation> {
    let mut out = Vec::new();

    let mut seen_ids = HashSet::new();
    for el in doc.elements() {
        if el.id.trim().is_empty() {
            out.push(Violation::error(None, format!("{} element with empty id", el.kind)));
        } else if !seen_ids.insert(el.id.as_str()) {
            out.push(Violation::error(Some(&el.id), "duplicate element id"));
        }
    }

    let frames: Vec<&MapElement> = doc.elements().iter().filter(|e| e.kind == ElementKind::Frame).collect();
    match frames.as_slice() {
        [] => out.push(Violation::error(None, "missing frame element")),
        [frame] => {
            if frame.geometry.bounding_box() != Some(doc.bounds()) {
                out.push(Violation::error(Some(&frame.id), "document bounds differ from the frame's bounding box"));
            }
        }
        [_, rest @ ..] => {
            for extra in rest {
                out.push(Violation::error(Some(&extra.id), "more than one frame element"));
            }
        }
    }

    for el in doc.elements() {
        check_element(el, &mut out);
        let outside = el.geometry.vertices().iter().any(|p| !doc.bounds().contains(p, doc.margin()));
        if outside {
            out.push(Violation::error(Some(&el.id), "geometry extends beyond the map bounds"));
        }
    }

    let mut by_name: HashMap<&str, Vec<&str>> = HashMap::new();
    for el in doc.elements().iter().filter(|e| !e.name.is_empty()) {
        by_name.entry(el.name.as_str()).or_default().push(&el.id);
    }
    for el in doc.elements() {
        if let Some(ids) = by_name.get(el.name.as_str()) {
            if ids.len() > 1 && ids[0] == el.id {
                out.push(Violation::warning(
                    ids[1],
                    format!("name {:?} is shared by {} elements: {}", el.name, ids.len(), ids.join(", ")),
                ));
            }
        }
    }
    out
}

fn check_element(el: &MapElement, out: &mut Vec<Violation>) {
    let id = Some(el.id.as_str());
    if el.kind.is_named() && el.name.trim().is_empty() {
        out.push(Violation::error(id, format!("{} without a name", el.kind)));
    }

    let vertices = el.geometry.vertices();
    if vertices.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
        out.push(Violation::error(id, "non-finite coordinate"));
        return;
    }
    if vertices.windows(2).any(|w| w[0] == w[1]) {
        out.push(Violation::error(id, "consecutive identical vertices"));
    }
    if let Geometry::Polygon { vertices } = &el.geometry {
        if vertices.len() > 1 && vertices.first() == vertices.last() {
            out.push(Violation::error(id, "polygon repeats its first vertex at the end"));
        }
    }

    let compatible = match (el.kind, &el.geometry) {
        (ElementKind::Poi, Geometry::Point { .. }) => true,
        (ElementKind::Street | ElementKind::River, Geometry::Polyline { vertices }) => vertices.len() >= 2,
        (ElementKind::River | ElementKind::Frame, Geometry::Polygon { vertices }) => vertices.len() >= 3,
        _ => false,
    };
    if !compatible {
        out.push(Violation::error(
            id,
            format!("{} cannot use {} geometry with {} vertices", el.kind, el.geometry.type_name(), vertices.len()),
        ));
    }
}
