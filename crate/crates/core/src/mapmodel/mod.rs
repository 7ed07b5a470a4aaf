//! Annotated vector map: the in-memory document parsed from the SVG subset.
//!
//! A map is a flat, ordered list of named elements (streets, points of
//! interest, a river and exactly one frame). Geometry is kept in the SVG user
//! units of the source file.

mod parse;
mod validate;
mod write;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use parse::{parse_map, parse_map_with, ParseOptions};
pub use validate::{validate_map, Severity, Violation};

/// A position in map units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapPoint {
    pub x: f64,
    pub y: f64,
}

impl MapPoint {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &MapPoint) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn midpoint(&self, other: &MapPoint) -> MapPoint {
        MapPoint::new((self.x + other.x) / 2.0, (self.y + other.y) / 2.0)
    }
}

impl From<(f64, f64)> for MapPoint {
    fn from((x, y): (f64, f64)) -> Self {
        Self { x, y }
    }
}

/// Axis-aligned rectangle in map units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub min_x: f64,
    pub min_y: f64,
    pub max_x: f64,
    pub max_y: f64,
}

impl Rect {
    /// Bounding box of a non-empty point set.
    pub fn enclosing<'a>(points: impl IntoIterator<Item = &'a MapPoint>) -> Option<Rect> {
        points.into_iter().fold(None, |acc, p| {
            Some(match acc {
                None => Rect { min_x: p.x, min_y: p.y, max_x: p.x, max_y: p.y },
                Some(r) => Rect {
                    min_x: r.min_x.min(p.x),
                    min_y: r.min_y.min(p.y),
                    max_x: r.max_x.max(p.x),
                    max_y: r.max_y.max(p.y),
                },
            })
        })
    }

    pub fn width(&self) -> f64 {
        self.max_x - self.min_x
    }

    pub fn height(&self) -> f64 {
        self.max_y - self.min_y
    }

    pub fn contains(&self, p: &MapPoint, margin: f64) -> bool {
        p.x >= self.min_x - margin
            && p.x <= self.max_x + margin
            && p.y >= self.min_y - margin
            && p.y <= self.max_y + margin
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.min_x, self.min_y, self.max_x, self.max_y]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementKind {
    Street,
    Poi,
    River,
    Frame,
}

impl ElementKind {
    pub const ALL: [ElementKind; 4] = [ElementKind::Street, ElementKind::Poi, ElementKind::River, ElementKind::Frame];

    pub fn as_str(&self) -> &'static str {
        match self {
            ElementKind::Street => "street",
            ElementKind::Poi => "poi",
            ElementKind::River => "river",
            ElementKind::Frame => "frame",
        }
    }

    pub fn from_class_token(token: &str) -> Option<Self> {
        ElementKind::ALL.into_iter().find(|k| k.as_str() == token)
    }

    /// Whether the element must carry a non-empty name.
    pub fn is_named(&self) -> bool {
        !matches!(self, ElementKind::Frame)
    }
}

impl fmt::Display for ElementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Element geometry. Polygons are implicitly closed: the first vertex is not
/// repeated at the end.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Geometry {
    Point { x: f64, y: f64 },
    Polyline { vertices: Vec<MapPoint> },
    Polygon { vertices: Vec<MapPoint> },
}

impl Geometry {
    pub fn point(x: f64, y: f64) -> Self {
        Geometry::Point { x, y }
    }

    pub fn vertices(&self) -> Vec<MapPoint> {
        match self {
            Geometry::Point { x, y } => vec![MapPoint::new(*x, *y)],
            Geometry::Polyline { vertices } | Geometry::Polygon { vertices } => vertices.clone(),
        }
    }

    /// Segments of the chain, including the closing edge of a polygon.
    pub fn segments(&self) -> Vec<(MapPoint, MapPoint)> {
        match self {
            Geometry::Point { .. } => Vec::new(),
            Geometry::Polyline { vertices } => vertices.windows(2).map(|w| (w[0], w[1])).collect(),
            Geometry::Polygon { vertices } => {
                let n = vertices.len();
                (0..n).map(|i| (vertices[i], vertices[(i + 1) % n])).collect()
            }
        }
    }

    pub fn bounding_box(&self) -> Option<Rect> {
        Rect::enclosing(&self.vertices())
    }

    pub fn type_name(&self) -> &'static str {
        match self {
            Geometry::Point { .. } => "point",
            Geometry::Polyline { .. } => "polyline",
            Geometry::Polygon { .. } => "polygon",
        }
    }

    /// Representative point: the point itself, or the point at half the arc
    /// length of the chain (boundary for polygons).
    pub fn anchor(&self) -> MapPoint {
        if let Geometry::Point { x, y } = self {
            return MapPoint::new(*x, *y);
        }
        let segments = self.segments();
        let total: f64 = segments.iter().map(|(a, b)| a.distance(b)).sum();
        let mut remaining = total / 2.0;
        for (a, b) in &segments {
            let len = a.distance(b);
            if remaining <= len && len > 0.0 {
                let f = remaining / len;
                return MapPoint::new(a.x + f * (b.x - a.x), a.y + f * (b.y - a.y));
            }
            remaining -= len;
        }
        // empty or zero-length chain
        self.vertices().first().copied().unwrap_or(MapPoint::new(f64::NAN, f64::NAN))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapElement {
    pub id: String,
    pub kind: ElementKind,
    pub name: String,
    pub description: Option<String>,
    pub geometry: Geometry,
    /// Drawn radius of a circle symbol. Not used for hit testing.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symbol_radius: Option<f64>,
}

impl MapElement {
    pub fn anchor(&self) -> MapPoint {
        self.geometry.anchor()
    }
}

/// Immutable parsed map. Share it behind an `Arc` between sessions.
#[derive(Debug, Clone, PartialEq)]
pub struct MapDocument {
    source_name: String,
    bounds: Rect,
    elements: Vec<MapElement>,
    margin: f64,
}

impl MapDocument {
    /// Assemble a document without checking any invariant. Use
    /// [`validate_map`] to inspect the result; [`parse_map`] only ever returns
    /// documents without error-severity violations.
    pub fn from_parts(source_name: impl Into<String>, bounds: Rect, elements: Vec<MapElement>) -> Self {
        Self { source_name: source_name.into(), bounds, elements, margin: 0.0 }
    }

    pub(crate) fn with_margin(mut self, margin: f64) -> Self {
        self.margin = margin;
        self
    }

    pub fn source_name(&self) -> &str {
        &self.source_name
    }

    pub fn bounds(&self) -> Rect {
        self.bounds
    }

    pub fn elements(&self) -> &[MapElement] {
        &self.elements
    }

    /// Allowed overshoot of element geometry beyond `bounds`.
    pub fn margin(&self) -> f64 {
        self.margin
    }

    pub fn element(&self, id: &str) -> Option<&MapElement> {
        self.elements.iter().find(|e| e.id == id)
    }

    pub fn frame(&self) -> Option<&MapElement> {
        self.elements.iter().find(|e| e.kind == ElementKind::Frame)
    }

    pub fn count(&self, kind: ElementKind) -> usize {
        self.elements.iter().filter(|e| e.kind == kind).count()
    }

    /// Elements that can be announced, i.e. everything except the frame.
    pub fn features(&self) -> impl Iterator<Item = &MapElement> {
        self.elements.iter().filter(|e| e.kind != ElementKind::Frame)
    }

    /// One-line composition summary, e.g. `13 elements (6 street, 6 poi, 1 river)`.
    /// The frame is not counted.
    pub fn summary(&self) -> String {
        let parts: Vec<String> = [ElementKind::Street, ElementKind::Poi, ElementKind::River]
            .iter()
            .map(|k| format!("{} {}", self.count(*k), k))
            .collect();
        format!("{} elements ({})", self.features().count(), parts.join(", "))
    }
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum MapError {
    #[error("malformed XML at line {line}: {message}")]
    Parse { line: u32, message: String },
    #[error("invalid map structure{}: {message}", element_suffix(.element))]
    Structure { element: Option<String>, message: String },
    #[error("unsupported geometry on element `{element}`: {message}")]
    UnsupportedGeometry { element: String, message: String },
}

fn element_suffix(element: &Option<String>) -> String {
    element.as_ref().map(|e| format!(" (element `{e}`)")).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn anchor_of_polyline_is_half_arc_length() {
        let g = Geometry::Polyline {
            vertices: vec![MapPoint::new(0.0, 0.0), MapPoint::new(10.0, 0.0), MapPoint::new(10.0, 30.0)],
        };
        assert_eq!(g.anchor(), MapPoint::new(10.0, 10.0));
    }

    #[test]
    fn polygon_segments_close_the_ring() {
        let g = Geometry::Polygon {
            vertices: vec![MapPoint::new(0.0, 0.0), MapPoint::new(4.0, 0.0), MapPoint::new(0.0, 3.0)],
        };
        let segs = g.segments();
        assert_eq!(segs.len(), 3);
        assert_eq!(segs[2], (MapPoint::new(0.0, 3.0), MapPoint::new(0.0, 0.0)));
        // perimeter 12, half-way is 2 units along the hypotenuse
        let a = g.anchor();
        assert!((a.x - 2.4).abs() < 1e-12 && (a.y - 1.2).abs() < 1e-12);
    }

    #[test]
    fn geometry_serializes_with_type_tag() {
        let json = serde_json::to_value(Geometry::point(1.0, 2.0)).unwrap();
        assert_eq!(json, serde_json::json!({"type": "point", "x": 1.0, "y": 2.0}));
    }
}
