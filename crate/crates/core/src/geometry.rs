//! Device→map calibration and tolerance-based hit testing.

use serde::{Deserialize, Serialize};

use crate::mapmodel::{ElementKind, Geometry, MapDocument, MapPoint};

/// Distances closer than this are treated as equal when choosing between
/// candidate elements.
pub const TIE_EPSILON: f64 = 1e-9;

const MIN_DETERMINANT: f64 = 1e-9;

/// A position in touch-device coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DevicePoint {
    pub x: f64,
    pub y: f64,
}

impl DevicePoint {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("calibration anchors are collinear or duplicated")]
    DegenerateCalibration,
    #[error("hit tolerance `{0}` must be strictly positive")]
    InvalidTolerance(&'static str),
}

/// Affine registration from device to map coordinates:
/// `map_x = a·x + b·y + c`, `map_y = d·x + e·y + f`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub f: f64,
}

impl Default for Calibration {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl Calibration {
    pub const IDENTITY: Calibration = Calibration { a: 1.0, b: 0.0, c: 0.0, d: 0.0, e: 1.0, f: 0.0 };

    /// Checked constructor; the linear part must be invertible.
    pub fn new(coefficients: [f64; 6]) -> Result<Self, GeometryError> {
        let [a, b, c, d, e, f] = coefficients;
        let cal = Calibration { a, b, c, d, e, f };
        if coefficients.iter().all(|v| v.is_finite()) && cal.determinant().abs() > MIN_DETERMINANT {
            Ok(cal)
        } else {
            Err(GeometryError::DegenerateCalibration)
        }
    }

    pub fn coefficients(&self) -> [f64; 6] {
        [self.a, self.b, self.c, self.d, self.e, self.f]
    }

    pub fn determinant(&self) -> f64 {
        self.a * self.e - self.b * self.d
    }

    pub fn to_map(&self, p: DevicePoint) -> MapPoint {
        MapPoint::new(self.a * p.x + self.b * p.y + self.c, self.d * p.x + self.e * p.y + self.f)
    }

    /// Map→device, the inverse affine.
    pub fn to_device(&self, p: MapPoint) -> DevicePoint {
        let det = self.determinant();
        let (x, y) = (p.x - self.c, p.y - self.f);
        DevicePoint::new((self.e * x - self.b * y) / det, (self.a * y - self.d * x) / det)
    }
}

/// Solve the affine that sends each device anchor exactly onto its map anchor.
pub fn fit_calibration(pairs: &[(DevicePoint, MapPoint); 3]) -> Result<Calibration, GeometryError> {
    let [(p0, _), (p1, _), (p2, _)] = pairs;
    // Cramer's rule on [x y 1]·[a b c]ᵀ = map_x (and likewise for map_y)
    let det = p0.x * (p1.y - p2.y) - p0.y * (p1.x - p2.x) + (p1.x * p2.y - p2.x * p1.y);
    if !det.is_finite() || det.abs() <= MIN_DETERMINANT {
        return Err(GeometryError::DegenerateCalibration);
    }
    let solve = |v0: f64, v1: f64, v2: f64| {
        let a = (v0 * (p1.y - p2.y) - p0.y * (v1 - v2) + (v1 * p2.y - v2 * p1.y)) / det;
        let b = (p0.x * (v1 - v2) - v0 * (p1.x - p2.x) + (p1.x * v2 - p2.x * v1)) / det;
        let c =
            (p0.x * (p1.y * v2 - p2.y * v1) - p0.y * (p1.x * v2 - p2.x * v1) + v0 * (p1.x * p2.y - p2.x * p1.y)) / det;
        (a, b, c)
    };
    let (a, b, c) = solve(pairs[0].1.x, pairs[1].1.x, pairs[2].1.x);
    let (d, e, f) = solve(pairs[0].1.y, pairs[1].1.y, pairs[2].1.y);
    Calibration::new([a, b, c, d, e, f])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HitTolerances {
    pub street_halfwidth: f64,
    pub poi_radius: f64,
    pub river_halfwidth: f64,
}

impl Default for HitTolerances {
    fn default() -> Self {
        Self { street_halfwidth: 5.0, poi_radius: 8.0, river_halfwidth: 5.0 }
    }
}

impl HitTolerances {
    pub fn new(street_halfwidth: f64, poi_radius: f64, river_halfwidth: f64) -> Result<Self, GeometryError> {
        let tol = Self { street_halfwidth, poi_radius, river_halfwidth };
        tol.validate()?;
        Ok(tol)
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        for (name, v) in [
            ("street_halfwidth", self.street_halfwidth),
            ("poi_radius", self.poi_radius),
            ("river_halfwidth", self.river_halfwidth),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(GeometryError::InvalidTolerance(name));
            }
        }
        Ok(())
    }

    /// Selection radius for a kind; the frame is never selectable.
    pub fn for_kind(&self, kind: ElementKind) -> Option<f64> {
        match kind {
            ElementKind::Street => Some(self.street_halfwidth),
            ElementKind::Poi => Some(self.poi_radius),
            ElementKind::River => Some(self.river_halfwidth),
            ElementKind::Frame => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HitResult {
    pub element_id: String,
    pub kind: ElementKind,
    /// Zero when the point lies inside an area.
    pub distance: f64,
}

/// Rank used to break distance ties: lower wins.
pub fn kind_priority(kind: ElementKind) -> u8 {
    match kind {
        ElementKind::Poi => 0,
        ElementKind::Street => 1,
        ElementKind::River => 2,
        ElementKind::Frame => 3,
    }
}

pub fn point_segment_distance(p: MapPoint, a: MapPoint, b: MapPoint) -> f64 {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return p.distance(&a);
    }
    let t = (((p.x - a.x) * dx + (p.y - a.y) * dy) / len2).clamp(0.0, 1.0);
    p.distance(&MapPoint::new(a.x + t * dx, a.y + t * dy))
}

/// Even-odd containment test against a closed ring.
pub fn polygon_contains(vertices: &[MapPoint], p: MapPoint) -> bool {
    let n = vertices.len();
    let mut inside = false;
    for i in 0..n {
        let (a, b) = (vertices[i], vertices[(i + 1) % n]);
        if (a.y > p.y) != (b.y > p.y) {
            let x_cross = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if p.x < x_cross {
                inside = !inside;
            }
        }
    }
    inside
}

/// Distance from a point to a geometry: Euclidean for points, nearest segment
/// for chains, and zero inside polygons.
pub fn distance_to_geometry(p: MapPoint, g: &Geometry) -> f64 {
    match g {
        Geometry::Point { x, y } => p.distance(&MapPoint::new(*x, *y)),
        Geometry::Polygon { vertices } if polygon_contains(vertices, p) => 0.0,
        _ => g.segments().into_iter().map(|(a, b)| point_segment_distance(p, a, b)).fold(f64::INFINITY, f64::min),
    }
}

/// Select the element the point designates, if any.
///
/// Every non-frame element within its kind's tolerance is a candidate. The
/// nearest wins; distances within [`TIE_EPSILON`] of the minimum tie and are
/// resolved by kind (poi, then street, then river) and finally by id.
pub fn hit_test(doc: &MapDocument, p: MapPoint, tol: &HitTolerances) -> Option<HitResult> {
    let candidates: Vec<(f64, &crate::mapmodel::MapElement)> = doc
        .elements()
        .iter()
        .filter_map(|el| {
            let limit = tol.for_kind(el.kind)?;
            let d = distance_to_geometry(p, &el.geometry);
            (d <= limit).then_some((d, el))
        })
        .collect();
    let nearest = candidates.iter().map(|(d, _)| *d).fold(f64::INFINITY, f64::min);
    candidates
        .into_iter()
        .filter(|(d, _)| *d <= nearest + TIE_EPSILON)
        .min_by(|(_, x), (_, y)| kind_priority(x.kind).cmp(&kind_priority(y.kind)).then_with(|| x.id.cmp(&y.id)))
        .map(|(distance, el)| HitResult { element_id: el.id.clone(), kind: el.kind, distance })
}
