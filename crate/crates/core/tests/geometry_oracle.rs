use audiotact::fixtures::fixture_map;
use audiotact::geometry::{
    distance_to_geometry, fit_calibration, hit_test, Calibration, DevicePoint, HitTolerances, TIE_EPSILON,
};
use audiotact::mapmodel::{ElementKind, Geometry, MapDocument, MapElement, MapPoint, Rect};
use proptest::collection::vec;
use proptest::prelude::*;

/// Distance to segment `a`-`b` found by sampling, then narrowing around the
/// best sample (the distance along a segment is convex).
fn sampled_segment_distance(p: MapPoint, a: MapPoint, b: MapPoint) -> f64 {
    let at = |t: f64| MapPoint::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)).distance(&p);
    const N: usize = 2000;
    let best = (0..=N).min_by(|i, j| at(*i as f64 / N as f64).total_cmp(&at(*j as f64 / N as f64))).unwrap();
    let (mut lo, mut hi) = (best.saturating_sub(1) as f64 / N as f64, (best + 1).min(N) as f64 / N as f64);
    for _ in 0..200 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if at(m1) <= at(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    at(lo).min(at(hi)).min(at(best as f64 / N as f64))
}

fn ray_parity(ring: &[MapPoint], p: MapPoint) -> bool {
    // cast to the left instead of the right
    let mut inside = false;
    for i in 0..ring.len() {
        let (a, b) = (ring[i], ring[(i + 1) % ring.len()]);
        if (a.y <= p.y) != (b.y <= p.y) {
            let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if x < p.x {
                inside = !inside;
            }
        }
    }
    inside
}

fn oracle_distance(p: MapPoint, g: &Geometry) -> f64 {
    match g {
        Geometry::Point { x, y } => (p.x - x).hypot(p.y - y),
        Geometry::Polyline { vertices } => {
            vertices.windows(2).map(|w| sampled_segment_distance(p, w[0], w[1])).fold(f64::INFINITY, f64::min)
        }
        Geometry::Polygon { vertices } => {
            if ray_parity(vertices, p) {
                return 0.0;
            }
            let n = vertices.len();
            (0..n)
                .map(|i| sampled_segment_distance(p, vertices[i], vertices[(i + 1) % n]))
                .fold(f64::INFINITY, f64::min)
        }
    }
}

/// Scan every element, keep those within tolerance, sort by (distance
/// bucket, kind rank, id).
fn brute_force(doc: &MapDocument, p: MapPoint, tol: &HitTolerances) -> Option<String> {
    let rank = |k: ElementKind| ["poi", "street", "river"].iter().position(|s| *s == k.as_str());
    let mut hits: Vec<(f64, usize, &str)> = Vec::new();
    for el in doc.elements() {
        let Some(r) = rank(el.kind) else { continue };
        let limit = match el.kind {
            ElementKind::Poi => tol.poi_radius,
            ElementKind::Street => tol.street_halfwidth,
            _ => tol.river_halfwidth,
        };
        let d = distance_to_geometry(p, &el.geometry);
        if d <= limit {
            hits.push((d, r, &el.id));
        }
    }
    let min = hits.iter().map(|h| h.0).fold(f64::INFINITY, f64::min);
    hits.retain(|h| h.0 <= min + TIE_EPSILON);
    hits.sort_by(|a, b| a.1.cmp(&b.1).then(a.2.cmp(b.2)));
    hits.first().map(|h| h.2.to_owned())
}

fn translated(doc: &MapDocument, dx: f64, dy: f64) -> MapDocument {
    let mv = |v: &Vec<MapPoint>| v.iter().map(|p| MapPoint::new(p.x + dx, p.y + dy)).collect();
    let elements: Vec<MapElement> = doc
        .elements()
        .iter()
        .map(|el| MapElement {
            geometry: match &el.geometry {
                Geometry::Point { x, y } => Geometry::Point { x: x + dx, y: y + dy },
                Geometry::Polyline { vertices } => Geometry::Polyline { vertices: mv(vertices) },
                Geometry::Polygon { vertices } => Geometry::Polygon { vertices: mv(vertices) },
            },
            ..el.clone()
        })
        .collect();
    let b = doc.bounds();
    let bounds = Rect { min_x: b.min_x + dx, min_y: b.min_y + dy, max_x: b.max_x + dx, max_y: b.max_y + dy };
    MapDocument::from_parts(doc.source_name(), bounds, elements)
}

fn point_in_fixture() -> impl Strategy<Value = MapPoint> {
    (0.0..400.0f64, 0.0..300.0f64).prop_map(|(x, y)| MapPoint::new(x, y))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn hit_test_matches_brute_force(p in point_in_fixture()) {
        let doc = fixture_map();
        let tol = HitTolerances::default();
        prop_assert_eq!(hit_test(&doc, p, &tol).map(|h| h.element_id), brute_force(&doc, p, &tol));
    }

    #[test]
    fn hit_test_matches_brute_force_with_wide_tolerances(p in point_in_fixture(), t in 5.0..60.0f64) {
        let doc = fixture_map();
        let tol = HitTolerances::new(t, t * 1.3, t * 0.7).unwrap();
        prop_assert_eq!(hit_test(&doc, p, &tol).map(|h| h.element_id), brute_force(&doc, p, &tol));
    }

    #[test]
    fn hit_distance_respects_tolerance(p in point_in_fixture(), t in 1.0..50.0f64) {
        let doc = fixture_map();
        let tol = HitTolerances::new(t, t, t).unwrap();
        if let Some(h) = hit_test(&doc, p, &tol) {
            prop_assert!(h.distance <= t);
            prop_assert!(h.kind != ElementKind::Frame);
        }
    }

    #[test]
    fn hit_test_is_translation_invariant(p in point_in_fixture(), dx in -1e3..1e3f64, dy in -1e3..1e3f64) {
        let doc = fixture_map();
        let tol = HitTolerances::default();
        let moved = translated(&doc, dx, dy);
        let a = hit_test(&doc, p, &tol);
        let b = hit_test(&moved, MapPoint::new(p.x + dx, p.y + dy), &tol);
        prop_assert_eq!(a.as_ref().map(|h| &h.element_id), b.as_ref().map(|h| &h.element_id));
        if let (Some(a), Some(b)) = (a, b) {
            prop_assert!((a.distance - b.distance).abs() < 1e-9);
        }
    }

    #[test]
    fn chain_distance_matches_dense_sampling(
        pts in vec((-50.0..50.0f64, -50.0..50.0f64), 2..6),
        p in (-80.0..80.0f64, -80.0..80.0f64),
    ) {
        let vertices: Vec<MapPoint> = pts.into_iter().map(MapPoint::from).collect();
        let p = MapPoint::from(p);
        let line = Geometry::Polyline { vertices: vertices.clone() };
        prop_assert!((distance_to_geometry(p, &line) - oracle_distance(p, &line)).abs() < 1e-6);
        if vertices.len() >= 3 {
            let poly = Geometry::Polygon { vertices };
            prop_assert!((distance_to_geometry(p, &poly) - oracle_distance(p, &poly)).abs() < 1e-6);
        }
    }

    #[test]
    fn fitted_calibration_reproduces_its_anchors(
        dev in vec((-500.0..500.0f64, -500.0..500.0f64), 3),
        coeffs in (0.1..3.0f64, -1.0..1.0f64, -100.0..100.0f64, -1.0..1.0f64, 0.1..3.0f64, -100.0..100.0f64),
    ) {
        let truth = Calibration::new([coeffs.0, coeffs.1, coeffs.2, coeffs.3, coeffs.4, coeffs.5]);
        prop_assume!(truth.is_ok());
        let truth = truth.unwrap();
        let d: Vec<DevicePoint> = dev.iter().map(|(x, y)| DevicePoint::new(*x, *y)).collect();
        let area = (d[1].x - d[0].x) * (d[2].y - d[0].y) - (d[2].x - d[0].x) * (d[1].y - d[0].y);
        prop_assume!(area.abs() > 1.0);
        let pairs = [(d[0], truth.to_map(d[0])), (d[1], truth.to_map(d[1])), (d[2], truth.to_map(d[2]))];
        let cal = fit_calibration(&pairs).unwrap();
        for (dp, mp) in pairs {
            prop_assert!(cal.to_map(dp).distance(&mp) <= 1e-6);
            let back = cal.to_device(mp);
            prop_assert!((back.x - dp.x).hypot(back.y - dp.y) <= 1e-6);
        }
    }
}

#[test]
fn anchors_hit_their_own_element() {
    let doc = fixture_map();
    for el in doc.features() {
        let h = hit_test(&doc, el.anchor(), &HitTolerances::default()).unwrap();
        assert_eq!(h.element_id, el.id);
        assert!(h.distance < 1e-9);
    }
}

#[test]
fn collinear_anchors_are_degenerate() {
    let pairs = [
        (DevicePoint::new(0.0, 0.0), MapPoint::new(0.0, 0.0)),
        (DevicePoint::new(1.0, 1.0), MapPoint::new(1.0, 0.0)),
        (DevicePoint::new(2.0, 2.0), MapPoint::new(0.0, 1.0)),
    ];
    assert!(fit_calibration(&pairs).is_err());
}

#[test]
fn equidistant_poi_and_street_prefers_the_poi() {
    // musée at (150, 90); rue des Lilas runs along y = 60
    let doc = fixture_map();
    let p = MapPoint::new(150.0, 75.0);
    let musee = distance_to_geometry(p, &doc.element("poi-musee").unwrap().geometry);
    let lilas = distance_to_geometry(p, &doc.element("street-lilas").unwrap().geometry);
    assert!((musee - lilas).abs() <= 1e-9);
    let tol = HitTolerances::new(20.0, 20.0, 20.0).unwrap();
    assert_eq!(hit_test(&doc, p, &tol).unwrap().element_id, "poi-musee");
    assert_eq!(brute_force(&doc, p, &tol).unwrap(), "poi-musee");
}
