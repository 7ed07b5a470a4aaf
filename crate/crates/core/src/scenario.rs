//! Generated exploration sessions: two other fingers stay on the map while
//! one finger double-taps every feature at its anchor.

use crate::engine::{EngineConfig, SessionHeader, SessionLog};
use crate::geometry::Calibration;
use crate::gestures::TouchEvent;
use crate::mapmodel::{MapDocument, MapPoint};

/// `map = 0.5 · device − 10` on both axes.
pub const SCENARIO_CALIBRATION: [f64; 6] = [0.5, 0.0, -10.0, 0.0, 0.5, -10.0];

const WINDOW_MS: u64 = 1000;
const FIRST_WINDOW_MS: u64 = 1000;
const TAPPER: u32 = 2;
/// Incidental touches stay at least this far from the feature being tapped.
const KEEP_AWAY: f64 = 40.0;

/// One contact lifetime of a non-tapping finger, in map units.
#[derive(Debug, Clone, Copy)]
struct Segment {
    contact_id: u32,
    start: u64,
    end: u64,
    at: MapPoint,
}

fn scenario_calibration() -> Calibration {
    Calibration::new(SCENARIO_CALIBRATION).expect("scenario calibration is invertible")
}

fn window_start(i: usize) -> u64 {
    FIRST_WINDOW_MS + i as u64 * WINDOW_MS
}

/// Two anchors far from `target` and from each other.
fn rest_spots(doc: &MapDocument, target: MapPoint) -> (MapPoint, MapPoint) {
    let mut anchors: Vec<MapPoint> = doc.features().map(|e| e.anchor()).collect();
    anchors.sort_by(|a, b| b.distance(&target).total_cmp(&a.distance(&target)));
    let first = anchors[0];
    let second = anchors
        .iter()
        .copied()
        .find(|p| p.distance(&first) > KEEP_AWAY && p.distance(&target) > KEEP_AWAY)
        .expect("map has spread-out features");
    (first, second)
}

fn target_at(doc: &MapDocument, t: u64) -> MapPoint {
    let n = doc.features().count();
    let i = (t.saturating_sub(FIRST_WINDOW_MS) / WINDOW_MS) as usize;
    doc.features().nth(i.min(n - 1)).expect("map has features").anchor()
}

fn build(doc: &MapDocument, segments: Vec<Segment>, mode_cfg: &EngineConfig) -> SessionLog {
    let cal = scenario_calibration();
    let dev = |p: MapPoint, t: u64, id: u32, phase| {
        let d = cal.to_device(p);
        (t, TouchEvent::new(t, id, phase, d.x, d.y))
    };
    let mut events: Vec<(u64, TouchEvent)> = Vec::new();

    for (i, el) in doc.features().enumerate() {
        let w = window_start(i);
        let p = el.anchor();
        use crate::gestures::Phase::*;
        events.push(dev(p, w, TAPPER, Down));
        events.push(dev(p, w + 90, TAPPER, Up));
        events.push(dev(p, w + 250, TAPPER, Down));
        events.push(dev(p, w + 340, TAPPER, Up));
    }

    for s in segments {
        use crate::gestures::Phase::*;
        events.push(dev(s.at, s.start, s.contact_id, Down));
        // exploring fingers wander a little around their spot
        let mut t = s.start + 100;
        let mut k = 0u64;
        while t + 50 < s.end {
            let dx = ((k * 7) % 21) as f64 - 10.0;
            let dy = ((k * 11) % 13) as f64 - 6.0;
            events.push(dev(MapPoint::new(s.at.x + dx, s.at.y + dy), t, s.contact_id, Move));
            t += 100;
            k += 1;
        }
        events.push(dev(s.at, s.end, s.contact_id, Up));
    }

    // stable: equal times keep insertion order
    events.sort_by_key(|(t, _)| *t);
    let header = SessionHeader::new(doc.source_name(), cal, mode_cfg);
    SessionLog::new(header, events.into_iter().map(|(_, e)| e).collect())
}

/// Resting fingers with the given lifetime (5000 ms in the reference
/// scenario), lifted and put down again until the tapping is over.
pub fn resting_scenario(doc: &MapDocument, lifetime_ms: u64) -> SessionLog {
    let end = window_start(doc.features().count());
    let mut segments = Vec::new();
    for (contact_id, offset) in [(0u32, 0u64), (1, 20)] {
        let mut start = offset;
        while start < end {
            let (a, b) = rest_spots(doc, target_at(doc, start));
            segments.push(Segment {
                contact_id,
                start,
                end: start + lifetime_ms,
                at: if contact_id == 0 { a } else { b },
            });
            start += lifetime_ms + 50;
        }
    }
    build(doc, segments, &EngineConfig::default())
}

/// The same double taps, but the other two fingers only brush the map once
/// per feature for `lifetime_ms` (150 ms in the reference variant).
pub fn incidental_scenario(doc: &MapDocument, lifetime_ms: u64) -> SessionLog {
    let mut segments = Vec::new();
    for (i, el) in doc.features().enumerate() {
        let w = window_start(i);
        let (a, b) = rest_spots(doc, el.anchor());
        segments.push(Segment { contact_id: 0, start: w + 450, end: w + 450 + lifetime_ms, at: a });
        segments.push(Segment { contact_id: 1, start: w + 500, end: w + 500 + lifetime_ms, at: b });
    }
    build(doc, segments, &EngineConfig::default())
}

/// `(element_id, name)` of every feature, in tapping order.
pub fn expected_announcements(doc: &MapDocument) -> Vec<(String, String)> {
    doc.features().map(|e| (e.id.clone(), e.name.clone())).collect()
}
