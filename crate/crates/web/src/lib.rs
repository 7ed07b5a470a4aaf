//! Browser bindings for the static demo page in `www/`.
//!
//! Every export has a plain Rust counterpart returning `Result<_, String>`,
//! so the logic is testable without a JavaScript host.

use std::sync::Arc;

use audiotact::engine::{EngineConfig, InteractionMode, Session};
use audiotact::geometry::{hit_test, Calibration, HitTolerances};
use audiotact::gestures::{Phase, TouchEvent};
use audiotact::mapmodel::{parse_map, MapDocument, MapPoint};
use audiotact::sus::{adjective, score, SusResponse};
use serde_json::json;
use wasm_bindgen::prelude::*;

fn js(e: String) -> JsError {
    JsError::new(&e)
}

/// A live exploration session on one map, driven by pointer events.
#[wasm_bindgen]
pub struct Explorer {
    doc: Arc<MapDocument>,
    session: Session,
}

impl Explorer {
    pub fn open(svg: &str, mode: &str) -> Result<Explorer, String> {
        let mode: InteractionMode = mode.parse()?;
        let doc = Arc::new(parse_map(svg.as_bytes()).map_err(|e| e.to_string())?);
        let session = Session::new(doc.clone(), Calibration::IDENTITY, EngineConfig::default().with_mode(mode));
        Ok(Explorer { doc, session })
    }

    pub fn try_touch(&mut self, t: f64, id: u32, phase: &str, x: f64, y: f64) -> Result<String, String> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(format!("bad timestamp {t}"));
        }
        let phase: Phase = phase.parse()?;
        let step = self.session.feed(&TouchEvent::new(t as u64, id, phase, x, y)).map_err(|e| e.to_string())?;
        Ok(json!({ "gestures": step.gestures, "announcements": step.announcements }).to_string())
    }

    pub fn try_hit(&self, x: f64, y: f64, street: f64, poi: f64, river: f64) -> Result<String, String> {
        let tol = HitTolerances::new(street, poi, river).map_err(|e| e.to_string())?;
        let hit = hit_test(&self.doc, MapPoint::new(x, y), &tol);
        let named = hit.map(|h| {
            let name = self.doc.element(&h.element_id).map(|e| e.name.clone());
            json!({ "element_id": h.element_id, "kind": h.kind, "name": name, "distance": h.distance })
        });
        Ok(serde_json::to_string(&named).expect("hit serialises"))
    }
}

#[wasm_bindgen]
impl Explorer {
    /// `mode` is `double_tap` or `single_tap`.
    #[wasm_bindgen(constructor)]
    pub fn new(svg: &str, mode: &str) -> Result<Explorer, JsError> {
        Explorer::open(svg, mode).map_err(js)
    }

    /// `{bounds, elements}` for drawing.
    #[wasm_bindgen(js_name = mapJson)]
    pub fn map_json(&self) -> String {
        let b = self.doc.bounds();
        json!({ "name": self.doc.source_name(), "bounds": b.as_array(), "elements": self.doc.elements() }).to_string()
    }

    /// Feed one pointer sample; returns `{gestures, announcements}`.
    pub fn touch(&mut self, t: f64, id: u32, phase: &str, x: f64, y: f64) -> Result<String, JsError> {
        self.try_touch(t, id, phase, x, y).map_err(js)
    }

    /// Resolve a pending tap once the double-tap window has passed.
    pub fn flush(&mut self) -> String {
        let step = self.session.finish();
        json!({ "gestures": step.gestures, "announcements": step.announcements }).to_string()
    }

    /// What a touch at (x, y) would select with the given tolerances, or `null`.
    pub fn hit(&self, x: f64, y: f64, street: f64, poi: f64, river: f64) -> Result<String, JsError> {
        self.try_hit(x, y, street, poi, river).map_err(js)
    }
}

pub fn sus_json(answers: &[i32]) -> Result<String, String> {
    let items: Vec<i64> = answers.iter().map(|&a| i64::from(a)).collect();
    let resp = SusResponse::new(&items).map_err(|e| e.to_string())?;
    let s = score(&resp);
    Ok(json!({ "score": s.value(), "adjective": adjective(s) }).to_string())
}

/// The bundled sample map, so the page needs no second download.
#[wasm_bindgen(js_name = fixtureSvg)]
pub fn fixture_svg() -> String {
    audiotact::fixtures::FIXTURE_MAP_SVG.to_owned()
}

/// Score ten answers (1..=5): `{score, adjective}`.
#[wasm_bindgen(js_name = susScore)]
pub fn sus_score(answers: &[i32]) -> Result<String, JsError> {
    sus_json(answers).map_err(js)
}

#[cfg(test)]
mod tests {
    use super::*;
    use audiotact::fixtures::FIXTURE_MAP_SVG;
    use serde_json::Value;

    fn v(s: &str) -> Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn double_tap_announces() {
        let mut ex = Explorer::open(FIXTURE_MAP_SVG, "double_tap").unwrap();
        assert_eq!(v(&ex.map_json())["elements"].as_array().unwrap().len(), 14);
        for (t, phase) in [(0.0, "down"), (80.0, "up"), (200.0, "down")] {
            let out = v(&ex.try_touch(t, 0, phase, 250.0, 40.0).unwrap());
            assert!(out["announcements"].as_array().unwrap().is_empty());
        }
        let out = v(&ex.try_touch(260.0, 0, "up", 250.0, 40.0).unwrap());
        assert_eq!(out["announcements"][0]["text"], "gare");
        assert_eq!(out["gestures"][0]["kind"], "double_tap");
        assert!(ex.try_touch(300.0, 0, "hover", 1.0, 1.0).is_err());
        assert!(ex.try_touch(-1.0, 0, "down", 1.0, 1.0).is_err());
    }

    #[test]
    fn single_tap_mode_and_flush() {
        let mut ex = Explorer::open(FIXTURE_MAP_SVG, "single_tap").unwrap();
        ex.try_touch(0.0, 3, "down", 150.0, 90.0).unwrap();
        let out = v(&ex.try_touch(50.0, 3, "up", 150.0, 90.0).unwrap());
        assert_eq!(out["announcements"][0]["element_id"], "poi-musee");
        assert_eq!(v(&ex.flush())["gestures"], json!([]));
        assert!(Explorer::open(FIXTURE_MAP_SVG, "triple_tap").is_err());
        assert!(Explorer::open("<svg/>", "double_tap").is_err());
    }

    #[test]
    fn hit_zones_follow_tolerances() {
        let ex = Explorer::open(FIXTURE_MAP_SVG, "double_tap").unwrap();
        assert_eq!(v(&ex.try_hit(150.0, 75.0, 5.0, 8.0, 5.0).unwrap()), Value::Null);
        let wide = v(&ex.try_hit(150.0, 75.0, 20.0, 20.0, 20.0).unwrap());
        assert_eq!(wide["element_id"], "poi-musee");
        assert_eq!(wide["name"], "musée");
        assert!(ex.try_hit(0.0, 0.0, 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn sus_calculator() {
        assert_eq!(v(&sus_json(&[3; 10]).unwrap()), json!({"score": 50.0, "adjective": null}));
        assert_eq!(v(&sus_json(&[5, 1, 5, 1, 5, 1, 5, 1, 5, 1]).unwrap())["adjective"], "excellent");
        assert!(sus_json(&[3; 9]).is_err());
        assert!(sus_json(&[0; 10]).is_err());
    }
}
