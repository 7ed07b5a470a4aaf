//! The engine wired as bus stages:
//!
//! | subject          | published by       | payload        |
//! |------------------|--------------------|----------------|
//! | `touch.event`    | input              | `TouchEvent` (device units) |
//! | `touch.flush`    | input              | null           |
//! | `gesture.<kind>` | recognizer stage   | `Gesture` (map units) |
//! | `announce.text`  | announcer stage    | `Announcement` |
//! | `engine.error`   | recognizer stage   | `{"message": ..}` |

use std::sync::{Arc, Mutex, PoisonError};

use serde_json::json;

use crate::geometry::{Calibration, DevicePoint};
use crate::gestures::{Gesture, Recognizer, StreamError, TouchEvent};
use crate::mapmodel::MapDocument;

use super::bus::{Bus, BusMessage, Subscription};
use super::log::SessionLog;
use super::replay::{replay_setup, ReplayError};
use super::{handle_gesture, Announcement, EngineConfig};

pub const TOUCH_EVENT: &str = "touch.event";
pub const TOUCH_FLUSH: &str = "touch.flush";
pub const ANNOUNCE_TEXT: &str = "announce.text";
pub const ENGINE_ERROR: &str = "engine.error";

fn gesture_subject(g: &Gesture) -> String {
    format!("gesture.{}", g.kind)
}

type Shared<T> = Arc<Mutex<T>>;

fn take<T: Default>(slot: &Shared<T>) -> T {
    std::mem::take(&mut *slot.lock().unwrap_or_else(PoisonError::into_inner))
}

/// A session whose stages talk only through a [`Bus`]. Other subscribers
/// may listen in on the same bus.
pub struct BusSession {
    bus: Arc<Bus>,
    announcements: Shared<Vec<Announcement>>,
    error: Shared<Option<StreamError>>,
    subscriptions: Vec<Subscription>,
}

impl BusSession {
    pub fn new(doc: Arc<MapDocument>, cal: Calibration, cfg: EngineConfig) -> Self {
        let bus = Arc::new(Bus::new());
        let error: Shared<Option<StreamError>> = Arc::default();
        let announcements: Shared<Vec<Announcement>> = Arc::default();
        let mut subscriptions = Vec::new();

        let mut recognizer = Recognizer::with_pairing(cfg.gesture_params, cfg.interaction_mode.pairing());
        let gap = cfg.gesture_params.doubletap_max_gap_ms;
        let err_slot = error.clone();
        subscriptions.push(
            bus.subscribe("touch.*", move |msg, bus| {
                let result = match msg.subject.as_str() {
                    TOUCH_EVENT => match msg.decode::<TouchEvent>() {
                        Ok(e) => {
                            let p = cal.to_map(DevicePoint::new(e.x, e.y));
                            recognizer.feed(&TouchEvent { x: p.x, y: p.y, ..e })
                        }
                        Err(e) => {
                            bus.publish(BusMessage::new(ENGINE_ERROR, json!({ "message": e.to_string() })));
                            return;
                        }
                    },
                    TOUCH_FLUSH => {
                        Ok(recognizer.last_t().map(|last| recognizer.flush(last + gap + 1)).unwrap_or_default())
                    }
                    _ => return,
                };
                match result {
                    Ok(gestures) => {
                        for g in &gestures {
                            bus.publish(BusMessage::encode(gesture_subject(g), g));
                        }
                    }
                    Err(e) => {
                        bus.publish(BusMessage::new(ENGINE_ERROR, json!({ "message": e.to_string() })));
                        *err_slot.lock().unwrap_or_else(PoisonError::into_inner) = Some(e);
                    }
                }
            })
            .expect("static pattern"),
        );

        subscriptions.push(
            bus.subscribe("gesture.*", move |msg, bus| {
                let Ok(g) = msg.decode::<Gesture>() else { return };
                if let Some(a) = handle_gesture(&doc, &cfg, &g) {
                    bus.publish(BusMessage::encode(ANNOUNCE_TEXT, &a));
                }
            })
            .expect("static pattern"),
        );

        let sink = announcements.clone();
        subscriptions.push(
            bus.subscribe(ANNOUNCE_TEXT, move |msg, _| {
                if let Ok(a) = msg.decode::<Announcement>() {
                    sink.lock().unwrap_or_else(PoisonError::into_inner).push(a);
                }
            })
            .expect("static pattern"),
        );

        Self { bus, announcements, error, subscriptions }
    }

    pub fn bus(&self) -> &Arc<Bus> {
        &self.bus
    }

    /// Publish one device event and collect what it caused.
    pub fn feed(&self, e: &TouchEvent) -> Result<Vec<Announcement>, StreamError> {
        self.bus.publish(BusMessage::encode(TOUCH_EVENT, e));
        if let Some(err) = take(&self.error) {
            return Err(err);
        }
        Ok(take(&self.announcements))
    }

    pub fn finish(&self) -> Vec<Announcement> {
        self.bus.publish(BusMessage::new(TOUCH_FLUSH, serde_json::Value::Null));
        take(&self.announcements)
    }
}

impl Drop for BusSession {
    fn drop(&mut self) {
        // stages hold the map; release them with the session
        for s in &self.subscriptions {
            s.cancel();
        }
    }
}

/// Same contract as [`super::run_replay_doc`], but every step crosses the bus.
pub fn replay_via_bus(
    doc: Arc<MapDocument>,
    log: &SessionLog,
    cfg: Option<&EngineConfig>,
) -> Result<Vec<Announcement>, ReplayError> {
    let (cal, cfg) = replay_setup(&doc, log, cfg)?;
    let session = BusSession::new(doc, cal, cfg);
    let mut out = Vec::new();
    for (i, e) in log.events.iter().enumerate() {
        out.extend(session.feed(e).map_err(|source| ReplayError::Stream { line: log.line_of(i), source })?);
    }
    out.extend(session.finish());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::run_replay_doc;
    use crate::engine::SessionHeader;
    use crate::fixtures::fixture_map;

    #[test]
    fn gesture_messages_are_observable() {
        let doc = Arc::new(fixture_map());
        let session = BusSession::new(doc, Calibration::IDENTITY, EngineConfig::default());
        let seen: Shared<Vec<String>> = Arc::default();
        let sink = seen.clone();
        session.bus().subscribe("*", move |m, _| sink.lock().unwrap().push(m.subject.clone())).unwrap();
        for e in [
            TouchEvent::down(0, 0, 200.0, 180.0),
            TouchEvent::up(50, 0, 200.0, 180.0),
            TouchEvent::down(100, 1, 200.0, 181.0),
        ] {
            assert!(session.feed(&e).unwrap().is_empty());
        }
        let out = session.feed(&TouchEvent::up(150, 1, 200.0, 181.0)).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].text, "rue du Port");
        let seen = seen.lock().unwrap();
        assert_eq!(seen.iter().filter(|s| *s == TOUCH_EVENT).count(), 4);
        assert_eq!(&seen[4..], ["gesture.double_tap", ANNOUNCE_TEXT]);
    }

    #[test]
    fn stream_errors_come_back_to_the_caller() {
        let session = BusSession::new(Arc::new(fixture_map()), Calibration::IDENTITY, EngineConfig::default());
        assert!(matches!(session.feed(&TouchEvent::up(0, 4, 1.0, 1.0)), Err(StreamError::UnknownContact { .. })));
        assert!(session.feed(&TouchEvent::down(0, 4, 1.0, 1.0)).is_ok());
    }

    #[test]
    fn bus_and_direct_replay_agree() {
        let doc = Arc::new(fixture_map());
        let header = SessionHeader::new(doc.source_name(), Calibration::IDENTITY, &EngineConfig::default());
        let mut events = Vec::new();
        for (i, el) in doc.features().enumerate() {
            let p = el.anchor();
            let t = i as u64 * 1000;
            events.extend([
                TouchEvent::down(t, 0, p.x, p.y),
                TouchEvent::up(t + 80, 0, p.x, p.y),
                TouchEvent::down(t + 200, 0, p.x, p.y),
                TouchEvent::up(t + 280, 0, p.x, p.y),
            ]);
        }
        let log = SessionLog::new(header, events);
        let direct = run_replay_doc(doc.clone(), &log, None).unwrap();
        assert_eq!(direct.len(), 13);
        assert_eq!(replay_via_bus(doc, &log, None).unwrap(), direct);
    }
}
