//! From touches to announcements: calibration, gesture recognition,
//! hit-testing, session logging and replay.

pub mod bus;
pub mod log;
pub mod pipeline;
pub mod replay;
pub mod speech;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::geometry::{hit_test, Calibration, DevicePoint, GeometryError, HitTolerances};
use crate::gestures::{Gesture, GestureKind, GestureParams, Recognizer, StreamError, TapPairing, TouchEvent};
use crate::mapmodel::MapDocument;

pub use bus::{Bus, BusMessage, PatternError, Subscription};
pub use log::{LogError, SessionHeader, SessionLog, SessionLogWriter};
pub use pipeline::{replay_via_bus, BusSession};
pub use replay::{run_replay, run_replay_doc, run_replay_spoken, ReplayError, SpokenReplay};
pub use speech::{Speaker, SpeechAdapter, SpeechError, TextSpeech};

/// Which gesture triggers announcements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InteractionMode {
    /// Every short touch speaks. Unusable with several exploring fingers.
    SingleTap,
    #[default]
    DoubleTap,
}

impl InteractionMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            InteractionMode::SingleTap => "single_tap",
            InteractionMode::DoubleTap => "double_tap",
        }
    }

    pub fn trigger(&self) -> GestureKind {
        match self {
            InteractionMode::SingleTap => GestureKind::SingleTap,
            InteractionMode::DoubleTap => GestureKind::DoubleTap,
        }
    }

    /// In single-tap mode taps are not held back waiting for a partner.
    pub fn pairing(&self) -> TapPairing {
        match self {
            InteractionMode::SingleTap => TapPairing::Immediate,
            InteractionMode::DoubleTap => TapPairing::Pair,
        }
    }
}

impl std::str::FromStr for InteractionMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "single_tap" => Ok(InteractionMode::SingleTap),
            "double_tap" => Ok(InteractionMode::DoubleTap),
            other => Err(format!("unknown interaction mode `{other}` (expected single_tap or double_tap)")),
        }
    }
}

impl fmt::Display for InteractionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EngineConfig {
    pub interaction_mode: InteractionMode,
    /// Append the element description, when there is one.
    pub announce_description: bool,
    pub tolerances: HitTolerances,
    pub gesture_params: GestureParams,
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error(transparent)]
    Tolerance(#[from] GeometryError),
    #[error("invalid gesture parameters: {0}")]
    Gesture(String),
}

impl EngineConfig {
    pub fn with_mode(mut self, mode: InteractionMode) -> Self {
        self.interaction_mode = mode;
        self
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.tolerances.validate()?;
        self.gesture_params.validate().map_err(ConfigError::Gesture)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Announcement {
    pub text: String,
    pub element_id: Option<String>,
    pub t: u64,
}

impl Announcement {
    /// `t_ms<TAB>element_id<TAB>text`
    pub fn to_line(&self) -> String {
        format!("{}\t{}\t{}", self.t, self.element_id.as_deref().unwrap_or(""), self.text)
    }
}

/// Announcement for one gesture, if it is the configured trigger and lands on
/// an element. Gesture positions are already in map units.
pub fn handle_gesture(doc: &MapDocument, cfg: &EngineConfig, g: &Gesture) -> Option<Announcement> {
    if g.kind != cfg.interaction_mode.trigger() {
        return None;
    }
    let hit = hit_test(doc, g.pos, &cfg.tolerances)?;
    let el = doc.element(&hit.element_id)?;
    let text = match (&el.description, cfg.announce_description) {
        (Some(desc), true) => format!("{}. {}", el.name, desc),
        _ => el.name.clone(),
    };
    if text.is_empty() {
        return None;
    }
    Some(Announcement { text, element_id: Some(el.id.clone()), t: g.t })
}

/// What one event (or a flush) produced.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SessionStep {
    pub gestures: Vec<Gesture>,
    pub announcements: Vec<Announcement>,
}

/// One user's interaction: device events in, gestures and announcements out.
#[derive(Debug, Clone)]
pub struct Session {
    doc: Arc<MapDocument>,
    cal: Calibration,
    cfg: EngineConfig,
    recognizer: Recognizer,
}

impl Session {
    pub fn new(doc: Arc<MapDocument>, cal: Calibration, cfg: EngineConfig) -> Self {
        let recognizer = Recognizer::with_pairing(cfg.gesture_params, cfg.interaction_mode.pairing());
        Self { doc, cal, cfg, recognizer }
    }

    pub fn doc(&self) -> &MapDocument {
        &self.doc
    }

    pub fn calibration(&self) -> Calibration {
        self.cal
    }

    pub fn config(&self) -> &EngineConfig {
        &self.cfg
    }

    pub fn last_t(&self) -> Option<u64> {
        self.recognizer.last_t()
    }

    /// Feed one event in device coordinates. A rejected event leaves the
    /// session unchanged.
    pub fn feed(&mut self, e: &TouchEvent) -> Result<SessionStep, StreamError> {
        let p = self.cal.to_map(DevicePoint::new(e.x, e.y));
        let mapped = TouchEvent { x: p.x, y: p.y, ..*e };
        let gestures = self.recognizer.feed(&mapped)?;
        Ok(self.step(gestures))
    }

    /// Close the pairing window of every pending tap: flush at
    /// `last_t + doubletap_max_gap_ms + 1`. Later events must not be older
    /// than that instant.
    pub fn finish(&mut self) -> SessionStep {
        let gestures = match self.recognizer.last_t() {
            Some(last) => self.recognizer.flush(last + self.cfg.gesture_params.doubletap_max_gap_ms + 1),
            None => Vec::new(),
        };
        self.step(gestures)
    }

    fn step(&self, gestures: Vec<Gesture>) -> SessionStep {
        let announcements = gestures.iter().filter_map(|g| handle_gesture(&self.doc, &self.cfg, g)).collect();
        SessionStep { gestures, announcements }
    }
}
