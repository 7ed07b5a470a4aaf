//! Audio-tactile interactive maps.
//!
//! A blind user explores a raised-line map laid on a multi-touch surface with
//! several fingers; double-tapping a street, point of interest or river makes
//! the engine announce its name. The crate covers:
//!
//! - [`mapmodel`]: parsing and validating the annotated SVG map,
//! - [`geometry`]: device→map calibration and hit testing,
//! - [`gestures`]: tap/double-tap recognition that ignores resting fingers,
//! - [`engine`]: announcements, the in-process bus, session logs and replay,
//! - [`sus`]: System Usability Scale scoring and summary statistics.

pub mod engine;
pub mod fixtures;
pub mod geometry;
pub mod gestures;
pub mod mapmodel;
pub mod scenario;
pub mod sus;

pub use engine::{handle_gesture, Announcement, EngineConfig, InteractionMode, Session};
pub use geometry::{hit_test, Calibration, HitTolerances};
pub use gestures::{Gesture, GestureKind, GestureParams, Recognizer, TouchEvent};
pub use mapmodel::{parse_map, MapDocument, MapError};
