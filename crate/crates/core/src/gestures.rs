//! Tap and double-tap recognition over a multi-touch event stream.
//!
//! Blind users explore a raised-line map with several fingers at once, so most
//! contacts are *resting* fingers that must never produce output. A contact
//! only counts as a tap when its whole down→up life is short and nearly
//! stationary. Two taps close in time and space form a double tap, by any
//! finger: pairing never looks at contact ids, because the touch driver
//! recycles ids as soon as a finger lifts.
//!
//! Positions fed to the recognizer must already be in map units.
//!
//! Timing of single taps: a pending tap becomes a single tap once no later
//! tap can pair with it any more, i.e. after the double-tap gap has elapsed
//! and no candidate contact that could still complete the pair is down. The
//! emitted time is the instant that became certain, so it does not depend on
//! which later event happened to reveal it.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::mapmodel::MapPoint;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Down,
    Move,
    Up,
}

impl Phase {
    pub fn as_str(&self) -> &'static str {
        match self {
            Phase::Down => "down",
            Phase::Move => "move",
            Phase::Up => "up",
        }
    }
}

impl std::str::FromStr for Phase {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "down" => Ok(Phase::Down),
            "move" => Ok(Phase::Move),
            "up" => Ok(Phase::Up),
            other => Err(format!("unknown phase `{other}`")),
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One sample of one contact.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TouchEvent {
    /// Milliseconds.
    pub t: u64,
    /// Driver-assigned id, reused once the contact is released.
    pub contact_id: u32,
    pub phase: Phase,
    pub x: f64,
    pub y: f64,
}

impl TouchEvent {
    pub fn new(t: u64, contact_id: u32, phase: Phase, x: f64, y: f64) -> Self {
        Self { t, contact_id, phase, x, y }
    }

    pub fn down(t: u64, contact_id: u32, x: f64, y: f64) -> Self {
        Self::new(t, contact_id, Phase::Down, x, y)
    }

    pub fn moved(t: u64, contact_id: u32, x: f64, y: f64) -> Self {
        Self::new(t, contact_id, Phase::Move, x, y)
    }

    pub fn up(t: u64, contact_id: u32, x: f64, y: f64) -> Self {
        Self::new(t, contact_id, Phase::Up, x, y)
    }

    pub fn pos(&self) -> MapPoint {
        MapPoint::new(self.x, self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GestureParams {
    pub tap_max_duration_ms: u64,
    /// Map units.
    pub tap_max_drift: f64,
    /// Measured from the first tap's up to the second tap's down.
    pub doubletap_max_gap_ms: u64,
    /// Map units between tap centroids.
    pub doubletap_max_dist: f64,
}

impl Default for GestureParams {
    fn default() -> Self {
        Self { tap_max_duration_ms: 300, tap_max_drift: 8.0, doubletap_max_gap_ms: 400, doubletap_max_dist: 15.0 }
    }
}

impl GestureParams {
    pub fn validate(&self) -> Result<(), String> {
        if self.tap_max_duration_ms == 0 || self.doubletap_max_gap_ms == 0 {
            return Err("gesture durations must be strictly positive".into());
        }
        if !(self.tap_max_drift > 0.0 && self.tap_max_drift.is_finite())
            || !(self.doubletap_max_dist > 0.0 && self.doubletap_max_dist.is_finite())
        {
            return Err("gesture distances must be strictly positive".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GestureKind {
    SingleTap,
    DoubleTap,
}

impl GestureKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            GestureKind::SingleTap => "single_tap",
            GestureKind::DoubleTap => "double_tap",
        }
    }
}

impl std::str::FromStr for GestureKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "single_tap" => Ok(GestureKind::SingleTap),
            "double_tap" => Ok(GestureKind::DoubleTap),
            other => Err(format!("unknown gesture kind `{other}`")),
        }
    }
}

impl fmt::Display for GestureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gesture {
    pub kind: GestureKind,
    /// Centroid of the tap, or mean of both tap centroids.
    pub pos: MapPoint,
    /// Completion time in ms.
    pub t: u64,
}

/// How completed taps are turned into gestures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TapPairing {
    /// Hold each tap until it pairs into a double tap or times out as a single tap.
    #[default]
    Pair,
    /// Emit every tap as a single tap the moment it lifts (single-tap interaction).
    Immediate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContactState {
    CandidateTap,
    /// Long-lived or moving: an exploring finger. Irreversible.
    Resting,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContactTrack {
    pub contact_id: u32,
    pub down_t: u64,
    pub down_pos: MapPoint,
    pub last_pos: MapPoint,
    pub max_drift_so_far: f64,
    pub state: ContactState,
    sum: (f64, f64),
    samples: u32,
}

impl ContactTrack {
    fn sample(&mut self, p: MapPoint) {
        self.last_pos = p;
        self.max_drift_so_far = self.max_drift_so_far.max(self.down_pos.distance(&p));
        self.sum.0 += p.x;
        self.sum.1 += p.y;
        self.samples += 1;
    }

    fn centroid(&self) -> MapPoint {
        let n = f64::from(self.samples);
        MapPoint::new(self.sum.0 / n, self.sum.1 / n)
    }
}

#[derive(Debug, Clone, PartialEq)]
struct PendingTap {
    seq: u64,
    up_t: u64,
    centroid: MapPoint,
    /// Latest resolution time of a candidate contact that could have paired
    /// with this tap.
    blocked_until: u64,
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum StreamError {
    #[error("timestamp {t} ms precedes previous event at {previous} ms")]
    OutOfOrder { previous: u64, t: u64 },
    #[error("contact {contact_id} received down at {t} ms while already down")]
    AlreadyDown { contact_id: u32, t: u64 },
    #[error("contact {contact_id} received {phase} at {t} ms without a preceding down")]
    UnknownContact { contact_id: u32, phase: Phase, t: u64 },
    #[error("non-finite coordinate at {t} ms")]
    NonFinite { t: u64 },
}

/// Sequential tap/double-tap state machine. One instance per session.
#[derive(Debug, Clone)]
pub struct Recognizer {
    params: GestureParams,
    pairing: TapPairing,
    last_t: Option<u64>,
    contacts: BTreeMap<u32, ContactTrack>,
    pending: Vec<PendingTap>,
    next_seq: u64,
}

impl Recognizer {
    pub fn new(params: GestureParams) -> Self {
        Self::with_pairing(params, TapPairing::Pair)
    }

    pub fn with_pairing(params: GestureParams, pairing: TapPairing) -> Self {
        Self { params, pairing, last_t: None, contacts: BTreeMap::new(), pending: Vec::new(), next_seq: 0 }
    }

    pub fn params(&self) -> &GestureParams {
        &self.params
    }

    pub fn last_t(&self) -> Option<u64> {
        self.last_t
    }

    pub fn contacts(&self) -> impl Iterator<Item = &ContactTrack> {
        self.contacts.values()
    }

    pub fn pending_taps(&self) -> usize {
        self.pending.len()
    }

    /// Consume one event. On error the state is left untouched.
    pub fn feed(&mut self, e: &TouchEvent) -> Result<Vec<Gesture>, StreamError> {
        self.check(e)?;
        let mut out = Vec::new();
        self.advance(e.t, &mut out);

        let p = e.pos();
        match e.phase {
            Phase::Down => {
                self.contacts.insert(
                    e.contact_id,
                    ContactTrack {
                        contact_id: e.contact_id,
                        down_t: e.t,
                        down_pos: p,
                        last_pos: p,
                        max_drift_so_far: 0.0,
                        state: ContactState::CandidateTap,
                        sum: (p.x, p.y),
                        samples: 1,
                    },
                );
            }
            Phase::Move => {
                let mut track = self.contacts.remove(&e.contact_id).expect("checked alive");
                track.sample(p);
                if track.state == ContactState::CandidateTap && track.max_drift_so_far > self.params.tap_max_drift {
                    self.resolve(&track, e.t);
                    track.state = ContactState::Resting;
                }
                self.contacts.insert(e.contact_id, track);
            }
            Phase::Up => {
                let mut track = self.contacts.remove(&e.contact_id).expect("checked alive");
                track.sample(p);
                if track.state == ContactState::CandidateTap {
                    self.resolve(&track, e.t);
                    // duration was enforced by `advance`
                    if track.max_drift_so_far <= self.params.tap_max_drift {
                        out.extend(self.complete_tap(&track, e.t));
                    }
                }
            }
        }

        self.expire(e.t, &mut out);
        self.last_t = Some(e.t);
        Ok(out)
    }

    /// Emit every pending tap whose pairing window has closed by `now_ms`.
    /// Taps still inside their window stay pending. A candidate contact that
    /// is still down no longer holds a tap back here.
    pub fn flush(&mut self, now_ms: u64) -> Vec<Gesture> {
        let now = self.last_t.map_or(now_ms, |last| now_ms.max(last));
        let mut out = Vec::new();
        self.advance(now, &mut out);
        let gap = self.params.doubletap_max_gap_ms;
        let (forced, kept): (Vec<_>, Vec<_>) =
            std::mem::take(&mut self.pending).into_iter().partition(|p| now > p.up_t + gap);
        self.pending = kept;
        out.extend(forced.into_iter().map(|p| Gesture { kind: GestureKind::SingleTap, pos: p.centroid, t: now }));
        self.last_t = Some(now);
        out
    }

    fn check(&self, e: &TouchEvent) -> Result<(), StreamError> {
        if let Some(previous) = self.last_t {
            if e.t < previous {
                return Err(StreamError::OutOfOrder { previous, t: e.t });
            }
        }
        if !e.x.is_finite() || !e.y.is_finite() {
            return Err(StreamError::NonFinite { t: e.t });
        }
        let alive = self.contacts.contains_key(&e.contact_id);
        match e.phase {
            Phase::Down if alive => Err(StreamError::AlreadyDown { contact_id: e.contact_id, t: e.t }),
            Phase::Move | Phase::Up if !alive => {
                Err(StreamError::UnknownContact { contact_id: e.contact_id, phase: e.phase, t: e.t })
            }
            _ => Ok(()),
        }
    }

    /// Move the clock to `now`: age out candidates, then time out pending taps.
    fn advance(&mut self, now: u64, out: &mut Vec<Gesture>) {
        let max = self.params.tap_max_duration_ms;
        let stale: Vec<u32> = self
            .contacts
            .values()
            .filter(|c| c.state == ContactState::CandidateTap && now - c.down_t > max)
            .map(|c| c.contact_id)
            .collect();
        for id in stale {
            let track = self.contacts[&id].clone();
            self.resolve(&track, track.down_t + max + 1);
            self.contacts.get_mut(&id).unwrap().state = ContactState::Resting;
        }
        self.expire(now, out);
    }

    fn could_pair(&self, c: &ContactTrack, p: &PendingTap) -> bool {
        c.state == ContactState::CandidateTap
            && c.down_t >= p.up_t
            && c.down_t - p.up_t <= self.params.doubletap_max_gap_ms
            && c.down_pos.distance(&p.centroid) <= self.params.doubletap_max_dist + self.params.tap_max_drift
    }

    /// A candidate contact stops being able to complete a pair at `at`.
    fn resolve(&mut self, c: &ContactTrack, at: u64) {
        let blocked: Vec<bool> = self.pending.iter().map(|p| self.could_pair(c, p)).collect();
        for (p, blocked) in self.pending.iter_mut().zip(blocked) {
            if blocked {
                p.blocked_until = p.blocked_until.max(at);
            }
        }
    }

    fn expire(&mut self, now: u64, out: &mut Vec<Gesture>) {
        let gap = self.params.doubletap_max_gap_ms;
        let mut expired = Vec::new();
        let mut i = 0;
        while i < self.pending.len() {
            let p = &self.pending[i];
            let blocked = self.contacts.values().any(|c| self.could_pair(c, p));
            if now > p.up_t + gap && !blocked {
                expired.push(self.pending.remove(i));
            } else {
                i += 1;
            }
        }
        expired.sort_by_key(|p| ((p.up_t + gap + 1).max(p.blocked_until), p.seq));
        out.extend(expired.into_iter().map(|p| Gesture {
            kind: GestureKind::SingleTap,
            pos: p.centroid,
            t: (p.up_t + gap + 1).max(p.blocked_until),
        }));
    }

    fn complete_tap(&mut self, track: &ContactTrack, up_t: u64) -> Option<Gesture> {
        let centroid = track.centroid();
        if self.pairing == TapPairing::Immediate {
            return Some(Gesture { kind: GestureKind::SingleTap, pos: centroid, t: up_t });
        }
        let partner = self
            .pending
            .iter()
            .enumerate()
            .filter(|(_, p)| {
                track.down_t >= p.up_t
                    && track.down_t - p.up_t <= self.params.doubletap_max_gap_ms
                    && p.centroid.distance(&centroid) <= self.params.doubletap_max_dist
            })
            // most recent first, then nearest, then latest registered
            .max_by(|(_, a), (_, b)| {
                a.up_t
                    .cmp(&b.up_t)
                    .then_with(|| b.centroid.distance(&centroid).total_cmp(&a.centroid.distance(&centroid)))
                    .then_with(|| a.seq.cmp(&b.seq))
            })
            .map(|(i, _)| i);
        match partner {
            Some(i) => {
                let first = self.pending.remove(i);
                Some(Gesture { kind: GestureKind::DoubleTap, pos: first.centroid.midpoint(&centroid), t: up_t })
            }
            None => {
                self.pending.push(PendingTap { seq: self.next_seq, up_t, centroid, blocked_until: 0 });
                self.next_seq += 1;
                None
            }
        }
    }
}
