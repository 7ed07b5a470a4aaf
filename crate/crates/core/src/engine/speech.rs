//! Pluggable speech output. The engine only produces text; an adapter decides
//! how it is rendered (synthesiser, screen reader, plain text).

use std::io::Write;

use super::Announcement;

#[derive(Debug, thiserror::Error)]
pub enum SpeechError {
    #[error("speech adapter failed: {0}")]
    Adapter(String),
    #[error("speech output failed: {0}")]
    Io(#[from] std::io::Error),
}

pub trait SpeechAdapter {
    /// Start rendering `a`. Returns once rendering has been handed off.
    fn render(&mut self, a: &Announcement) -> Result<(), SpeechError>;

    /// Stop whatever is being rendered.
    fn cancel(&mut self) {}
}

/// Writes one `[t] text` line per announcement.
#[derive(Debug)]
pub struct TextSpeech<W> {
    out: W,
}

impl<W: Write> TextSpeech<W> {
    pub fn new(out: W) -> Self {
        Self { out }
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}

impl<W: Write> SpeechAdapter for TextSpeech<W> {
    fn render(&mut self, a: &Announcement) -> Result<(), SpeechError> {
        writeln!(self.out, "[{}] {}", a.t, a.text)?;
        self.out.flush()?;
        Ok(())
    }
}

/// Rough speaking time used to decide whether an announcement is still being
/// rendered when the next one arrives.
pub const DEFAULT_MS_PER_CHAR: u64 = 70;

/// Interrupting front-end for an adapter: a new announcement cancels the one
/// still being spoken instead of queueing behind it.
#[derive(Debug)]
pub struct Speaker<A> {
    adapter: A,
    ms_per_char: u64,
    current: Option<(Announcement, u64)>,
    interruptions: u64,
    failures: u64,
}

impl<A: SpeechAdapter> Speaker<A> {
    pub fn new(adapter: A) -> Self {
        Self { adapter, ms_per_char: DEFAULT_MS_PER_CHAR, current: None, interruptions: 0, failures: 0 }
    }

    pub fn with_rate(mut self, ms_per_char: u64) -> Self {
        self.ms_per_char = ms_per_char;
        self
    }

    /// Speak `a`, cutting off the previous announcement if it has not
    /// finished by `a.t`. Adapter failures are logged, counted and returned;
    /// the speaker stays usable.
    pub fn speak(&mut self, a: &Announcement) -> Result<(), SpeechError> {
        if self.is_speaking(a.t) {
            self.adapter.cancel();
            self.interruptions += 1;
        }
        let ends = a.t + self.ms_per_char * a.text.chars().count() as u64;
        self.current = Some((a.clone(), ends));
        self.adapter.render(a).inspect_err(|e| {
            self.failures += 1;
            log::warn!("announcement {:?} at {} ms not spoken: {e}", a.text, a.t);
        })
    }

    /// The announcement most recently started, if it is still running at `now`.
    pub fn speaking_at(&self, now: u64) -> Option<&Announcement> {
        self.current.as_ref().filter(|(_, ends)| now < *ends).map(|(a, _)| a)
    }

    pub fn is_speaking(&self, now: u64) -> bool {
        self.speaking_at(now).is_some()
    }

    /// The announcement most recently started.
    pub fn last(&self) -> Option<&Announcement> {
        self.current.as_ref().map(|(a, _)| a)
    }

    pub fn interruptions(&self) -> u64 {
        self.interruptions
    }

    pub fn failures(&self) -> u64 {
        self.failures
    }

    pub fn adapter(&self) -> &A {
        &self.adapter
    }

    pub fn into_adapter(self) -> A {
        self.adapter
    }
}
