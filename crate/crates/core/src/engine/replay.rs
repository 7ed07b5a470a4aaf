//! Offline replay of a session log.

use std::sync::Arc;

use crate::geometry::Calibration;
use crate::gestures::StreamError;
use crate::mapmodel::{parse_map, MapDocument, MapError};

use super::log::SessionLog;
use super::speech::{Speaker, SpeechAdapter, SpeechError};
use super::{Announcement, EngineConfig, Session};

#[derive(Debug, thiserror::Error)]
pub enum ReplayError {
    #[error("map: {0}")]
    Map(#[from] MapError),
    #[error("log was recorded on map `{logged}`, not `{given}`")]
    MapMismatch { logged: String, given: String },
    #[error("log has events but no `# cal=` header")]
    MissingCalibration,
    #[error("line {line}: {source}")]
    Stream { line: usize, source: StreamError },
}

impl ReplayError {
    /// File line of the offending event, for stream errors.
    pub fn line(&self) -> Option<usize> {
        match self {
            ReplayError::Stream { line, .. } => Some(*line),
            _ => None,
        }
    }
}

/// Replay `log` against the map in `map_bytes`. Without `cfg`, the mode and
/// gesture parameters recorded in the log header are used.
pub fn run_replay(
    map_bytes: &[u8],
    log: &SessionLog,
    cfg: Option<&EngineConfig>,
) -> Result<Vec<Announcement>, ReplayError> {
    let doc = Arc::new(parse_map(map_bytes)?);
    run_replay_doc(doc, log, cfg)
}

pub fn run_replay_doc(
    doc: Arc<MapDocument>,
    log: &SessionLog,
    cfg: Option<&EngineConfig>,
) -> Result<Vec<Announcement>, ReplayError> {
    let (cal, cfg) = replay_setup(&doc, log, cfg)?;
    let mut session = Session::new(doc, cal, cfg);
    let mut out = Vec::new();
    for (i, e) in log.events.iter().enumerate() {
        let step = session.feed(e).map_err(|source| ReplayError::Stream { line: log.line_of(i), source })?;
        out.extend(step.announcements);
    }
    out.extend(session.finish().announcements);
    Ok(out)
}

/// Check the log against the map and pick the calibration and config to use.
pub(crate) fn replay_setup(
    doc: &MapDocument,
    log: &SessionLog,
    cfg: Option<&EngineConfig>,
) -> Result<(Calibration, EngineConfig), ReplayError> {
    if let Some(logged) = &log.header.map {
        if logged != doc.source_name() {
            return Err(ReplayError::MapMismatch { logged: logged.clone(), given: doc.source_name().to_owned() });
        }
    }
    let cal = match log.header.calibration {
        Some(cal) => cal,
        None if log.events.is_empty() => Calibration::IDENTITY,
        None => return Err(ReplayError::MissingCalibration),
    };
    Ok((cal, cfg.copied().unwrap_or_else(|| log.header.engine_config())))
}

#[derive(Debug)]
pub struct SpokenReplay {
    pub announcements: Vec<Announcement>,
    /// One entry per announcement the adapter failed to render.
    pub speech_errors: Vec<SpeechError>,
}

/// Replay and send every announcement to `speaker`. Speech failures do not
/// stop the replay.
pub fn run_replay_spoken<A: SpeechAdapter>(
    map_bytes: &[u8],
    log: &SessionLog,
    cfg: Option<&EngineConfig>,
    speaker: &mut Speaker<A>,
) -> Result<SpokenReplay, ReplayError> {
    let announcements = run_replay(map_bytes, log, cfg)?;
    let speech_errors = announcements.iter().filter_map(|a| speaker.speak(a).err()).collect();
    Ok(SpokenReplay { announcements, speech_errors })
}
