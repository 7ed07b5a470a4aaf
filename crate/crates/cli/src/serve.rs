//! Live sessions over websockets: one engine session and one session log per
//! connection, all sharing a read-only map.

use std::fs::{File, OpenOptions};
use std::future::Future;
use std::io::{self, BufWriter};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use audiotact::engine::{EngineConfig, Session, SessionHeader, SessionLogWriter, SessionStep};
use audiotact::geometry::Calibration;
use audiotact::gestures::TouchEvent;
use audiotact::mapmodel::MapDocument;
use futures_util::{SinkExt, StreamExt};
use tokio::net::{TcpListener, TcpStream};
use tokio::sync::watch;
use tokio::task::JoinSet;
use tokio_tungstenite::tungstenite::Message;

use crate::protocol::{ClientMessage, ServerMessage};

#[derive(Debug, Clone)]
pub struct ServeConfig {
    pub engine: EngineConfig,
    pub calibration: Calibration,
    /// Where `session-<timestamp>.csv` files go; `None` disables logging.
    pub log_dir: Option<PathBuf>,
}

impl Default for ServeConfig {
    fn default() -> Self {
        Self { engine: EngineConfig::default(), calibration: Calibration::IDENTITY, log_dir: None }
    }
}

type LogWriter = SessionLogWriter<BufWriter<File>>;

/// Accept connections until `shutdown` resolves, then close every session
/// and flush its log before returning.
pub async fn serve<F>(listener: TcpListener, doc: Arc<MapDocument>, cfg: ServeConfig, shutdown: F) -> io::Result<()>
where
    F: Future<Output = ()>,
{
    let (stop_tx, stop_rx) = watch::channel(false);
    let mut tasks = JoinSet::new();
    tokio::pin!(shutdown);
    loop {
        tokio::select! {
            _ = &mut shutdown => break,
            accepted = listener.accept() => match accepted {
                Ok((stream, peer)) => {
                    tasks.spawn(connection(stream, peer, doc.clone(), cfg.clone(), stop_rx.clone()));
                }
                Err(e) => log::warn!("accept failed: {e}"),
            },
            Some(done) = tasks.join_next(), if !tasks.is_empty() => {
                if let Err(e) = done {
                    log::warn!("session task failed: {e}");
                }
            }
        }
    }
    let _ = stop_tx.send(true);
    while let Some(done) = tasks.join_next().await {
        if let Err(e) = done {
            log::warn!("session task failed: {e}");
        }
    }
    Ok(())
}

/// `session-<UTC timestamp>.csv`, with a numeric suffix if that name is taken.
fn create_log_file(dir: &Path) -> io::Result<(PathBuf, File)> {
    let stamp = chrono::Utc::now().format("%Y%m%dT%H%M%S%.3fZ");
    for n in 0.. {
        let name = if n == 0 { format!("session-{stamp}.csv") } else { format!("session-{stamp}-{n}.csv") };
        let path = dir.join(name);
        match OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(f) => return Ok((path, f)),
            Err(e) if e.kind() == io::ErrorKind::AlreadyExists => continue,
            Err(e) => return Err(e),
        }
    }
    unreachable!()
}

fn open_log(cfg: &ServeConfig, doc: &MapDocument, peer: SocketAddr) -> Option<LogWriter> {
    let dir = cfg.log_dir.as_ref()?;
    let header = SessionHeader::new(doc.source_name(), cfg.calibration, &cfg.engine);
    let opened =
        create_log_file(dir).and_then(|(path, f)| Ok((path, SessionLogWriter::new(BufWriter::new(f), &header)?)));
    match opened {
        Ok((path, w)) => {
            log::info!("{peer}: logging to {}", path.display());
            Some(w)
        }
        Err(e) => {
            log::warn!("{peer}: session log unavailable: {e}");
            None
        }
    }
}

fn step_messages(step: SessionStep) -> Vec<ServerMessage> {
    let gestures = step.gestures.iter().map(ServerMessage::from);
    gestures.chain(step.announcements.iter().map(ServerMessage::from)).collect()
}

/// Replies to one client frame. Accepted touches are logged; rejected ones
/// are reported and leave the session as it was.
pub fn handle_frame(
    text: &str,
    session: &mut Session,
    log: &mut Option<impl SessionLogSink>,
    doc: &MapDocument,
) -> Vec<ServerMessage> {
    let msg = match serde_json::from_str::<ClientMessage>(text) {
        Ok(m) => m,
        Err(e) => return vec![ServerMessage::error(format!("invalid message: {e}"))],
    };
    match msg {
        ClientMessage::Hello => vec![ServerMessage::map(doc)],
        ClientMessage::Touch { t, id, phase, x, y } => {
            let e = TouchEvent::new(t, id, phase, x, y);
            match session.feed(&e) {
                Ok(step) => {
                    if let Some(w) = log {
                        if let Err(err) = w.record_event(&e) {
                            log::warn!("session log write failed: {err}");
                        }
                    }
                    step_messages(step)
                }
                Err(err) => vec![ServerMessage::error(err.to_string())],
            }
        }
        ClientMessage::Flush => step_messages(session.finish()),
    }
}

/// Where accepted touches are recorded.
pub trait SessionLogSink {
    fn record_event(&mut self, e: &TouchEvent) -> io::Result<()>;
}

impl<W: io::Write> SessionLogSink for SessionLogWriter<W> {
    fn record_event(&mut self, e: &TouchEvent) -> io::Result<()> {
        self.record(e)?;
        // keep the file readable if the process dies
        self.flush()
    }
}

async fn connection(
    stream: TcpStream,
    peer: SocketAddr,
    doc: Arc<MapDocument>,
    cfg: ServeConfig,
    mut stop: watch::Receiver<bool>,
) {
    let ws = match tokio_tungstenite::accept_async(stream).await {
        Ok(ws) => ws,
        Err(e) => {
            log::warn!("{peer}: handshake failed: {e}");
            return;
        }
    };
    log::info!("{peer}: session started");
    let (mut tx, mut rx) = ws.split();
    let mut session = Session::new(doc.clone(), cfg.calibration, cfg.engine);
    let mut log = open_log(&cfg, &doc, peer);

    'session: loop {
        tokio::select! {
            _ = stop.changed() => {
                let _ = tx.send(Message::Close(None)).await;
                break;
            }
            frame = rx.next() => {
                let replies = match frame {
                    None | Some(Ok(Message::Close(_))) => break,
                    Some(Err(e)) => {
                        log::warn!("{peer}: {e}");
                        break;
                    }
                    Some(Ok(Message::Text(text))) => handle_frame(text.as_str(), &mut session, &mut log, &doc),
                    Some(Ok(Message::Binary(_))) => vec![ServerMessage::error("expected a JSON text frame")],
                    Some(Ok(_)) => continue,
                };
                for r in replies {
                    if tx.send(Message::text(r.to_json())).await.is_err() {
                        break 'session;
                    }
                }
            }
        }
    }
    if let Some(w) = log {
        if let Err(e) = w.into_inner() {
            log::warn!("{peer}: session log flush failed: {e}");
        }
    }
    log::info!("{peer}: session ended");
}
