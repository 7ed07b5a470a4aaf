//! Session log files: a few `# key=value` header lines, then CSV rows of
//! device-space touch events.
//!
//! ```text
//! # map=Fictive town
//! # cal=1,0,0,0,1,0
//! # mode=double_tap
//! # params=300,8,400,15
//! timestamp_ms,contact_id,phase,x,y
//! 0,0,down,100,100
//! ```
//!
//! Numbers are written with Rust's shortest round-trip formatting, so a log
//! read back and written again is byte-identical.

use std::fmt::Write as _;
use std::io::{self, Write};

use crate::geometry::Calibration;
use crate::gestures::{GestureParams, Phase, TouchEvent};

use super::{EngineConfig, InteractionMode};

pub const COLUMN_HEADER: &str = "timestamp_ms,contact_id,phase,x,y";

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct LogError {
    pub line: usize,
    pub message: String,
}

/// Everything replay needs besides the map. Missing fields fall back to
/// defaults when replaying.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SessionHeader {
    pub map: Option<String>,
    pub calibration: Option<Calibration>,
    pub mode: Option<InteractionMode>,
    pub params: Option<GestureParams>,
}

impl SessionHeader {
    pub fn new(map: &str, calibration: Calibration, cfg: &EngineConfig) -> Self {
        Self {
            map: Some(map.to_owned()),
            calibration: Some(calibration),
            mode: Some(cfg.interaction_mode),
            params: Some(cfg.gesture_params),
        }
    }

    /// Default config with the recorded mode and gesture parameters applied.
    pub fn engine_config(&self) -> EngineConfig {
        let mut cfg = EngineConfig::default();
        if let Some(mode) = self.mode {
            cfg.interaction_mode = mode;
        }
        if let Some(params) = self.params {
            cfg.gesture_params = params;
        }
        cfg
    }

    fn write_to(&self, out: &mut String) {
        if let Some(map) = &self.map {
            // the header is line-based
            let map: String = map.chars().map(|c| if c == '\n' || c == '\r' { ' ' } else { c }).collect();
            writeln!(out, "# map={map}").unwrap();
        }
        if let Some(cal) = &self.calibration {
            let [a, b, c, d, e, f] = cal.coefficients();
            writeln!(out, "# cal={a},{b},{c},{d},{e},{f}").unwrap();
        }
        if let Some(mode) = self.mode {
            writeln!(out, "# mode={mode}").unwrap();
        }
        if let Some(p) = &self.params {
            writeln!(
                out,
                "# params={},{},{},{}",
                p.tap_max_duration_ms, p.tap_max_drift, p.doubletap_max_gap_ms, p.doubletap_max_dist
            )
            .unwrap();
        }
    }

    fn line_count(&self) -> usize {
        [self.map.is_some(), self.calibration.is_some(), self.mode.is_some(), self.params.is_some()]
            .into_iter()
            .filter(|b| *b)
            .count()
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SessionLog {
    pub header: SessionHeader,
    pub events: Vec<TouchEvent>,
}

fn format_event(e: &TouchEvent) -> String {
    format!("{},{},{},{},{}", e.t, e.contact_id, e.phase, e.x, e.y)
}

impl SessionLog {
    pub fn new(header: SessionHeader, events: Vec<TouchEvent>) -> Self {
        Self { header, events }
    }

    /// 1-based file line of event `index` in the canonical serialisation.
    pub fn line_of(&self, index: usize) -> usize {
        self.header.line_count() + 2 + index
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        self.header.write_to(&mut out);
        out.push_str(COLUMN_HEADER);
        out.push('\n');
        for e in &self.events {
            out.push_str(&format_event(e));
            out.push('\n');
        }
        out
    }

    /// Parse a log. Header lines must come first, each key at most once; the
    /// column header is required once any event follows. Event order is not
    /// checked here: replay reports it against the offending line.
    pub fn parse(text: &str) -> Result<Self, LogError> {
        let mut log = SessionLog::default();
        let mut seen_columns = false;
        let lines: Vec<&str> = text.lines().collect();
        let used = lines.iter().rposition(|l| !l.trim().is_empty()).map_or(0, |i| i + 1);
        for (i, raw) in lines[..used].iter().enumerate() {
            let line = i + 1;
            let err = |message: String| LogError { line, message };
            let l = raw.strip_suffix('\r').unwrap_or(raw);
            if let Some(rest) = l.strip_prefix('#') {
                if seen_columns {
                    return Err(err("header line after the column header".into()));
                }
                parse_header_line(rest.trim_start(), &mut log.header).map_err(err)?;
            } else if !seen_columns {
                if l.trim() != COLUMN_HEADER {
                    return Err(err(format!("expected column header `{COLUMN_HEADER}`")));
                }
                seen_columns = true;
            } else {
                log.events.push(parse_event(l).map_err(err)?);
            }
        }
        Ok(log)
    }
}

fn parse_header_line(s: &str, h: &mut SessionHeader) -> Result<(), String> {
    let (key, value) = s.split_once('=').ok_or_else(|| format!("header `{s}` is not key=value"))?;
    let dup = || format!("duplicate `{key}` header");
    match key.trim() {
        "map" => {
            if h.map.replace(value.to_owned()).is_some() {
                return Err(dup());
            }
        }
        "cal" => {
            let v = parse_floats(value, 6)?;
            let cal = Calibration::new([v[0], v[1], v[2], v[3], v[4], v[5]]).map_err(|e| e.to_string())?;
            if h.calibration.replace(cal).is_some() {
                return Err(dup());
            }
        }
        "mode" => {
            if h.mode.replace(value.trim().parse()?).is_some() {
                return Err(dup());
            }
        }
        "params" => {
            let v = parse_floats(value, 4)?;
            let ms = |x: f64, name: &str| {
                if x >= 0.0 && x.fract() == 0.0 && x <= u32::MAX as f64 {
                    Ok(x as u64)
                } else {
                    Err(format!("{name} must be a whole number of milliseconds"))
                }
            };
            let params = GestureParams {
                tap_max_duration_ms: ms(v[0], "tap_max_duration_ms")?,
                tap_max_drift: v[1],
                doubletap_max_gap_ms: ms(v[2], "doubletap_max_gap_ms")?,
                doubletap_max_dist: v[3],
            };
            params.validate()?;
            if h.params.replace(params).is_some() {
                return Err(dup());
            }
        }
        other => return Err(format!("unknown header `{other}`")),
    }
    Ok(())
}

fn parse_floats(s: &str, n: usize) -> Result<Vec<f64>, String> {
    let v = s
        .split(',')
        .map(|f| match f.trim().parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(x),
            _ => Err(format!("`{}` is not a finite number", f.trim())),
        })
        .collect::<Result<Vec<_>, _>>()?;
    if v.len() != n {
        return Err(format!("expected {n} comma-separated numbers, got {}", v.len()));
    }
    Ok(v)
}

fn parse_event(l: &str) -> Result<TouchEvent, String> {
    let fields: Vec<&str> = l.split(',').map(str::trim).collect();
    let [t, id, phase, x, y] = fields[..] else {
        return Err(format!("expected 5 fields, got {}", fields.len()));
    };
    let t = t.parse::<u64>().map_err(|_| format!("timestamp `{t}` is not a non-negative integer"))?;
    let contact_id = id.parse::<u32>().map_err(|_| format!("contact id `{id}` is not a non-negative integer"))?;
    let phase: Phase = phase.parse()?;
    let coord = |s: &str| match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(format!("coordinate `{s}` is not a finite number")),
    };
    Ok(TouchEvent::new(t, contact_id, phase, coord(x)?, coord(y)?))
}

/// Writes a log incrementally so an interrupted session still leaves a
/// readable file.
#[derive(Debug)]
pub struct SessionLogWriter<W: Write> {
    out: W,
}

impl<W: Write> SessionLogWriter<W> {
    pub fn new(mut out: W, header: &SessionHeader) -> io::Result<Self> {
        let mut head = String::new();
        header.write_to(&mut head);
        head.push_str(COLUMN_HEADER);
        head.push('\n');
        out.write_all(head.as_bytes())?;
        Ok(Self { out })
    }

    pub fn record(&mut self, e: &TouchEvent) -> io::Result<()> {
        writeln!(self.out, "{}", format_event(e))
    }

    pub fn flush(&mut self) -> io::Result<()> {
        self.out.flush()
    }

    pub fn into_inner(mut self) -> io::Result<W> {
        self.out.flush()?;
        Ok(self.out)
    }
}
