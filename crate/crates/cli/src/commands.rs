use std::io::Write;
use std::path::Path;
use std::time::Duration;

use audiotact::engine::{run_replay, InteractionMode, SessionLog};
use audiotact::fixtures::TABLE1_CSV;
use audiotact::mapmodel::{parse_map, validate_map, ElementKind, Severity};
use audiotact::sus::{
    adjective, aggregate, correlate_characteristics, read_records, read_responses, SusError, SusScore,
};
use serde_json::json;

use crate::{CmdResult, Failure};

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    std::fs::read(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))
}

fn print_json(out: &mut dyn Write, v: &serde_json::Value) -> std::io::Result<()> {
    writeln!(out, "{}", serde_json::to_string_pretty(v).expect("json values serialise"))
}

pub fn validate(path: &Path, json: bool, out: &mut dyn Write) -> CmdResult {
    let bytes = read(path)?;
    let doc = match parse_map(&bytes) {
        Ok(doc) => doc,
        Err(e) => {
            if json {
                print_json(out, &json!({ "ok": false, "error": e.to_string() }))?;
            } else {
                writeln!(out, "error: {e}")?;
            }
            return Err(Failure::domain(format!("{}: invalid map", path.display())));
        }
    };
    let violations = validate_map(&doc);
    let errors = violations.iter().filter(|v| v.severity == Severity::Error).count();
    if json {
        let counts: serde_json::Map<String, serde_json::Value> =
            ElementKind::ALL.iter().map(|k| (k.as_str().to_owned(), json!(doc.count(*k)))).collect();
        print_json(
            out,
            &json!({
                "ok": errors == 0,
                "name": doc.source_name(),
                "summary": doc.summary(),
                "counts": counts,
                "violations": violations,
            }),
        )?;
    } else {
        writeln!(out, "{}", doc.summary())?;
        for v in &violations {
            let severity = match v.severity {
                Severity::Warning => "warning",
                Severity::Error => "error",
            };
            match &v.element_id {
                Some(id) => writeln!(out, "{severity}: {id}: {}", v.message)?,
                None => writeln!(out, "{severity}: {}", v.message)?,
            }
        }
    }
    if errors > 0 {
        return Err(Failure::domain(format!("{errors} error(s)")));
    }
    Ok(())
}

pub struct ReplayArgs<'a> {
    pub map: &'a Path,
    pub log: &'a Path,
    pub mode: Option<InteractionMode>,
    /// 0 prints everything at once; 1 waits in real time; 2 twice as fast.
    pub speed: f64,
    pub json: bool,
}

pub fn replay(args: &ReplayArgs<'_>, out: &mut dyn Write) -> CmdResult {
    if !(args.speed >= 0.0 && args.speed.is_finite()) {
        return Err(Failure::usage("--speed must be a non-negative number"));
    }
    let map = read(args.map)?;
    let text = read(args.log)?;
    let text = String::from_utf8(text).map_err(|_| Failure::domain(format!("{}: not UTF-8", args.log.display())))?;
    let log = SessionLog::parse(&text).map_err(|e| Failure::domain(format!("{}: {e}", args.log.display())))?;
    let cfg = args.mode.map(|m| log.header.engine_config().with_mode(m));
    let announcements =
        run_replay(&map, &log, cfg.as_ref()).map_err(|e| Failure::domain(format!("{}: {e}", args.log.display())))?;

    if args.json {
        print_json(out, &serde_json::to_value(&announcements).expect("announcements serialise"))?;
        return Ok(());
    }
    let start = log.events.first().map_or(0, |e| e.t);
    let began = std::time::Instant::now();
    for a in &announcements {
        if args.speed > 0.0 {
            let due = Duration::from_secs_f64(a.t.saturating_sub(start) as f64 / 1000.0 / args.speed);
            if let Some(wait) = due.checked_sub(began.elapsed()) {
                std::thread::sleep(wait);
            }
        }
        writeln!(out, "{}", a.to_line())?;
        out.flush()?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SusCommand {
    Score,
    Stats,
}

fn sus_error(e: SusError) -> Failure {
    Failure::domain(e.to_string())
}

/// Scores per user and, for participant tables, the characteristics.
enum SusInput {
    Records(Vec<audiotact::sus::ParticipantRecord>),
    Responses(Vec<audiotact::sus::ResponseRow>),
}

impl SusInput {
    fn scores(&self) -> Vec<(String, SusScore)> {
        match self {
            SusInput::Records(r) => r.iter().map(|r| (r.user.to_string(), r.sus_score)).collect(),
            SusInput::Responses(r) => r.iter().map(|r| (r.user.clone(), r.score())).collect(),
        }
    }
}

fn load_sus(csv: Option<&Path>) -> Result<SusInput, Failure> {
    let text = match csv {
        Some(p) => String::from_utf8(read(p)?).map_err(|_| Failure::domain(format!("{}: not UTF-8", p.display())))?,
        None => TABLE1_CSV.to_owned(),
    };
    let header = text.lines().next().unwrap_or("").trim();
    if header.starts_with("user,q1") {
        read_responses(text.as_bytes()).map(SusInput::Responses).map_err(sus_error)
    } else {
        read_records(text.as_bytes()).map(SusInput::Records).map_err(sus_error)
    }
}

pub fn sus(cmd: SusCommand, csv: Option<&Path>, json: bool, out: &mut dyn Write) -> CmdResult {
    let input = load_sus(csv)?;
    let scores = input.scores();
    match cmd {
        SusCommand::Score => {
            if json {
                let rows: Vec<_> = scores
                    .iter()
                    .map(|(u, s)| json!({ "user": u, "score": s.value(), "adjective": adjective(*s) }))
                    .collect();
                print_json(out, &json!(rows))?;
            } else {
                for (user, s) in &scores {
                    writeln!(out, "{user}\t{}\t{}", s.value(), adjective(*s).unwrap_or("-"))?;
                }
            }
        }
        SusCommand::Stats => {
            let values: Vec<SusScore> = scores.iter().map(|(_, s)| *s).collect();
            let stats = aggregate(&values).map_err(sus_error)?;
            let correlations = match &input {
                SusInput::Records(r) => correlate_characteristics(r).map_err(sus_error)?,
                SusInput::Responses(_) => Vec::new(),
            };
            if json {
                print_json(out, &json!({ "stats": stats, "correlations": correlations }))?;
            } else {
                writeln!(out, "n={} mean={:.2} sd={:.2}", stats.n, stats.mean, stats.sd_sample)?;
                writeln!(out, "min={} max={}", stats.min, stats.max)?;
                for c in &correlations {
                    writeln!(
                        out,
                        "{}: r={:.3} critical_r={:.3} {}",
                        c.characteristic.as_str(),
                        c.r,
                        c.critical_r,
                        if c.significant { "significant" } else { "not significant" }
                    )?;
                }
            }
        }
    }
    Ok(())
}
