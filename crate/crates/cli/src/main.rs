use std::io::Write;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use audiotact::engine::{EngineConfig, InteractionMode};
use audiotact::geometry::Calibration;
use audiotact::gestures::GestureParams;
use audiotact::mapmodel::parse_map;
use audiotact_cli::commands::{self, ReplayArgs, SusCommand};
use audiotact_cli::serve::{serve, ServeConfig};
use audiotact_cli::{CmdResult, Failure};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "audiotact", version, about = "Audio-tactile map engine tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    #[value(name = "single_tap", alias = "single-tap")]
    SingleTap,
    #[value(name = "double_tap", alias = "double-tap")]
    DoubleTap,
}

impl From<Mode> for InteractionMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::SingleTap => InteractionMode::SingleTap,
            Mode::DoubleTap => InteractionMode::DoubleTap,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SusAction {
    /// Per-user scores.
    Score,
    /// Mean, SD and correlations with participant characteristics.
    Stats,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate an SVG map.
    Validate {
        map: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Replay a session log and print `t_ms<TAB>element_id<TAB>text` per announcement.
    Replay {
        map: PathBuf,
        log: PathBuf,
        /// Override the interaction mode recorded in the log.
        #[arg(long, value_enum)]
        mode: Option<Mode>,
        /// 0 prints at once, 1 paces output in real time.
        #[arg(long, default_value_t = 0.0)]
        speed: f64,
        #[arg(long)]
        json: bool,
    },
    /// System Usability Scale tools. Without CSV, uses the embedded participant table.
    Sus {
        #[arg(value_enum)]
        action: SusAction,
        /// Participant table (`user,gender,age,onset_age,braille_years,sus_score`)
        /// or raw answers (`user,q1,...,q10`).
        csv: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Serve live sessions over websockets.
    Serve {
        map: PathBuf,
        #[arg(long, default_value_t = 8700)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long, value_enum, default_value = "double_tap")]
        mode: Mode,
        /// tap_max_duration_ms,tap_max_drift,doubletap_max_gap_ms,doubletap_max_dist
        #[arg(long, value_parser = parse_params)]
        params: Option<GestureParams>,
        /// Device→map affine coefficients a,b,c,d,e,f.
        #[arg(long, value_parser = parse_calibration)]
        calibration: Option<Calibration>,
        /// Directory for session logs.
        #[arg(long, default_value = ".")]
        log_dir: PathBuf,
        /// Do not write session logs.
        #[arg(long)]
        no_log: bool,
    },
}

fn numbers(s: &str, n: usize) -> Result<Vec<f64>, String> {
    let v = s
        .split(',')
        .map(|f| f.trim().parse::<f64>().map_err(|_| format!("`{f}` is not a number")))
        .collect::<Result<Vec<_>, _>>()?;
    if v.len() != n {
        return Err(format!("expected {n} comma-separated numbers"));
    }
    Ok(v)
}

fn parse_params(s: &str) -> Result<GestureParams, String> {
    let v = numbers(s, 4)?;
    let ms = |x: f64| {
        if x >= 0.0 && x.fract() == 0.0 {
            Ok(x as u64)
        } else {
            Err(format!("`{x}` is not whole milliseconds"))
        }
    };
    let p = GestureParams {
        tap_max_duration_ms: ms(v[0])?,
        tap_max_drift: v[1],
        doubletap_max_gap_ms: ms(v[2])?,
        doubletap_max_dist: v[3],
    };
    p.validate()?;
    Ok(p)
}

fn parse_calibration(s: &str) -> Result<Calibration, String> {
    let v = numbers(s, 6)?;
    Calibration::new([v[0], v[1], v[2], v[3], v[4], v[5]]).map_err(|e| e.to_string())
}

fn run_serve(
    map: PathBuf,
    addr: (String, u16),
    engine: EngineConfig,
    calibration: Calibration,
    log_dir: Option<PathBuf>,
) -> CmdResult {
    let bytes = std::fs::read(&map).map_err(|e| Failure::usage(format!("cannot read {}: {e}", map.display())))?;
    let doc = Arc::new(parse_map(&bytes).map_err(|e| Failure::domain(format!("{}: {e}", map.display())))?);
    if let Some(dir) = &log_dir {
        std::fs::create_dir_all(dir).map_err(|e| Failure::usage(format!("cannot create {}: {e}", dir.display())))?;
    }
    let rt = tokio::runtime::Runtime::new().map_err(|e| Failure::domain(format!("cannot start runtime: {e}")))?;
    rt.block_on(async {
        let listener = tokio::net::TcpListener::bind((addr.0.as_str(), addr.1))
            .await
            .map_err(|e| Failure::domain(format!("cannot listen on {}:{}: {e}", addr.0, addr.1)))?;
        let local: SocketAddr = listener.local_addr()?;
        println!("listening on ws://{local} ({})", doc.summary());
        std::io::stdout().flush()?;
        let cfg = ServeConfig { engine, calibration, log_dir };
        serve(listener, doc, cfg, async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
        println!("shut down");
        Ok(())
    })
}

fn run(cli: Cli) -> CmdResult {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Validate { map, json } => commands::validate(&map, json, &mut out),
        Command::Replay { map, log, mode, speed, json } => {
            let args = ReplayArgs { map: &map, log: &log, mode: mode.map(Into::into), speed, json };
            commands::replay(&args, &mut out)
        }
        Command::Sus { action, csv, json } => {
            let cmd = match action {
                SusAction::Score => SusCommand::Score,
                SusAction::Stats => SusCommand::Stats,
            };
            commands::sus(cmd, csv.as_deref(), json, &mut out)
        }
        Command::Serve { map, port, host, mode, params, calibration, log_dir, no_log } => {
            drop(out);
            let engine = EngineConfig {
                interaction_mode: mode.into(),
                gesture_params: params.unwrap_or_default(),
                ..EngineConfig::default()
            };
            run_serve(map, (host, port), engine, calibration.unwrap_or_default(), (!no_log).then_some(log_dir))
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
