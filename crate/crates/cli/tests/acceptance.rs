//! End-to-end acceptance checks. Runs as a plain binary and prints one
//! PASS/FAIL line per criterion; exits non-zero if any fails.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use audiotact::engine::{run_replay_doc, Announcement, SessionLog};
use audiotact::fixtures::{fixture_map, table1, FIXTURE_MAP_SVG};
use audiotact::geometry::{hit_test, HitTolerances};
use audiotact::gestures::{Gesture, GestureKind, GestureParams, Recognizer, TouchEvent};
use audiotact::mapmodel::{parse_map, ElementKind, Geometry, MapDocument, MapError, MapPoint};
use audiotact::scenario::{expected_announcements, incidental_scenario, resting_scenario};
use audiotact::sus::critical_r;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// computed offline with numpy/scipy from the participant table
const ORACLE_R: [(&str, f64); 3] =
    [("age", -0.4425312201353662), ("onset_age", -0.3332016391447916), ("braille_years", -0.32192061475753575)];
const CRITICAL_R_12: f64 = 0.576;

type Check = Result<String, String>;
type CheckFn<'a> = Box<dyn Fn() -> Check + 'a>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn audiotact(args: &[&str]) -> Result<String, String> {
    let o = Command::new(env!("CARGO_BIN_EXE_audiotact")).args(args).output().map_err(|e| e.to_string())?;
    if !o.status.success() {
        return Err(format!("audiotact {args:?} exited {:?}: {}", o.status.code(), String::from_utf8_lossy(&o.stderr)));
    }
    String::from_utf8(o.stdout).map_err(|e| e.to_string())
}

fn within(budget: Duration, start: Instant) -> Result<Duration, String> {
    let took = start.elapsed();
    ensure(took < budget, || format!("took {took:?}, budget {budget:?}"))?;
    Ok(took)
}

fn sus_statistics() -> Check {
    let start = Instant::now();
    let out = audiotact(&["sus", "stats", "--json"])?;
    let took = within(Duration::from_secs(1), start)?;
    let v: serde_json::Value = serde_json::from_str(&out).map_err(|e| e.to_string())?;
    let mean = v["stats"]["mean"].as_f64().ok_or("no mean")?;
    let sd = v["stats"]["sd_sample"].as_f64().ok_or("no sd")?;
    ensure((mean - 87.29).abs() <= 0.05, || format!("mean {mean}"))?;
    ensure((sd - 15.09).abs() <= 0.05, || format!("sd {sd}"))?;
    Ok(format!("mean={mean:.4} sd={sd:.4} in {took:?}"))
}

fn no_correlation() -> Check {
    let out = audiotact(&["sus", "stats", "--json"])?;
    let v: serde_json::Value = serde_json::from_str(&out).map_err(|e| e.to_string())?;
    let crit = critical_r(12).map_err(|e| e.to_string())?;
    ensure((crit - CRITICAL_R_12).abs() <= 0.001, || format!("critical_r(12) = {crit}"))?;
    let rows = v["correlations"].as_array().ok_or("no correlations")?;
    ensure(rows.len() == 3, || format!("{} correlations", rows.len()))?;
    let mut summary = Vec::new();
    for (name, pinned) in ORACLE_R {
        let row = rows.iter().find(|r| r["characteristic"] == name).ok_or_else(|| format!("{name} missing"))?;
        let r = row["r"].as_f64().ok_or("r missing")?;
        ensure((r - pinned).abs() < 1e-12, || format!("{name}: r={r}, oracle {pinned}"))?;
        ensure(r.abs() < crit, || format!("{name}: |r|={} ≥ {crit}", r.abs()))?;
        ensure(row["significant"] == false, || format!("{name} flagged significant"))?;
        summary.push(format!("{name} r={r:.3}"));
    }
    Ok(format!("{} < {crit:.3}", summary.join(", ")))
}

fn score_sanity() -> Check {
    let rows = table1();
    ensure(rows.len() == 12, || format!("{} rows", rows.len()))?;
    for r in &rows {
        let s = r.sus_score.value();
        if r.user == 10 {
            ensure(s == 45.0, || format!("user 10 scored {s}"))?;
        } else {
            ensure(s >= 75.0, || format!("user {} scored {s}", r.user))?;
        }
    }
    Ok("11 scores ≥ 75, user 10 = 45".into())
}

fn lines(a: &[Announcement]) -> String {
    a.iter().map(|a| a.to_line() + "\n").collect()
}

struct Files {
    _dir: tempfile::TempDir,
    map: PathBuf,
}

impl Files {
    fn new() -> Result<Files, String> {
        let dir = tempfile::TempDir::new().map_err(|e| e.to_string())?;
        let map = dir.path().join("fictive_town.svg");
        std::fs::write(&map, FIXTURE_MAP_SVG).map_err(|e| e.to_string())?;
        Ok(Files { _dir: dir, map })
    }

    fn log(&self, name: &str, log: &SessionLog) -> Result<PathBuf, String> {
        let p = self.map.with_file_name(name);
        std::fs::write(&p, log.to_csv()).map_err(|e| e.to_string())?;
        Ok(p)
    }
}

fn p(path: &Path) -> &str {
    path.to_str().expect("temp paths are UTF-8")
}

fn core_scenario(files: &Files) -> Check {
    let doc = Arc::new(fixture_map());
    let log = resting_scenario(&doc, 5000);
    let expected = expected_announcements(&doc);
    ensure(expected.len() == 13, || format!("{} features", expected.len()))?;

    let start = Instant::now();
    let first = lines(&run_replay_doc(doc.clone(), &log, None).map_err(|e| e.to_string())?);
    for _ in 1..100 {
        let again = lines(&run_replay_doc(doc.clone(), &log, None).map_err(|e| e.to_string())?);
        ensure(again == first, || "replay output differs between runs".into())?;
    }
    let took = within(Duration::from_secs(1), start)?;

    let got = run_replay_doc(doc.clone(), &log, None).map_err(|e| e.to_string())?;
    let ids: Vec<(String, String)> =
        got.iter().map(|a| (a.element_id.clone().unwrap_or_default(), a.text.clone())).collect();
    ensure(ids == expected, || format!("got {ids:?}"))?;
    // every announcement completes one of the tapping finger's double taps
    let tapper_ups: Vec<u64> =
        log.events.iter().filter(|e| e.contact_id == 2 && e.phase.as_str() == "up").map(|e| e.t).collect();
    ensure(got.iter().all(|a| tapper_ups.contains(&a.t)), || "announcement not caused by the tapping finger".into())?;
    let resting_only =
        SessionLog::new(log.header.clone(), log.events.iter().filter(|e| e.contact_id != 2).cloned().collect());
    let silent = run_replay_doc(doc, &resting_only, None).map_err(|e| e.to_string())?;
    ensure(silent.is_empty(), || format!("resting contacts announced {silent:?}"))?;

    let path = files.log("core.csv", &log)?;
    let cli = audiotact(&["replay", p(&files.map), p(&path)])?;
    ensure(cli == first, || format!("CLI output differs:\n{cli}"))?;
    Ok(format!("13/13 announced, 0 from resting contacts, 100 identical replays in {took:?}"))
}

fn failure_mode(files: &Files) -> Check {
    let doc = fixture_map();
    let path = files.log("incidental.csv", &incidental_scenario(&doc, 150))?;
    let single = audiotact(&["replay", p(&files.map), p(&path), "--mode", "single_tap"])?.lines().count();
    let double = audiotact(&["replay", p(&files.map), p(&path), "--mode", "double_tap"])?.lines().count();
    ensure(single > double, || format!("single_tap {single} vs double_tap {double}"))?;
    Ok(format!("single_tap {single} > double_tap {double}"))
}

/// A contact lifetime on one of four finger slots.
struct Life {
    slot: u32,
    down: u64,
    up: u64,
    at: (f64, f64),
    wiggle: Vec<(f64, f64)>,
}

fn random_lives(rng: &mut ChaCha8Rng, n: usize, resting_only: bool) -> Vec<Life> {
    let mut cursor = [0u64; 4];
    (0..n)
        .map(|_| {
            let slot = rng.gen_range(0..4u32);
            let duration =
                if resting_only || rng.gen_bool(0.25) { rng.gen_range(301..2500) } else { rng.gen_range(0..=320) };
            let down = cursor[slot as usize] + rng.gen_range(0..600);
            let up = down + duration;
            cursor[slot as usize] = up;
            let at = (rng.gen_range(0.0..120.0), rng.gen_range(0.0..120.0));
            let wiggle =
                (0..rng.gen_range(0..4)).map(|_| (rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0))).collect();
            Life { slot, down, up, at, wiggle }
        })
        .collect()
}

fn stream(lives: &[Life], id: impl Fn(usize, &Life) -> u32) -> Vec<TouchEvent> {
    let mut out = Vec::new();
    for (n, l) in lives.iter().enumerate() {
        let id = id(n, l);
        out.push(TouchEvent::down(l.down, id, l.at.0, l.at.1));
        let m = l.wiggle.len() as u64;
        for (k, (dx, dy)) in l.wiggle.iter().enumerate() {
            let t = l.down + (l.up - l.down) * (k as u64 + 1) / (m + 1);
            out.push(TouchEvent::moved(t, id, l.at.0 + dx, l.at.1 + dy));
        }
        out.push(TouchEvent::up(l.up, id, l.at.0, l.at.1));
    }
    out.sort_by_key(|e| e.t);
    out
}

fn recognize(events: &[TouchEvent], p: GestureParams) -> Result<Vec<Gesture>, String> {
    let mut r = Recognizer::new(p);
    let mut out = Vec::new();
    for e in events {
        out.extend(r.feed(e).map_err(|e| e.to_string())?);
    }
    if let Some(last) = r.last_t() {
        out.extend(r.flush(last + p.doubletap_max_gap_ms + 1));
    }
    Ok(out)
}

fn gesture_properties() -> Check {
    const STREAMS: u64 = 10_000;
    let p = GestureParams {
        tap_max_duration_ms: 300,
        tap_max_drift: 8.0,
        doubletap_max_gap_ms: 400,
        doubletap_max_dist: 15.0,
    };
    let start = Instant::now();
    for seed in 0..STREAMS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(0..12);
        let lives = random_lives(&mut rng, n, false);
        let events = stream(&lives, |_, l| l.slot);
        let fail = |what: &str| format!("{what} violated for seed {seed}");

        let g = recognize(&events, p)?;
        ensure(recognize(&events, p)? == g, || fail("determinism"))?;
        ensure(recognize(&stream(&lives, |n, _| 1000 + n as u32), p)? == g, || fail("id-reuse equivalence"))?;

        let drift = |l: &Life| l.wiggle.iter().map(|(x, y)| x.hypot(*y)).fold(0.0, f64::max);
        let taps =
            lives.iter().filter(|l| l.up - l.down <= p.tap_max_duration_ms && drift(l) <= p.tap_max_drift).count();
        let singles = g.iter().filter(|g| g.kind == GestureKind::SingleTap).count();
        let doubles = g.iter().filter(|g| g.kind == GestureKind::DoubleTap).count();
        ensure(singles + 2 * doubles == taps, || fail("tap conservation"))?;
        ensure(g.windows(2).all(|w| w[0].t <= w[1].t), || fail("monotone output"))?;

        let resting = random_lives(&mut rng, n + 1, true);
        ensure(recognize(&stream(&resting, |_, l| l.slot), p)?.is_empty(), || fail("resting suppression"))?;
    }
    let took = within(Duration::from_secs(60), start)?;
    Ok(format!("{STREAMS} streams (+{STREAMS} resting-only) in {took:?}"))
}

fn segment_distance(p: MapPoint, a: MapPoint, b: MapPoint) -> f64 {
    let (vx, vy) = (b.x - a.x, b.y - a.y);
    let len2 = vx * vx + vy * vy;
    let t = if len2 == 0.0 { 0.0 } else { (((p.x - a.x) * vx + (p.y - a.y) * vy) / len2).clamp(0.0, 1.0) };
    (p.x - (a.x + t * vx)).hypot(p.y - (a.y + t * vy))
}

fn brute_force(doc: &MapDocument, p: MapPoint, tol: &HitTolerances) -> Option<String> {
    let mut scored: Vec<(f64, u8, &str)> = Vec::new();
    for el in doc.elements() {
        let (rank, limit) = match el.kind {
            ElementKind::Poi => (0, tol.poi_radius),
            ElementKind::Street => (1, tol.street_halfwidth),
            ElementKind::River => (2, tol.river_halfwidth),
            ElementKind::Frame => continue,
        };
        let d = match &el.geometry {
            Geometry::Point { x, y } => (p.x - x).hypot(p.y - y),
            Geometry::Polyline { vertices } => {
                vertices.windows(2).map(|w| segment_distance(p, w[0], w[1])).fold(f64::INFINITY, f64::min)
            }
            Geometry::Polygon { vertices } => {
                let n = vertices.len();
                let mut inside = false;
                for i in 0..n {
                    let (a, b) = (vertices[i], vertices[(i + 1) % n]);
                    if (a.y <= p.y) != (b.y <= p.y) && a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y) < p.x {
                        inside = !inside;
                    }
                }
                if inside {
                    0.0
                } else {
                    (0..n)
                        .map(|i| segment_distance(p, vertices[i], vertices[(i + 1) % n]))
                        .fold(f64::INFINITY, f64::min)
                }
            }
        };
        if d <= limit {
            scored.push((d, rank, &el.id));
        }
    }
    let best = scored.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
    scored.retain(|s| s.0 <= best + 1e-9);
    scored.sort_by(|a, b| (a.1, a.2).cmp(&(b.1, b.2)));
    scored.first().map(|s| s.2.to_owned())
}

fn geometry_oracle() -> Check {
    let doc = fixture_map();
    let tol = HitTolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0x6e0);
    let mut hits = 0;
    for _ in 0..1000 {
        let p = MapPoint::new(rng.gen_range(0.0..400.0), rng.gen_range(0.0..300.0));
        let got = hit_test(&doc, p, &tol).map(|h| h.element_id);
        let want = brute_force(&doc, p, &tol);
        ensure(got == want, || format!("at ({}, {}): hit_test {got:?}, brute force {want:?}", p.x, p.y))?;
        hits += usize::from(got.is_some());
    }
    // equidistant from the musée and rue des Lilas: the POI wins the tie
    let wide = HitTolerances::new(20.0, 20.0, 20.0).map_err(|e| e.to_string())?;
    let tie = MapPoint::new(150.0, 75.0);
    let got = hit_test(&doc, tie, &wide).map(|h| h.element_id);
    ensure(got.as_deref() == Some("poi-musee") && got == brute_force(&doc, tie, &wide), || {
        format!("tie point gave {got:?}")
    })?;
    Ok(format!("1000 random points agree ({hits} hits), tie-break agrees"))
}

fn map_parsing() -> Check {
    let doc = parse_map(FIXTURE_MAP_SVG.as_bytes()).map_err(|e| e.to_string())?;
    let counts: Vec<usize> = ElementKind::ALL.iter().map(|k| doc.count(*k)).collect();
    let by_kind: Vec<(&str, usize)> = ElementKind::ALL.iter().map(|k| k.as_str()).zip(counts.iter().copied()).collect();
    let want = [("street", 6), ("poi", 6), ("river", 1), ("frame", 1)];
    for (k, n) in want {
        ensure(by_kind.contains(&(k, n)), || format!("counts {by_kind:?}"))?;
    }

    let untitled = FIXTURE_MAP_SVG.replace("<title>rue du Port</title>", "");
    match parse_map(untitled.as_bytes()) {
        Err(MapError::Structure { element: Some(id), .. }) if id == "street-port" => {}
        other => return Err(format!("dropped title gave {other:?}")),
    }
    let curved = FIXTURE_MAP_SVG.replace("d=\"M 20,60 L 380,60\"", "d=\"M 20,60 C 100,0 300,0 380,60\"");
    ensure(curved != FIXTURE_MAP_SVG, || "mutation target not found".into())?;
    match parse_map(curved.as_bytes()) {
        Err(MapError::UnsupportedGeometry { element, .. }) if element == "street-lilas" => {}
        other => return Err(format!("broken path gave {other:?}")),
    }
    Ok("6 streets, 6 POIs, 1 river, 1 frame; mutations rejected".into())
}

fn main() {
    let files = match Files::new() {
        Ok(f) => f,
        Err(e) => {
            eprintln!("cannot set up: {e}");
            std::process::exit(2);
        }
    };
    let checks: [(&str, CheckFn); 8] = [
        ("SUS statistics", Box::new(sus_statistics)),
        ("no-correlation claim", Box::new(no_correlation)),
        ("score sanity", Box::new(score_sanity)),
        ("core interaction scenario", Box::new(|| core_scenario(&files))),
        ("failure-mode reproduction", Box::new(|| failure_mode(&files))),
        ("gesture property suite", Box::new(gesture_properties)),
        ("geometry oracle", Box::new(geometry_oracle)),
        ("map parsing", Box::new(map_parsing)),
    ];
    let mut failed = 0;
    for (name, check) in &checks {
        match check() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    println!("{} passed, {failed} failed", checks.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
