//! Acceptance checks. Prints one PASS or FAIL line per criterion and exits
//! nonzero if any failed.

use std::collections::{BTreeMap, BTreeSet};
use std::process::Command;
use std::time::{Duration, Instant};

use percussim_core::arena::{execute_stroke, Instrument, RobotEnv, DEFAULT_BASS_ZONE, NORTH};
use percussim_core::events::{LightCause, SimEvent};
use percussim_core::patterns::{StrokeKind, DEFAULT_LIBRARY_TOML};
use percussim_core::rng;
use percussim_core::timing::Aim;
use percussim_core::{
    candidate_set, impact_tone, load_library, run, select_next, Arena, CompatibilityMatrix,
    ControlCommand, EventLog, InstrumentKind, JitterModel, Kinematics, PatternLibrary,
    PerformanceConfig, Record, RobotState, Role, SelectionContext, SimTime, StrokePlan,
    TimedCommand, Tone,
};
use statrs::distribution::{ChiSquared, ContinuousCDF};

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("determinism", determinism),
        ("pattern-window", pattern_window),
        ("fail-safe", fail_safe),
        ("phasing", phasing),
        ("selection-oracle", selection_oracle),
        ("stroke-mechanics", stroke_mechanics),
        ("tone-partition", tone_partition),
        ("light-contract", light_contract),
        ("library-validation", library_validation),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let started = Instant::now();
        let outcome = f();
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail} ({secs:.1} s)"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail} ({secs:.1} s)");
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut slowest = Duration::ZERO;
    for name in ["a", "b"] {
        let started = Instant::now();
        let out = Command::new(env!("CARGO_BIN_EXE_percussim"))
            .args(["run", "--seed", "42", "--duration", "60"])
            .args([
                "--out-log",
                &format!("{name}.ndjson"),
                "--out-midi",
                &format!("{name}.mid"),
            ])
            .current_dir(dir.path())
            .env_remove("PERCUSSIM_PATTERNS")
            .output()
            .map_err(|e| e.to_string())?;
        slowest = slowest.max(started.elapsed());
        check(out.status.success(), || {
            String::from_utf8_lossy(&out.stderr).into_owned()
        })?;
    }
    let read = |f: &str| std::fs::read(dir.path().join(f)).map_err(|e| e.to_string());
    let (la, lb) = (read("a.ndjson")?, read("b.ndjson")?);
    let (ma, mb) = (read("a.mid")?, read("b.mid")?);
    check(la == lb, || "event logs differ".into())?;
    check(ma == mb, || "MIDI files differ".into())?;
    check(slowest < Duration::from_secs(5), || {
        format!("a run took {slowest:?}")
    })?;
    Ok(format!(
        "logs ({} bytes) and MIDI ({} bytes) identical, slowest run {:.2} s",
        la.len(),
        ma.len(),
        slowest.as_secs_f64()
    ))
}

fn single_pattern_library(id: &str) -> PatternLibrary {
    let bundled = PatternLibrary::bundled();
    let p = bundled.get(id).expect("bundled pattern").clone();
    let mut m = CompatibilityMatrix::new();
    m.allow(p.category(), p.category());
    PatternLibrary::new(format!("{id}-only"), "", *bundled.note_values(), m, vec![p])
        .expect("valid single-pattern library")
}

fn pattern_window() -> Outcome {
    const ONSETS_US: [i64; 7] = [
        0, 1_000_000, 1_500_000, 2_000_000, 2_250_000, 3_250_000, 3_500_000,
    ];
    let lib = single_pattern_library("uq-text");
    let cfg = PerformanceConfig::exact(11, 60.0);
    let log = run(&cfg, &lib, &[]).map_err(|e| e.to_string())?;

    let mut starts: BTreeMap<usize, Vec<i64>> = BTreeMap::new();
    let mut selections = 0;
    let mut window_start: BTreeMap<(usize, u64), i64> = BTreeMap::new();
    for (_, e) in log.sim_events() {
        match e {
            SimEvent::Window {
                robot,
                window,
                start,
                ..
            } => {
                starts.entry(*robot).or_default().push(start.micros());
                check(start.micros() == *window as i64 * 4_000_000, || {
                    format!("window {window} starts at {start:?}")
                })?;
            }
            SimEvent::Selection {
                robot,
                window,
                window_start: ws,
                strokes,
                ..
            } => {
                selections += 1;
                window_start.insert((*robot, *window), ws.micros());
                let rel: Vec<i64> = strokes
                    .iter()
                    .map(|s| s.nominal.micros() - ws.micros())
                    .collect();
                check(rel == ONSETS_US, || {
                    format!("robot {robot} window {window}: onsets {rel:?}")
                })?;
                check(strokes.iter().all(|s| s.scheduled == s.nominal), || {
                    "scheduled differs from nominal with jitter off".into()
                })?;
            }
            _ => {}
        }
    }
    for (robot, s) in &starts {
        check(s.len() >= 14, || {
            format!("robot {robot}: only {} windows", s.len())
        })?;
        check(s.windows(2).all(|w| w[1] - w[0] == 4_000_000), || {
            format!("robot {robot}: window spans {s:?}")
        })?;
    }
    let mut hits = 0;
    for (_, s) in log.sounds() {
        if !(s.purposeful && s.stroke_index == 1) {
            continue;
        }
        let (Some(w), Some(i)) = (s.window, s.event_index) else {
            return Err("purposeful sound without window".into());
        };
        let ws = window_start[&(s.robot, w)];
        check(s.time.micros() - ws == ONSETS_US[i as usize], || {
            format!(
                "robot {} window {w} event {i} sounded at {:?}",
                s.robot, s.time
            )
        })?;
        hits += 1;
    }
    check(hits > 0, || "no purposeful hits".into())?;
    Ok(format!(
        "{selections} selections, all windows 4.000000 s apart, {hits} purposeful hits exactly on the grid"
    ))
}

fn fail_safe() -> Outcome {
    let cfg = PerformanceConfig {
        seed: 3,
        duration: 600.0,
        suppressed: vec![1],
        ..Default::default()
    };
    let limit = SimTime::from_secs_f64(4.0) + cfg.dt_time();
    let log = run(&cfg, &PatternLibrary::bundled(), &[]).map_err(|e| e.to_string())?;
    let mut marks: Vec<Vec<SimTime>> = vec![vec![SimTime::ZERO]; 4];
    let mut turnarounds = [0usize; 4];
    for (t, s) in log.sounds() {
        marks[s.robot].push(t);
    }
    for (t, e) in log.sim_events() {
        if let SimEvent::TurnAround { robot, .. } = e {
            marks[*robot].push(t);
            turnarounds[*robot] += 1;
        }
    }
    let end = SimTime::from_secs_f64(cfg.duration);
    let mut worst = SimTime::ZERO;
    for (robot, m) in marks.iter_mut().enumerate() {
        m.push(end);
        m.sort();
        for w in m.windows(2) {
            let gap = w[1] - w[0];
            worst = worst.max(gap);
            check(gap <= limit, || {
                format!(
                    "robot {robot}: {gap:?} without a collision or turnaround after {:?}",
                    w[0]
                )
            })?;
        }
    }
    check(log.sounds().all(|(_, s)| s.robot != 1), || {
        "suppressed robot sounded".into()
    })?;
    check(turnarounds[1] >= 149, || {
        format!("only {} turnarounds on the silent robot", turnarounds[1])
    })?;
    Ok(format!(
        "turnarounds per robot {turnarounds:?}; longest gap {:.3} s <= {:.3} s",
        worst.as_secs_f64(),
        limit.as_secs_f64()
    ))
}

/// Per (window, event index): onset difference between robots 0 and 1.
fn onset_differences(sigma: f64, windows: u64) -> Result<BTreeMap<(u64, u32), f64>, String> {
    let cfg = PerformanceConfig {
        seed: 19,
        duration: 4.0 * (windows + 1) as f64,
        jitter: JitterModel {
            per_stroke_sigma: sigma,
            drift_per_stroke: 0.0,
            early_power_cut_prob: 0.0,
        },
        kinematics: Kinematics {
            heading_sigma_deg: 0.0,
            ..Kinematics::default()
        },
        ..Default::default()
    };
    let log = run(&cfg, &single_pattern_library("es-four"), &[]).map_err(|e| e.to_string())?;
    let mut onsets: [BTreeMap<(u64, u32), SimTime>; 2] = Default::default();
    for (t, s) in log.sounds() {
        if s.robot < 2 && s.purposeful && s.stroke_index == 1 {
            if let (Some(w), Some(i)) = (s.window, s.event_index) {
                onsets[s.robot].insert((w, i), t);
            }
        }
    }
    Ok(onsets[0]
        .iter()
        .filter_map(|(k, a)| onsets[1].get(k).map(|b| (*k, (*a - *b).as_secs_f64())))
        .collect())
}

fn phasing() -> Outcome {
    let windows = 202;
    let diffs = onset_differences(0.05, windows)?;
    let full: BTreeSet<u64> = diffs
        .keys()
        .map(|k| k.0)
        .filter(|w| (0..4).all(|i| diffs.contains_key(&(*w, i))))
        .collect();
    check(full.len() >= 200, || {
        format!("only {} complete windows", full.len())
    })?;
    let mean_abs = |i: u32, ws: &mut dyn Iterator<Item = &u64>| {
        let v: Vec<f64> = ws.map(|w| diffs[&(*w, i)].abs()).collect();
        v.iter().sum::<f64>() / v.len() as f64
    };
    let means: Vec<f64> = (0..4).map(|i| mean_abs(i, &mut full.iter())).collect();
    check(means.windows(2).all(|m| m[1] > m[0]), || {
        format!("means not increasing: {means:?}")
    })?;
    // Reset: the first stroke of a window is no further apart than the first
    // stroke of the first windows, and closer than the last stroke before it.
    let half = full.len() / 2;
    let early = mean_abs(0, &mut full.iter().take(half));
    let late = mean_abs(0, &mut full.iter().skip(half));
    check(late < 1.25 * early && early < 1.25 * late, || {
        format!("first-stroke spread drifts across windows: {early:.4} vs {late:.4}")
    })?;
    let drops = full
        .iter()
        .filter(|w| full.contains(&(**w + 1)))
        .map(|w| (diffs[&(*w, 3)].abs(), diffs[&(*w + 1, 0)].abs()))
        .collect::<Vec<_>>();
    let before: f64 = drops.iter().map(|d| d.0).sum::<f64>() / drops.len() as f64;
    let after: f64 = drops.iter().map(|d| d.1).sum::<f64>() / drops.len() as f64;
    check(after < before, || {
        format!("no reset at boundaries: {before:.4} -> {after:.4}")
    })?;

    let exact = onset_differences(0.0, 30)?;
    check(
        !exact.is_empty() && exact.values().all(|d| *d == 0.0),
        || "sigma 0 gives nonzero differences".into(),
    )?;
    Ok(format!(
        "{} windows, mean |diff| by stroke {:?} s; boundary {before:.4} -> {after:.4}; sigma 0: {} pairs all 0",
        full.len(),
        means.iter().map(|m| (m * 1e4).round() / 1e4).collect::<Vec<_>>(),
        exact.len()
    ))
}

const ORACLE_LIBRARY: &str = r#"
name = "oracle"

[transitions]
even_quick = ["even_quick", "even_slow"]
even_slow = ["even_slow", "uneven_quick"]
uneven_quick = ["uneven_quick", "uneven_slow"]
uneven_slow = ["uneven_slow", "even_quick"]

[[patterns]]
id = "eq1"
evenness = "even"
speed = "quick"
events = [{ onset = 0.0, note = "short" }, { onset = 0.5, note = "short" }]

[[patterns]]
id = "eq2"
evenness = "even"
speed = "quick"
events = [{ onset = 0.0, note = "shortest" }]

[[patterns]]
id = "es1"
evenness = "even"
speed = "slow"
events = [{ onset = 0.0, note = "long" }]

[[patterns]]
id = "es2"
evenness = "even"
speed = "slow"
events = [{ onset = 0.0, note = "long" }, { onset = 1.0, note = "long", stroke = "double" }]

[[patterns]]
id = "uq1"
evenness = "uneven"
speed = "quick"
events = [
  { onset = 0.0, note = "short" },
  { onset = 0.5, note = "short" },
  { onset = 1.0, note = "long" },
]

[[patterns]]
id = "uq2"
evenness = "uneven"
speed = "quick"
events = [
  { onset = 0.0, note = "shortest" },
  { onset = 0.25, note = "shortest" },
  { onset = 0.5, note = "short" },
  { onset = 1.0, note = "long" },
  { onset = 2.0, note = "short" },
  { onset = 2.5, note = "short" },
  { onset = 3.0, note = "long" },
]

[[patterns]]
id = "us1"
evenness = "uneven"
speed = "slow"
events = [{ onset = 0.0, note = "long" }, { onset = 1.0, note = "long" }, { onset = 2.0, note = "short" }, { onset = 2.5, note = "short" }, { onset = 3.0, note = "long" }]

[[patterns]]
id = "us2"
evenness = "uneven"
speed = "slow"
events = [{ onset = 0.0, note = "long" }, { onset = 1.0, note = "short" }, { onset = 1.5, note = "long" }, { onset = 2.5, note = "long" }, { onset = 3.5, note = "short" }]
"#;

/// Brute-force reading of the selection rules over the oracle library,
/// using only the ids, tags and transition table written above.
fn oracle_candidates(
    role: Role,
    own: &str,
    leader: Option<&str>,
) -> Option<BTreeSet<&'static str>> {
    const IDS: [&str; 8] = ["eq1", "eq2", "es1", "es2", "uq1", "uq2", "us1", "us2"];
    fn cat(id: &str) -> &str {
        &id[..2]
    }
    let even = |id: &str| id.starts_with('e');
    let allowed = |from: &str, to: &str| {
        matches!(
            (from, to),
            ("eq", "eq")
                | ("eq", "es")
                | ("es", "es")
                | ("es", "uq")
                | ("uq", "uq")
                | ("uq", "us")
                | ("us", "us")
                | ("us", "eq")
        )
    };
    let all: BTreeSet<&str> = IDS.into_iter().collect();
    match (role, leader) {
        (Role::Leader, None) => {
            let reach: BTreeSet<&str> = IDS
                .into_iter()
                .filter(|p| allowed(cat(own), cat(p)))
                .collect();
            let without: BTreeSet<&str> = reach.iter().copied().filter(|p| *p != own).collect();
            Some(if without.is_empty() { reach } else { without })
        }
        (Role::Follower, Some(l)) => {
            let leader_rule: BTreeSet<&str> =
                IDS.into_iter().filter(|p| even(p) == even(l)).collect();
            let both: BTreeSet<&str> = leader_rule
                .iter()
                .copied()
                .filter(|p| allowed(cat(own), cat(p)))
                .collect();
            Some(if !both.is_empty() {
                both
            } else if !leader_rule.is_empty() {
                leader_rule
            } else {
                all
            })
        }
        _ => None,
    }
}

fn selection_oracle() -> Outcome {
    const DRAWS: usize = 10_000;
    let lib = load_library(ORACLE_LIBRARY).map_err(|e| e.to_string())?;
    let ids: Vec<&str> = lib.patterns().iter().map(|p| p.id.as_str()).collect();
    check(ids.len() == 8, || {
        "oracle library must have 8 patterns".into()
    })?;

    let mut contexts = 0;
    let mut tested = 0;
    let mut min_p = f64::INFINITY;
    let mut fallbacks = 0;
    let mut rejected = Vec::new();
    for (n, (own, leader, role)) in ids
        .iter()
        .flat_map(|o| {
            std::iter::once(None)
                .chain(ids.iter().map(|l| Some(*l)))
                .flat_map(move |l| [Role::Leader, Role::Follower].map(|r| (*o, l, r)))
        })
        .enumerate()
    {
        contexts += 1;
        let ctx = SelectionContext {
            role,
            own_previous: Some(own),
            leader_current: leader,
        };
        let got = candidate_set(&lib, &ctx);
        let want = oracle_candidates(role, own, leader);
        let (got, want) = match (got, want) {
            (Err(_), None) => continue,
            (Ok(g), Some(w)) => (
                g.iter().map(|p| p.id.as_str()).collect::<BTreeSet<&str>>(),
                w,
            ),
            (g, w) => {
                return Err(format!(
                    "{role:?} {own} {leader:?}: got {g:?}, oracle {w:?}"
                ))
            }
        };
        check(got == want, || {
            format!("{role:?} {own} {leader:?}: got {got:?}, oracle {want:?}")
        })?;
        if let (Role::Follower, Some(l)) = (role, leader) {
            if !want
                .iter()
                .all(|p| p.starts_with(&own[..2]) || p.starts_with(&l[..1]))
            {
                fallbacks += 1;
            }
        }

        let mut counts: BTreeMap<&str, usize> = want.iter().map(|p| (*p, 0)).collect();
        let mut rng = rng::stream(20_260_101, n as u64);
        for _ in 0..DRAWS {
            let p = select_next(&lib, &ctx, &mut rng).map_err(|e| e.to_string())?;
            *counts
                .get_mut(p.id.as_str())
                .ok_or_else(|| format!("drew {} outside the candidate set", p.id))? += 1;
        }
        let k = counts.len();
        if k < 2 {
            continue;
        }
        let expected = DRAWS as f64 / k as f64;
        let stat: f64 = counts
            .values()
            .map(|c| (*c as f64 - expected).powi(2) / expected)
            .sum();
        let p = ChiSquared::new((k - 1) as f64)
            .map_err(|e| e.to_string())?
            .sf(stat);
        min_p = min_p.min(p);
        tested += 1;
        if p <= 0.01 {
            rejected.push(format!(
                "{role:?} {own} {leader:?}: chi-square {stat:.2}, p = {p:.4}"
            ));
        }
    }
    check(contexts == 144, || format!("{contexts} contexts"))?;
    check(rejected.is_empty(), || {
        format!(
            "{} of {tested} uniformity tests at p <= 0.01 ({:.2} expected by chance alone): {}",
            rejected.len(),
            0.01 * tested as f64,
            rejected.join("; ")
        )
    })?;

    for role in [Role::Leader, Role::Follower] {
        let ctx = SelectionContext {
            role,
            own_previous: None,
            leader_current: (role == Role::Follower).then_some("es1"),
        };
        let n = candidate_set(&lib, &ctx).map_err(|e| e.to_string())?.len();
        check(n == 8, || format!("{role:?} at start: {n} candidates"))?;
    }
    Ok(format!(
        "144 contexts agree with the enumerator; {tested} uniformity tests, min p = {min_p:.4}; {fallbacks} follower contexts hit a fallback"
    ))
}

fn stroke_plan(stroke: StrokeKind, aim: Aim) -> StrokePlan {
    StrokePlan {
        robot_id: 0,
        window: 0,
        scheduled: SimTime::from_secs_f64(1.0),
        nominal: SimTime::from_secs_f64(1.0),
        stroke,
        pattern_id: "acceptance".into(),
        event_index: 0,
        stroke_number: 0,
        note: SimTime::from_secs_f64(1.0),
        aim,
    }
}

fn stroke_mechanics() -> Outcome {
    const N: usize = 10_000;
    const P_EARLY: f64 = 0.05;
    let arena = Arena::default();
    let kin = Kinematics::default();
    let dt = SimTime::from_millis(1);

    let env = RobotEnv {
        arena: &arena,
        kin: &kin,
        early_power_cut_prob: 0.0,
    };
    let mut rng = rng::stream(5, 1);
    for i in 0..N {
        let mut r = RobotState::new(0, Role::Leader, &arena);
        let aim = if i % 2 == 0 { Aim::Center } else { Aim::Edge };
        let out = execute_stroke(
            &mut r,
            &env,
            stroke_plan(StrokeKind::double(), aim),
            dt,
            &mut rng,
        );
        check(out.sounds.len() == 2, || {
            format!("double {i}: {} sounds", out.sounds.len())
        })?;
        let (a, b) = (&out.sounds[0], &out.sounds[1]);
        check(
            (b.intensity - 0.6 * a.intensity).abs() <= 1e-12 * a.intensity,
            || {
                format!(
                    "double {i}: intensities {} then {}",
                    a.intensity, b.intensity
                )
            },
        )?;
        check(b.time > a.time && a.wall == b.wall, || {
            format!("double {i}: bad rebound")
        })?;
    }

    let env = RobotEnv {
        arena: &arena,
        kin: &kin,
        early_power_cut_prob: P_EARLY,
    };
    let mut rng = rng::stream(6, 1);
    let (mut doubled, mut cuts) = (0usize, 0usize);
    for i in 0..N {
        let mut r = RobotState::new(0, Role::Leader, &arena);
        let aim = if i % 2 == 0 { Aim::Center } else { Aim::Edge };
        let out = execute_stroke(
            &mut r,
            &env,
            stroke_plan(StrokeKind::Single, aim),
            dt,
            &mut rng,
        );
        check(matches!(out.sounds.len(), 1 | 2), || {
            format!("single {i}: {} sounds", out.sounds.len())
        })?;
        doubled += usize::from(out.sounds.len() == 2);
        cuts += out
            .events
            .iter()
            .filter(|(_, e)| matches!(e, SimEvent::EarlyPowerCut { .. }))
            .count();
    }
    check(cuts == doubled, || {
        format!("{doubled} unintended doubles but {cuts} early cuts logged")
    })?;
    let rate = doubled as f64 / N as f64;
    check((rate - P_EARLY).abs() <= 0.01, || {
        format!("unintended-double rate {rate}")
    })?;
    Ok(format!(
        "{N} doubles give 2 hits at 0.6x; unintended-double rate {rate:.4} for p = {P_EARLY}"
    ))
}

fn tone_partition() -> Outcome {
    const N: usize = 10_000;
    let frame = Instrument::frame_drum();
    let z = DEFAULT_BASS_ZONE;
    check(
        impact_tone(&frame, 1.5, z) == Tone::Bass && impact_tone(&frame, -1.5, z) == Tone::Bass,
        || "offset 1.5 in is not bass".into(),
    )?;
    check(
        impact_tone(&frame, 1.5 + 1e-12, z) == Tone::Slap
            && impact_tone(&frame, -1.5 - 1e-12, z) == Tone::Slap,
        || "offset just past 1.5 in is not slap".into(),
    )?;
    check(
        impact_tone(&Instrument::tambourine(), 0.0, z) == Tone::Jingle,
        || "tambourine".into(),
    )?;

    let arena = Arena::default();
    let kin = Kinematics {
        heading_sigma_deg: 2.0,
        ..Kinematics::default()
    };
    let env = RobotEnv {
        arena: &arena,
        kin: &kin,
        early_power_cut_prob: 0.0,
    };
    let mut rng = rng::stream(9, 1);
    let (mut departures, mut sounds, mut accidental) = (0, 0, 0);
    let mut by_wall = [0usize; 4];
    for i in 0..N {
        let mut r = RobotState::new(0, Role::Leader, &arena);
        let aim = if i % 2 == 0 { Aim::Center } else { Aim::Edge };
        let out = execute_stroke(
            &mut r,
            &env,
            stroke_plan(StrokeKind::Single, aim),
            SimTime::from_millis(1),
            &mut rng,
        );
        departures += usize::from(!out.sounds.is_empty());
        for s in &out.sounds {
            sounds += 1;
            let primary = s.wall == NORTH;
            check(s.purposeful == primary, || {
                format!("stroke {i}: purposeful {} on wall {}", s.purposeful, s.wall)
            })?;
            if !s.purposeful {
                accidental += 1;
                by_wall[s.wall] += 1;
            }
            let want = match s.instrument {
                InstrumentKind::Tambourine => Tone::Jingle,
                InstrumentKind::FrameDrum if s.offset.abs() <= 1.5 => Tone::Bass,
                InstrumentKind::FrameDrum => Tone::Slap,
            };
            check(s.tone == want, || {
                format!("stroke {i}: {:?} at offset {}", s.tone, s.offset)
            })?;
        }
    }
    check(departures == N, || {
        format!("{departures} of {N} strokes sounded")
    })?;
    check(accidental > 0, || "no accidental hits".into())?;
    Ok(format!(
        "{departures} departures, {sounds} hits, accidental fraction {:.4} (by wall {by_wall:?}), none on the primary wall; boundary exact at 1.5 in",
        accidental as f64 / sounds as f64
    ))
}

fn light_contract() -> Outcome {
    let cfg = PerformanceConfig {
        seed: 1,
        duration: 60.0,
        suppressed: vec![0, 1, 2, 3],
        ..Default::default()
    };
    let lib = PatternLibrary::bundled();
    let log = run(&cfg, &lib, &[]).map_err(|e| e.to_string())?;
    check(log.sounds().count() == 0, || {
        "silent run made sounds".into()
    })?;
    let mut per_robot = [0usize; 4];
    for (_, l) in log.lights() {
        per_robot[l.robot] += 1;
    }
    check(per_robot == [60; 4], || {
        format!("light events per robot {per_robot:?}")
    })?;

    let commands: Vec<TimedCommand> = [(2.5, 1), (10.0, 5), (33.3337, 2), (59.5, 7)]
        .into_iter()
        .map(|(t, i)| TimedCommand::new(t, ControlCommand::SetColor { index: i }))
        .collect();
    let log = run(
        &PerformanceConfig {
            seed: 1,
            ..Default::default()
        },
        &lib,
        &commands,
    )
    .map_err(|e| e.to_string())?;
    check_set_color(&log, &cfg.palette, commands.len())?;
    Ok(format!(
        "60 light events per robot in a silent 60 s run; {} set-color commands each gave 4 same-timestamp events",
        commands.len()
    ))
}

fn check_set_color(log: &EventLog, palette: &[f64], n: usize) -> Result<(), String> {
    let mut seen = 0;
    for (i, r) in log.records.iter().enumerate() {
        let Record::Command(c) = &r.record else {
            continue;
        };
        let ControlCommand::SetColor { index } = c.command else {
            continue;
        };
        seen += 1;
        let group: Vec<_> = log.records[i + 1..]
            .iter()
            .filter_map(|r| match &r.record {
                Record::Light(l) if l.cause == LightCause::SetColor => Some((r.t, l)),
                _ => None,
            })
            .take(4)
            .collect();
        let robots: BTreeSet<usize> = group.iter().map(|(_, l)| l.robot).collect();
        check(
            robots.len() == 4 && group.iter().all(|(t, _)| *t == r.t),
            || format!("set_color at {:?}: {group:?}", r.t),
        )?;
        check(
            group
                .iter()
                .all(|(_, l)| l.base == palette[index] && l.hue == palette[index]),
            || format!("set_color {index}: wrong hue"),
        )?;
    }
    let set_color_lights = log
        .lights()
        .filter(|(_, l)| l.cause == LightCause::SetColor)
        .count();
    check(seen == n && set_color_lights == 4 * n, || {
        format!("{seen} commands, {set_color_lights} set-color light events")
    })
}

fn library_validation() -> Outcome {
    let lib = PatternLibrary::bundled();
    check(lib.len() == 25, || format!("{} patterns", lib.len()))?;

    // Re-derive everything from the raw file with a generic TOML reader.
    let raw: toml::Table = DEFAULT_LIBRARY_TOML
        .parse()
        .map_err(|e: toml::de::Error| e.to_string())?;
    let notes = raw["note_values"].as_table().ok_or("note_values")?;
    let value = |name: &str| -> Result<f64, String> {
        notes
            .get(name)
            .and_then(toml::Value::as_float)
            .ok_or(format!("note value {name}"))
    };
    let patterns = raw["patterns"].as_array().ok_or("patterns")?;
    check(patterns.len() == 25, || {
        format!("file lists {} patterns", patterns.len())
    })?;
    let mut categories: BTreeMap<String, usize> = BTreeMap::new();
    for p in patterns {
        let id = p["id"].as_str().ok_or("id")?;
        let mut expected_onset = 0.0;
        let mut durations = Vec::new();
        for e in p["events"].as_array().ok_or("events")? {
            let onset = e["onset"]
                .as_float()
                .or_else(|| e["onset"].as_integer().map(|i| i as f64))
                .ok_or("onset")?;
            check((onset - expected_onset).abs() < 1e-9, || {
                format!("{id}: gap or overlap at {onset}")
            })?;
            let d = value(e["note"].as_str().ok_or("note")?)?;
            durations.push(d);
            expected_onset += d;
        }
        let length = expected_onset;
        let reps = 4.0 / length;
        check(length > 0.0 && (reps - reps.round()).abs() < 1e-9, || {
            format!("{id}: {length} beats does not tile 4")
        })?;
        let even = durations.iter().all(|d| *d == durations[0]);
        let n = durations.len();
        let quick = durations.iter().filter(|d| **d <= 0.5).count();
        let slow = durations.iter().filter(|d| **d >= 1.0).count();
        let speed = if 2 * quick > n {
            "quick"
        } else if 2 * slow > n {
            "slow"
        } else {
            "none"
        };
        let declared = (
            p["evenness"].as_str().ok_or("evenness")?,
            p["speed"].as_str().ok_or("speed")?,
        );
        check(
            declared == (if even { "even" } else { "uneven" }, speed),
            || format!("{id}: tagged {declared:?}, derived ({even}, {speed})"),
        )?;
        check(lib.get(id).is_some(), || {
            format!("{id} missing from the loaded library")
        })?;
        *categories
            .entry(format!("{}_{}", declared.0, declared.1))
            .or_default() += 1;
    }
    Ok(format!(
        "25 patterns, all tile the 4-beat window, tags re-derived; categories {categories:?}"
    ))
}
