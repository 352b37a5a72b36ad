use proptest::collection::vec;
use proptest::prelude::*;

use percussim_core::arena::{execute_stroke, Arena, Kinematics, RobotEnv, RobotState};
use percussim_core::bridge::{
    decode_client, decode_server, encode_client, encode_server, ClientMessage, ServerBody,
    ServerMessage,
};
use percussim_core::composer::{candidate_set, select_next, Role, SelectionContext};
use percussim_core::events::{LightCause, LightEvent, SimEvent};
use percussim_core::patterns::{
    load_library, pattern_from_notes, Category, CompatibilityMatrix, NoteKind, NoteValues, Pattern,
    PatternLibrary, StrokeKind,
};
use percussim_core::performance::{run, EventLog, PerformanceConfig};
use percussim_core::rng;
use percussim_core::time::SimTime;
use percussim_core::timing::{schedule_window, Aim, JitterModel, MetronomeClock, StrokePlan};
use percussim_core::ControlCommand;

/// Quarter-beat units per note kind.
fn units(k: NoteKind) -> u32 {
    match k {
        NoteKind::Long => 4,
        NoteKind::Short => 2,
        NoteKind::Shortest => 1,
    }
}

/// Notes filling exactly `len` quarter-beats, drawn from `picks`.
fn fill(len: u32, picks: &[u8], doubles: &[bool]) -> Vec<(NoteKind, StrokeKind, bool)> {
    let mut left = len;
    let mut out = Vec::new();
    let mut i = 0;
    while left > 0 {
        let want = match picks[i % picks.len()] % 3 {
            0 => NoteKind::Long,
            1 => NoteKind::Short,
            _ => NoteKind::Shortest,
        };
        let k = [want, NoteKind::Short, NoteKind::Shortest]
            .into_iter()
            .find(|k| units(*k) <= left)
            .expect("shortest always fits");
        let stroke = if doubles[i % doubles.len()] {
            StrokeKind::double()
        } else {
            StrokeKind::Single
        };
        out.push((k, stroke, false));
        left -= units(k);
        i += 1;
    }
    out
}

fn arb_pattern() -> impl Strategy<Value = Vec<(NoteKind, StrokeKind, bool)>> {
    (
        prop_oneof![Just(4u32), Just(8), Just(16)],
        vec(any::<u8>(), 1..8),
        vec(any::<bool>(), 1..4),
    )
        .prop_map(|(len, picks, doubles)| fill(len, &picks, &doubles))
}

fn arb_matrix() -> impl Strategy<Value = CompatibilityMatrix> {
    vec(any::<bool>(), 16).prop_map(|bits| {
        let mut m = CompatibilityMatrix::new();
        for (i, from) in Category::ALL.iter().enumerate() {
            for (k, to) in Category::ALL.iter().enumerate() {
                if bits[i * 4 + k] || i == (k + 1) % 4 {
                    m.allow(*from, *to);
                }
            }
        }
        m
    })
}

/// Random valid libraries. Patterns whose speed cannot be classified are
/// dropped; matrices that fail validation are rejected.
fn arb_library() -> impl Strategy<Value = PatternLibrary> {
    (vec(arb_pattern(), 1..10), arb_matrix()).prop_filter_map("invalid library", |(notes, m)| {
        let v = NoteValues::default();
        let pats: Vec<Pattern> = notes
            .iter()
            .enumerate()
            .map(|(i, n)| pattern_from_notes(&format!("p{i}"), &v, n))
            .filter(|p| {
                let quick = p
                    .events
                    .iter()
                    .filter(|e| e.duration.as_f64() <= 0.5)
                    .count();
                let slow = p
                    .events
                    .iter()
                    .filter(|e| e.duration.as_f64() >= 1.0)
                    .count();
                2 * quick > p.events.len() || 2 * slow > p.events.len()
            })
            .collect();
        PatternLibrary::new("random", "", v, m, pats).ok()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn selection_is_pure_and_live(lib in arb_library(), seed in any::<u64>(), a in any::<usize>(), b in any::<usize>(), follower in any::<bool>()) {
        let ids: Vec<&str> = lib.patterns().iter().map(|p| p.id.as_str()).collect();
        let own = ids[a % ids.len()];
        let leader = ids[b % ids.len()];
        let ctx = if follower {
            SelectionContext::follower(Some(own), leader)
        } else {
            SelectionContext::leader(Some(own))
        };
        let set = candidate_set(&lib, &ctx).unwrap();
        prop_assert!(!set.is_empty());
        let first = select_next(&lib, &ctx, &mut rng::stream(seed, 0)).unwrap().id.clone();
        let again = select_next(&lib, &ctx, &mut rng::stream(seed, 0)).unwrap().id.clone();
        prop_assert_eq!(&first, &again);
        prop_assert!(set.iter().any(|p| p.id == first));
    }

    #[test]
    fn library_file_round_trip(lib in arb_library()) {
        let text = lib.to_toml();
        let back = load_library(&text).unwrap();
        prop_assert_eq!(back.digest(), lib.digest());
        prop_assert_eq!(back, lib);
    }

    #[test]
    fn schedules_are_ordered_and_bounded(notes in arb_pattern(), seed in any::<u64>(), sigma in 0.0f64..0.3, window in 0u64..1000) {
        let p = pattern_from_notes("p", &NoteValues::default(), &notes);
        let clock = MetronomeClock::new(60.0);
        let jitter = JitterModel { per_stroke_sigma: sigma, ..JitterModel::none() };
        let plans = schedule_window(&p, &clock, &jitter, 0, window, &mut rng::stream(seed, 0));
        prop_assert_eq!(plans.len(), p.stroke_count() * p.repeats_per_window() as usize);
        prop_assert_eq!(plans[0].nominal, clock.window_start(window));
        for (k, w) in plans.windows(2).enumerate() {
            prop_assert!(w[0].scheduled < w[1].scheduled);
            let bound = 3.0 * sigma * (k + 2) as f64 + 1e-6 * (k + 2) as f64;
            prop_assert!((w[1].scheduled - w[1].nominal).as_secs_f64().abs() <= bound + 1e-3);
        }
    }
}

fn stroke_plan(at: f64, note: f64, stroke: StrokeKind, aim: Aim, idx: u32) -> StrokePlan {
    StrokePlan {
        robot_id: 0,
        window: 0,
        scheduled: SimTime::from_secs_f64(at),
        nominal: SimTime::from_secs_f64(at),
        stroke,
        pattern_id: "p".into(),
        event_index: idx,
        stroke_number: idx,
        note: SimTime::from_secs_f64(note),
        aim,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn robots_stay_inside_and_doubles_decay(
        seed in any::<u64>(),
        strokes in vec((any::<bool>(), any::<bool>(), prop_oneof![Just(0.25), Just(0.5), Just(1.0)], 0.05f64..0.95, 0.05f64..0.95), 1..12),
        sigma in 0.0f64..8.0,
        cut in 0.0f64..0.5,
    ) {
        let arena = Arena::default();
        let kin = Kinematics { heading_sigma_deg: sigma, ..Kinematics::default() };
        let env = RobotEnv { arena: &arena, kin: &kin, early_power_cut_prob: cut };
        let mut robot = RobotState::new(0, Role::Leader, &arena);
        let mut r = rng::stream(seed, 1);
        let mut at = 0.5;
        for (i, (double, edge, note, bounce, rebound)) in strokes.into_iter().enumerate() {
            let stroke = if double { StrokeKind::Double { bounce, rebound } } else { StrokeKind::Single };
            let aim = if edge { Aim::Edge } else { Aim::Center };
            let plan = stroke_plan(at, note, stroke, aim, i as u32);
            at += note;
            let out = execute_stroke(&mut robot, &env, plan, SimTime::from_millis(1), &mut r);
            prop_assert!(arena.contains(robot.position, kin.robot_radius));
            let skipped = out.events.iter().any(|(_, e)| matches!(e, SimEvent::StrokeSkipped { .. }));
            if skipped {
                prop_assert!(out.sounds.is_empty());
                continue;
            }
            let cut_early = out.events.iter().any(|(_, e)| matches!(e, SimEvent::EarlyPowerCut { .. }));
            let expect = if double || cut_early { 2 } else { 1 };
            prop_assert_eq!(out.sounds.len(), expect);
            if expect == 2 {
                let (a, b) = (&out.sounds[0], &out.sounds[1]);
                prop_assert!(b.time > a.time);
                prop_assert!(b.intensity < a.intensity);
                prop_assert_eq!(a.wall, b.wall);
            }
            for s in &out.sounds {
                prop_assert!(s.intensity > 0.0 && s.intensity <= 1.0);
                prop_assert!(!s.purposeful || s.wall == robot.primary_wall);
            }
        }
    }
}

fn arb_command() -> impl Strategy<Value = ControlCommand> {
    prop_oneof![
        (0usize..16).prop_map(|index| ControlCommand::SetColor { index }),
        Just(ControlCommand::Spin),
        Just(ControlCommand::Circle),
        Just(ControlCommand::SwitchInstrument),
        Just(ControlCommand::Recenter),
        Just(ControlCommand::Stop),
        Just(ControlCommand::Restart),
    ]
}

fn arb_client() -> impl Strategy<Value = ClientMessage> {
    (
        proptest::option::of("[a-z0-9]{1,8}"),
        arb_command(),
        proptest::option::of(-1e6f64..1e6),
    )
        .prop_map(|(id, command, client_time)| ClientMessage {
            id,
            command,
            client_time,
        })
}

fn arb_server() -> impl Strategy<Value = ServerMessage> {
    let body = prop_oneof![
        (
            proptest::option::of("[a-z]{1,4}"),
            arb_command(),
            any::<bool>(),
            proptest::option::of("[ -~]{0,12}")
        )
            .prop_map(|(id, command, accepted, reason)| ServerBody::Ack {
                id,
                command,
                accepted,
                reason
            }),
        (0usize..4, 0.0f64..360.0, 0.0f64..360.0, any::<bool>()).prop_map(
            |(robot, hue, base, tick)| ServerBody::Light {
                event: LightEvent {
                    robot,
                    hue,
                    base,
                    cause: if tick {
                        LightCause::Tick
                    } else {
                        LightCause::SetColor
                    },
                }
            }
        ),
        "[ -~]{0,20}".prop_map(|message| ServerBody::Error {
            code: "malformed".into(),
            message
        }),
    ];
    (any::<u64>(), 0i64..10_000_000_000, body).prop_map(|(seq, us, body)| ServerMessage {
        seq,
        t: SimTime::from_micros(us),
        body,
    })
}

proptest! {
    #[test]
    fn client_frames_round_trip(m in arb_client()) {
        let text = encode_client(&m);
        let back = decode_client(&text).unwrap();
        prop_assert_eq!(&back, &m);
        prop_assert_eq!(encode_client(&back), text);
    }

    #[test]
    fn truncated_client_frames_are_malformed(m in arb_client(), cut in any::<prop::sample::Index>()) {
        let text = encode_client(&m);
        let n = cut.index(text.len());
        let err = decode_client(&text[..n]).unwrap_err();
        prop_assert_eq!(err.code, "malformed");
    }

    #[test]
    fn server_frames_round_trip(m in arb_server()) {
        let text = encode_server(&m);
        let back = decode_server(&text).unwrap();
        prop_assert_eq!(&back, &m);
        prop_assert_eq!(encode_server(&back), text);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    /// Suppressing a follower changes nothing about what the other robots
    /// may choose or do choose.
    #[test]
    fn follower_state_does_not_leak(seed in any::<u64>(), quiet in 1usize..4) {
        let lib = PatternLibrary::bundled();
        let base = PerformanceConfig { seed, duration: 40.0, ..Default::default() };
        let muted = PerformanceConfig { suppressed: vec![quiet], ..base.clone() };
        let picks = |log: &EventLog| -> Vec<(usize, u64, String, usize)> {
            log.sim_events()
                .filter_map(|(_, e)| match e {
                    SimEvent::Selection { robot, window, pattern, candidates, .. } if *robot != quiet => {
                        Some((*robot, *window, pattern.clone(), *candidates))
                    }
                    _ => None,
                })
                .collect()
        };
        let a = run(&base, &lib, &[]).unwrap();
        let b = run(&muted, &lib, &[]).unwrap();
        prop_assert_eq!(picks(&a), picks(&b));
    }

    #[test]
    fn logs_round_trip(seed in any::<u64>()) {
        let log = run(&PerformanceConfig { seed, duration: 12.0, ..Default::default() }, &PatternLibrary::bundled(), &[]).unwrap();
        let text = log.to_ndjson();
        let back = EventLog::parse_ndjson(&text).unwrap();
        prop_assert_eq!(back.to_ndjson(), text);
        prop_assert_eq!(back, log);
    }
}
