//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits non-zero if any criterion fails.

use std::f64::consts::PI;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use robochess::engine::{
    run, sweep, Command, LiveEngine, Mode, ParameterGrid, SimConfig, Simulation, SweepStatus,
};
use robochess::kinematics::{
    forward_kinematics, inverse_kinematics, wrap_angle, ArmGeometry, JointAngles, KinematicsError,
    Point3,
};
use robochess::metrics::{paired_correlation, pearson, Correlation, StatsError, UndefinedReason};
use robochess::motion::{path_length, plan_segment, ArmId, SpeedFactor};
use robochess::notation::{
    decode_game, parse_game_text, perft, BoardState, Color, DecodedMove, PieceKind,
};
use robochess::scheduler::TurnPhase;
use robochess::server::{ClientCommand, ControlServer, WireClient, WireMessage};
use shakmaty::{san::SanPlus, Chess, Position, Role};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn corpus() -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("games");
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "pgn"))
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|p| {
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            (name, std::fs::read_to_string(&p).unwrap())
        })
        .collect()
}

fn virtual_cfg() -> SimConfig {
    SimConfig {
        mode: Mode::Virtual,
        ..SimConfig::default()
    }
}

fn indicators() -> Outcome {
    let (_, text) = corpus()
        .into_iter()
        .find(|(n, _)| n == "opera_game.pgn")
        .unwrap();
    let report =
        run(&virtual_cfg(), &parse_game_text(&text).unwrap()).map_err(|e| e.to_string())?;
    let json: serde_json::Value =
        serde_json::from_str(&report.to_json()).map_err(|e| e.to_string())?;
    for key in ["mean_white", "mean_black", "r12"] {
        check(json.get(key).is_some(), || format!("report lacks {key}"))?;
    }
    let (w, b) = (report.mean_white.unwrap(), report.mean_black.unwrap());
    let r = match report.r12 {
        Correlation::Defined(r) => format!("{r:.3}"),
        Correlation::Undefined { undefined } => undefined.as_str().to_string(),
    };
    Ok(format!(
        "opera game: mean_white {w:.3} s, mean_black {b:.3} s, r12 {r}"
    ))
}

fn role(kind: PieceKind) -> Role {
    match kind {
        PieceKind::Pawn => Role::Pawn,
        PieceKind::Knight => Role::Knight,
        PieceKind::Bishop => Role::Bishop,
        PieceKind::Rook => Role::Rook,
        PieceKind::Queen => Role::Queen,
        PieceKind::King => Role::King,
    }
}

fn oracle_agrees(mine: &DecodedMove, theirs: &shakmaty::Move) -> bool {
    let to = match *theirs {
        shakmaty::Move::Castle { king, rook } => {
            (king.to_u32() as u8 & !7) + if rook.to_u32() > king.to_u32() { 6 } else { 2 }
        }
        _ => theirs.to().to_u32() as u8,
    };
    role(mine.piece) == theirs.role()
        && mine.from.index() == theirs.from().unwrap().to_u32() as u8
        && mine.to.index() == to
        && mine.captured.is_some() == theirs.is_capture()
        && mine.promotion.map(role) == theirs.promotion()
        && mine.castle.is_some() == theirs.is_castle()
        && mine.is_en_passant() == theirs.is_en_passant()
}

fn san_decoding() -> Outcome {
    let games = corpus();
    check(games.len() >= 20, || format!("only {} games", games.len()))?;
    let start = Instant::now();
    let (mut castles, mut ep, mut promos, mut disamb, mut plies) = (0, 0, 0, 0, 0);
    for (name, text) in &games {
        let script = parse_game_text(text).map_err(|e| format!("{name}: {e}"))?;
        let decoded = decode_game(&script).map_err(|e| format!("{name}: {e}"))?;
        let mut pos = Chess::default();
        for (token, mine) in script.tokens.iter().zip(&decoded.moves) {
            let san: SanPlus = token
                .parse()
                .map_err(|e| format!("{name} {token}: {e:?}"))?;
            let theirs = san
                .san
                .to_move(&pos)
                .map_err(|e| format!("{name} {token}: {e:?}"))?;
            check(oracle_agrees(mine, &theirs), || {
                format!("{name} {token}: {mine:?} vs {theirs:?}")
            })?;
            if let shakmaty::san::San::Normal { file, rank, .. } = san.san {
                disamb +=
                    usize::from(rank.is_some() || (file.is_some() && theirs.role() != Role::Pawn));
            }
            castles += usize::from(theirs.is_castle());
            ep += usize::from(theirs.is_en_passant());
            promos += usize::from(theirs.is_promotion());
            plies += 1;
            pos = pos.play(theirs).unwrap();
        }
    }
    check(castles > 0 && ep > 0 && promos > 0 && disamb > 0, || {
        format!("corpus lacks a feature: castles {castles}, en passant {ep}, promotions {promos}, disambiguated {disamb}")
    })?;
    let b = BoardState::initial();
    let counts = [perft(&b, 1), perft(&b, 2), perft(&b, 3)];
    check(counts == [20, 400, 8902], || format!("perft {counts:?}"))?;
    let elapsed = start.elapsed();
    check(elapsed < Duration::from_secs(5), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "{} games, {plies} plies, castles {castles}, en passant {ep}, promotions {promos}, disambiguated {disamb}; perft {counts:?}; {elapsed:.2?}",
        games.len()
    ))
}

fn random_geometry(rng: &mut ChaCha8Rng) -> ArmGeometry {
    let base = Point3::new(
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
        rng.random_range(0.0..0.2),
    );
    let mut g = ArmGeometry::facing(base, Point3::new(0.0, 0.0, 0.0));
    g.heading = rng.random_range(-PI..PI);
    g.mount_height = rng.random_range(0.0..0.2);
    g.link_lengths = [rng.random_range(0.15..0.6), rng.random_range(0.15..0.6)];
    g
}

/// A target reachable on the elbow-up branch with the wrist in front of the base.
fn random_reachable(rng: &mut ChaCha8Rng, g: &ArmGeometry) -> Point3 {
    let [l1, l2] = g.link_lengths;
    loop {
        let q = JointAngles::new(
            rng.random_range(-PI..PI),
            rng.random_range(0.01..PI - 0.01),
            rng.random_range(-PI + 0.01..-0.01),
        );
        if l1 * q.shoulder.cos() + l2 * (q.shoulder + q.elbow).cos() > 1e-3 {
            return forward_kinematics(g, &q);
        }
    }
}

fn kinematics() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut worst_prop: f64 = 0.0;
    for _ in 0..10 {
        let g = random_geometry(&mut rng);
        let [l1, l2] = g.link_lengths;
        let scale = rng.random_range(0.2..5.0);
        let mut scaled = g.clone();
        scaled.link_lengths = [l1 * scale, l2 * scale];
        scaled.mount_height *= scale;
        for _ in 0..1000 {
            let t = random_reachable(&mut rng, &g);
            let q = inverse_kinematics(&g, t).map_err(|e| format!("{t:?}: {e}"))?;
            worst = worst.max(forward_kinematics(&g, &q).distance(t));

            let d = t - g.shoulder();
            let alpha = rng.random_range(-PI..PI);
            let (s, c) = alpha.sin_cos();
            let rotated = g.shoulder() + Point3::new(c * d.x - s * d.y, s * d.x + c * d.y, d.z);
            let qr =
                inverse_kinematics(&g, rotated).map_err(|e| format!("rotated {rotated:?}: {e}"))?;
            worst_prop = worst_prop
                .max(wrap_angle(qr.yaw - q.yaw - alpha).abs())
                .max((qr.shoulder - q.shoulder).abs())
                .max((qr.elbow - q.elbow).abs());

            let qs = inverse_kinematics(&scaled, scaled.shoulder() + d * scale)
                .map_err(|e| format!("scaled: {e}"))?;
            worst_prop = worst_prop
                .max(wrap_angle(qs.yaw - q.yaw).abs())
                .max((qs.shoulder - q.shoulder).abs())
                .max((qs.elbow - q.elbow).abs());

            let dir = Point3::new(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            );
            let dir = dir * (1.0 / dir.norm());
            let far = g.shoulder() + dir * (l1 + l2) * rng.random_range(1.001..3.0);
            check(
                matches!(
                    inverse_kinematics(&g, far),
                    Err(KinematicsError::Unreachable { .. })
                ),
                || format!("{far:?} beyond reach was solved"),
            )?;
            if (l1 - l2).abs() > 1e-3 {
                let near = g.shoulder() + dir * (l1 - l2).abs() * rng.random_range(0.0..0.999);
                check(
                    matches!(
                        inverse_kinematics(&g, near),
                        Err(KinematicsError::Unreachable { .. })
                    ),
                    || format!("{near:?} inside the inner radius was solved"),
                )?;
            }
        }
    }
    let elapsed = start.elapsed();
    check(worst < 1e-9, || format!("round trip error {worst:e} m"))?;
    check(worst_prop <= 1e-9, || {
        format!("equivariance error {worst_prop:e} rad")
    })?;
    check(elapsed < Duration::from_secs(1), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "10 geometries x 1000 targets: max |FK(IK(t)) - t| {worst:.1e} m, max property error {worst_prop:.1e} rad; {elapsed:.2?}"
    ))
}

fn motion_laws() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let g = ArmGeometry::default_for(Color::White);
    let mut q = || {
        JointAngles::new(
            rng.random_range(-PI..PI),
            rng.random_range(0.0..PI),
            rng.random_range(-PI..0.0),
        )
    };
    let pairs: Vec<_> = (0..100).map(|_| (q(), q())).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let (mut dur_err, mut path_err): (f64, f64) = (0.0, 0.0);
    let dt = 0.010;
    for (a, b) in &pairs {
        let base = plan_segment(*a, *b, &g, SpeedFactor::ONE);
        let base_path = path_length(&g, &[base], dt);
        for _ in 0..5 {
            let s = rng.random_range(0.25..4.0);
            let seg = plan_segment(*a, *b, &g, SpeedFactor::new(s).unwrap());
            dur_err =
                dur_err.max((seg.duration * s - base.duration).abs() / base.duration.max(1.0));
            path_err = path_err.max((path_length(&g, &[seg], dt / s) - base_path).abs());
        }
    }
    check(dur_err <= 1e-12, || {
        format!("duration*s varies by {dur_err:e}")
    })?;
    check(path_err <= 1e-9, || {
        format!("path length varies by {path_err:e} m")
    })?;

    let mut arc_err: f64 = 0.0;
    for (a, b) in pairs.iter().take(20) {
        let from = *a;
        let to = JointAngles::new(b.yaw, a.shoulder, a.elbow);
        let seg = plan_segment(from, to, &g, SpeedFactor::ONE);
        let [l1, l2] = g.link_lengths;
        let radius = (l1 * a.shoulder.cos() + l2 * (a.shoulder + a.elbow).cos()).abs();
        let analytic = radius * (to.yaw - from.yaw).abs();
        arc_err = arc_err.max((path_length(&g, &[seg], 0.001) - analytic).abs());
    }
    check(arc_err < 1e-3, || format!("arc length error {arc_err:e} m"))?;
    Ok(format!(
        "100 pairs: duration*s spread {dur_err:.1e}, path spread {path_err:.1e} m; yaw arc error at 1 ms {arc_err:.1e} m"
    ))
}

fn protocol_consistency() -> Outcome {
    let mut total = 0;
    for (name, text) in corpus() {
        let decoded = decode_game(&parse_game_text(&text).unwrap()).unwrap();
        let n = decoded.moves.len();
        let mut sim =
            Simulation::new(virtual_cfg(), &decoded.moves).map_err(|e| format!("{name}: {e}"))?;
        let report = sim.run_to_end(|_| {}).map_err(|e| format!("{name}: {e}"))?;
        check(
            report.moves_by(ArmId::Mr1) == n.div_ceil(2) && report.moves_by(ArmId::Mr2) == n / 2,
            || {
                format!(
                    "{name}: {} + {} moves for {n} half-moves",
                    report.moves_by(ArmId::Mr1),
                    report.moves_by(ArmId::Mr2)
                )
            },
        )?;
        let table = sim.scheduler().tabletop();
        let occ = table.occupancy();
        for sq in robochess::notation::Square::all() {
            let want = decoded.final_position.get(sq);
            check(occ[sq.index() as usize] == want, || {
                format!(
                    "{name}: {sq} holds {:?}, expected {want:?}",
                    occ[sq.index() as usize]
                )
            })?;
        }
        for zone in [Color::White, Color::Black] {
            let mut got: Vec<_> = table.discarded(zone).iter().map(|p| p.kind).collect();
            let mut want: Vec<_> = decoded
                .moves
                .iter()
                .filter(|m| m.color == zone)
                .filter_map(|m| m.captured.map(|c| c.0))
                .collect();
            got.sort_by_key(|k| *k as u8);
            want.sort_by_key(|k| *k as u8);
            check(got == want, || {
                format!("{name}: {zone:?} zone {got:?}, captured {want:?}")
            })?;
        }
        total += 1;
    }
    let session = scripted_session()?;
    Ok(format!("{total} games consistent; {session}"))
}

/// Plays a short game through the wire protocol as a headless controller and
/// compares the outcome with a direct run.
fn scripted_session() -> Result<String, String> {
    const WAIT: Duration = Duration::from_secs(10);
    let script = parse_game_text("1. e4 d5 2. exd5 Qxd5 3. Nc3").unwrap();
    let cfg = SimConfig {
        mode: Mode::StepByStep,
        ..SimConfig::default()
    };
    let sim = Simulation::from_script(cfg.clone(), &script).map_err(|e| e.to_string())?;
    let srv =
        ControlServer::start(LiveEngine::spawn(sim), "127.0.0.1:0").map_err(|e| e.to_string())?;
    let mut c = WireClient::connect(srv.local_addr()).map_err(|e| e.to_string())?;
    let io = |e: std::io::Error| e.to_string();
    let acked = |seq: u64| move |m: &WireMessage| m.as_ack().is_some_and(|a| a.reply_to == seq);
    let seq = c.send(ClientCommand::JoinController).map_err(io)?;
    c.recv_until(WAIT, acked(seq)).map_err(io)?;
    let seq = c.command(Command::Start).map_err(io)?;
    c.recv_until(WAIT, acked(seq)).map_err(io)?;
    for k in 1..=5 {
        c.recv_until(WAIT, |m| {
            m.as_event()
                .is_some_and(|e| e.awaiting_step && e.half_moves_done == k - 1)
        })
        .map_err(io)?;
        c.command(Command::StepOne).map_err(io)?;
    }
    c.recv_until(WAIT, |m| {
        m.as_event().is_some_and(|e| e.phase == TurnPhase::Finished)
    })
    .map_err(io)?;
    let frames = c.transcript.len();
    let report = srv.shutdown().map_err(|e| e.to_string())?;
    let direct = run(
        &SimConfig {
            mode: Mode::Virtual,
            ..cfg
        },
        &script,
    )
    .map_err(|e| e.to_string())?;
    check(report == direct, || {
        "wire-driven report differs from a direct run".to_string()
    })?;
    Ok(format!(
        "scripted wire session of 5 half-moves ({frames} frames) matches a direct run"
    ))
}

fn determinism_and_modes() -> Outcome {
    let mut games = 0;
    for (name, text) in corpus() {
        let script = parse_game_text(&text).unwrap();
        let cfg = |mode| SimConfig {
            mode,
            ..SimConfig::default()
        };
        let a = run(&cfg(Mode::Virtual), &script).map_err(|e| format!("{name}: {e}"))?;
        let b = run(&cfg(Mode::Virtual), &script).map_err(|e| format!("{name}: {e}"))?;
        check(a.to_csv() == b.to_csv(), || {
            format!("{name}: CSV differs between runs")
        })?;
        check(a.to_json() == b.to_json(), || {
            format!("{name}: report differs between runs")
        })?;
        let auto = run(&cfg(Mode::Autoplay), &script).map_err(|e| format!("{name}: {e}"))?;
        let step = run(&cfg(Mode::StepByStep), &script).map_err(|e| format!("{name}: {e}"))?;
        check(auto == a, || {
            format!("{name}: autoplay differs from virtual")
        })?;
        check(step == a, || {
            format!("{name}: step-by-step differs from virtual")
        })?;
        games += 1;
    }
    Ok(format!("{games} games: repeated virtual runs byte-identical; virtual, autoplay and step-by-step reports equal"))
}

/// Pearson from exact integer sums. Inputs are multiples of 2^-10, so the
/// scaled sums are exact in i128 and only the final division rounds.
fn pearson_exact(x: &[i64], y: &[i64]) -> f64 {
    let n = x.len() as i128;
    let (sx, sy): (i128, i128) = (
        x.iter().map(|&v| v as i128).sum(),
        y.iter().map(|&v| v as i128).sum(),
    );
    let sxy: i128 = x.iter().zip(y).map(|(&a, &b)| a as i128 * b as i128).sum();
    let sxx: i128 = x.iter().map(|&a| a as i128 * a as i128).sum();
    let syy: i128 = y.iter().map(|&b| b as i128 * b as i128).sum();
    let num = n * sxy - sx * sy;
    let (dx, dy) = (n * sxx - sx * sx, n * syy - sy * sy);
    num as f64 / ((dx as f64).sqrt() * (dy as f64).sqrt())
}

fn statistics() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    let mut tested = 0;
    while tested < 1000 {
        let n = rng.random_range(2..=50);
        let slope = rng.random_range(-2.0..2.0);
        let x: Vec<i64> = (0..n)
            .map(|_| rng.random_range(-1_000_000..1_000_000))
            .collect();
        let y: Vec<i64> = x
            .iter()
            .map(|&v| (slope * v as f64) as i64 + rng.random_range(-1_000_000..1_000_000))
            .collect();
        let xf: Vec<f64> = x.iter().map(|&v| v as f64 / 1024.0).collect();
        let yf: Vec<f64> = y.iter().map(|&v| v as f64 / 1024.0).collect();
        let Ok(r) = pearson(&xf, &yf) else { continue };
        worst = worst.max((r - pearson_exact(&x, &y)).abs());
        tested += 1;
    }
    check(worst <= 1e-12, || {
        format!("max deviation from oracle {worst:e}")
    })?;

    for n in 2..=50 {
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-10.0..10.0)).collect();
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        let up: Vec<f64> = (1..=n).map(f64::from).collect();
        let down: Vec<f64> = up.iter().rev().copied().collect();
        check(pearson(&x, &x) == Ok(1.0), || {
            format!("identity gave {:?}", pearson(&x, &x))
        })?;
        check(pearson(&x, &neg) == Ok(-1.0), || {
            format!("negation gave {:?}", pearson(&x, &neg))
        })?;
        check(pearson(&up, &down) == Ok(-1.0), || {
            format!("reversal gave {:?}", pearson(&up, &down))
        })?;
    }

    let flat = [1.5; 6];
    let varied = [1.0, 2.0, 4.0, 3.0, 5.0, 0.5];
    check(
        pearson(&flat, &varied) == Err(StatsError::ZeroVariance),
        || "zero variance not reported".into(),
    )?;
    check(pearson(&[1.0], &[2.0]) == Err(StatsError::TooShort), || {
        "short series not reported".into()
    })?;
    check(
        paired_correlation(&flat, &varied)
            == Correlation::Undefined {
                undefined: UndefinedReason::ZeroVariance,
            },
        || "paired zero variance".into(),
    )?;
    check(
        paired_correlation(&[1.0, 2.0], &[3.0])
            == Correlation::Undefined {
                undefined: UndefinedReason::FewerThanTwoPairs,
            },
        || "paired short series".into(),
    )?;
    Ok(format!("1000 series vs exact oracle: max deviation {worst:.1e}; +-1 exact; undefined reasons reported"))
}

fn sweep_criterion() -> Outcome {
    let (_, text) = corpus()
        .into_iter()
        .find(|(n, _)| n == "immortal_game.pgn")
        .unwrap();
    let moves = decode_game(&parse_game_text(&text).unwrap()).unwrap().moves;
    let grid = ParameterGrid::parse("arms.l1 = 0.35, 0.40, 0.45\narms.l2 = 0.35, 0.40, 0.45\n")
        .map_err(|e| e.to_string())?;
    let mut base = virtual_cfg();
    base.dwell = 0.0;
    let rows = sweep(&base, &moves, &grid).map_err(|e| e.to_string())?;
    check(rows.len() == 9, || format!("{} rows", rows.len()))?;
    check(rows.iter().all(|r| r.status == SweepStatus::Ok), || {
        "a configuration failed".into()
    })?;
    let means: Vec<f64> = rows.iter().map(|r| r.mean_move_time.unwrap()).collect();
    check(means.windows(2).all(|w| w[0] <= w[1]), || {
        format!("not ranked: {means:?}")
    })?;
    for row in &rows {
        let mut cfg = base.clone();
        for (k, v) in &row.params {
            cfg.set(k, v)?;
        }
        let direct = run(&cfg, &parse_game_text(&text).unwrap()).map_err(|e| e.to_string())?;
        check(row.mean_move_time == Some(direct.mean_move_time()), || {
            format!("{:?} disagrees with a direct run", row.params)
        })?;
    }

    let mut fast = base.clone();
    for arm in [ArmId::Mr1, ArmId::Mr2] {
        let w = &mut fast.arm_mut(arm).geometry.joint_speed;
        *w = w.map(|v| v * 2.0);
    }
    let fast_rows = sweep(&fast, &moves, &grid).map_err(|e| e.to_string())?;
    for row in &rows {
        let twin = fast_rows.iter().find(|r| r.params == row.params).unwrap();
        for (col, slow, quick) in [
            ("mean_move_s", row.mean_move_time, twin.mean_move_time),
            ("mean_white_s", row.mean_white, twin.mean_white),
            ("mean_black_s", row.mean_black, twin.mean_black),
        ] {
            let (slow, quick) = (slow.unwrap(), quick.unwrap());
            check(quick * 2.0 == slow, || {
                format!("{:?} {col}: {quick} vs {slow}", row.params)
            })?;
        }
    }
    let best = rows[0]
        .params
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(" ");
    Ok(format!("9 configurations ranked (best {best}, {:.3} s); doubled joint speeds halve every duration column exactly", means[0]))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("indicators", indicators),
        ("san_decoding", san_decoding),
        ("kinematics", kinematics),
        ("motion_laws", motion_laws),
        ("protocol_consistency", protocol_consistency),
        ("determinism_modes", determinism_and_modes),
        ("statistics", statistics),
        ("sweep", sweep_criterion),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        match std::panic::catch_unwind(f) {
            Ok(Ok(detail)) => println!("PASS {name}: {detail}"),
            Ok(Err(why)) => {
                failed += 1;
                println!("FAIL {name}: {why}");
            }
            Err(_) => {
                failed += 1;
                println!("FAIL {name}: panicked");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
