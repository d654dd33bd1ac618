use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::process::{Command as Process, Output, Stdio};
use std::time::Duration;

use robochess::engine::Command;
use robochess::metrics::GameReport;
use robochess::notation::read_split_file;
use robochess::scheduler::TurnPhase;
use robochess::server::{ClientCommand, WireClient};

fn bin() -> Process {
    Process::new(env!("CARGO_BIN_EXE_robochess"))
}

fn games() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("games")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn simulate_writes_identical_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let game = games().join("opera_game.pgn");
    let mut outs = Vec::new();
    for k in 0..2 {
        let csv = dir.path().join(format!("moves{k}.csv"));
        let json = dir.path().join(format!("report{k}.json"));
        let out = run(&["simulate", s(&game), "--csv", s(&csv), "--report", s(&json)]);
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        let stdout = String::from_utf8(out.stdout).unwrap();
        assert!(
            stdout.contains("mean_white") || stdout.contains("MR1"),
            "{stdout}"
        );
        outs.push((std::fs::read(&csv).unwrap(), std::fs::read(&json).unwrap()));
    }
    assert_eq!(outs[0], outs[1]);
    let report = GameReport::from_json(std::str::from_utf8(&outs[0].1).unwrap()).unwrap();
    assert_eq!(report.per_move.len(), 33);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.pgn", "1. e4 e5 2. Ke3");
    assert_eq!(run(&["simulate", s(&bad)]).status.code(), Some(2));

    let short = write(dir.path(), "short.cfg", "arms.l1 = 0.1\narms.l2 = 0.1\n");
    let game = games().join("fools_mate.pgn");
    let out = run(&["simulate", s(&game), "--config", s(&short)]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("half-move 1"));

    assert_eq!(
        run(&["simulate", s(&game), "--white-speed", "9"])
            .status
            .code(),
        Some(4)
    );
    let broken = write(dir.path(), "broken.cfg", "tick 0.01\n");
    assert_eq!(
        run(&["simulate", s(&game), "--config", s(&broken)])
            .status
            .code(),
        Some(4)
    );
    let missing = dir.path().join("missing.pgn");
    assert_eq!(run(&["simulate", s(&missing)]).status.code(), Some(1));
}

#[test]
fn decode_writes_split_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "decode",
        s(&games().join("immortal_game.pgn")),
        "--out-dir",
        s(dir.path()),
    ]);
    assert!(out.status.success());
    let white =
        read_split_file(&std::fs::read_to_string(dir.path().join("white.csv")).unwrap()).unwrap();
    let black =
        read_split_file(&std::fs::read_to_string(dir.path().join("black.csv")).unwrap()).unwrap();
    assert_eq!(white.len(), 23);
    assert_eq!(black.len(), 22);
}

#[test]
fn sweep_writes_ranked_csv() {
    let dir = tempfile::tempdir().unwrap();
    let grid = write(
        dir.path(),
        "grid.txt",
        "arms.l1 = 0.35, 0.45\nwhite.speed = 1, 2\n",
    );
    let out_csv = dir.path().join("sweep.csv");
    let out = run(&[
        "sweep",
        s(&games().join("scholars_mate.pgn")),
        "--grid",
        s(&grid),
        "--out",
        s(&out_csv),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = std::fs::read_to_string(&out_csv).unwrap();
    let mut lines = text.lines();
    assert!(lines
        .next()
        .unwrap()
        .starts_with("arms.l1,white.speed,status,mean_move_s"));
    let means: Vec<f64> = lines
        .map(|l| l.split(',').nth(3).unwrap().parse().unwrap())
        .collect();
    assert_eq!(means.len(), 4);
    assert!(means.windows(2).all(|w| w[0] <= w[1]));

    let empty = write(dir.path(), "empty.txt", "# nothing\n");
    let out = run(&[
        "sweep",
        s(&games().join("scholars_mate.pgn")),
        "--grid",
        s(&empty),
        "--out",
        s(&out_csv),
    ]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn serve_flag_accepts_a_controller() {
    let mut child = bin()
        .args([
            "simulate",
            s(&games().join("fools_mate.pgn")),
            "--mode",
            "auto",
            "--serve",
            "127.0.0.1:0",
        ])
        .args(["--linger", "0.2"])
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    let mut stdout = BufReader::new(child.stdout.take().unwrap());
    let mut line = String::new();
    stdout.read_line(&mut line).unwrap();
    let addr = line
        .trim()
        .strip_prefix("listening on ")
        .unwrap()
        .to_string();

    let wait = Duration::from_secs(10);
    let mut c = WireClient::connect(addr.as_str()).unwrap();
    let first = c.recv(wait).unwrap().unwrap().as_event().unwrap();
    assert_eq!(first.phase, TurnPhase::AwaitStart);
    assert!(first.scene.is_some());
    let seq = c.send(ClientCommand::JoinController).unwrap();
    c.recv_until(wait, |m| m.as_ack().is_some_and(|a| a.reply_to == seq))
        .unwrap();
    c.command(Command::Start).unwrap();
    c.recv_until(wait, |m| {
        m.as_event().is_some_and(|e| e.phase == TurnPhase::Finished)
    })
    .unwrap();
    while let Ok(Some(_)) = c.recv(wait) {}
    assert!(child.wait().unwrap().success());
    let mut rest = String::new();
    std::io::Read::read_to_string(&mut stdout, &mut rest).unwrap();
    assert!(!rest.is_empty());
}
