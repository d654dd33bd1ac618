use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use log::info;

use robochess::engine::{
    load_config, sweep, sweep_to_csv, EngineError, LiveEngine, Mode, ParameterGrid, SimConfig,
    Simulation,
};
use robochess::metrics::GameReport;
use robochess::motion::ArmId;
use robochess::notation::{decode_game, parse_game_text, write_split_file, DecodedGame};
use robochess::scheduler::split_moves;
use robochess::server::ControlServer;

#[derive(Parser)]
#[command(
    name = "robochess",
    version,
    about = "Two manipulators replaying a chess game"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Step,
    Auto,
    Virtual,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Step => Mode::StepByStep,
            ModeArg::Auto => Mode::Autoplay,
            ModeArg::Virtual => Mode::Virtual,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Play a game and report per-move times and gripper paths.
    Simulate {
        game: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        #[arg(long)]
        white_speed: Option<f64>,
        #[arg(long)]
        black_speed: Option<f64>,
        /// Per-move CSV output.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Full JSON report output.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Serve events and accept a controller on this address.
        #[arg(long)]
        serve: Option<String>,
        /// Seconds to keep serving after the game ends.
        #[arg(long, default_value_t = 2.0)]
        linger: f64,
    },
    /// Run the game over a grid of geometry and speed settings.
    Sweep {
        game: PathBuf,
        #[arg(long)]
        grid: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Decode a game and write the two per-arm move files.
    Decode {
        game: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

enum Failure {
    Engine(EngineError),
    Io(String),
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        Failure::Engine(e)
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Failure + '_ {
    move |e| Failure::Io(format!("{}: {e}", path.display()))
}

fn read_game(path: &Path) -> Result<DecodedGame, Failure> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    let script = parse_game_text(&text).map_err(EngineError::from)?;
    Ok(decode_game(&script).map_err(EngineError::from)?)
}

fn base_config(path: Option<&Path>) -> Result<SimConfig, Failure> {
    Ok(match path {
        Some(p) => load_config(p).map_err(EngineError::from)?,
        None => SimConfig::default(),
    })
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(io_err(path))
}

fn serve(sim: Simulation, addr: &str, linger: f64) -> Result<GameReport, Failure> {
    let engine = LiveEngine::spawn(sim);
    let server =
        ControlServer::start(engine, addr).map_err(|e| Failure::Io(format!("bind {addr}: {e}")))?;
    println!("listening on {}", server.local_addr());
    while !server.engine().wait_finished(Duration::from_millis(200)) {}
    std::thread::sleep(Duration::from_secs_f64(linger.max(0.0)));
    Ok(server.shutdown()?)
}

#[allow(clippy::too_many_arguments)]
fn simulate(
    game: &Path,
    config: Option<&Path>,
    mode: Option<ModeArg>,
    white_speed: Option<f64>,
    black_speed: Option<f64>,
    csv: Option<&Path>,
    report_path: Option<&Path>,
    serve_addr: Option<&str>,
    linger: f64,
) -> Result<(), Failure> {
    let mut cfg = base_config(config)?;
    if let Some(m) = mode {
        cfg.mode = m.into();
    }
    for (arm, s) in [(ArmId::Mr1, white_speed), (ArmId::Mr2, black_speed)] {
        if let Some(s) = s {
            cfg.arm_mut(arm).speed = s;
        }
    }
    cfg.validate().map_err(EngineError::from)?;
    let decoded = read_game(game)?;
    let mut sim = Simulation::new(cfg, &decoded.moves)?;
    let report = match serve_addr {
        Some(addr) => serve(sim, addr, linger)?,
        None => sim.run_to_end(|_| {})?,
    };
    print!("{}", report.summary());
    if let Some(p) = csv {
        write(p, &report.to_csv())?;
    }
    if let Some(p) = report_path {
        write(p, &report.to_json())?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Cmd::Simulate {
            game,
            config,
            mode,
            white_speed,
            black_speed,
            csv,
            report,
            serve,
            linger,
        } => simulate(
            &game,
            config.as_deref(),
            mode,
            white_speed,
            black_speed,
            csv.as_deref(),
            report.as_deref(),
            serve.as_deref(),
            linger,
        ),
        Cmd::Sweep {
            game,
            grid,
            out,
            config,
        } => {
            let base = base_config(config.as_deref())?;
            let decoded = read_game(&game)?;
            let text = std::fs::read_to_string(&grid).map_err(io_err(&grid))?;
            let grid = ParameterGrid::parse(&text)?;
            let rows = sweep(&base, &decoded.moves, &grid)?;
            info!("{} grid points", rows.len());
            write(&out, &sweep_to_csv(&rows))?;
            println!("{} rows written to {}", rows.len(), out.display());
            Ok(())
        }
        Cmd::Decode { game, out_dir } => {
            let decoded = read_game(&game)?;
            for w in &decoded.warnings {
                eprintln!("warning: {w}");
            }
            let streams = split_moves(&decoded.moves).map_err(EngineError::from)?;
            std::fs::create_dir_all(&out_dir).map_err(io_err(&out_dir))?;
            let white = out_dir.join("white.csv");
            let black = out_dir.join("black.csv");
            write(&white, &write_split_file(&streams.white))?;
            write(&black, &write_split_file(&streams.black))?;
            println!(
                "{} white and {} black moves written to {}",
                streams.white.len(),
                streams.black.len(),
                out_dir.display()
            );
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Engine(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
