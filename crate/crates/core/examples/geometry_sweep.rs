//! Ranks link-length combinations by mean move time over a full game.

use robochess::engine::{sweep, sweep_to_csv, Mode, ParameterGrid, SimConfig};
use robochess::notation::{decode_game, parse_game_text};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let text = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/games/immortal_game.pgn"
    ))?;
    let moves = decode_game(&parse_game_text(&text)?)?.moves;
    let grid = ParameterGrid::parse(
        "arms.l1 = 0.30, 0.35, 0.40, 0.45\n\
         arms.l2 = 0.30, 0.35, 0.40, 0.45\n",
    )?;
    let base = SimConfig {
        mode: Mode::Virtual,
        ..SimConfig::default()
    };
    let rows = sweep(&base, &moves, &grid)?;
    print!("{}", sweep_to_csv(&rows));
    Ok(())
}
