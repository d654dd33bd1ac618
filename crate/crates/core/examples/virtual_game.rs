//! Plays a whole game with no pacing and no events, then prints the
//! per-move table and the game indicators.
//!
//! ```text
//! cargo run --example virtual_game -- games/evergreen_game.pgn
//! ```

use robochess::engine::{run, Mode, SimConfig};
use robochess::notation::parse_game_text;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args().nth(1).unwrap_or_else(|| {
        concat!(env!("CARGO_MANIFEST_DIR"), "/games/opera_game.pgn").to_string()
    });
    let script = parse_game_text(&std::fs::read_to_string(path)?)?;
    let cfg = SimConfig {
        mode: Mode::Virtual,
        ..SimConfig::default()
    };
    let report = run(&cfg, &script)?;
    print!("{}", report.to_csv());
    println!();
    print!("{}", report.summary());
    Ok(())
}
