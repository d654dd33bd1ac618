//! The game-level correlation between the two arms' move times, and the
//! cases where it has no value.

use robochess::engine::{run, SimConfig};
use robochess::metrics::{paired_correlation, pearson};
use robochess::motion::ArmId;
use robochess::notation::parse_game_text;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let text = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/games/evergreen_game.pgn"
    ))?;
    let report = run(&SimConfig::default(), &parse_game_text(&text)?)?;
    let white = report.durations(ArmId::Mr1);
    let black = report.durations(ArmId::Mr2);
    println!("white moves: {}, black moves: {}", white.len(), black.len());
    println!("r12 = {:?}", paired_correlation(&white, &black));

    let up = [1.0, 2.0, 3.0, 4.0];
    let down = [4.0, 3.0, 2.0, 1.0];
    println!("identical series: {:?}", pearson(&up, &up));
    println!("reversed series:  {:?}", pearson(&up, &down));
    println!("constant series:  {:?}", paired_correlation(&up, &[2.0; 4]));
    println!("one pair:         {:?}", paired_correlation(&[1.0], &[2.0]));
    Ok(())
}
