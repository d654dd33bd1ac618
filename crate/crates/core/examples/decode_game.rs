//! Decodes a recorded game, shows each half-move in numeric form and splits
//! it into the two per-arm move lists.
//!
//! ```text
//! cargo run --example decode_game -- games/immortal_game.pgn
//! ```

use robochess::notation::{decode_game, encode_numeric, parse_game_text, write_split_file};
use robochess::scheduler::split_moves;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args().nth(1).unwrap_or_else(|| {
        concat!(env!("CARGO_MANIFEST_DIR"), "/games/opera_game.pgn").to_string()
    });
    let script = parse_game_text(&std::fs::read_to_string(&path)?)?;
    let game = decode_game(&script)?;

    for (i, (token, mv)) in script.tokens.iter().zip(&game.moves).enumerate() {
        let rec = encode_numeric(mv);
        println!(
            "{:>3} {:<5} {:<8} {:?} {}-{}  numeric {rec}",
            i + 1,
            mv.color,
            token,
            mv.piece,
            mv.from,
            mv.to
        );
    }
    for w in &game.warnings {
        println!("warning: {w}");
    }

    let streams = split_moves(&game.moves)?;
    println!(
        "\nwhite ({} moves):\n{}",
        streams.white.len(),
        write_split_file(&streams.white)
    );
    println!(
        "black ({} moves):\n{}",
        streams.black.len(),
        write_split_file(&streams.black)
    );
    println!("final position: {}", game.final_position.to_fen());
    Ok(())
}
