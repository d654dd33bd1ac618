//! Recorded-game decoding: movetext tokenizing, full legal move generation
//! for SAN resolution, and the numeric per-move records.

mod board;
mod game;
mod movegen;
mod numeric;
mod san;

pub use board::{BoardState, CastleSide, CastlingRights, Color, Piece, PieceKind, Square};
pub use game::{decode_game, decode_game_from, parse_game_text, DecodedGame, GameScript};
pub use movegen::{apply_move, in_check, is_attacked, legal_moves, perft, DecodedMove};
pub use numeric::{
    encode_numeric, read_split_file, write_split_file, NumericMove, CAPTURE, CASTLE_K, CASTLE_Q,
    EN_PASSANT, PROMOTION, PROMOTION_KIND_SHIFT,
};
pub use san::{decode_move, decode_move_verbose, CheckMark, Decoded, San, SanToken};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum NotationError {
    /// `index` is the 1-based move token index, `offset` the byte offset in
    /// the source text.
    #[error("malformed token {text:?} at move token {index} (byte {offset})")]
    MalformedToken {
        index: usize,
        offset: usize,
        text: String,
    },
    #[error("game contains no moves")]
    EmptyGame,
    #[error("illegal move {token}: {reason}")]
    IllegalMove { token: String, reason: String },
    #[error("ambiguous move {token}")]
    AmbiguousMove { token: String },
    #[error("move token {index}: {source}")]
    AtToken {
        index: usize,
        #[source]
        source: Box<NotationError>,
    },
    #[error("invalid position: {0}")]
    InvalidPosition(String),
    #[error("bad numeric move record {0:?}")]
    BadNumericRecord(String),
}

impl NotationError {
    /// The 1-based index of the offending move token, when known.
    pub fn token_index(&self) -> Option<usize> {
        match self {
            NotationError::MalformedToken { index, .. } | NotationError::AtToken { index, .. } => {
                Some(*index)
            }
            _ => None,
        }
    }
}
