//! Compact numeric move records and the per-side split files.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::board::{BoardState, CastleSide, PieceKind, Square};
use super::movegen::{legal_moves, DecodedMove};
use super::NotationError;

pub const CAPTURE: u8 = 1 << 0;
pub const CASTLE_K: u8 = 1 << 1;
pub const CASTLE_Q: u8 = 1 << 2;
pub const EN_PASSANT: u8 = 1 << 3;
pub const PROMOTION: u8 = 1 << 4;
/// Two bits naming the promotion piece when [`PROMOTION`] is set:
/// 0 knight, 1 bishop, 2 rook, 3 queen.
pub const PROMOTION_KIND_SHIFT: u8 = 5;
const PROMOTION_KIND_MASK: u8 = 0b11 << PROMOTION_KIND_SHIFT;
const KNOWN_BITS: u8 = CAPTURE | CASTLE_K | CASTLE_Q | EN_PASSANT | PROMOTION | PROMOTION_KIND_MASK;

/// `from`/`to` are square indices `rank * 8 + file`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NumericMove {
    pub from: u8,
    pub to: u8,
    pub flags: u8,
}

impl NumericMove {
    pub fn is_capture(&self) -> bool {
        self.flags & CAPTURE != 0
    }

    pub fn is_en_passant(&self) -> bool {
        self.flags & EN_PASSANT != 0
    }

    pub fn castle(&self) -> Option<CastleSide> {
        if self.flags & CASTLE_K != 0 {
            Some(CastleSide::KingSide)
        } else if self.flags & CASTLE_Q != 0 {
            Some(CastleSide::QueenSide)
        } else {
            None
        }
    }

    pub fn promotion(&self) -> Option<PieceKind> {
        let kind = match (self.flags & PROMOTION_KIND_MASK) >> PROMOTION_KIND_SHIFT {
            0 => PieceKind::Knight,
            1 => PieceKind::Bishop,
            2 => PieceKind::Rook,
            _ => PieceKind::Queen,
        };
        (self.flags & PROMOTION != 0).then_some(kind)
    }

    /// Recovers the full move given the position it was played from.
    pub fn resolve(&self, board: &BoardState) -> Result<DecodedMove, NotationError> {
        legal_moves(board, board.side_to_move)
            .into_iter()
            .find(|m| encode_numeric(m) == *self)
            .ok_or_else(|| NotationError::IllegalMove {
                token: self.to_string(),
                reason: "numeric record matches no legal move".into(),
            })
    }
}

pub fn encode_numeric(mv: &DecodedMove) -> NumericMove {
    let mut flags = 0;
    if mv.captured.is_some() {
        flags |= CAPTURE;
    }
    if mv.is_en_passant() {
        flags |= EN_PASSANT;
    }
    match mv.castle {
        Some(CastleSide::KingSide) => flags |= CASTLE_K,
        Some(CastleSide::QueenSide) => flags |= CASTLE_Q,
        None => {}
    }
    if let Some(kind) = mv.promotion {
        let code = match kind {
            PieceKind::Knight => 0,
            PieceKind::Bishop => 1,
            PieceKind::Rook => 2,
            _ => 3,
        };
        flags |= PROMOTION | (code << PROMOTION_KIND_SHIFT);
    }
    NumericMove {
        from: mv.from.index(),
        to: mv.to.index(),
        flags,
    }
}

impl fmt::Display for NumericMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.from, self.to, self.flags)
    }
}

impl FromStr for NumericMove {
    type Err = NotationError;

    fn from_str(line: &str) -> Result<Self, Self::Err> {
        let bad = || NotationError::BadNumericRecord(line.to_string());
        let mut parts = line.trim().split(',');
        let mut field = || -> Result<u8, NotationError> {
            parts
                .next()
                .ok_or_else(bad)?
                .trim()
                .parse()
                .map_err(|_| bad())
        };
        let rec = NumericMove {
            from: field()?,
            to: field()?,
            flags: field()?,
        };
        if parts.next().is_some()
            || Square::from_index(rec.from).is_none()
            || Square::from_index(rec.to).is_none()
            || rec.flags & !KNOWN_BITS != 0
        {
            return Err(bad());
        }
        Ok(rec)
    }
}

/// Renders a split file: one `from,to,flags` line per move.
pub fn write_split_file(moves: &[DecodedMove]) -> String {
    moves
        .iter()
        .map(|m| format!("{}\n", encode_numeric(m)))
        .collect()
}

pub fn read_split_file(text: &str) -> Result<Vec<NumericMove>, NotationError> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(str::parse)
        .collect()
}
