//! Standard Algebraic Notation: syntax and resolution against a position.

use super::board::{BoardState, CastleSide, PieceKind, Square};
use super::movegen::{legal_moves, DecodedMove};
use super::NotationError;

/// Suffix a token carried, if any.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckMark {
    None,
    Check,
    Mate,
}

/// A syntactically valid SAN token, not yet tied to a position.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum San {
    Normal {
        piece: PieceKind,
        file: Option<u8>,
        rank: Option<u8>,
        capture: bool,
        to: Square,
        promotion: Option<PieceKind>,
    },
    Castle(CastleSide),
}

/// Parsed token plus its check suffix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SanToken {
    pub san: San,
    pub mark: CheckMark,
}

impl SanToken {
    /// Parses one token. Trailing annotation glyphs (`!`, `?`) are ignored.
    pub fn parse(token: &str) -> Option<SanToken> {
        let body = token.trim_end_matches(['!', '?']);
        let (body, mark) = if let Some(b) = body.strip_suffix('#') {
            (b, CheckMark::Mate)
        } else if let Some(b) = body.strip_suffix('+') {
            (b, CheckMark::Check)
        } else {
            (body, CheckMark::None)
        };
        let san = match body {
            "O-O" | "0-0" => San::Castle(CastleSide::KingSide),
            "O-O-O" | "0-0-0" => San::Castle(CastleSide::QueenSide),
            _ => parse_normal(body)?,
        };
        Some(SanToken { san, mark })
    }
}

fn parse_normal(body: &str) -> Option<San> {
    let bytes = body.as_bytes();
    if !bytes.is_ascii() || bytes.len() < 2 {
        return None;
    }
    let (piece, rest) = match PieceKind::from_san_letter(bytes[0] as char) {
        Some(k) => (k, &body[1..]),
        None => (PieceKind::Pawn, body),
    };
    let (rest, promotion) = match rest.split_once('=') {
        Some((head, promo)) => {
            let mut chars = promo.chars();
            let kind = PieceKind::from_san_letter(chars.next()?)?;
            if chars.next().is_some() || matches!(kind, PieceKind::King) {
                return None;
            }
            (head, Some(kind))
        }
        None => (rest, None),
    };
    if rest.len() < 2 {
        return None;
    }
    let (hint, dest) = rest.split_at(rest.len() - 2);
    let to: Square = dest.parse().ok()?;
    let (hint, capture) = match hint.strip_suffix('x') {
        Some(h) => (h, true),
        None => (hint, false),
    };
    let mut file = None;
    let mut rank = None;
    for c in hint.chars() {
        match c {
            'a'..='h' if file.is_none() && rank.is_none() => file = Some(c as u8 - b'a'),
            '1'..='8' if rank.is_none() => rank = Some(c as u8 - b'1'),
            _ => return None,
        }
    }
    if piece == PieceKind::Pawn {
        // Pawn captures name the origin file; pushes carry no hint at all.
        if rank.is_some() || file.is_some() != capture {
            return None;
        }
        let last = to.rank() == 0 || to.rank() == 7;
        if promotion.is_some() != last {
            return None;
        }
    } else if promotion.is_some() {
        return None;
    }
    Some(San::Normal {
        piece,
        file,
        rank,
        capture,
        to,
        promotion,
    })
}

impl San {
    /// Whether a legal move is described by this SAN.
    ///
    /// A missing `x` on a capturing piece move is tolerated; a stated `x`
    /// on a non-capture is not.
    pub fn matches(&self, mv: &DecodedMove) -> bool {
        match *self {
            San::Castle(side) => mv.castle == Some(side),
            San::Normal {
                piece,
                file,
                rank,
                capture,
                to,
                promotion,
            } => {
                mv.castle.is_none()
                    && mv.piece == piece
                    && mv.to == to
                    && mv.promotion == promotion
                    && file.is_none_or(|f| mv.from.file() == f)
                    && rank.is_none_or(|r| mv.from.rank() == r)
                    && (!capture || mv.captured.is_some())
            }
        }
    }
}

/// Result of decoding with a non-fatal note about the check suffix.
#[derive(Clone, Debug, PartialEq)]
pub struct Decoded {
    pub mv: DecodedMove,
    pub check_mismatch: Option<String>,
}

/// Resolves `token` against the side to move's legal moves.
pub fn decode_move(board: &BoardState, token: &str) -> Result<DecodedMove, NotationError> {
    decode_move_verbose(board, token).map(|d| d.mv)
}

/// Like [`decode_move`] but reports a disagreement between the token's
/// `+`/`#` suffix and the actual position.
pub fn decode_move_verbose(board: &BoardState, token: &str) -> Result<Decoded, NotationError> {
    let parsed = SanToken::parse(token).ok_or_else(|| NotationError::IllegalMove {
        token: token.to_string(),
        reason: "not valid SAN".into(),
    })?;
    let legal = legal_moves(board, board.side_to_move);
    let mut hits = legal.iter().filter(|m| parsed.san.matches(m));
    let mv = match (hits.next(), hits.next()) {
        (Some(m), None) => *m,
        (None, _) => {
            return Err(NotationError::IllegalMove {
                token: token.to_string(),
                reason: "matches no legal move".into(),
            })
        }
        (Some(_), Some(_)) => {
            return Err(NotationError::AmbiguousMove {
                token: token.to_string(),
            })
        }
    };
    let after_has_reply = || {
        let next = super::movegen::apply_move(board, &mv).expect("decoded move is legal");
        !legal_moves(&next, next.side_to_move).is_empty()
    };
    let check_mismatch = match parsed.mark {
        CheckMark::None if mv.gives_check => Some(format!("{token}: gives check but has no '+'")),
        CheckMark::Check | CheckMark::Mate if !mv.gives_check => {
            Some(format!("{token}: marked as check but does not give check"))
        }
        CheckMark::Mate if after_has_reply() => Some(format!("{token}: marked as mate but is not")),
        _ => None,
    };
    Ok(Decoded { mv, check_mismatch })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::notation::board::Color;

    fn sq(s: &str) -> Square {
        s.parse().unwrap()
    }

    #[test]
    fn parses_common_shapes() {
        assert!(SanToken::parse("e4").is_some());
        assert!(SanToken::parse("exd5").is_some());
        assert!(SanToken::parse("Nbd2").is_some());
        assert!(SanToken::parse("R1e2").is_some());
        assert!(SanToken::parse("Qh4xe1+").is_some());
        assert!(SanToken::parse("e8=Q#").is_some());
        assert!(SanToken::parse("O-O-O!?").is_some());
        assert!(SanToken::parse("e9").is_none());
        assert!(SanToken::parse("e8").is_none(), "promotion piece required");
        assert!(SanToken::parse("e7=Q").is_none());
        assert!(SanToken::parse("Ke8=Q").is_none());
        assert!(SanToken::parse("xe4").is_none());
        assert!(SanToken::parse("Zf3").is_none());
    }

    #[test]
    fn decodes_pawn_push() {
        let mv = decode_move(&BoardState::initial(), "e4").unwrap();
        assert_eq!(
            (mv.piece, mv.from, mv.to),
            (PieceKind::Pawn, sq("e2"), sq("e4"))
        );
        assert_eq!(mv.color, Color::White);
    }

    #[test]
    fn castling_blocked_at_start() {
        let err = decode_move(&BoardState::initial(), "O-O").unwrap_err();
        assert!(matches!(err, NotationError::IllegalMove { .. }));
    }

    #[test]
    fn knight_disambiguation_by_file() {
        let b = BoardState::from_fen("4k3/8/8/8/8/5N2/8/1N2K3 w - - 0 1").unwrap();
        let mv = decode_move(&b, "Nbd2").unwrap();
        assert_eq!((mv.from, mv.to), (sq("b1"), sq("d2")));
        let mv = decode_move(&b, "Nfd2").unwrap();
        assert_eq!(mv.from, sq("f3"));
        assert!(matches!(
            decode_move(&b, "Nd2"),
            Err(NotationError::AmbiguousMove { .. })
        ));
    }

    #[test]
    fn rook_disambiguation_by_rank() {
        let b = BoardState::from_fen("4k3/R7/8/8/8/8/8/R3K3 w - - 0 1").unwrap();
        assert_eq!(decode_move(&b, "R1a4").unwrap().from, sq("a1"));
        assert_eq!(decode_move(&b, "R7a4").unwrap().from, sq("a7"));
    }

    #[test]
    fn capture_marker_must_be_true() {
        let b = BoardState::initial();
        assert!(decode_move(&b, "Nxf3").is_err());
    }

    #[test]
    fn check_suffix_mismatch_is_a_warning() {
        let b = BoardState::initial();
        let d = decode_move_verbose(&b, "e4+").unwrap();
        assert_eq!(d.mv.to, sq("e4"));
        assert!(d.check_mismatch.is_some());
        let b = BoardState::from_fen("4k3/8/8/8/8/8/8/R3K3 w - - 0 1").unwrap();
        let d = decode_move_verbose(&b, "Ra8").unwrap();
        assert!(d.check_mismatch.is_some());
        assert!(decode_move_verbose(&b, "Ra8+")
            .unwrap()
            .check_mismatch
            .is_none());
    }

    #[test]
    fn mate_suffix_verified() {
        let b = BoardState::from_fen("6k1/5ppp/8/8/8/8/8/R5K1 w - - 0 1").unwrap();
        assert!(decode_move_verbose(&b, "Ra8#")
            .unwrap()
            .check_mismatch
            .is_none());
        let b = BoardState::from_fen("6k1/5pp1/8/8/8/8/8/R5K1 w - - 0 1").unwrap();
        assert!(decode_move_verbose(&b, "Ra8#")
            .unwrap()
            .check_mismatch
            .is_some());
    }

    #[test]
    fn decode_is_deterministic() {
        let b = BoardState::initial();
        assert_eq!(
            decode_move(&b, "Nf3").unwrap(),
            decode_move(&b, "Nf3").unwrap()
        );
    }
}
