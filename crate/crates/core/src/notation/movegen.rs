use serde::{Deserialize, Serialize};

use super::board::{BoardState, CastleSide, Color, Piece, PieceKind, Square};
use super::NotationError;

/// One fully resolved half-move.
///
/// For castling, `from`/`to` describe the king.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DecodedMove {
    pub color: Color,
    pub piece: PieceKind,
    pub from: Square,
    pub to: Square,
    /// Captured piece and the square it stood on (differs from `to` only for
    /// en passant).
    pub captured: Option<(PieceKind, Square)>,
    pub promotion: Option<PieceKind>,
    pub castle: Option<CastleSide>,
    pub gives_check: bool,
}

impl DecodedMove {
    pub fn is_en_passant(&self) -> bool {
        matches!(self.captured, Some((_, sq)) if sq != self.to)
    }

    /// Rook relocation for a castling move.
    pub fn castle_rook_squares(&self) -> Option<(Square, Square)> {
        let rank = self.color.back_rank();
        self.castle.map(|side| match side {
            CastleSide::KingSide => (sq(7, rank), sq(5, rank)),
            CastleSide::QueenSide => (sq(0, rank), sq(3, rank)),
        })
    }

    /// Identity ignoring `gives_check`.
    pub(crate) fn same_motion(&self, other: &DecodedMove) -> bool {
        self.color == other.color
            && self.piece == other.piece
            && self.from == other.from
            && self.to == other.to
            && self.captured == other.captured
            && self.promotion == other.promotion
            && self.castle == other.castle
    }
}

fn sq(file: u8, rank: u8) -> Square {
    Square::new(file, rank).expect("square in range")
}

const KNIGHT_STEPS: [(i8, i8); 8] = [
    (1, 2),
    (2, 1),
    (2, -1),
    (1, -2),
    (-1, -2),
    (-2, -1),
    (-2, 1),
    (-1, 2),
];
const KING_STEPS: [(i8, i8); 8] = [
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
    (-1, 0),
    (-1, -1),
    (0, -1),
    (1, -1),
];
const ROOK_DIRS: [(i8, i8); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];
const BISHOP_DIRS: [(i8, i8); 4] = [(1, 1), (1, -1), (-1, 1), (-1, -1)];
const PROMOTIONS: [PieceKind; 4] = [
    PieceKind::Queen,
    PieceKind::Rook,
    PieceKind::Bishop,
    PieceKind::Knight,
];

/// True if any piece of `by` attacks `target`.
pub fn is_attacked(board: &BoardState, target: Square, by: Color) -> bool {
    let holds = |s: Option<Square>, kinds: &[PieceKind]| {
        s.and_then(|s| board.get(s))
            .is_some_and(|p| p.color == by && kinds.contains(&p.kind))
    };
    // A pawn of `by` attacks diagonally forward, so look one rank backwards.
    let back = -by.forward();
    if holds(target.offset(-1, back), &[PieceKind::Pawn])
        || holds(target.offset(1, back), &[PieceKind::Pawn])
    {
        return true;
    }
    if KNIGHT_STEPS
        .iter()
        .any(|&(df, dr)| holds(target.offset(df, dr), &[PieceKind::Knight]))
    {
        return true;
    }
    if KING_STEPS
        .iter()
        .any(|&(df, dr)| holds(target.offset(df, dr), &[PieceKind::King]))
    {
        return true;
    }
    let ray_hits = |dirs: &[(i8, i8)], kinds: &[PieceKind]| {
        dirs.iter().any(|&(df, dr)| {
            let mut cur = target.offset(df, dr);
            while let Some(s) = cur {
                if let Some(p) = board.get(s) {
                    return p.color == by && kinds.contains(&p.kind);
                }
                cur = s.offset(df, dr);
            }
            false
        })
    };
    ray_hits(&ROOK_DIRS, &[PieceKind::Rook, PieceKind::Queen])
        || ray_hits(&BISHOP_DIRS, &[PieceKind::Bishop, PieceKind::Queen])
}

pub fn in_check(board: &BoardState, color: Color) -> bool {
    board
        .king_square(color)
        .is_some_and(|k| is_attacked(board, k, color.opponent()))
}

fn pseudo_legal(board: &BoardState, color: Color, out: &mut Vec<DecodedMove>) {
    let base = |piece, from, to| DecodedMove {
        color,
        piece,
        from,
        to,
        captured: None,
        promotion: None,
        castle: None,
        gives_check: false,
    };
    for (from, p) in board.pieces().filter(|(_, p)| p.color == color) {
        let target = |to: Square| -> Option<Option<(PieceKind, Square)>> {
            match board.get(to) {
                None => Some(None),
                Some(q) if q.color != color => Some(Some((q.kind, to))),
                Some(_) => None,
            }
        };
        match p.kind {
            PieceKind::Pawn => {
                let fwd = color.forward();
                let last_rank = color.opponent().back_rank();
                let push_promotions = |mv: DecodedMove, out: &mut Vec<DecodedMove>| {
                    if mv.to.rank() == last_rank {
                        out.extend(PROMOTIONS.iter().map(|&k| DecodedMove {
                            promotion: Some(k),
                            ..mv
                        }));
                    } else {
                        out.push(mv);
                    }
                };
                if let Some(one) = from.offset(0, fwd).filter(|s| board.get(*s).is_none()) {
                    push_promotions(base(PieceKind::Pawn, from, one), out);
                    let start_rank = if color == Color::White { 1 } else { 6 };
                    if from.rank() == start_rank {
                        if let Some(two) = one.offset(0, fwd).filter(|s| board.get(*s).is_none()) {
                            out.push(base(PieceKind::Pawn, from, two));
                        }
                    }
                }
                for df in [-1, 1] {
                    let Some(to) = from.offset(df, fwd) else {
                        continue;
                    };
                    match board.get(to) {
                        Some(q) if q.color != color => push_promotions(
                            DecodedMove {
                                captured: Some((q.kind, to)),
                                ..base(PieceKind::Pawn, from, to)
                            },
                            out,
                        ),
                        None if board.en_passant == Some(to) && board.side_to_move == color => {
                            let victim = Square::new(to.file(), from.rank()).expect("on board");
                            if board.get(victim)
                                == Some(Piece::new(PieceKind::Pawn, color.opponent()))
                            {
                                out.push(DecodedMove {
                                    captured: Some((PieceKind::Pawn, victim)),
                                    ..base(PieceKind::Pawn, from, to)
                                });
                            }
                        }
                        _ => {}
                    }
                }
            }
            PieceKind::Knight | PieceKind::King => {
                let steps = if p.kind == PieceKind::Knight {
                    &KNIGHT_STEPS
                } else {
                    &KING_STEPS
                };
                for &(df, dr) in steps {
                    let Some(to) = from.offset(df, dr) else {
                        continue;
                    };
                    if let Some(captured) = target(to) {
                        out.push(DecodedMove {
                            captured,
                            ..base(p.kind, from, to)
                        });
                    }
                }
            }
            PieceKind::Bishop | PieceKind::Rook | PieceKind::Queen => {
                let dirs: &[(i8, i8)] = match p.kind {
                    PieceKind::Bishop => &BISHOP_DIRS,
                    PieceKind::Rook => &ROOK_DIRS,
                    _ => &[
                        (1, 0),
                        (-1, 0),
                        (0, 1),
                        (0, -1),
                        (1, 1),
                        (1, -1),
                        (-1, 1),
                        (-1, -1),
                    ],
                };
                for &(df, dr) in dirs {
                    let mut cur = from.offset(df, dr);
                    while let Some(to) = cur {
                        match target(to) {
                            Some(captured) => {
                                out.push(DecodedMove {
                                    captured,
                                    ..base(p.kind, from, to)
                                });
                                if captured.is_some() {
                                    break;
                                }
                            }
                            None => break,
                        }
                        cur = to.offset(df, dr);
                    }
                }
            }
        }
    }
    castling_moves(board, color, out);
}

fn castling_moves(board: &BoardState, color: Color, out: &mut Vec<DecodedMove>) {
    let rank = color.back_rank();
    let king_from = sq(4, rank);
    if board.get(king_from) != Some(Piece::new(PieceKind::King, color)) {
        return;
    }
    let enemy = color.opponent();
    for side in [CastleSide::KingSide, CastleSide::QueenSide] {
        if !board.castling.has(color, side) {
            continue;
        }
        let (rook_file, empty, king_path, king_to) = match side {
            CastleSide::KingSide => (7, &[5u8, 6][..], &[4u8, 5, 6][..], 6),
            CastleSide::QueenSide => (0, &[1u8, 2, 3][..], &[4u8, 3, 2][..], 2),
        };
        if board.get(sq(rook_file, rank)) != Some(Piece::new(PieceKind::Rook, color)) {
            continue;
        }
        if empty.iter().any(|&f| board.get(sq(f, rank)).is_some()) {
            continue;
        }
        if king_path
            .iter()
            .any(|&f| is_attacked(board, sq(f, rank), enemy))
        {
            continue;
        }
        out.push(DecodedMove {
            color,
            piece: PieceKind::King,
            from: king_from,
            to: sq(king_to, rank),
            captured: None,
            promotion: None,
            castle: Some(side),
            gives_check: false,
        });
    }
}

/// Every legal move for `color`, with `gives_check` filled in.
///
/// An empty result means checkmate or stalemate.
pub fn legal_moves(board: &BoardState, color: Color) -> Vec<DecodedMove> {
    let mut pseudo = Vec::with_capacity(48);
    pseudo_legal(board, color, &mut pseudo);
    pseudo
        .into_iter()
        .filter_map(|mut mv| {
            let after = make_move(board, &mv);
            if in_check(&after, color) {
                return None;
            }
            mv.gives_check = in_check(&after, color.opponent());
            Some(mv)
        })
        .collect()
}

/// Applies a move that has already been checked for legality.
fn make_move(board: &BoardState, mv: &DecodedMove) -> BoardState {
    let mut next = board.clone();
    let color = mv.color;
    if let Some((_, victim)) = mv.captured {
        next.set(victim, None);
    }
    next.set(mv.from, None);
    let placed = Piece::new(mv.promotion.unwrap_or(mv.piece), color);
    next.set(mv.to, Some(placed));
    if let Some((rook_from, rook_to)) = mv.castle_rook_squares() {
        next.set(rook_from, None);
        next.set(rook_to, Some(Piece::new(PieceKind::Rook, color)));
    }

    if mv.piece == PieceKind::King {
        next.castling.clear(color, CastleSide::KingSide);
        next.castling.clear(color, CastleSide::QueenSide);
    }
    for touched in [mv.from, mv.to] {
        for c in [Color::White, Color::Black] {
            if touched == sq(0, c.back_rank()) {
                next.castling.clear(c, CastleSide::QueenSide);
            }
            if touched == sq(7, c.back_rank()) {
                next.castling.clear(c, CastleSide::KingSide);
            }
        }
    }

    next.en_passant = None;
    if mv.piece == PieceKind::Pawn && mv.from.rank().abs_diff(mv.to.rank()) == 2 {
        next.en_passant = mv.from.offset(0, color.forward());
    }
    if mv.piece == PieceKind::Pawn || mv.captured.is_some() {
        next.halfmove_clock = 0;
    } else {
        next.halfmove_clock += 1;
    }
    if color == Color::Black {
        next.fullmove_number += 1;
    }
    next.side_to_move = color.opponent();
    next
}

/// Plays `mv` on `board`. The move must be one of the side to move's legal
/// moves (`gives_check` is not compared).
pub fn apply_move(board: &BoardState, mv: &DecodedMove) -> Result<BoardState, NotationError> {
    if mv.color != board.side_to_move
        || !legal_moves(board, mv.color)
            .iter()
            .any(|legal| legal.same_motion(mv))
    {
        return Err(NotationError::IllegalMove {
            token: format!("{}{}", mv.from, mv.to),
            reason: "not a legal move in this position".into(),
        });
    }
    Ok(make_move(board, mv))
}

/// Leaf-node count of the legal move tree to `depth`.
pub fn perft(board: &BoardState, depth: u32) -> u64 {
    if depth == 0 {
        return 1;
    }
    let moves = legal_moves(board, board.side_to_move);
    if depth == 1 {
        return moves.len() as u64;
    }
    moves
        .iter()
        .map(|mv| perft(&make_move(board, mv), depth - 1))
        .sum()
}
