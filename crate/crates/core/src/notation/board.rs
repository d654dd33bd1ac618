use std::fmt;

use serde::{Deserialize, Serialize};

use super::NotationError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    White,
    Black,
}

impl Color {
    pub fn opponent(self) -> Color {
        match self {
            Color::White => Color::Black,
            Color::Black => Color::White,
        }
    }

    /// Rank index (0-based) of this side's back rank.
    pub fn back_rank(self) -> u8 {
        match self {
            Color::White => 0,
            Color::Black => 7,
        }
    }

    /// +1 for White, -1 for Black.
    pub(crate) fn forward(self) -> i8 {
        match self {
            Color::White => 1,
            Color::Black => -1,
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Color::White => "white",
            Color::Black => "black",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PieceKind {
    Pawn,
    Knight,
    Bishop,
    Rook,
    Queen,
    King,
}

impl PieceKind {
    pub fn from_san_letter(c: char) -> Option<PieceKind> {
        Some(match c {
            'N' => PieceKind::Knight,
            'B' => PieceKind::Bishop,
            'R' => PieceKind::Rook,
            'Q' => PieceKind::Queen,
            'K' => PieceKind::King,
            _ => return None,
        })
    }

    pub fn san_letter(self) -> Option<char> {
        match self {
            PieceKind::Pawn => None,
            PieceKind::Knight => Some('N'),
            PieceKind::Bishop => Some('B'),
            PieceKind::Rook => Some('R'),
            PieceKind::Queen => Some('Q'),
            PieceKind::King => Some('K'),
        }
    }

    fn fen_char(self) -> char {
        self.san_letter().unwrap_or('P')
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Piece {
    pub kind: PieceKind,
    pub color: Color,
}

impl Piece {
    pub const fn new(kind: PieceKind, color: Color) -> Self {
        Piece { kind, color }
    }
}

/// A board square. `file` 0..7 is a..h, `rank` 0..7 is 1..8.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Square {
    file: u8,
    rank: u8,
}

impl Square {
    pub fn new(file: u8, rank: u8) -> Option<Square> {
        (file < 8 && rank < 8).then_some(Square { file, rank })
    }

    pub fn from_index(index: u8) -> Option<Square> {
        (index < 64).then_some(Square {
            file: index % 8,
            rank: index / 8,
        })
    }

    pub fn file(self) -> u8 {
        self.file
    }

    pub fn rank(self) -> u8 {
        self.rank
    }

    /// `rank * 8 + file`, so a1 = 0 and h8 = 63.
    pub fn index(self) -> u8 {
        self.rank * 8 + self.file
    }

    pub fn offset(self, dfile: i8, drank: i8) -> Option<Square> {
        let f = self.file as i8 + dfile;
        let r = self.rank as i8 + drank;
        if (0..8).contains(&f) && (0..8).contains(&r) {
            Some(Square {
                file: f as u8,
                rank: r as u8,
            })
        } else {
            None
        }
    }

    pub fn all() -> impl Iterator<Item = Square> {
        (0..64).map(|i| Square {
            file: i % 8,
            rank: i / 8,
        })
    }
}

impl fmt::Display for Square {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", (b'a' + self.file) as char, self.rank + 1)
    }
}

impl fmt::Debug for Square {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl std::str::FromStr for Square {
    type Err = NotationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let b = s.as_bytes();
        if b.len() == 2 && (b'a'..=b'h').contains(&b[0]) && (b'1'..=b'8').contains(&b[1]) {
            Ok(Square {
                file: b[0] - b'a',
                rank: b[1] - b'1',
            })
        } else {
            Err(NotationError::InvalidPosition(format!("bad square {s:?}")))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CastleSide {
    KingSide,
    QueenSide,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct CastlingRights {
    pub white_king_side: bool,
    pub white_queen_side: bool,
    pub black_king_side: bool,
    pub black_queen_side: bool,
}

impl CastlingRights {
    pub const ALL: CastlingRights = CastlingRights {
        white_king_side: true,
        white_queen_side: true,
        black_king_side: true,
        black_queen_side: true,
    };

    pub fn has(&self, color: Color, side: CastleSide) -> bool {
        match (color, side) {
            (Color::White, CastleSide::KingSide) => self.white_king_side,
            (Color::White, CastleSide::QueenSide) => self.white_queen_side,
            (Color::Black, CastleSide::KingSide) => self.black_king_side,
            (Color::Black, CastleSide::QueenSide) => self.black_queen_side,
        }
    }

    pub(crate) fn clear(&mut self, color: Color, side: CastleSide) {
        match (color, side) {
            (Color::White, CastleSide::KingSide) => self.white_king_side = false,
            (Color::White, CastleSide::QueenSide) => self.white_queen_side = false,
            (Color::Black, CastleSide::KingSide) => self.black_king_side = false,
            (Color::Black, CastleSide::QueenSide) => self.black_queen_side = false,
        }
    }
}

/// Full position: piece placement plus the state needed to decide legality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BoardState {
    squares: [Option<Piece>; 64],
    pub castling: CastlingRights,
    pub en_passant: Option<Square>,
    pub side_to_move: Color,
    /// Half-moves since the last capture or pawn move.
    pub halfmove_clock: u32,
    pub fullmove_number: u32,
}

const BACK_RANK: [PieceKind; 8] = [
    PieceKind::Rook,
    PieceKind::Knight,
    PieceKind::Bishop,
    PieceKind::Queen,
    PieceKind::King,
    PieceKind::Bishop,
    PieceKind::Knight,
    PieceKind::Rook,
];

impl Default for BoardState {
    fn default() -> Self {
        Self::initial()
    }
}

impl BoardState {
    pub fn empty() -> Self {
        BoardState {
            squares: [None; 64],
            castling: CastlingRights::default(),
            en_passant: None,
            side_to_move: Color::White,
            halfmove_clock: 0,
            fullmove_number: 1,
        }
    }

    pub fn initial() -> Self {
        let mut board = Self::empty();
        for file in 0..8u8 {
            let kind = BACK_RANK[file as usize];
            board.set(
                Square { file, rank: 0 },
                Some(Piece::new(kind, Color::White)),
            );
            board.set(
                Square { file, rank: 7 },
                Some(Piece::new(kind, Color::Black)),
            );
            board.set(
                Square { file, rank: 1 },
                Some(Piece::new(PieceKind::Pawn, Color::White)),
            );
            board.set(
                Square { file, rank: 6 },
                Some(Piece::new(PieceKind::Pawn, Color::Black)),
            );
        }
        board.castling = CastlingRights::ALL;
        board
    }

    /// Loads a position from FEN. Used for test fixtures and examples.
    pub fn from_fen(fen: &str) -> Result<Self, NotationError> {
        let bad = |what: &str| NotationError::InvalidPosition(format!("{what} in FEN {fen:?}"));
        let mut fields = fen.split_whitespace();
        let placement = fields.next().ok_or_else(|| bad("missing placement"))?;
        let mut board = Self::empty();
        let rows: Vec<&str> = placement.split('/').collect();
        if rows.len() != 8 {
            return Err(bad("expected 8 ranks"));
        }
        for (i, row) in rows.iter().enumerate() {
            let rank = 7 - i as u8;
            let mut file = 0u8;
            for c in row.chars() {
                if let Some(skip) = c.to_digit(10) {
                    file += skip as u8;
                    continue;
                }
                let color = if c.is_ascii_uppercase() {
                    Color::White
                } else {
                    Color::Black
                };
                let kind = match c.to_ascii_uppercase() {
                    'P' => PieceKind::Pawn,
                    other => PieceKind::from_san_letter(other).ok_or_else(|| bad("bad piece"))?,
                };
                let sq = Square::new(file, rank).ok_or_else(|| bad("rank overflow"))?;
                board.set(sq, Some(Piece::new(kind, color)));
                file += 1;
            }
            if file != 8 {
                return Err(bad("rank width"));
            }
        }
        board.side_to_move = match fields.next().unwrap_or("w") {
            "w" => Color::White,
            "b" => Color::Black,
            _ => return Err(bad("side to move")),
        };
        let castling = fields.next().unwrap_or("-");
        board.castling = CastlingRights {
            white_king_side: castling.contains('K'),
            white_queen_side: castling.contains('Q'),
            black_king_side: castling.contains('k'),
            black_queen_side: castling.contains('q'),
        };
        board.en_passant = match fields.next().unwrap_or("-") {
            "-" => None,
            sq => Some(sq.parse()?),
        };
        board.halfmove_clock = fields
            .next()
            .map_or(Ok(0), str::parse)
            .map_err(|_| bad("clock"))?;
        board.fullmove_number = fields
            .next()
            .map_or(Ok(1), str::parse)
            .map_err(|_| bad("move number"))?;
        board.validate()?;
        Ok(board)
    }

    pub fn to_fen(&self) -> String {
        let mut out = String::new();
        for rank in (0..8u8).rev() {
            let mut empty = 0;
            for file in 0..8u8 {
                match self.get(Square { file, rank }) {
                    None => empty += 1,
                    Some(p) => {
                        if empty > 0 {
                            out.push(char::from(b'0' + empty));
                            empty = 0;
                        }
                        let c = p.kind.fen_char();
                        out.push(if p.color == Color::White {
                            c
                        } else {
                            c.to_ascii_lowercase()
                        });
                    }
                }
            }
            if empty > 0 {
                out.push(char::from(b'0' + empty));
            }
            if rank > 0 {
                out.push('/');
            }
        }
        out.push_str(if self.side_to_move == Color::White {
            " w "
        } else {
            " b "
        });
        let c = &self.castling;
        let mut rights = String::new();
        for (on, ch) in [
            (c.white_king_side, 'K'),
            (c.white_queen_side, 'Q'),
            (c.black_king_side, 'k'),
            (c.black_queen_side, 'q'),
        ] {
            if on {
                rights.push(ch);
            }
        }
        out.push_str(if rights.is_empty() { "-" } else { &rights });
        match self.en_passant {
            Some(sq) => out.push_str(&format!(" {sq}")),
            None => out.push_str(" -"),
        }
        out.push_str(&format!(
            " {} {}",
            self.halfmove_clock, self.fullmove_number
        ));
        out
    }

    /// Checks the structural invariants: one king per side and a plausible
    /// en-passant square.
    pub fn validate(&self) -> Result<(), NotationError> {
        for color in [Color::White, Color::Black] {
            let kings = self
                .pieces()
                .filter(|(_, p)| p.color == color && p.kind == PieceKind::King)
                .count();
            if kings != 1 {
                return Err(NotationError::InvalidPosition(format!(
                    "{color} has {kings} kings"
                )));
            }
        }
        if let Some(ep) = self.en_passant {
            if ep.rank() != 2 && ep.rank() != 5 {
                return Err(NotationError::InvalidPosition(format!(
                    "en-passant target {ep} not on rank 3 or 6"
                )));
            }
        }
        Ok(())
    }

    pub fn get(&self, sq: Square) -> Option<Piece> {
        self.squares[sq.index() as usize]
    }

    pub fn set(&mut self, sq: Square, piece: Option<Piece>) {
        self.squares[sq.index() as usize] = piece;
    }

    pub fn pieces(&self) -> impl Iterator<Item = (Square, Piece)> + '_ {
        Square::all().filter_map(|sq| self.get(sq).map(|p| (sq, p)))
    }

    pub fn king_square(&self, color: Color) -> Option<Square> {
        self.pieces()
            .find(|(_, p)| p.color == color && p.kind == PieceKind::King)
            .map(|(sq, _)| sq)
    }
}

impl fmt::Debug for BoardState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BoardState({})", self.to_fen())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_indexing() {
        let e2: Square = "e2".parse().unwrap();
        assert_eq!(e2.index(), 12);
        assert_eq!(Square::from_index(28).unwrap().to_string(), "e4");
        assert!("e9".parse::<Square>().is_err());
        assert!(Square::new(8, 0).is_none());
    }

    #[test]
    fn fen_round_trip() {
        let start = "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1";
        assert_eq!(BoardState::initial().to_fen(), start);
        assert_eq!(BoardState::from_fen(start).unwrap(), BoardState::initial());
        let mid = "r3k2r/p1ppqpb1/bn2pnp1/3PN3/1p2P3/2N2Q1p/PPPBBPPP/R3K2R b KQkq e3 0 1";
        assert_eq!(BoardState::from_fen(mid).unwrap().to_fen(), mid);
    }

    #[test]
    fn rejects_two_kings() {
        let err = BoardState::from_fen("4k3/8/8/8/8/8/8/3KK3 w - - 0 1").unwrap_err();
        assert!(matches!(err, NotationError::InvalidPosition(_)));
    }

    #[test]
    fn rejects_bad_en_passant_rank() {
        assert!(BoardState::from_fen("4k3/8/8/8/8/8/8/4K3 w - e4 0 1").is_err());
    }
}
