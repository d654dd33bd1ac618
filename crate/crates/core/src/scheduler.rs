//! Splits a game into the two arms' move streams and runs the alternating
//! turn protocol: the controller hands one half-move at a time to the arm
//! whose turn it is and waits for its move-end report.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kinematics::{WorkPoint, DISCARD_SLOTS};
use crate::metrics::{MetricsError, MetricsRecorder};
use crate::motion::{ArmId, MoveMetrics};
use crate::notation::{BoardState, Color, DecodedMove, Piece, PieceKind, Square};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SchedulerError {
    #[error("half-move {index} is by {found}, expected {expected}")]
    ColorOrderViolation {
        index: usize,
        expected: Color,
        found: Color,
    },
    #[error("no piece at {0:?} to pick up")]
    NoPieceAtSource(WorkPoint),
    #[error("discard zone for {0} is full")]
    DiscardFull(Color),
    #[error("{operation} not allowed in phase {phase:?}")]
    ProtocolViolation {
        operation: &'static str,
        phase: TurnPhase,
    },
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct MoveStreams {
    pub white: Vec<DecodedMove>,
    pub black: Vec<DecodedMove>,
}

impl MoveStreams {
    pub fn total(&self) -> usize {
        self.white.len() + self.black.len()
    }

    /// Merges the streams back into play order.
    pub fn interleave(&self) -> Vec<DecodedMove> {
        let mut out = Vec::with_capacity(self.total());
        for i in 0..self.white.len() {
            out.push(self.white[i]);
            if let Some(b) = self.black.get(i) {
                out.push(*b);
            }
        }
        out
    }

    pub fn for_color(&self, color: Color) -> &[DecodedMove] {
        match color {
            Color::White => &self.white,
            Color::Black => &self.black,
        }
    }
}

/// White gets the odd elements (1st, 3rd, ...), Black the even ones.
pub fn split_moves(moves: &[DecodedMove]) -> Result<MoveStreams, SchedulerError> {
    let mut streams = MoveStreams::default();
    for (i, mv) in moves.iter().enumerate() {
        let expected = if i % 2 == 0 {
            Color::White
        } else {
            Color::Black
        };
        if mv.color != expected {
            return Err(SchedulerError::ColorOrderViolation {
                index: i + 1,
                expected,
                found: mv.color,
            });
        }
        match expected {
            Color::White => streams.white.push(*mv),
            Color::Black => streams.black.push(*mv),
        }
    }
    Ok(streams)
}

/// One physical relocation of a piece.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PickPlace {
    pub pick: WorkPoint,
    pub place: WorkPoint,
    pub piece_id: usize,
    /// The piece becomes this kind when set down.
    pub promote_to: Option<PieceKind>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionPlan {
    pub actions: Vec<PickPlace>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrackedPiece {
    pub id: usize,
    pub kind: PieceKind,
    pub color: Color,
    pub location: WorkPoint,
}

/// Where every physical piece is: on a square or in a discard slot.
#[derive(Clone, Debug, PartialEq)]
pub struct Tabletop {
    pieces: Vec<TrackedPiece>,
    squares: [Option<usize>; 64],
    discard_used: [usize; 2],
}

fn zone_index(c: Color) -> usize {
    match c {
        Color::White => 0,
        Color::Black => 1,
    }
}

impl Tabletop {
    /// Pieces numbered in square order a1..h8.
    pub fn from_board(board: &BoardState) -> Self {
        let mut squares = [None; 64];
        let pieces = board
            .pieces()
            .enumerate()
            .map(|(id, (sq, p))| {
                squares[sq.index() as usize] = Some(id);
                TrackedPiece {
                    id,
                    kind: p.kind,
                    color: p.color,
                    location: WorkPoint::Square(sq),
                }
            })
            .collect();
        Tabletop {
            pieces,
            squares,
            discard_used: [0; 2],
        }
    }

    pub fn initial() -> Self {
        Self::from_board(&BoardState::initial())
    }

    pub fn pieces(&self) -> &[TrackedPiece] {
        &self.pieces
    }

    pub fn piece_at(&self, sq: Square) -> Option<&TrackedPiece> {
        self.squares[sq.index() as usize].map(|id| &self.pieces[id])
    }

    /// The on-board occupancy as a position (castling and clocks unset).
    pub fn occupancy(&self) -> [Option<Piece>; 64] {
        let mut out = [None; 64];
        for sq in Square::all() {
            out[sq.index() as usize] = self.piece_at(sq).map(|p| Piece::new(p.kind, p.color));
        }
        out
    }

    /// Pieces sitting in `zone`, in slot order.
    pub fn discarded(&self, zone: Color) -> Vec<TrackedPiece> {
        let mut v: Vec<_> = self
            .pieces
            .iter()
            .filter(|p| matches!(p.location, WorkPoint::Discard { zone: z, .. } if z == zone))
            .copied()
            .collect();
        v.sort_by_key(|p| match p.location {
            WorkPoint::Discard { slot, .. } => slot,
            WorkPoint::Square(_) => usize::MAX,
        });
        v
    }

    fn piece_on(&self, sq: Square) -> Result<usize, SchedulerError> {
        self.squares[sq.index() as usize]
            .ok_or(SchedulerError::NoPieceAtSource(WorkPoint::Square(sq)))
    }

    /// Physical actions realizing `mv`: captures clear the victim to the
    /// mover's discard zone first, castling moves the king then the rook.
    pub fn plan_actions(&self, mv: &DecodedMove) -> Result<ActionPlan, SchedulerError> {
        let mut actions = Vec::with_capacity(2);
        let mover = self.piece_on(mv.from)?;
        if let Some((_, victim_sq)) = mv.captured {
            let victim = self.piece_on(victim_sq)?;
            let slot = self.discard_used[zone_index(mv.color)];
            if slot >= DISCARD_SLOTS {
                return Err(SchedulerError::DiscardFull(mv.color));
            }
            actions.push(PickPlace {
                pick: WorkPoint::Square(victim_sq),
                place: WorkPoint::Discard {
                    zone: mv.color,
                    slot,
                },
                piece_id: victim,
                promote_to: None,
            });
        }
        actions.push(PickPlace {
            pick: WorkPoint::Square(mv.from),
            place: WorkPoint::Square(mv.to),
            piece_id: mover,
            promote_to: mv.promotion,
        });
        if let Some((rook_from, rook_to)) = mv.castle_rook_squares() {
            actions.push(PickPlace {
                pick: WorkPoint::Square(rook_from),
                place: WorkPoint::Square(rook_to),
                piece_id: self.piece_on(rook_from)?,
                promote_to: None,
            });
        }
        Ok(ActionPlan { actions })
    }

    /// Carries out one relocation.
    pub fn apply(&mut self, action: &PickPlace) -> Result<(), SchedulerError> {
        let holder = match action.pick {
            WorkPoint::Square(sq) => self.squares[sq.index() as usize],
            WorkPoint::Discard { .. } => None,
        };
        if holder != Some(action.piece_id) {
            return Err(SchedulerError::NoPieceAtSource(action.pick));
        }
        if let WorkPoint::Square(sq) = action.pick {
            self.squares[sq.index() as usize] = None;
        }
        match action.place {
            WorkPoint::Square(sq) => self.squares[sq.index() as usize] = Some(action.piece_id),
            WorkPoint::Discard { zone, slot } => {
                let used = &mut self.discard_used[zone_index(zone)];
                *used = (*used).max(slot + 1);
            }
        }
        let piece = &mut self.pieces[action.piece_id];
        piece.location = action.place;
        if let Some(kind) = action.promote_to {
            piece.kind = kind;
        }
        Ok(())
    }

    pub fn apply_plan(&mut self, plan: &ActionPlan) -> Result<(), SchedulerError> {
        plan.actions.iter().try_for_each(|a| self.apply(a))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TurnPhase {
    AwaitStart,
    WhiteToMove,
    WhiteMoving,
    BlackToMove,
    BlackMoving,
    Finished,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TurnState {
    pub phase: TurnPhase,
    /// Full moves completed (incremented when Black finishes).
    pub move_index: usize,
}

impl Default for TurnState {
    fn default() -> Self {
        TurnState {
            phase: TurnPhase::AwaitStart,
            move_index: 0,
        }
    }
}

/// What the controller sends to an arm.
#[derive(Clone, Debug, PartialEq)]
pub struct MoveRequest {
    pub arm: ArmId,
    /// 1-based half-move number.
    pub half_move: usize,
    pub mv: DecodedMove,
    pub plan: ActionPlan,
}

/// Turn-taking controller for one game.
#[derive(Clone, Debug)]
pub struct Scheduler {
    streams: MoveStreams,
    state: TurnState,
    tabletop: Tabletop,
    recorder: MetricsRecorder,
    pending: Option<MoveRequest>,
    trace: Vec<TurnPhase>,
}

impl Scheduler {
    pub fn new(moves: &[DecodedMove]) -> Result<Self, SchedulerError> {
        Ok(Scheduler {
            streams: split_moves(moves)?,
            state: TurnState::default(),
            tabletop: Tabletop::initial(),
            recorder: MetricsRecorder::new(),
            pending: None,
            trace: vec![TurnPhase::AwaitStart],
        })
    }

    pub fn state(&self) -> TurnState {
        self.state
    }

    pub fn streams(&self) -> &MoveStreams {
        &self.streams
    }

    pub fn tabletop(&self) -> &Tabletop {
        &self.tabletop
    }

    pub fn recorder(&self) -> &MetricsRecorder {
        &self.recorder
    }

    /// Every phase the protocol has passed through, in order.
    pub fn trace(&self) -> &[TurnPhase] {
        &self.trace
    }

    pub fn current_request(&self) -> Option<&MoveRequest> {
        self.pending.as_ref()
    }

    fn enter(&mut self, phase: TurnPhase) {
        self.state.phase = phase;
        self.trace.push(phase);
    }

    fn has_move(&self, color: Color, index: usize) -> bool {
        index < self.streams.for_color(color).len()
    }

    pub fn start(&mut self) -> Result<(), SchedulerError> {
        if self.state.phase != TurnPhase::AwaitStart {
            return Err(SchedulerError::ProtocolViolation {
                operation: "start",
                phase: self.state.phase,
            });
        }
        if self.has_move(Color::White, 0) {
            self.enter(TurnPhase::WhiteToMove);
        } else {
            self.enter(TurnPhase::Finished);
        }
        Ok(())
    }

    /// Hands out the next half-move, or `None` once the side to move has no
    /// moves left (the game is then finished).
    pub fn next_turn(&mut self) -> Result<Option<MoveRequest>, SchedulerError> {
        let (color, moving) = match self.state.phase {
            TurnPhase::WhiteToMove => (Color::White, TurnPhase::WhiteMoving),
            TurnPhase::BlackToMove => (Color::Black, TurnPhase::BlackMoving),
            phase => {
                return Err(SchedulerError::ProtocolViolation {
                    operation: "next_turn",
                    phase,
                })
            }
        };
        let index = self.state.move_index;
        let Some(&mv) = self.streams.for_color(color).get(index) else {
            self.enter(TurnPhase::Finished);
            return Ok(None);
        };
        let plan = self.tabletop.plan_actions(&mv)?;
        let request = MoveRequest {
            arm: ArmId::for_color(color),
            half_move: 2 * index + if color == Color::White { 1 } else { 2 },
            mv,
            plan,
        };
        self.enter(moving);
        self.pending = Some(request.clone());
        Ok(Some(request))
    }

    /// Move-end report from the arm that was moving.
    pub fn on_move_complete(&mut self, metrics: MoveMetrics) -> Result<TurnState, SchedulerError> {
        let next = match self.state.phase {
            TurnPhase::WhiteMoving => {
                if self.has_move(Color::Black, self.state.move_index) {
                    TurnPhase::BlackToMove
                } else {
                    TurnPhase::Finished
                }
            }
            TurnPhase::BlackMoving => {
                self.state.move_index += 1;
                if self.has_move(Color::White, self.state.move_index) {
                    TurnPhase::WhiteToMove
                } else {
                    TurnPhase::Finished
                }
            }
            phase => {
                return Err(SchedulerError::ProtocolViolation {
                    operation: "on_move_complete",
                    phase,
                })
            }
        };
        let request = self.pending.take().expect("a move is in progress");
        self.tabletop.apply_plan(&request.plan)?;
        self.recorder.record(metrics)?;
        self.enter(next);
        Ok(self.state)
    }

    /// Stops the game where it stands; an unfinished move is dropped.
    pub fn abort(&mut self) {
        self.pending = None;
        if self.state.phase != TurnPhase::Finished {
            self.enter(TurnPhase::Finished);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::notation::{decode_game, parse_game_text};

    fn moves(text: &str) -> Vec<DecodedMove> {
        decode_game(&parse_game_text(text).unwrap()).unwrap().moves
    }

    fn metrics(req: &MoveRequest) -> MoveMetrics {
        MoveMetrics {
            half_move: req.half_move,
            arm: req.arm,
            move_index: (req.half_move - 1) / 2,
            duration: 1.0,
            path_length: 0.1,
        }
    }

    #[test]
    fn split_odd_even() {
        let ms = moves("1. e4 e5 2. Nf3 Nc6 3. Bb5");
        let s = split_moves(&ms).unwrap();
        assert_eq!(s.white, vec![ms[0], ms[2], ms[4]]);
        assert_eq!(s.black, vec![ms[1], ms[3]]);
        assert_eq!(s.interleave(), ms);
        assert_eq!(split_moves(&[]).unwrap(), MoveStreams::default());
        let one = split_moves(&ms[..1]).unwrap();
        assert_eq!((one.white.len(), one.black.len()), (1, 0));
    }

    #[test]
    fn split_rejects_wrong_order() {
        let ms = moves("1. e4 e5");
        let err = split_moves(&[ms[1], ms[0]]).unwrap_err();
        assert!(matches!(
            err,
            SchedulerError::ColorOrderViolation { index: 1, .. }
        ));
    }

    #[test]
    fn quiet_move_single_action() {
        let ms = moves("1. Nf3");
        let plan = Tabletop::initial().plan_actions(&ms[0]).unwrap();
        assert_eq!(plan.actions.len(), 1);
        assert_eq!(
            plan.actions[0].pick,
            WorkPoint::Square("g1".parse().unwrap())
        );
        assert_eq!(
            plan.actions[0].place,
            WorkPoint::Square("f3".parse().unwrap())
        );
    }

    #[test]
    fn capture_clears_victim_first() {
        let ms = moves("1. e4 d5 2. exd5");
        let mut table = Tabletop::initial();
        table
            .apply_plan(&table.plan_actions(&ms[0]).unwrap())
            .unwrap();
        table
            .apply_plan(&table.plan_actions(&ms[1]).unwrap())
            .unwrap();
        let plan = table.plan_actions(&ms[2]).unwrap();
        assert_eq!(plan.actions.len(), 2);
        assert_eq!(
            plan.actions[0].pick,
            WorkPoint::Square("d5".parse().unwrap())
        );
        assert_eq!(
            plan.actions[0].place,
            WorkPoint::Discard {
                zone: Color::White,
                slot: 0
            }
        );
        assert_eq!(
            plan.actions[1].pick,
            WorkPoint::Square("e4".parse().unwrap())
        );
        table.apply_plan(&plan).unwrap();
        let d5 = table.piece_at("d5".parse().unwrap()).unwrap();
        assert_eq!((d5.kind, d5.color), (PieceKind::Pawn, Color::White));
        assert_eq!(table.discarded(Color::White).len(), 1);
    }

    #[test]
    fn castling_king_then_rook() {
        let ms = moves("1. e4 e5 2. Nf3 Nc6 3. Bc4 Bc5 4. O-O");
        let mut table = Tabletop::initial();
        for m in &ms[..6] {
            table.apply_plan(&table.plan_actions(m).unwrap()).unwrap();
        }
        let plan = table.plan_actions(&ms[6]).unwrap();
        let sq = |s: &str| WorkPoint::Square(s.parse().unwrap());
        assert_eq!(plan.actions.len(), 2);
        assert_eq!(
            (plan.actions[0].pick, plan.actions[0].place),
            (sq("e1"), sq("g1"))
        );
        assert_eq!(
            (plan.actions[1].pick, plan.actions[1].place),
            (sq("h1"), sq("f1"))
        );
    }

    #[test]
    fn missing_source_piece() {
        let ms = moves("1. Nf3");
        let bare =
            Tabletop::from_board(&BoardState::from_fen("4k3/8/8/8/8/8/8/4K3 w - - 0 1").unwrap());
        assert!(matches!(
            bare.plan_actions(&ms[0]),
            Err(SchedulerError::NoPieceAtSource(_))
        ));
    }

    #[test]
    fn protocol_sequence_and_guards() {
        let ms = moves("1. e4 e5 2. Nf3");
        let mut s = Scheduler::new(&ms).unwrap();
        assert!(matches!(
            s.next_turn(),
            Err(SchedulerError::ProtocolViolation { .. })
        ));
        s.start().unwrap();
        let req = s.next_turn().unwrap().unwrap();
        assert_eq!((req.arm, req.half_move), (ArmId::Mr1, 1));
        assert_eq!(req.mv, ms[0]);
        assert!(matches!(
            s.next_turn(),
            Err(SchedulerError::ProtocolViolation { .. })
        ));
        assert_eq!(
            s.on_move_complete(metrics(&req)).unwrap().phase,
            TurnPhase::BlackToMove
        );
        assert!(matches!(
            s.on_move_complete(metrics(&req)),
            Err(SchedulerError::ProtocolViolation { .. })
        ));
        let req = s.next_turn().unwrap().unwrap();
        assert_eq!(req.arm, ArmId::Mr2);
        assert_eq!(
            s.on_move_complete(metrics(&req)).unwrap(),
            TurnState {
                phase: TurnPhase::WhiteToMove,
                move_index: 1
            }
        );
        let req = s.next_turn().unwrap().unwrap();
        assert_eq!(
            s.on_move_complete(metrics(&req)).unwrap().phase,
            TurnPhase::Finished
        );
        use TurnPhase::*;
        assert_eq!(
            s.trace(),
            [
                AwaitStart,
                WhiteToMove,
                WhiteMoving,
                BlackToMove,
                BlackMoving,
                WhiteToMove,
                WhiteMoving,
                Finished
            ]
        );
    }

    #[test]
    fn exhausted_black_stream_finishes() {
        let ms = moves("1. e4");
        let mut s = Scheduler::new(&ms).unwrap();
        s.start().unwrap();
        let req = s.next_turn().unwrap().unwrap();
        s.on_move_complete(metrics(&req)).unwrap();
        assert_eq!(s.state().phase, TurnPhase::Finished);

        // Constructed directly: BlackToMove with nothing left.
        s.state = TurnState {
            phase: TurnPhase::BlackToMove,
            move_index: 0,
        };
        assert_eq!(s.next_turn().unwrap(), None);
        assert_eq!(s.state().phase, TurnPhase::Finished);
    }

    #[test]
    fn empty_script_finishes_at_start() {
        let mut s = Scheduler::new(&[]).unwrap();
        s.start().unwrap();
        assert_eq!(s.state().phase, TurnPhase::Finished);
    }
}
