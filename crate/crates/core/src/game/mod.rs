//! Turn state machine.
//!
//! [`GameState::step`] applies one ply: gates for ordinary, split and merge
//! moves, and the measurement logic of the capture rules. A successful capture
//! that can be continued leaves the same side to move with only continuation
//! captures available.

mod record;
mod serial;
mod view;

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use record::{QuantumEvent, TurnRecord};
pub use view::{GameView, PieceView, SquareProbability};

use crate::error::{Error, Result};
use crate::qstate::{GateKind, MeasurementOutcome, QuantumBoardState};
use crate::rules::{
    generate_moves, BoardGeometry, Color, Direction, Move, PassReason, Piece, PieceId,
    QuantumnessLevel, Square,
};

/// More than this many plies without a successful capture is a draw.
pub const DRAW_PLY_LIMIT: u32 = 40;

/// Pieces whose total occupancy probability falls below this are removed.
pub const VANISHED_PIECE_THRESHOLD: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Outcome {
    Ongoing,
    WhiteWins,
    BlackWins,
    Draw,
}

impl Outcome {
    pub fn is_over(self) -> bool {
        self != Outcome::Ongoing
    }

    pub fn win_for(color: Color) -> Outcome {
        match color {
            Color::White => Outcome::WhiteWins,
            Color::Black => Outcome::BlackWins,
        }
    }

    pub fn winner(self) -> Option<Color> {
        match self {
            Outcome::WhiteWins => Some(Color::White),
            Outcome::BlackWins => Some(Color::Black),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GameState {
    geometry: Arc<BoardGeometry>,
    level: QuantumnessLevel,
    pieces: Vec<Piece>,
    qstate: QuantumBoardState,
    to_move: Color,
    no_capture_plies: u32,
    outcome: Outcome,
    ply_count: u32,
    rng_seed: u64,
    rng: ChaCha8Rng,
    draw_rule: bool,
    chain: Option<(PieceId, Square)>,
}

impl GameState {
    /// Standard setup: White on the lowest `setup_rows` rows, Black mirrored,
    /// White to move.
    pub fn new(geometry: BoardGeometry, level: QuantumnessLevel, seed: u64) -> Result<Self> {
        let mut layout: Vec<(Square, Color, bool)> = geometry
            .setup_squares(Color::White)
            .into_iter()
            .map(|s| (s, Color::White, false))
            .collect();
        layout.extend(
            geometry
                .setup_squares(Color::Black)
                .into_iter()
                .map(|s| (s, Color::Black, false)),
        );
        Self::from_position(geometry, level, &layout, Color::White, seed)
    }

    /// Classical position from `(square, color, crowned)` triples.
    pub fn from_position(
        geometry: BoardGeometry,
        level: QuantumnessLevel,
        layout: &[(Square, Color, bool)],
        to_move: Color,
        seed: u64,
    ) -> Result<Self> {
        let n = geometry.num_squares();
        let mut pieces = Vec::with_capacity(layout.len());
        let mut used = 0u64;
        for (i, &(square, color, crowned)) in layout.iter().enumerate() {
            if square >= n {
                return Err(Error::SquareOutOfRange(square));
            }
            if used >> square & 1 == 1 {
                return Err(Error::Domain(format!("two pieces on square {square}")));
            }
            used |= 1u64 << square;
            let id = PieceId(i as u16);
            pieces.push(Piece {
                id,
                color,
                crowned,
                lineage: id,
                support: 1u64 << square,
            });
        }
        let qstate = QuantumBoardState::new(n, layout.iter().map(|t| t.0))?;
        let mut state = GameState {
            geometry: Arc::new(geometry),
            level,
            pieces,
            qstate,
            to_move,
            no_capture_plies: 0,
            outcome: Outcome::Ongoing,
            ply_count: 0,
            rng_seed: seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
            draw_rule: true,
            chain: None,
        };
        state.outcome = state.evaluate_outcome();
        Ok(state)
    }

    /// Enables or disables the no-capture draw rule.
    pub fn with_draw_rule(mut self, enabled: bool) -> Self {
        self.draw_rule = enabled;
        self.outcome = self.evaluate_outcome();
        self
    }

    pub fn geometry(&self) -> &BoardGeometry {
        &self.geometry
    }

    pub fn level(&self) -> QuantumnessLevel {
        self.level
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn piece(&self, id: PieceId) -> Option<&Piece> {
        self.pieces.iter().find(|p| p.id == id)
    }

    pub fn piece_at(&self, square: Square) -> Option<&Piece> {
        self.pieces.iter().find(|p| p.occupies(square))
    }

    pub fn qstate(&self) -> &QuantumBoardState {
        &self.qstate
    }

    pub fn to_move(&self) -> Color {
        self.to_move
    }

    pub fn no_capture_plies(&self) -> u32 {
        self.no_capture_plies
    }

    pub fn outcome(&self) -> Outcome {
        self.outcome
    }

    pub fn is_over(&self) -> bool {
        self.outcome.is_over()
    }

    pub fn ply_count(&self) -> u32 {
        self.ply_count
    }

    pub fn rng_seed(&self) -> u64 {
        self.rng_seed
    }

    pub fn draw_rule(&self) -> bool {
        self.draw_rule
    }

    /// Piece and square that must continue a capture chain, if any.
    pub fn pending_chain(&self) -> Option<(PieceId, Square)> {
        self.chain
    }

    pub fn legal_moves(&self) -> Vec<Move> {
        crate::rules::legal_moves(self, self.level)
    }

    /// Appends legal moves to `out`, reusing its allocation.
    pub fn legal_moves_into(&self, out: &mut Vec<Move>) {
        out.clear();
        if !self.outcome.is_over() {
            generate_moves(
                &self.geometry,
                &self.pieces,
                self.to_move,
                self.level,
                self.chain,
                out,
            );
        }
    }

    /// Total occupancy probability of a piece.
    pub fn piece_probability(&self, id: PieceId) -> f64 {
        self.piece(id).map_or(0.0, |p| {
            p.squares()
                .map(|s| self.qstate.marginal(s).unwrap_or(0.0))
                .sum()
        })
    }

    /// A piece is classical when it sits on one square with certainty.
    pub fn is_piece_classical(&self, piece: &Piece) -> bool {
        piece.support.count_ones() == 1
            && self
                .qstate
                .classical_bit(piece.support.trailing_zeros() as Square)
                == Some(true)
    }

    /// Validates `mv` against the legal moves and applies it with the game's own
    /// measurement generator.
    pub fn step(&mut self, mv: &Move) -> Result<TurnRecord> {
        let mut rng = self.rng.clone();
        let record = self.step_with_rng(mv, &mut rng)?;
        self.rng = rng;
        Ok(record)
    }

    /// Like [`step`](Self::step) but draws measurement randomness from `rng`.
    pub fn step_with_rng<R: Rng + ?Sized>(&mut self, mv: &Move, rng: &mut R) -> Result<TurnRecord> {
        if self.outcome.is_over() {
            return Err(Error::GameOver);
        }
        if !self.legal_moves().contains(mv) {
            return Err(Error::IllegalMove(format!("{mv:?}")));
        }
        Ok(self.apply_legal(mv, rng))
    }

    /// Applies a move known to be legal (for example one just returned by
    /// [`legal_moves`](Self::legal_moves)). Skips validation.
    pub fn apply_legal<R: Rng + ?Sized>(&mut self, mv: &Move, rng: &mut R) -> TurnRecord {
        let mover = self.to_move;
        let mut rec = TurnRecord::new(mover, *mv);
        let mut continue_from = None;
        match *mv {
            Move::Step { piece, from, to } => {
                self.gate(&mut rec, GateKind::Move, &[from, to]);
                self.update_support(piece, |s| (s & !(1u64 << from)) | 1u64 << to);
                self.no_capture_plies += 1;
            }
            Move::Split {
                piece,
                from,
                to1,
                to2,
            } => {
                self.gate(&mut rec, GateKind::Split, &[from, to1, to2]);
                self.update_support(piece, |s| (s & !(1u64 << from)) | 1u64 << to1 | 1u64 << to2);
                self.no_capture_plies += 1;
            }
            Move::Merge {
                piece,
                from1,
                from2,
                to,
            } => {
                self.gate(&mut rec, GateKind::Merge, &[to, from1, from2]);
                self.update_support(piece, |s| s | 1u64 << to);
                self.refresh_supports(&mut rec);
                self.no_capture_plies += 1;
            }
            Move::Capture {
                piece,
                from,
                over,
                landing,
            } => {
                if self.resolve_capture(&mut rec, rng, piece, from, over, landing) {
                    continue_from = Some((piece, landing));
                }
            }
            Move::Pass { .. } => unreachable!("pass is never a legal move"),
        }

        for p in self.pieces.iter_mut() {
            if p.color == mover && !p.crowned && p.support & self.geometry.crowning_mask(mover) != 0
            {
                p.crowned = true;
                rec.crowned.push(p.id);
            }
        }

        self.chain = None;
        if let Some((piece, landing)) = continue_from {
            // crowning ends the move
            if !rec.crowned.contains(&piece) {
                let mut next = Vec::new();
                generate_moves(
                    &self.geometry,
                    &self.pieces,
                    mover,
                    self.level,
                    Some((piece, landing)),
                    &mut next,
                );
                if !next.is_empty() {
                    self.chain = Some((piece, landing));
                }
            }
        }
        rec.chain_continues = self.chain.is_some();
        if self.chain.is_none() {
            self.to_move = mover.opponent();
        }
        self.ply_count += 1;
        self.outcome = self.evaluate_outcome();
        rec.outcome = self.outcome;
        rec
    }

    /// Returns true when the capture succeeded with a measured (or classical)
    /// jump, i.e. when a chain continuation may follow.
    fn resolve_capture<R: Rng + ?Sized>(
        &mut self,
        rec: &mut TurnRecord,
        rng: &mut R,
        attacker_id: PieceId,
        from: Square,
        over: Square,
        landing: Square,
    ) -> bool {
        let attacker = *self.piece(attacker_id).expect("attacker exists");
        let defender = *self.piece_at(over).expect("defender exists");
        let attacker_classical = self.is_piece_classical(&attacker);
        let defender_classical = self.is_piece_classical(&defender);

        if self.level.entangling_captures() && attacker_classical && !defender_classical {
            self.gate(rec, GateKind::Capture, &[over, from, landing]);
            rec.entangled = true;
            self.update_support(attacker_id, |_| 1u64 << from | 1u64 << landing);
            self.update_support(defender.id, |s| s & !(1u64 << over));
            self.refresh_supports(rec);
            self.no_capture_plies += 1;
            return false;
        }

        if !attacker_classical {
            let outcome = self.measure_piece(rec, rng, attacker_id);
            if outcome.get(from) != Some(true) {
                return self.pass(rec, PassReason::AttackerAbsent);
            }
        }
        let defender_now = self.piece(defender.id).copied();
        match defender_now {
            Some(d) if d.occupies(over) => {
                if !self.is_piece_classical(&d) {
                    let outcome = self.measure_piece(rec, rng, d.id);
                    if outcome.get(over) != Some(true) {
                        return self.pass(rec, PassReason::DefenderAbsent);
                    }
                }
            }
            _ => return self.pass(rec, PassReason::DefenderAbsent),
        }

        self.qstate
            .clear_square(over)
            .expect("measured defender is classical");
        rec.events.push(QuantumEvent::Clear { square: over });
        self.pieces.retain(|p| p.id != defender.id);
        rec.captures.push(defender.id);
        self.gate(rec, GateKind::Move, &[from, landing]);
        self.update_support(attacker_id, |_| 1u64 << landing);
        rec.capture_succeeded = true;
        self.no_capture_plies = 0;
        true
    }

    fn pass(&mut self, rec: &mut TurnRecord, reason: PassReason) -> bool {
        rec.pass = Some(reason);
        self.no_capture_plies += 1;
        false
    }

    fn measure_piece<R: Rng + ?Sized>(
        &mut self,
        rec: &mut TurnRecord,
        rng: &mut R,
        id: PieceId,
    ) -> MeasurementOutcome {
        let squares: Vec<Square> = self
            .piece(id)
            .map(|p| p.squares().collect())
            .unwrap_or_default();
        let outcome = self.qstate.measure(&squares, rng);
        rec.events.push(QuantumEvent::Measure {
            outcome: outcome.clone(),
        });
        rec.measurements.push(outcome.clone());
        self.refresh_supports(rec);
        outcome
    }

    fn gate(&mut self, rec: &mut TurnRecord, kind: GateKind, squares: &[Square]) {
        self.qstate
            .apply_gate(kind, squares)
            .expect("legal move gates act on valid squares");
        rec.events.push(QuantumEvent::Gate {
            kind,
            squares: squares.to_vec(),
        });
    }

    fn update_support(&mut self, id: PieceId, f: impl FnOnce(u64) -> u64) {
        if let Some(p) = self.pieces.iter_mut().find(|p| p.id == id) {
            p.support = f(p.support);
        }
    }

    /// Drops support squares that can no longer be occupied and removes pieces
    /// that have vanished.
    fn refresh_supports(&mut self, rec: &mut TurnRecord) {
        let possible = self.qstate.possibly_occupied();
        for p in self.pieces.iter_mut() {
            p.support &= possible;
        }
        let mut faint = 0u64;
        for p in &self.pieces {
            if p.support != 0 && !self.is_piece_classical(p) {
                let total: f64 = p
                    .squares()
                    .map(|s| self.qstate.marginal(s).unwrap_or(0.0))
                    .sum();
                if total < VANISHED_PIECE_THRESHOLD {
                    faint |= p.support;
                }
            }
        }
        if faint != 0 {
            let outcome = MeasurementOutcome {
                bits: crate::qstate::mask_squares(faint)
                    .map(|s| (s, false))
                    .collect(),
            };
            self.qstate
                .project(&outcome)
                .expect("faint squares are on the board");
            rec.events.push(QuantumEvent::Discard { outcome });
            for p in self.pieces.iter_mut() {
                p.support &= !faint;
            }
        }
        let removed: Vec<PieceId> = self
            .pieces
            .iter()
            .filter(|p| p.support == 0)
            .map(|p| p.id)
            .collect();
        if !removed.is_empty() {
            self.pieces.retain(|p| p.support != 0);
            rec.captures.extend(removed);
        }
    }

    fn has_any_move(&self, color: Color) -> bool {
        let occupied = self.pieces.iter().fold(0u64, |m, p| m | p.support);
        let opponents = self
            .pieces
            .iter()
            .filter(|p| p.color != color)
            .fold(0u64, |m, p| m | p.support);
        self.pieces.iter().filter(|p| p.color == color).any(|p| {
            p.squares().any(|from| {
                Direction::allowed(p.color, p.crowned).iter().any(|&d| {
                    match self.geometry.neighbor(from, d) {
                        Some(t) if occupied >> t & 1 == 0 => true,
                        Some(t) if opponents >> t & 1 == 1 => self
                            .geometry
                            .jump(from, d)
                            .is_some_and(|l| occupied >> l & 1 == 0),
                        _ => false,
                    }
                })
            })
        })
    }

    fn evaluate_outcome(&self) -> Outcome {
        if self.chain.is_some() {
            return Outcome::Ongoing;
        }
        let mover = self.to_move;
        if !self.pieces.iter().any(|p| p.color == mover) || !self.has_any_move(mover) {
            return Outcome::win_for(mover.opponent());
        }
        if self.draw_rule && self.no_capture_plies > DRAW_PLY_LIMIT {
            return Outcome::Draw;
        }
        Outcome::Ongoing
    }

    /// Outcome of the position as it stands.
    pub fn current_outcome(&self) -> Outcome {
        self.evaluate_outcome()
    }

    #[cfg(test)]
    pub(crate) fn set_no_capture_plies(&mut self, plies: u32) {
        self.no_capture_plies = plies;
        self.outcome = self.evaluate_outcome();
    }
}
