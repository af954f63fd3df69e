use serde::{Deserialize, Serialize};

use super::Outcome;
use crate::qstate::{GateKind, MeasurementOutcome};
use crate::rules::{Color, Move, PassReason, PieceId, Square};

/// One primitive operation on the quantum state, in application order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum QuantumEvent {
    Gate {
        kind: GateKind,
        squares: Vec<Square>,
    },
    Measure {
        outcome: MeasurementOutcome,
    },
    /// A captured piece taken off a classical square.
    Clear {
        square: Square,
    },
    /// Squares of a vanished piece projected to empty.
    Discard {
        outcome: MeasurementOutcome,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TurnRecord {
    pub mover: Color,
    #[serde(rename = "move")]
    pub mv: Move,
    /// Set when a capture attempt was consumed as a pass.
    pub pass: Option<PassReason>,
    pub measurements: Vec<MeasurementOutcome>,
    pub events: Vec<QuantumEvent>,
    /// Pieces removed this ply.
    pub captures: Vec<PieceId>,
    pub crowned: Vec<PieceId>,
    pub capture_succeeded: bool,
    pub entangled: bool,
    pub chain_continues: bool,
    pub outcome: Outcome,
}

impl TurnRecord {
    pub(crate) fn new(mover: Color, mv: Move) -> Self {
        TurnRecord {
            mover,
            mv,
            pass: None,
            measurements: Vec::new(),
            events: Vec::new(),
            captures: Vec::new(),
            crowned: Vec::new(),
            capture_succeeded: false,
            entangled: false,
            chain_continues: false,
            outcome: Outcome::Ongoing,
        }
    }

    /// The move as it resolved: the attempted move, or a pass.
    pub fn effective_move(&self) -> Move {
        match self.pass {
            Some(reason) => Move::Pass { reason },
            None => self.mv,
        }
    }

    /// Squares and bits collapsed this ply, as `(mask, ones)`.
    pub fn outcome_signature(&self) -> (u64, u64) {
        self.measurements.iter().fold((0, 0), |(m, o), out| {
            (m | out.squares_mask(), o | out.ones_mask())
        })
    }
}
