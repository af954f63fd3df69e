//! Quantum checkers engine.
//!
//! The crate is organised bottom-up:
//!
//! * [`qstate`] simulates one occupancy qubit per playable square, factored into
//!   independent entangled components.
//! * [`rules`] holds board geometry, the piece table and legal-move generation for
//!   quantumness levels 0 to 3.
//! * [`game`] is the turn state machine (measurements, chain captures, crowning,
//!   draw counting).
//! * [`agents`] provides the uniform random agent and the MCTS agent.
//! * [`rating`] implements two-player TrueSkill updates.
//! * [`harness`] runs the self-play, matchup and tournament experiments.

pub mod agents;
pub mod error;
pub mod game;
pub mod harness;
pub mod qstate;
pub mod rating;
pub mod rules;

pub use error::{Error, Result};
pub use game::{GameState, Outcome, TurnRecord};
pub use qstate::QuantumBoardState;
pub use rules::{BoardGeometry, Color, Move, Piece, PieceId, QuantumnessLevel, Square};
