use rand::Rng;

use crate::error::{Error, Result};
use crate::game::GameState;
use crate::rules::Move;

/// Uniform choice among the legal moves.
pub fn random_move<R: Rng + ?Sized>(state: &GameState, rng: &mut R) -> Result<Move> {
    if state.is_over() {
        return Err(Error::GameOver);
    }
    let moves = state.legal_moves();
    if moves.is_empty() {
        return Err(Error::NoLegalMoves);
    }
    Ok(moves[rng.gen_range(0..moves.len())])
}
