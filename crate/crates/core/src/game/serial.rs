use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{GameState, Outcome};
use crate::error::{Error, Result};
use crate::qstate::QuantumBoardState;
use crate::rules::{BoardGeometry, Color, Piece, PieceId, QuantumnessLevel, Square};

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct Snapshot {
    geometry: BoardGeometry,
    level: QuantumnessLevel,
    to_move: Color,
    outcome: Outcome,
    no_capture_plies: u32,
    ply_count: u32,
    draw_rule: bool,
    rng_seed: u64,
    /// Position of the measurement generator in its stream, as a decimal string.
    rng_word_pos: String,
    chain: Option<(PieceId, Square)>,
    pieces: Vec<Piece>,
    qstate: QuantumBoardState,
}

impl GameState {
    /// Lossless JSON snapshot, including amplitudes and the generator position.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&Snapshot {
            geometry: (*self.geometry).clone(),
            level: self.level,
            to_move: self.to_move,
            outcome: self.outcome,
            no_capture_plies: self.no_capture_plies,
            ply_count: self.ply_count,
            draw_rule: self.draw_rule,
            rng_seed: self.rng_seed,
            rng_word_pos: self.rng.get_word_pos().to_string(),
            chain: self.chain,
            pieces: self.pieces.clone(),
            qstate: self.qstate.clone(),
        })
        .expect("snapshot serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let snap: Snapshot = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        let invalid = |message: String| Error::Parse {
            line: 0,
            column: 0,
            message,
        };
        let word_pos: u128 = snap
            .rng_word_pos
            .parse()
            .map_err(|_| invalid(format!("bad rngWordPos {:?}", snap.rng_word_pos)))?;
        if snap.qstate.num_squares() != snap.geometry.num_squares() {
            return Err(invalid("qstate size does not match geometry".into()));
        }
        let mut seen = 0u64;
        for p in &snap.pieces {
            if p.support == 0 || p.support & seen != 0 {
                return Err(invalid(format!(
                    "piece {} has empty or overlapping support",
                    p.id
                )));
            }
            if p.support >> snap.geometry.num_squares() != 0 {
                return Err(invalid(format!("piece {} is off the board", p.id)));
            }
            seen |= p.support;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(snap.rng_seed);
        rng.set_word_pos(word_pos);
        Ok(GameState {
            geometry: Arc::new(snap.geometry),
            level: snap.level,
            pieces: snap.pieces,
            qstate: snap.qstate,
            to_move: snap.to_move,
            no_capture_plies: snap.no_capture_plies,
            outcome: snap.outcome,
            ply_count: snap.ply_count,
            rng_seed: snap.rng_seed,
            rng,
            draw_rule: snap.draw_rule,
            chain: snap.chain,
        })
    }
}
