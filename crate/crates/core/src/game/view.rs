use serde::{Deserialize, Serialize};

use super::{GameState, Outcome};
use crate::rules::{BoardGeometry, Color, PieceId, QuantumnessLevel, Square};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SquareProbability {
    pub square: Square,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PieceView {
    pub id: PieceId,
    pub color: Color,
    pub crowned: bool,
    pub lineage: PieceId,
    pub squares: Vec<SquareProbability>,
}

/// Client-facing state: per-square occupancy probabilities and the groups of
/// pieces that share an entangled component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GameView {
    pub geometry: BoardGeometry,
    pub level: QuantumnessLevel,
    pub to_move: Color,
    pub outcome: Outcome,
    pub no_capture_plies: u32,
    pub ply_count: u32,
    pub pieces: Vec<PieceView>,
    pub entanglement: Vec<Vec<PieceId>>,
}

fn round4(p: f64) -> f64 {
    (p * 1e4).round() / 1e4
}

impl GameView {
    /// Probabilities are rounded to four decimals unless `exact` is set.
    pub fn new(state: &GameState, exact: bool) -> Self {
        let marginals = state.qstate().marginals();
        let pieces = state
            .pieces()
            .iter()
            .map(|p| PieceView {
                id: p.id,
                color: p.color,
                crowned: p.crowned,
                lineage: p.lineage,
                squares: p
                    .squares()
                    .map(|s| SquareProbability {
                        square: s,
                        probability: if exact {
                            marginals[s]
                        } else {
                            round4(marginals[s])
                        },
                    })
                    .collect(),
            })
            .collect();
        let entanglement = state
            .qstate()
            .components()
            .iter()
            .map(|c| {
                state
                    .pieces()
                    .iter()
                    .filter(|p| p.support & c.mask() != 0)
                    .map(|p| p.id)
                    .collect::<Vec<_>>()
            })
            .filter(|ids| ids.len() >= 2)
            .collect();
        GameView {
            geometry: state.geometry().clone(),
            level: state.level(),
            to_move: state.to_move(),
            outcome: state.outcome(),
            no_capture_plies: state.no_capture_plies(),
            ply_count: state.ply_count(),
            pieces,
            entanglement,
        }
    }
}
