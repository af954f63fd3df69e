//! Batch experiments: random self-play, matchups and TrueSkill tournaments.

mod config;
mod matchup;
mod selfplay;
mod tournament;

pub use config::{ColorPlan, DrawRuleSetting, ExperimentConfig};
pub use matchup::{
    matchup_agent_seeds, run_matchup, write_matchups, MatchupGame, MatchupResult, Series,
};
pub use selfplay::{run_selfplay, run_selfplay_cell, write_selfplay, CellStats};
pub use tournament::{
    agent_labels, default_tournament_agents, run_tournament, schedule_pairings, write_tournaments,
    TournamentGame, TournamentResult,
};

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::agents::Agent;
use crate::error::Result;
use crate::game::{GameState, Outcome};
use crate::rules::{BoardGeometry, Color, Move, QuantumnessLevel};

/// Hard stop for harness games; hitting it is scored as a draw.
pub const SAFETY_PLY_LIMIT: u32 = 10_000;

/// Deterministic seed for one game from a base seed and labels.
pub fn derive_seed(base: u64, parts: &[u64]) -> u64 {
    // splitmix64 finalizer, chained
    let mut h = base;
    for &p in parts.iter().chain(std::iter::once(&(parts.len() as u64))) {
        h = h.wrapping_add(p).wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = h;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        h = z ^ (z >> 31);
    }
    h
}

#[derive(Clone, Debug, PartialEq)]
pub struct GameSummary {
    pub seed: u64,
    pub outcome: Outcome,
    pub plies: u32,
    pub aborted: bool,
    pub moves: Vec<Move>,
}

impl GameSummary {
    pub fn winner(&self) -> Option<Color> {
        self.outcome.winner()
    }
}

/// Plays one game to the end. Measurements use the game's own generator.
pub fn play_game(
    geometry: &BoardGeometry,
    level: QuantumnessLevel,
    draw_rule: bool,
    seed: u64,
    white: &mut dyn Agent,
    black: &mut dyn Agent,
) -> Result<GameSummary> {
    let mut g = GameState::new(geometry.clone(), level, seed)?.with_draw_rule(draw_rule);
    let mut moves = Vec::new();
    while !g.is_over() {
        if g.ply_count() >= SAFETY_PLY_LIMIT {
            tracing::warn!(
                seed,
                level = level.value(),
                side = geometry.side(),
                "game aborted at the safety ply limit; scored as a draw"
            );
            return Ok(GameSummary {
                seed,
                outcome: Outcome::Draw,
                plies: g.ply_count(),
                aborted: true,
                moves,
            });
        }
        let mv = match g.to_move() {
            Color::White => white.select(&g)?,
            Color::Black => black.select(&g)?,
        };
        g.step(&mv)?;
        moves.push(mv);
    }
    Ok(GameSummary {
        seed,
        outcome: g.outcome(),
        plies: g.ply_count(),
        aborted: false,
        moves,
    })
}

/// Re-plays a logged game from its seed and move list.
pub fn replay_game(
    geometry: &BoardGeometry,
    level: QuantumnessLevel,
    draw_rule: bool,
    seed: u64,
    moves: &[Move],
) -> Result<GameState> {
    let mut g = GameState::new(geometry.clone(), level, seed)?.with_draw_rule(draw_rule);
    for mv in moves {
        g.step(mv)?;
    }
    Ok(g)
}

pub(crate) fn outcome_label(outcome: Outcome) -> &'static str {
    match outcome {
        Outcome::Ongoing => "ongoing",
        Outcome::WhiteWins => "white",
        Outcome::BlackWins => "black",
        Outcome::Draw => "draw",
    }
}

pub(crate) fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(text.as_bytes())?;
    Ok(())
}
