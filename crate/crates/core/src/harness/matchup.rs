use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use super::{
    derive_seed, outcome_label, play_game, write_csv, write_text, ColorPlan, ExperimentConfig,
};
use crate::agents::{AgentSpec, MctsConfig};
use crate::error::{Error, Result};
use crate::game::Outcome;
use crate::rules::{BoardGeometry, Color, Move, QuantumnessLevel};

pub const MATCHUP_CSV: &str = "matchup.csv";
pub const MATCHUP_GAMES_CSV: &str = "matchup_games.csv";

/// Color assignment of one series, seen from agent A.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Series {
    AWhite,
    ABlack,
    Alternate,
}

impl Series {
    fn of_plan(plan: ColorPlan) -> &'static [Series] {
        match plan {
            ColorPlan::Both => &[Series::AWhite, Series::ABlack],
            ColorPlan::White => &[Series::AWhite],
            ColorPlan::Black => &[Series::ABlack],
            ColorPlan::Alternate => &[Series::Alternate],
        }
    }

    fn a_color(self, index: u32) -> Color {
        match self {
            Series::AWhite => Color::White,
            Series::ABlack => Color::Black,
            Series::Alternate if index.is_multiple_of(2) => Color::White,
            Series::Alternate => Color::Black,
        }
    }

    fn id(self) -> u64 {
        self as u64
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MatchupGame {
    pub index: u32,
    pub seed: u64,
    pub a_color: Color,
    pub outcome: Outcome,
    pub plies: u32,
    pub aborted: bool,
    pub moves: Vec<Move>,
}

impl MatchupGame {
    pub fn a_won(&self) -> bool {
        self.outcome.winner() == Some(self.a_color)
    }

    pub fn b_won(&self) -> bool {
        self.outcome.winner() == Some(self.a_color.opponent())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MatchupResult {
    pub agent_a: AgentSpec,
    pub agent_b: AgentSpec,
    pub board: usize,
    pub level: u8,
    pub draw_rule: bool,
    pub series: Series,
    pub games: u32,
    pub a_wins: u32,
    pub b_wins: u32,
    pub draws: u32,
    pub a_win_rate: f64,
    pub a_white_games: u32,
    pub a_white_wins: u32,
    pub a_black_games: u32,
    pub a_black_wins: u32,
    #[serde(skip)]
    pub log: Vec<MatchupGame>,
}

/// Agent seeds are derived from the game seed, so the logged seed alone
/// reproduces a game.
pub fn matchup_agent_seeds(game_seed: u64) -> (u64, u64) {
    (derive_seed(game_seed, &[10]), derive_seed(game_seed, &[11]))
}

#[allow(clippy::too_many_arguments)]
pub fn run_matchup(
    agent_a: AgentSpec,
    agent_b: AgentSpec,
    games: u32,
    geometry: &BoardGeometry,
    level: QuantumnessLevel,
    draw_rule: bool,
    series: Series,
    seed: u64,
) -> Result<MatchupResult> {
    if games == 0 {
        return Err(Error::Config("a matchup needs at least one game".into()));
    }
    let log = (0..games)
        .into_par_iter()
        .map(|i| {
            let game_seed = derive_seed(
                seed,
                &[
                    geometry.side() as u64,
                    geometry.setup_rows() as u64,
                    level.value() as u64,
                    draw_rule as u64,
                    series.id(),
                    i as u64,
                ],
            );
            let (seed_a, seed_b) = matchup_agent_seeds(game_seed);
            let mut a = agent_a.build(seed_a);
            let mut b = agent_b.build(seed_b);
            let a_color = series.a_color(i);
            let summary = match a_color {
                Color::White => play_game(
                    geometry,
                    level,
                    draw_rule,
                    game_seed,
                    a.as_mut(),
                    b.as_mut(),
                ),
                Color::Black => play_game(
                    geometry,
                    level,
                    draw_rule,
                    game_seed,
                    b.as_mut(),
                    a.as_mut(),
                ),
            }?;
            Ok(MatchupGame {
                index: i,
                seed: game_seed,
                a_color,
                outcome: summary.outcome,
                plies: summary.plies,
                aborted: summary.aborted,
                moves: summary.moves,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let count = |f: &dyn Fn(&MatchupGame) -> bool| log.iter().filter(|g| f(g)).count() as u32;
    let a_wins = count(&|g| g.a_won());
    Ok(MatchupResult {
        agent_a,
        agent_b,
        board: geometry.side(),
        level: level.value(),
        draw_rule,
        series,
        games,
        a_wins,
        b_wins: count(&|g| g.b_won()),
        draws: count(&|g| g.outcome == Outcome::Draw),
        a_win_rate: a_wins as f64 / games as f64,
        a_white_games: count(&|g| g.a_color == Color::White),
        a_white_wins: count(&|g| g.a_color == Color::White && g.a_won()),
        a_black_games: count(&|g| g.a_color == Color::Black),
        a_black_wins: count(&|g| g.a_color == Color::Black && g.a_won()),
        log,
    })
}

#[derive(Serialize)]
struct GameRow<'a> {
    board: usize,
    level: u8,
    series: Series,
    game: u32,
    seed: u64,
    a_color: String,
    outcome: &'static str,
    plies: u32,
    aborted: bool,
    moves: &'a str,
}

/// Runs the configured matchup series and writes the summary and per-game tables.
pub fn write_matchups(config: &ExperimentConfig, out: &Path) -> Result<Vec<MatchupResult>> {
    config.validate()?;
    let (a, b) = match config.agents.as_slice() {
        [] => (AgentSpec::Mcts(MctsConfig::default()), AgentSpec::Random),
        [a, b] => (*a, *b),
        _ => return Err(Error::Config("a matchup needs exactly two agents".into())),
    };
    let draw_rule = config.draw_rule_flag()?;
    std::fs::create_dir_all(out)?;
    let pool = config.pool()?;
    let mut results = Vec::new();
    for geo in config.geometries()? {
        for level in config.quantumness_levels()? {
            for &series in Series::of_plan(config.colors) {
                let r = pool.install(|| {
                    run_matchup(
                        a,
                        b,
                        config.games,
                        &geo,
                        level,
                        draw_rule,
                        series,
                        config.seed,
                    )
                })?;
                tracing::info!(
                    board = r.board,
                    level = r.level,
                    ?series,
                    rate = r.a_win_rate,
                    "series done"
                );
                results.push(r);
            }
        }
    }
    write_csv(&out.join(MATCHUP_CSV), &results)?;

    let mut games = csv::Writer::from_path(out.join(MATCHUP_GAMES_CSV))?;
    for r in &results {
        for g in &r.log {
            let moves = serde_json::to_string(&g.moves).map_err(|e| Error::Io(e.to_string()))?;
            games.serialize(GameRow {
                board: r.board,
                level: r.level,
                series: r.series,
                game: g.index,
                seed: g.seed,
                a_color: g.a_color.to_string(),
                outcome: outcome_label(g.outcome),
                plies: g.plies,
                aborted: g.aborted,
                moves: &moves,
            })?;
        }
    }
    games.flush()?;

    if config.gnuplot {
        let script = format!(
            "set datafile separator ','\n\
             set key autotitle columnhead\n\
             set style data histograms\n\
             set style fill solid\n\
             set yrange [0:1]\n\
             set ylabel '{a} win rate vs {b}'\n\
             set terminal pngcairo size 900,600\n\
             set output 'matchup.png'\n\
             plot '{MATCHUP_CSV}' using 11:xtic(sprintf('L%d %s', $4, strcol(6))) title '{a}'\n"
        );
        write_text(&out.join("matchup.gp"), &script)?;
    }
    Ok(results)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::replay_game;

    #[test]
    fn counts_add_up_and_replay() {
        let geo = BoardGeometry::new(5, 1).unwrap();
        let level = QuantumnessLevel::SUPERPOSITION;
        let r = run_matchup(
            "mcts:20".parse().unwrap(),
            AgentSpec::Random,
            6,
            &geo,
            level,
            true,
            Series::Alternate,
            4,
        )
        .unwrap();
        assert_eq!(r.a_wins + r.b_wins + r.draws, 6);
        assert_eq!(r.a_white_games, 3);
        assert_eq!(r.a_white_wins + r.a_black_wins, r.a_wins);
        for g in &r.log {
            let end = replay_game(&geo, level, true, g.seed, &g.moves).unwrap();
            assert_eq!(end.outcome(), g.outcome);
        }
    }

    #[test]
    fn fixed_series_keep_colors() {
        let geo = BoardGeometry::new(4, 1).unwrap();
        for (series, color) in [
            (Series::AWhite, Color::White),
            (Series::ABlack, Color::Black),
        ] {
            let r = run_matchup(
                AgentSpec::Random,
                AgentSpec::Random,
                4,
                &geo,
                QuantumnessLevel::CLASSICAL,
                true,
                series,
                0,
            )
            .unwrap();
            assert!(r.log.iter().all(|g| g.a_color == color));
        }
    }
}
