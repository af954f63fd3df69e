use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{derive_seed, outcome_label, play_game, write_csv, write_text, ExperimentConfig};
use crate::agents::{AgentSpec, MctsConfig};
use crate::error::{Error, Result};
use crate::game::Outcome;
use crate::rating::{trueskill_update, GameResult, Rating, TrueSkillParams};
use crate::rules::{BoardGeometry, Move, QuantumnessLevel};

pub const TOURNAMENT_CSV: &str = "tournament.csv";
pub const TOURNAMENT_GAMES_CSV: &str = "tournament_games.csv";

#[derive(Clone, Debug, PartialEq)]
pub struct TournamentGame {
    pub index: u32,
    pub white: usize,
    pub black: usize,
    pub seed: u64,
    pub outcome: Outcome,
    pub plies: u32,
    pub aborted: bool,
    pub moves: Vec<Move>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TournamentResult {
    pub board: usize,
    pub level: u8,
    pub labels: Vec<String>,
    pub ratings: Vec<Rating>,
    pub games_played: Vec<u32>,
    pub games: Vec<TournamentGame>,
}

impl TournamentResult {
    pub fn rating_of(&self, label: &str) -> Option<Rating> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| self.ratings[i])
    }
}

/// Display labels; repeated specs get a `#k` suffix.
pub fn agent_labels(specs: &[AgentSpec]) -> Vec<String> {
    let mut labels = Vec::with_capacity(specs.len());
    for (i, s) in specs.iter().enumerate() {
        let seen = specs[..i].iter().filter(|o| *o == s).count();
        labels.push(if seen == 0 {
            s.to_string()
        } else {
            format!("{s}#{}", seen + 1)
        });
    }
    labels
}

/// Remaining quotas can still be paired off completely.
fn feasible(remaining: &[u32]) -> bool {
    let sum: u32 = remaining.iter().sum();
    let max = remaining.iter().copied().max().unwrap_or(0);
    sum.is_multiple_of(2) && max <= sum - max
}

/// Random pairings, as `(white, black)`, until every quota is used.
pub fn schedule_pairings<R: Rng + ?Sized>(
    quotas: &[u32],
    rng: &mut R,
) -> Result<Vec<(usize, usize)>> {
    if !feasible(quotas) {
        return Err(Error::Config(format!(
            "quotas {quotas:?} cannot be paired off"
        )));
    }
    let mut remaining = quotas.to_vec();
    let mut schedule = Vec::with_capacity(quotas.iter().sum::<u32>() as usize / 2);
    let mut options = Vec::new();
    loop {
        options.clear();
        for i in 0..remaining.len() {
            for j in i + 1..remaining.len() {
                if remaining[i] == 0 || remaining[j] == 0 {
                    continue;
                }
                remaining[i] -= 1;
                remaining[j] -= 1;
                if feasible(&remaining) {
                    options.push((i, j));
                }
                remaining[i] += 1;
                remaining[j] += 1;
            }
        }
        if options.is_empty() {
            break;
        }
        let (i, j) = options[rng.gen_range(0..options.len())];
        remaining[i] -= 1;
        remaining[j] -= 1;
        schedule.push(if rng.gen_bool(0.5) { (i, j) } else { (j, i) });
    }
    debug_assert!(remaining.iter().all(|&r| r == 0));
    Ok(schedule)
}

/// Plays a full tournament at one level and rates every agent.
#[allow(clippy::too_many_arguments)]
pub fn run_tournament(
    specs: &[AgentSpec],
    games_per_agent: u32,
    geometry: &BoardGeometry,
    level: QuantumnessLevel,
    draw_rule: bool,
    params: &TrueSkillParams,
    seed: u64,
) -> Result<TournamentResult> {
    if specs.len() < 2 {
        return Err(Error::Config(
            "a tournament needs at least two agents".into(),
        ));
    }
    let base = derive_seed(
        seed,
        &[
            geometry.side() as u64,
            geometry.setup_rows() as u64,
            level.value() as u64,
            draw_rule as u64,
        ],
    );
    let mut rng = ChaCha8Rng::seed_from_u64(base);
    let schedule = schedule_pairings(&vec![games_per_agent; specs.len()], &mut rng)?;

    let games = schedule
        .par_iter()
        .enumerate()
        .map(|(k, &(white, black))| {
            let game_seed = derive_seed(base, &[k as u64]);
            let mut w = specs[white].build(derive_seed(game_seed, &[20]));
            let mut b = specs[black].build(derive_seed(game_seed, &[21]));
            let s = play_game(
                geometry,
                level,
                draw_rule,
                game_seed,
                w.as_mut(),
                b.as_mut(),
            )?;
            Ok(TournamentGame {
                index: k as u32,
                white,
                black,
                seed: game_seed,
                outcome: s.outcome,
                plies: s.plies,
                aborted: s.aborted,
                moves: s.moves,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut ratings = vec![Rating::default(); specs.len()];
    let mut played = vec![0; specs.len()];
    for g in &games {
        let result = match g.outcome {
            Outcome::WhiteWins => GameResult::AWins,
            Outcome::BlackWins => GameResult::BWins,
            _ => GameResult::Draw,
        };
        let (w, b) = trueskill_update(ratings[g.white], ratings[g.black], result, params);
        ratings[g.white] = w;
        ratings[g.black] = b;
        played[g.white] += 1;
        played[g.black] += 1;
    }
    Ok(TournamentResult {
        board: geometry.side(),
        level: level.value(),
        labels: agent_labels(specs),
        ratings,
        games_played: played,
        games,
    })
}

#[derive(Serialize)]
struct RatingRow<'a> {
    agent: &'a str,
    level: u8,
    board: usize,
    games: u32,
    mu: f64,
    sigma: f64,
}

#[derive(Serialize)]
struct GameRow<'a> {
    board: usize,
    level: u8,
    game: u32,
    white: &'a str,
    black: &'a str,
    seed: u64,
    outcome: &'static str,
    plies: u32,
    aborted: bool,
    moves: &'a str,
}

pub fn default_tournament_agents() -> Vec<AgentSpec> {
    let mut v = vec![AgentSpec::Random];
    v.extend([200, 400, 800].map(|r| AgentSpec::Mcts(MctsConfig::with_rollouts(r))));
    v
}

/// Runs one tournament per configured size and level and writes the tables.
pub fn write_tournaments(config: &ExperimentConfig, out: &Path) -> Result<Vec<TournamentResult>> {
    config.validate()?;
    let specs = if config.agents.is_empty() {
        default_tournament_agents()
    } else {
        config.agents.clone()
    };
    let params = config.trueskill()?;
    let draw_rule = config.draw_rule_flag()?;
    std::fs::create_dir_all(out)?;
    let pool = config.pool()?;
    let mut results = Vec::new();
    for geo in config.geometries()? {
        for level in config.quantumness_levels()? {
            let r = pool.install(|| {
                run_tournament(
                    &specs,
                    config.games_per_agent,
                    &geo,
                    level,
                    draw_rule,
                    &params,
                    config.seed,
                )
            })?;
            tracing::info!(board = r.board, level = r.level, "tournament done");
            results.push(r);
        }
    }

    let mut rows = Vec::new();
    for r in &results {
        for (i, label) in r.labels.iter().enumerate() {
            rows.push(RatingRow {
                agent: label,
                level: r.level,
                board: r.board,
                games: r.games_played[i],
                mu: r.ratings[i].mu,
                sigma: r.ratings[i].sigma,
            });
        }
    }
    write_csv(&out.join(TOURNAMENT_CSV), &rows)?;

    let mut w = csv::Writer::from_path(out.join(TOURNAMENT_GAMES_CSV))?;
    for r in &results {
        for g in &r.games {
            let moves = serde_json::to_string(&g.moves).map_err(|e| Error::Io(e.to_string()))?;
            w.serialize(GameRow {
                board: r.board,
                level: r.level,
                game: g.index,
                white: &r.labels[g.white],
                black: &r.labels[g.black],
                seed: g.seed,
                outcome: outcome_label(g.outcome),
                plies: g.plies,
                aborted: g.aborted,
                moves: &moves,
            })?;
        }
    }
    w.flush()?;

    if config.gnuplot {
        let labels = agent_labels(&specs);
        let plots: Vec<String> = labels
            .iter()
            .map(|l| {
                format!(
                    "  '{TOURNAMENT_CSV}' using (strcol(1) eq '{l}' ? $2 : 1/0):5:6 with yerrorlines title '{l}'"
                )
            })
            .collect();
        let script = format!(
            "set datafile separator ','\n\
             set xlabel 'quantumness level'\n\
             set ylabel 'TrueSkill mu'\n\
             set xtics 1\n\
             set terminal pngcairo size 900,600\n\
             set output 'tournament.png'\n\
             plot \\\n{}\n",
            plots.join(", \\\n")
        );
        write_text(&out.join("tournament.gp"), &script)?;
    }
    Ok(results)
}
