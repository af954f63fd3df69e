use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{derive_seed, play_game, write_csv, write_text, ExperimentConfig, GameSummary};
use crate::agents::AgentSpec;
use crate::error::Result;
use crate::game::Outcome;
use crate::rules::{BoardGeometry, QuantumnessLevel};

pub const SELFPLAY_CSV: &str = "selfplay.csv";

/// One row of the self-play table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellStats {
    pub board: usize,
    pub level: u8,
    pub draw_rule: bool,
    pub games: u32,
    pub mean_length: f64,
    pub std_length: f64,
    pub draw_rate: f64,
    pub white_wins: u32,
    pub black_wins: u32,
    pub aborted: u32,
}

impl CellStats {
    fn key(&self) -> (usize, u8, bool, u32) {
        (self.board, self.level, self.draw_rule, self.games)
    }

    fn from_games(
        geometry: &BoardGeometry,
        level: QuantumnessLevel,
        draw_rule: bool,
        games: &[GameSummary],
    ) -> Self {
        let n = games.len() as f64;
        let lengths: Vec<f64> = games.iter().map(|g| g.plies as f64).collect();
        let mean = lengths.iter().sum::<f64>() / n;
        let var = if games.len() > 1 {
            lengths.iter().map(|l| (l - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        let count = |o: Outcome| games.iter().filter(|g| g.outcome == o).count() as u32;
        CellStats {
            board: geometry.side(),
            level: level.value(),
            draw_rule,
            games: games.len() as u32,
            mean_length: mean,
            std_length: var.sqrt(),
            draw_rate: count(Outcome::Draw) as f64 / n,
            white_wins: count(Outcome::WhiteWins),
            black_wins: count(Outcome::BlackWins),
            aborted: games.iter().filter(|g| g.aborted).count() as u32,
        }
    }
}

fn cell_game_seed(
    seed: u64,
    geometry: &BoardGeometry,
    level: QuantumnessLevel,
    draw_rule: bool,
    index: u32,
) -> u64 {
    derive_seed(
        seed,
        &[
            geometry.side() as u64,
            geometry.setup_rows() as u64,
            level.value() as u64,
            draw_rule as u64,
            index as u64,
        ],
    )
}

/// Random-vs-random games for one (size, level, draw rule) cell.
pub fn run_selfplay_cell(
    geometry: &BoardGeometry,
    level: QuantumnessLevel,
    draw_rule: bool,
    games: u32,
    seed: u64,
) -> Result<(CellStats, Vec<GameSummary>)> {
    let results = (0..games)
        .into_par_iter()
        .map(|i| {
            let game_seed = cell_game_seed(seed, geometry, level, draw_rule, i);
            let mut white = AgentSpec::Random.build(derive_seed(game_seed, &[1]));
            let mut black = AgentSpec::Random.build(derive_seed(game_seed, &[2]));
            play_game(
                geometry,
                level,
                draw_rule,
                game_seed,
                white.as_mut(),
                black.as_mut(),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((
        CellStats::from_games(geometry, level, draw_rule, &results),
        results,
    ))
}

fn cells(config: &ExperimentConfig) -> Result<Vec<(BoardGeometry, QuantumnessLevel, bool)>> {
    let mut out = Vec::new();
    for &rule in config.draw_rule.values() {
        for geo in config.geometries()? {
            for level in config.quantumness_levels()? {
                out.push((geo.clone(), level, rule));
            }
        }
    }
    Ok(out)
}

/// All self-play cells of a config, in memory.
pub fn run_selfplay(config: &ExperimentConfig) -> Result<Vec<CellStats>> {
    config.validate()?;
    let pool = config.pool()?;
    pool.install(|| {
        cells(config)?
            .into_iter()
            .map(|(geo, level, rule)| {
                run_selfplay_cell(&geo, level, rule, config.games, config.seed).map(|r| r.0)
            })
            .collect()
    })
}

/// Runs the self-play experiment into `out`, skipping cells already present in
/// an existing table. The table is rewritten after every cell.
pub fn write_selfplay(config: &ExperimentConfig, out: &Path) -> Result<Vec<CellStats>> {
    config.validate()?;
    std::fs::create_dir_all(out)?;
    let path = out.join(SELFPLAY_CSV);
    let previous: Vec<CellStats> = if path.exists() {
        csv::Reader::from_path(&path)?
            .deserialize()
            .collect::<std::result::Result<_, _>>()?
    } else {
        Vec::new()
    };
    let pool = config.pool()?;
    let mut rows = Vec::new();
    for (geo, level, rule) in cells(config)? {
        let key = (geo.side(), level.value(), rule, config.games);
        let row = match previous.iter().find(|r| r.key() == key) {
            Some(r) => {
                tracing::info!(
                    board = key.0,
                    level = key.1,
                    draw_rule = rule,
                    "cell already done"
                );
                r.clone()
            }
            None => {
                let (row, _) = pool
                    .install(|| run_selfplay_cell(&geo, level, rule, config.games, config.seed))?;
                tracing::info!(
                    board = key.0,
                    level = key.1,
                    draw_rule = rule,
                    mean = row.mean_length,
                    "cell done"
                );
                row
            }
        };
        rows.push(row);
        write_csv(&path, &rows)?;
    }
    if config.gnuplot {
        write_text(&out.join("selfplay.gp"), &gnuplot_script(config))?;
    }
    Ok(rows)
}

fn gnuplot_script(config: &ExperimentConfig) -> String {
    let mut s = String::from(
        "set datafile separator ','\n\
         set key autotitle columnhead\n\
         set xlabel 'board size'\n\
         set ylabel 'mean game length (plies)'\n\
         set terminal pngcairo size 900,600\n\
         set output 'selfplay.png'\n\
         plot \\\n",
    );
    let mut series = Vec::new();
    for &rule in config.draw_rule.values() {
        for &l in &config.levels {
            let label = format!("level {l}{}", if rule { "" } else { ", no draws" });
            series.push(format!(
                "  '{SELFPLAY_CSV}' using ($2=={l} && strcol(3) eq '{rule}' ? $1 : 1/0):5:6 \
                 with yerrorlines title '{label}'"
            ));
        }
    }
    s.push_str(&series.join(", \\\n"));
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cell_is_deterministic() {
        let geo = BoardGeometry::new(5, 1).unwrap();
        let level = QuantumnessLevel::SUPERPOSITION;
        let (a, ga) = run_selfplay_cell(&geo, level, true, 20, 3).unwrap();
        let (b, gb) = run_selfplay_cell(&geo, level, true, 20, 3).unwrap();
        assert_eq!(a, b);
        assert_eq!(ga, gb);
        assert_eq!(a.games, 20);
        assert_eq!(
            a.white_wins + a.black_wins + (a.draw_rate * 20.0).round() as u32,
            20
        );
    }

    #[test]
    fn resume_skips_finished_cells() {
        let dir = std::env::temp_dir().join(format!("cheqqers-selfplay-{}", std::process::id()));
        let _ = std::fs::remove_dir_all(&dir);
        let mut config = ExperimentConfig {
            sizes: vec![4, 5],
            levels: vec![0, 1],
            games: 5,
            ..ExperimentConfig::default()
        };
        let first = write_selfplay(&config, &dir).unwrap();
        assert_eq!(first.len(), 4);
        let text = std::fs::read_to_string(dir.join(SELFPLAY_CSV)).unwrap();
        assert!(text.starts_with(
            "board,level,draw_rule,games,mean_length,std_length,draw_rate,white_wins,black_wins,aborted"
        ));
        // a tampered row proves it is reused rather than recomputed
        let tampered = text.replacen("\n4,0,true,5,", "\n4,0,true,5,999", 1);
        std::fs::write(dir.join(SELFPLAY_CSV), tampered).unwrap();
        config.levels = vec![0, 1, 2];
        let second = write_selfplay(&config, &dir).unwrap();
        assert_eq!(second.len(), 6);
        assert!(second[0].mean_length > 999.0);
        assert_eq!(second[1], first[1]);
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
