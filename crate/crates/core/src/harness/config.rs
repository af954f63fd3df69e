use std::path::Path;

use serde::Deserialize;

use crate::agents::AgentSpec;
use crate::error::{Error, Result};
use crate::rating::TrueSkillParams;
use crate::rules::{BoardGeometry, QuantumnessLevel};

/// Which no-capture draw settings to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum DrawRuleSetting {
    #[default]
    On,
    Off,
    Both,
}

impl DrawRuleSetting {
    pub fn values(self) -> &'static [bool] {
        match self {
            DrawRuleSetting::On => &[true],
            DrawRuleSetting::Off => &[false],
            DrawRuleSetting::Both => &[true, false],
        }
    }

    fn single(self) -> Result<bool> {
        match self {
            DrawRuleSetting::On => Ok(true),
            DrawRuleSetting::Off => Ok(false),
            DrawRuleSetting::Both => Err(Error::Config(
                "draw_rule = \"both\" is only supported for selfplay".into(),
            )),
        }
    }
}

/// Color protocol for matchups, seen from the first agent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ColorPlan {
    /// Two fixed-color series: first agent White, then first agent Black.
    #[default]
    Both,
    White,
    Black,
    Alternate,
}

/// Flat experiment configuration, read from TOML.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub sizes: Vec<usize>,
    pub setup_rows: usize,
    pub levels: Vec<u8>,
    /// Games per self-play cell, or per matchup series.
    pub games: u32,
    pub games_per_agent: u32,
    pub draw_rule: DrawRuleSetting,
    pub agents: Vec<AgentSpec>,
    pub colors: ColorPlan,
    pub seed: u64,
    pub beta: Option<f64>,
    pub tau: Option<f64>,
    pub draw_probability: Option<f64>,
    pub threads: Option<usize>,
    pub gnuplot: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            sizes: vec![8],
            setup_rows: 1,
            levels: vec![0, 1, 2, 3],
            games: 1000,
            games_per_agent: 150,
            draw_rule: DrawRuleSetting::On,
            agents: Vec::new(),
            colors: ColorPlan::Both,
            seed: 0,
            beta: None,
            tau: None,
            draw_probability: None,
            threads: None,
            gnuplot: true,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.games == 0 || self.games_per_agent == 0 {
            return Err(Error::Config("game counts must be at least 1".into()));
        }
        if self.sizes.is_empty() || self.levels.is_empty() {
            return Err(Error::Config("sizes and levels must not be empty".into()));
        }
        self.geometries()?;
        self.quantumness_levels()?;
        self.trueskill()?;
        if self.threads == Some(0) {
            return Err(Error::Config("threads must be positive".into()));
        }
        Ok(())
    }

    pub fn geometries(&self) -> Result<Vec<BoardGeometry>> {
        self.sizes
            .iter()
            .map(|&s| {
                BoardGeometry::new(s, self.setup_rows).map_err(|e| Error::Config(e.to_string()))
            })
            .collect()
    }

    pub fn quantumness_levels(&self) -> Result<Vec<QuantumnessLevel>> {
        self.levels
            .iter()
            .map(|&l| QuantumnessLevel::new(l).map_err(|e| Error::Config(e.to_string())))
            .collect()
    }

    pub fn trueskill(&self) -> Result<TrueSkillParams> {
        let d = TrueSkillParams::default();
        TrueSkillParams::new(
            self.beta.unwrap_or(d.beta),
            self.tau.unwrap_or(d.tau),
            self.draw_probability.unwrap_or(d.draw_probability),
        )
        .map_err(|e| Error::Config(e.to_string()))
    }

    /// The single draw-rule flag for matchups and tournaments.
    pub fn draw_rule_flag(&self) -> Result<bool> {
        self.draw_rule.single()
    }

    /// Builds a rayon pool honoring `threads`.
    pub(crate) fn pool(&self) -> Result<rayon::ThreadPool> {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(t) = self.threads {
            builder = builder.num_threads(t);
        }
        builder.build().map_err(|e| Error::Config(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_flat_config() {
        let c = ExperimentConfig::from_toml(
            r#"
            sizes = [5, 6]
            levels = [0, 2]
            games = 10
            draw_rule = "both"
            agents = ["random", "mcts:200:c=1.0"]
            colors = "alternate"
            seed = 7
            tau = 0.0
            "#,
        )
        .unwrap();
        assert_eq!(c.sizes, vec![5, 6]);
        assert_eq!(c.draw_rule.values(), &[true, false]);
        assert_eq!(c.agents.len(), 2);
        assert_eq!(c.colors, ColorPlan::Alternate);
        assert_eq!(c.trueskill().unwrap().tau, 0.0);
        assert!(c.draw_rule_flag().is_err());
    }

    #[test]
    fn defaults() {
        let c = ExperimentConfig::from_toml("").unwrap();
        assert_eq!(c, ExperimentConfig::default());
    }

    #[test]
    fn rejects_bad_values() {
        for text in [
            "games = 0",
            "sizes = [3]",
            "levels = [4]",
            "agents = [\"mcts:0\"]",
            "unknown = 1",
            "draw_rule = \"sometimes\"",
            "beta = -1.0",
            "setup_rows = 5",
        ] {
            assert!(ExperimentConfig::from_toml(text).is_err(), "{text}");
        }
    }
}
